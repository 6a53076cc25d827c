//! `skeleta`: run a JSON scene through one of the kernels.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use skeleta::Error;
use skeleta_cli::{execute, exit_code, Format, Task};

#[derive(Parser)]
#[command(name = "skeleta", version, about = "Skeleta, retractions and PL flows on the projective line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Skeleton of a divisor as a metric tree.
    Skeleton(RunArgs),
    /// Divisor-stopped retraction of points onto a skeleton.
    Retract(RunArgs),
    /// Root-valuation profile of a cover along an outward path.
    Newton(RunArgs),
    /// Tropicalization of points by a polynomial tuple.
    Trop(RunArgs),
    /// Piecewise-linear flow on a cell complex.
    Flow(RunArgs),
    /// Fingerprint sweep over a divisor family.
    Family(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scene file (JSON).
    #[arg(long)]
    scene: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Run the invariant suite of the task on the instance.
    #[arg(long)]
    check: bool,
    /// Seed for sampled invariants.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn run(task: Task, args: &RunArgs) -> Result<bool, Error> {
    let artifact = execute(task, &args.scene, args.format, args.check.then_some(args.seed))?;
    match args.out.clone().or(artifact.path) {
        Some(path) => std::fs::write(&path, &artifact.text)
            .map_err(|e| Error::malformed(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(artifact.text.as_bytes()).map_err(|e| Error::malformed(e.to_string()))?;
        }
    }
    Ok(artifact.check_passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (task, args) = match &cli.command {
        Command::Skeleton(a) => (Task::Skeleton, a),
        Command::Retract(a) => (Task::Retract, a),
        Command::Newton(a) => (Task::Newton, a),
        Command::Trop(a) => (Task::Trop, a),
        Command::Flow(a) => (Task::Flow, a),
        Command::Family(a) => (Task::Family, a),
    };
    match run(task, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: invariant check failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
