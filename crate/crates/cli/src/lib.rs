//! Scene loading, task runners and renderers behind the `skeleta` binary.

pub mod check;
pub mod render;
pub mod scene;
pub mod tasks;

use std::path::Path;

use clap::ValueEnum;
use skeleta::{Error, Result};

pub use crate::scene::{Scene, Task};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Svg,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format> {
        Format::from_str(s, true).map_err(|_| Error::malformed(format!("unknown format {s}")))
    }
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Malformed(_) => 1,
        Error::Precondition(_) | Error::Undefined(_) => 2,
        Error::Inconsistency(_) => 3,
    }
}

/// Output of one scene run.
pub struct Artifact {
    pub text: String,
    /// Destination named by the scene, if any.
    pub path: Option<std::path::PathBuf>,
    pub check_passed: bool,
}

/// Runs a scene file. `format` overrides the scene's choice; `check` carries
/// the seed of the invariant suite.
pub fn execute(task: Task, scene: &Path, format: Option<Format>, check: Option<u64>) -> Result<Artifact> {
    let scene = Scene::load(scene, task)?;
    let format = match (format, scene.output.format.as_deref()) {
        (Some(f), _) => f,
        (None, Some(s)) => Format::parse(s)?,
        (None, None) => Format::Json,
    };
    let report = tasks::run(&scene, check)?;
    Ok(Artifact {
        text: report.render(format, task)?,
        path: scene.output.path.clone(),
        check_passed: report.check_passed,
    })
}
