//! Per-task invariant suites run by `--check` on the scene's own instance.
//! Sampled quantities (extra points, times, scalars) come from `--seed`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use skeleta::gamma::{frac, GammaValue, Rational};
use skeleta::gflow::{CellComplex, ComplexSpec};
use skeleta::newton::{coeff_val_path, newton_polygon, RootProfile};
use skeleta::pline::{on_skeleton, psi_d, retract, skeleton, Chart, Divisor, PLinePoint};
use skeleta::topo::{tree_fingerprint_marked, DivisorFamily, FiniteMetricTree, SweepReport};
use skeleta::trop::{tau_h, PolyTuple, TropInput};
use skeleta::valfield::ValuedField;

use crate::tasks::{random_elem, rng};

pub struct Checks {
    seed: u64,
    results: Vec<(String, bool)>,
}

impl Checks {
    fn new(seed: u64) -> Self {
        Checks { seed, results: Vec::new() }
    }

    fn record(&mut self, name: &str, ok: bool) {
        match self.results.iter_mut().find(|(n, _)| n == name) {
            Some((_, v)) => *v &= ok,
            None => self.results.push((name.to_string(), ok)),
        }
    }

    pub fn passed(&self) -> bool {
        self.results.iter().all(|(_, ok)| *ok)
    }

    pub fn to_json(&self) -> Value {
        let props: Map<String, Value> = self.results.iter().map(|(n, ok)| (n.clone(), json!(ok))).collect();
        json!({"seed": self.seed, "properties": props, "passed": self.passed()})
    }
}

fn random_point<F: ValuedField>(k: &F, r: &mut ChaCha8Rng) -> PLinePoint<F::Elem> {
    let c = random_elem(k, r);
    match r.gen_range(0..4) {
        0 => PLinePoint::simple(k, &c),
        1 => PLinePoint::infinity(k),
        _ => {
            let radius = GammaValue::Finite(frac(r.gen_range(-4i64..=12), r.gen_range(1i64..=3)));
            PLinePoint::ball(k, Chart::Std, &c, radius)
        }
    }
}

fn random_time<R: Rng>(r: &mut R) -> GammaValue {
    if r.gen_bool(0.1) {
        GammaValue::Infinity
    } else {
        GammaValue::Finite(frac(r.gen_range(0i64..=40), r.gen_range(1i64..=4)))
    }
}

/// Retraction axioms at the divisor points, the skeleton vertices and sampled
/// points of the line.
pub fn retraction<F: ValuedField>(k: &F, d: &Divisor<F::Elem>, seed: u64) -> Checks {
    let mut checks = Checks::new(seed);
    let mut r = rng(seed);
    let sk = skeleton(k, d);
    let mut pts: Vec<PLinePoint<F::Elem>> = d.points().to_vec();
    pts.extend(sk.points.iter().cloned());
    pts.extend((0..24).map(|_| random_point(k, &mut r)));
    for v in &sk.points {
        checks.record("skeleton vertices lie on the skeleton", on_skeleton(k, v, d));
    }
    for a in &pts {
        checks.record("psi_D(inf, a) = a", psi_d(k, &GammaValue::Infinity, a, d).ok().as_ref() == Some(a));
        let ra = retract(k, a, d);
        checks.record("retract is idempotent", retract(k, &ra, d) == ra);
        checks.record("retract lands on the skeleton", on_skeleton(k, &ra, d));
        for _ in 0..5 {
            let t = random_time(&mut r);
            let moved = psi_d(k, &t, a, d);
            checks.record("psi_D(0, psi_D(t, a)) = psi_D(0, a)", moved.is_ok_and(|m| retract(k, &m, d) == ra));
            checks.record("the skeleton is fixed", psi_d(k, &t, &ra, d).ok().as_ref() == Some(&ra));
        }
    }
    checks
}

/// The profile covers `[0, ∞]` with constant mass, and at sampled `t` its
/// valuations are the slopes of the Newton polygon of the coefficient values.
pub fn newton<F: ValuedField>(k: &F, f: &[Vec<F::Elem>], c: &F::Elem, profile: &RootProfile, seed: u64) -> Checks {
    let mut checks = Checks::new(seed);
    let pieces = &profile.pieces;
    let contiguous = pieces.first().is_some_and(|p| p.start == Rational::from_integer(0.into()))
        && pieces.last().is_some_and(|p| p.end.is_infinite())
        && pieces.windows(2).all(|w| w[0].end == GammaValue::Finite(w[1].start.clone()));
    checks.record("pieces tile [0, inf]", contiguous);
    let mass = pieces.first().map_or(0, |p| p.mass());
    checks.record("root count is constant", pieces.iter().all(|p| p.mass() == mass));
    let paths: Option<Vec<_>> = f.iter().map(|a| coeff_val_path(k, a, c).ok()).collect();
    let Some(paths) = paths else {
        checks.record("coefficient paths exist", false);
        return checks;
    };
    let mut r = rng(seed);
    let mut times: Vec<GammaValue> = pieces.iter().map(|p| GammaValue::Finite(p.start.clone())).collect();
    times.extend((0..32).map(|_| GammaValue::Finite(frac(r.gen_range(0i64..=80), r.gen_range(1i64..=6)))));
    for t in &times {
        let vals: Option<Vec<GammaValue>> = paths.iter().map(|p| p.eval(t).ok()).collect();
        let expected = vals.and_then(|v| newton_polygon(&v).ok()).map(|np| {
            let mut roots = np.root_valuations();
            roots.sort();
            roots
        });
        checks.record(
            "valuations match the Newton polygon",
            expected.is_some() && profile.valuations_at(t).ok() == expected,
        );
    }
    checks
}

/// Scaling `h` or the homogeneous coordinates by a unit of any valuation
/// leaves `τ_h` unchanged.
pub fn trop<F: ValuedField>(k: &F, h: &PolyTuple<F::Elem>, inputs: &[TropInput<F::Elem>], seed: u64) -> Checks {
    let mut checks = Checks::new(seed);
    let mut r = rng(seed);
    for x in inputs {
        let base = tau_h(k, h, x);
        for _ in 0..4 {
            let lambda = random_elem(k, &mut r);
            let scaled = tau_h(k, &h.scale(k, &lambda), x);
            checks.record("invariant under scaling h", base.is_ok() && scaled == base);
            if let TropInput::Projective(coords) = x {
                let moved = TropInput::Projective(coords.iter().map(|c| k.mul(c, &lambda)).collect());
                checks.record("invariant under scaling coordinates", tau_h(k, h, &moved) == base);
            }
        }
    }
    checks
}

/// Flow laws at the scene's starts with sampled times.
pub fn flow(complex: &CellComplex, spec: &ComplexSpec, starts: &[Vec<GammaValue>], seed: u64) -> Checks {
    let mut checks = Checks::new(seed);
    let mut r = rng(seed);
    let cells = complex.enumerate_cells(true).map(|c| c.len()).unwrap_or(0);
    let bounds = if spec.region.is_empty() { None } else { complex.compact_core_bounds().ok() };
    let h = complex.h();
    for x in starts {
        let Ok(full) = complex.flow(&GammaValue::Infinity, x) else {
            checks.record("flow is defined", false);
            continue;
        };
        let end = &full.endpoint;
        checks.record("endpoint lies in W_0", full.settled && complex.final_image_membership(end).unwrap_or(false));
        checks.record("W_0 is fixed", complex.flow(&GammaValue::Infinity, end).is_ok_and(|f| &f.endpoint == end));
        checks.record("terminates within the cell count", full.trajectory.len() <= cells.max(1));
        checks.record(
            "visited dimensions strictly decrease",
            full.trajectory.windows(2).all(|w| w[0].dimension > w[1].dimension),
        );
        for _ in 0..6 {
            let (s, t) = (random_time(&mut r), random_time(&mut r));
            let ok = (|| {
                let first = complex.flow(&t, x).ok()?;
                let composed = complex.flow(&s, &first.endpoint).ok()?;
                Some(composed.endpoint == complex.flow(&(&s + &t), x).ok()?.endpoint)
            })();
            checks.record("semigroup law", ok == Some(true));
        }
        let finite = |v: &[GammaValue]| v.iter().map(|g| g.finite().cloned()).collect::<Option<Vec<Rational>>>();
        if let (Some(a), Some(b)) = (finite(x), finite(end)) {
            checks.record("xi is invariant", complex.xi().iter().all(|xi| xi.eval(&a) == xi.eval(&b)));
            if let Some(bounds) = &bounds {
                let ok =
                    (0..b.len()).all(|i| b[i] <= Rational::from_integer(bounds.m[i].into()) * &b[h] + &bounds.c[i]);
                checks.record("compact-core bound holds", ok);
            }
        }
    }
    checks
}

/// Each class is a single marked shape, and recomputing sampled members
/// lands in the class that holds them.
pub fn family<F: ValuedField>(
    k: &F,
    family: &DivisorFamily<F::Elem>,
    report: &SweepReport<F::Elem>,
    seed: u64,
) -> Checks {
    let mut checks = Checks::new(seed);
    let mut r = rng(seed);
    let shape_of = |b: &F::Elem| -> Option<String> {
        let (d, marks) = family.at(k, b).ok()?;
        let sk = skeleton(k, &d);
        let mut vertices = sk.tree.vertices().to_vec();
        for v in vertices.iter_mut() {
            v.mark = v.mark.map(|i| marks[i]);
        }
        let tree = FiniteMetricTree::new(vertices, sk.tree.edges().to_vec()).ok()?;
        Some(tree_fingerprint_marked(&tree).shape)
    };
    for class in &report.classes {
        checks
            .record("class example has the class shape", tree_fingerprint_marked(&class.example).shape == class.shape);
        for _ in 0..4.min(class.samples.len()) {
            let b = &class.samples[r.gen_range(0..class.samples.len())];
            checks.record("members recompute to their class", shape_of(b).as_deref() == Some(class.shape.as_str()));
        }
    }
    let mut shapes: Vec<&str> = report.classes.iter().map(|c| c.shape.as_str()).collect();
    shapes.sort();
    shapes.dedup();
    checks.record("classes are distinct", shapes.len() == report.classes.len());
    checks
}
