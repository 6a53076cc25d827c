//! One runner per task. Each produces a JSON document and, where it makes
//! sense, DOT, SVG or CSV renderings.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use skeleta::gamma::{format_rational, frac, GammaValue};
use skeleta::gflow::{build_complex, ComplexSpec};
use skeleta::newton::{branch_events, residual_split, root_valuations_along_path};
use skeleta::pline::{locate_on_skeleton, psi_d, retract, rho, skeleton, Divisor, PLinePoint, SkeletonPosition};
use skeleta::topo::{family_sweep, tree_fingerprint, DivisorFamily, FamilyMember};
use skeleta::trop::{tau_h, MPoly, PolyTuple, TropInput};
use skeleta::valfield::{FieldSpec, PAdic, TAdic, ValuedField};
use skeleta::{Error, Result};

use crate::check::{self, Checks};
use crate::render;
use crate::scene::{Scene, Task};
use crate::Format;

pub struct Report {
    pub json: Value,
    pub dot: Option<String>,
    pub svg: Option<String>,
    pub csv: Option<String>,
    pub check_passed: bool,
}

impl Report {
    fn new(json: Value) -> Self {
        Report { json, dot: None, svg: None, csv: None, check_passed: true }
    }

    fn with_checks(mut self, checks: Option<Checks>) -> Self {
        if let Some(c) = checks {
            self.check_passed = c.passed();
            self.json["check"] = c.to_json();
        }
        self
    }

    pub fn render(&self, format: Format, task: Task) -> Result<String> {
        let missing = || Error::malformed(format!("format {format:?} is not available for the {task} task"));
        match format {
            Format::Json => Ok(render::json(&self.json)),
            Format::Dot => self.dot.clone().ok_or_else(missing),
            Format::Svg => self.svg.clone().ok_or_else(missing),
            Format::Csv => self.csv.clone().ok_or_else(missing),
        }
    }
}

pub fn run(scene: &Scene, seed: Option<u64>) -> Result<Report> {
    let mut report = match scene.task {
        Task::Flow => flow(scene, seed)?,
        _ => match scene.field.clone().expect("validated scene") {
            FieldSpec::Padic { p } => with_field(&PAdic::new(p)?, scene, seed)?,
            FieldSpec::Tadic => with_field(&TAdic::new(), scene, seed)?,
        },
    };
    let obj = report.json.as_object_mut().expect("reports are objects");
    obj.insert("task".into(), json!(scene.task.name()));
    if let Some(f) = &scene.field {
        obj.insert("field".into(), serde_json::to_value(f).expect("field spec serializes"));
    }
    Ok(report)
}

fn with_field<F: ValuedField>(k: &F, scene: &Scene, seed: Option<u64>) -> Result<Report> {
    match scene.task {
        Task::Skeleton => skeleton_task(k, scene, seed),
        Task::Retract => retract_task(k, scene, seed),
        Task::Newton => newton_task(k, scene, seed),
        Task::Trop => trop_task(k, scene, seed),
        Task::Family => family_task(k, scene, seed),
        Task::Flow => unreachable!("flows carry no field"),
    }
}

fn list<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::malformed(format!("{what} must be a list")))
}

pub fn gamma(v: &Value) -> Result<GammaValue> {
    match v {
        Value::String(s) => s.parse(),
        Value::Number(n) => {
            n.as_i64().map(GammaValue::from_int).ok_or_else(|| Error::malformed(format!("bad value {n}")))
        }
        other => Err(Error::malformed(format!("expected a value in Q or inf, got {other}"))),
    }
}

fn points<F: ValuedField>(k: &F, v: &Value, what: &str) -> Result<Vec<PLinePoint<F::Elem>>> {
    list(v, what)?.iter().map(|p| PLinePoint::from_json(k, p)).collect()
}

fn points_json<F: ValuedField>(k: &F, pts: &[PLinePoint<F::Elem>]) -> Value {
    Value::Array(pts.iter().map(|p| p.to_json(k)).collect())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `(u/d)·π^e` with small nonzero `u` and small `d`, `e`.
pub fn random_elem<F: ValuedField>(k: &F, rng: &mut ChaCha8Rng) -> F::Elem {
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let q = frac(sign * rng.gen_range(1i64..=20), rng.gen_range(1i64..=7));
    k.mul(&k.from_rational(&q), &k.uniformizer_pow(rng.gen_range(-2i64..=3)))
}

fn skeleton_task<F: ValuedField>(k: &F, scene: &Scene, seed: Option<u64>) -> Result<Report> {
    let d = Divisor::new(points(k, scene.get("divisor")?, "divisor")?)?;
    let sk = skeleton(k, &d);
    let fp = tree_fingerprint(&sk.tree);
    let json = json!({
        "divisor": points_json(k, d.points()),
        "points": points_json(k, &sk.points),
        "tree": serde_json::to_value(&sk.tree).expect("tree serializes"),
        "fingerprint": serde_json::to_value(&fp).expect("fingerprint serializes"),
    });
    let mut report = Report::new(json);
    report.dot = Some(sk.tree.to_dot("skeleton"));
    report.csv = Some(render::edges_csv(&sk.tree));
    Ok(report.with_checks(seed.map(|s| check::retraction(k, &d, s))))
}

fn retract_task<F: ValuedField>(k: &F, scene: &Scene, seed: Option<u64>) -> Result<Report> {
    let d = Divisor::new(points(k, scene.get("divisor")?, "divisor")?)?;
    let pts = points(k, scene.get("points")?, "points")?;
    let times: Vec<GammaValue> = match scene.block.get("times") {
        Some(v) => list(v, "times")?.iter().map(gamma).collect::<Result<_>>()?,
        None => vec![],
    };
    let sk = skeleton(k, &d);
    let mut rows = Vec::new();
    let mut csv = String::from("point,rho,retract,position\n");
    for a in &pts {
        let r = retract(k, a, &d);
        let position = match locate_on_skeleton(k, &sk, &r) {
            Some(SkeletonPosition::Vertex(i)) => json!({"vertex": i}),
            Some(SkeletonPosition::Edge(e)) => json!({"edge": e}),
            None => return Err(Error::inconsistency(format!("retraction of {a} is off the skeleton"))),
        };
        let path: Vec<Value> = times
            .iter()
            .map(|t| Ok(json!({"t": t.to_string(), "point": psi_d(k, t, a, &d)?.to_json(k)})))
            .collect::<Result<_>>()?;
        let rho = rho(k, a, &d);
        csv.push_str(&format!("\"{a}\",{rho},\"{r}\",{}\n", render::compact(&position)));
        rows.push(json!({
            "point": a.to_json(k),
            "rho": rho.to_string(),
            "retract": r.to_json(k),
            "position": position,
            "path": path,
        }));
    }
    let json = json!({
        "divisor": points_json(k, d.points()),
        "skeleton": serde_json::to_value(&sk.tree).expect("tree serializes"),
        "retractions": rows,
    });
    let mut report = Report::new(json);
    report.dot = Some(sk.tree.to_dot("skeleton"));
    report.csv = Some(csv);
    Ok(report.with_checks(seed.map(|s| check::retraction(k, &d, s))))
}

fn newton_task<F: ValuedField>(k: &F, scene: &Scene, seed: Option<u64>) -> Result<Report> {
    let f: Vec<Vec<F::Elem>> = list(scene.get("F")?, "F")?
        .iter()
        .map(|row| list(row, "row of F")?.iter().map(|c| k.elem_from_json(c)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let c = k.elem_from_json(scene.get("center")?)?;
    let profile = root_valuations_along_path(k, &f, &c)?;
    let events: Vec<String> = branch_events(&profile).iter().map(ToString::to_string).collect();
    let mut residual = Vec::new();
    if let Some(v) = scene.block.get("residual") {
        for r in list(v, "residual")? {
            let r = r.as_i64().ok_or_else(|| Error::malformed("residual radii must be integers"))?;
            residual.push(json!({"r": r, "split": residual_split(k, &f, &c, r)?}));
        }
    }
    let json = json!({
        "center": k.elem_to_json(&c),
        "profile": serde_json::to_value(&profile).expect("profile serializes"),
        "summary": profile.pieces.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "branch_events": events,
        "residual": residual,
    });
    let mut report = Report::new(json);
    report.svg = Some(render::profile_svg(&profile));
    report.csv = Some(render::profile_csv(&profile));
    Ok(report.with_checks(seed.map(|s| check::newton(k, &f, &c, &profile, s))))
}

fn trop_task<F: ValuedField>(k: &F, scene: &Scene, seed: Option<u64>) -> Result<Report> {
    let raw = list(scene.get("h")?, "h")?;
    let nvars = raw
        .first()
        .and_then(|p| p.as_array()?.first()?.get("e")?.as_array().map(Vec::len))
        .ok_or_else(|| Error::malformed("h must start with a nonzero polynomial"))?;
    let polys: Vec<MPoly<F::Elem>> = raw.iter().map(|p| MPoly::from_json(k, nvars, p)).collect::<Result<_>>()?;
    let degree = match scene.block.get("degree") {
        Some(d) => d.as_u64().and_then(|d| u32::try_from(d).ok()).ok_or_else(|| Error::malformed("bad degree"))?,
        None => polys.iter().filter_map(MPoly::degree).max().unwrap_or(0),
    };
    let h = PolyTuple::new(degree, polys)?;
    let mut inputs = Vec::new();
    for v in list(scene.get("points")?, "points")? {
        let input = match v.get("projective") {
            Some(coords) => TropInput::Projective(
                list(coords, "projective")?.iter().map(|c| k.elem_from_json(c)).collect::<Result<_>>()?,
            ),
            None => TropInput::Line(PLinePoint::from_json(k, v)?),
        };
        inputs.push(input);
    }
    let mut rows = Vec::new();
    let mut csv = String::from("index");
    for i in 0..h.polys().len() {
        csv.push_str(&format!(",v{i}"));
    }
    csv.push('\n');
    for (i, x) in inputs.iter().enumerate() {
        let image = tau_h(k, &h, x)?;
        csv.push_str(&i.to_string());
        for c in image.coords() {
            csv.push_str(&format!(",{c}"));
        }
        csv.push('\n');
        let input = match x {
            TropInput::Projective(c) => json!({"projective": c.iter().map(|e| k.elem_to_json(e)).collect::<Vec<_>>()}),
            TropInput::Line(p) => p.to_json(k),
        };
        rows.push(json!({"input": input, "image": serde_json::to_value(&image).expect("point serializes")}));
    }
    let json = json!({"degree": degree, "images": rows});
    let mut report = Report::new(json);
    report.csv = Some(csv);
    Ok(report.with_checks(seed.map(|s| check::trop(k, &h, &inputs, s))))
}

fn flow(scene: &Scene, seed: Option<u64>) -> Result<Report> {
    let spec: ComplexSpec = serde_json::from_value(Value::Object(scene.block.clone()))
        .map_err(|e| Error::malformed(format!("flow block: {e}")))?;
    let complex = build_complex(&spec)?;
    let starts: Vec<Vec<GammaValue>> = match (scene.block.get("start"), scene.block.get("starts")) {
        (Some(s), None) => vec![list(s, "start")?.iter().map(gamma).collect::<Result<_>>()?],
        (None, Some(ss)) => list(ss, "starts")?
            .iter()
            .map(|s| list(s, "start")?.iter().map(gamma).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?,
        _ => return Err(Error::malformed("flow block needs exactly one of start and starts")),
    };
    let t = match scene.block.get("t") {
        Some(v) => gamma(v)?,
        None => GammaValue::Infinity,
    };
    let mut flows = Vec::new();
    let mut csv = String::from("flow,step,time,dimension,cell,direction\n");
    let results = complex.flow_batch(&t, &starts);
    for (i, (x, result)) in starts.iter().zip(results).enumerate() {
        let result = result?;
        for (j, s) in result.trajectory.iter().enumerate() {
            let dir: Vec<String> = s.direction.iter().map(format_rational).collect();
            csv.push_str(&format!("{i},{j},{},{},\"{}\",\"{}\"\n", s.time, s.dimension, s.cell, dir.join(" ")));
        }
        flows.push(json!({
            "start": x.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "t": t.to_string(),
            "result": serde_json::to_value(&result).expect("flow result serializes"),
        }));
    }
    let mut json = json!({
        "coords": complex.coords(),
        "h": complex.coords()[complex.h()],
        "functionals": serde_json::to_value(complex.functionals()).expect("forms serialize"),
        "flows": flows,
    });
    if !spec.region.is_empty() {
        json["core_bounds"] = serde_json::to_value(complex.compact_core_bounds()?).expect("bounds serialize");
    }
    let mut report = Report::new(json);
    report.csv = Some(csv);
    Ok(report.with_checks(seed.map(|s| check::flow(&complex, &spec, &starts, s))))
}

fn family_task<F: ValuedField>(k: &F, scene: &Scene, seed: Option<u64>) -> Result<Report> {
    let members = list(scene.get("members")?, "members")?
        .iter()
        .map(|m| match m {
            Value::String(s) if s == "inf" => Ok(FamilyMember::Infinity),
            Value::Object(o) if o.contains_key("coefficient") || o.contains_key("constant") => {
                let get = |key: &str| o.get(key).map_or_else(|| Ok(k.zero()), |v| k.elem_from_json(v));
                Ok(FamilyMember::Affine { constant: get("constant")?, coefficient: get("coefficient")? })
            }
            other => Ok(FamilyMember::Affine { constant: k.elem_from_json(other)?, coefficient: k.zero() }),
        })
        .collect::<Result<Vec<_>>>()?;
    let family = DivisorFamily { members };
    let samples: Vec<F::Elem> = match scene.get("samples")? {
        Value::Array(items) => items.iter().map(|v| k.elem_from_json(v)).collect::<Result<_>>()?,
        Value::Object(o) => {
            let count =
                o.get("count").and_then(Value::as_u64).ok_or_else(|| Error::malformed("samples need a count"))?;
            let mut r = rng(o.get("seed").and_then(Value::as_u64).unwrap_or(0));
            let members = family.members.len();
            // generated samples keep the members pairwise distinct
            let mut out = Vec::new();
            while (out.len() as u64) < count {
                let b = random_elem(k, &mut r);
                if family.at(k, &b).is_ok_and(|(d, _)| d.len() == members) {
                    out.push(b);
                }
            }
            out
        }
        _ => return Err(Error::malformed("samples must be a list or {\"count\": n}")),
    };
    let report = family_sweep(k, &family, &samples)?;
    let mut classes = Map::new();
    let mut dot = String::new();
    let mut csv = String::from("class,sample\n");
    for (i, class) in report.classes.iter().enumerate() {
        dot.push_str(&class.example.to_dot(&format!("class{i}")));
        for b in &class.samples {
            csv.push_str(&format!("{i},\"{b}\"\n"));
        }
        classes.insert(
            class.shape.clone(),
            json!({
                "index": i,
                "unmarked_shape": class.unmarked_shape,
                "samples": class.samples.iter().map(|b| k.elem_to_json(b)).collect::<Vec<_>>(),
                "example": serde_json::to_value(&class.example).expect("tree serializes"),
            }),
        );
    }
    let shapes: BTreeMap<&str, usize> = report.classes.iter().fold(BTreeMap::new(), |mut m, c| {
        *m.entry(c.unmarked_shape.as_str()).or_default() += 1;
        m
    });
    let json = json!({
        "fingerprints": report.fingerprint_count(),
        "unmarked_shapes": shapes,
        "classes": classes,
        "sample_count": samples.len(),
    });
    let mut out = Report::new(json);
    out.dot = Some(dot);
    out.csv = Some(csv);
    Ok(out.with_checks(seed.map(|s| check::family(k, &family, &report, s))))
}
