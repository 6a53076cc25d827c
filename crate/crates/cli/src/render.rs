//! Text renderings: canonical JSON, CSV tables and the SVG profile plot.

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use serde_json::{Map, Value};
use skeleta::gamma::{format_rational, GammaValue, Rational};
use skeleta::newton::{branch_events, RootProfile};
use skeleta::topo::FiniteMetricTree;

/// Keys sorted at every level, so equal values print identically whatever
/// map flavor serde_json was built with.
fn canonical(v: &Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            let mut out = Map::new();
            for k in keys {
                out.insert(k.clone(), canonical(&m[k]));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.iter().map(canonical).collect()),
        other => other.clone(),
    }
}

pub fn json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonical(v)).expect("values serialize");
    s.push('\n');
    s
}

pub fn compact(v: &Value) -> String {
    serde_json::to_string(&canonical(v)).expect("values serialize").replace('"', "'")
}

pub fn edges_csv(tree: &FiniteMetricTree) -> String {
    let mut out = String::from("from,to,from_label,to_label,length\n");
    for (i, j, l) in tree.edges() {
        let (a, b) = (&tree.vertices()[*i].label, &tree.vertices()[*j].label);
        let _ = writeln!(out, "{i},{j},\"{a}\",\"{b}\",{l}");
    }
    out
}

pub fn profile_csv(profile: &RootProfile) -> String {
    let mut out = String::from("start,end,slope,intercept,multiplicity\n");
    for piece in &profile.pieces {
        let start = format_rational(&piece.start);
        for r in &piece.roots {
            let (s, c) = (format_rational(&r.valuation.slope), format_rational(&r.valuation.intercept));
            let _ = writeln!(out, "{start},{},{s},{c},{}", piece.end, r.multiplicity);
        }
        if piece.vanishing > 0 {
            let _ = writeln!(out, "{start},{},,inf,{}", piece.end, piece.vanishing);
        }
    }
    out
}

fn f(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(0.0)
}

/// Root valuations against `t`, one polyline per branch and piece, with
/// dashed rules at the branch events.
pub fn profile_svg(profile: &RootProfile) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 48.0;
    let last_start = profile.pieces.iter().map(|p| f(&p.start)).fold(0.0, f64::max);
    let t_max = (last_start * 1.5).max(last_start + 2.0).max(4.0);
    let end_of = |e: &GammaValue| e.finite().map_or(t_max, |q| f(q).min(t_max));

    let mut segments = Vec::new();
    for piece in &profile.pieces {
        let (a, b) = (f(&piece.start), end_of(&piece.end));
        if a >= b {
            continue;
        }
        for r in &piece.roots {
            let at = |t: f64| f(&r.valuation.intercept) + f(&r.valuation.slope) * t;
            segments.push(((a, at(a)), (b, at(b)), r.multiplicity));
        }
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for ((_, y0), (_, y1), _) in &segments {
        lo = lo.min(*y0).min(*y1);
        hi = hi.max(*y0).max(*y1);
    }
    let sx = |t: f64| PAD + t / t_max * (W - 2.0 * PAD);
    let sy = |v: f64| H - PAD - (v - lo) / (hi - lo) * (H - 2.0 * PAD);

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(out, r#"  <rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"  <path d="M {x0:.2} {y0:.2} L {x1:.2} {y0:.2} M {x0:.2} {y0:.2} L {x0:.2} {y1:.2}" stroke="black" fill="none"/>"#,
        x0 = sx(0.0),
        y0 = sy(lo),
        x1 = sx(t_max),
        y1 = sy(hi)
    );
    let _ = writeln!(out, r#"  <text x="{:.2}" y="{:.2}" font-size="12">t</text>"#, sx(t_max) + 6.0, sy(lo) + 4.0);
    let _ = writeln!(out, r#"  <text x="{:.2}" y="{:.2}" font-size="12">val</text>"#, sx(0.0) - 12.0, sy(hi) - 8.0);
    for e in branch_events(profile) {
        if let Some(q) = e.finite() {
            let x = sx(f(q));
            let _ = writeln!(
                out,
                r#"  <line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
                sy(lo),
                sy(hi)
            );
            let _ = writeln!(out, r#"  <text x="{x:.2}" y="{:.2}" font-size="11">{e}</text>"#, sy(lo) + 16.0);
        }
    }
    for ((t0, v0), (t1, v1), m) in &segments {
        let width = 1.0 + *m as f64;
        let _ = writeln!(
            out,
            r#"  <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue" stroke-width="{width}"/>"#,
            sx(*t0),
            sy(*v0),
            sx(*t1),
            sy(*v1)
        );
    }
    out.push_str("</svg>\n");
    out
}
