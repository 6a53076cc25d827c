//! The ball model of the stable completion of the projective line.
//!
//! The line is covered by two charts: `std` with coordinate `x` and `inv` with
//! coordinate `u = 1/x`.  A point is the generic point of a closed ball
//! `{z : val(z − center) ≥ radius}` in one chart; radius `∞` is a simple point.
//!
//! Normal form:
//! * `std` balls have `val(center) ≥ 0` and `radius ≥ 0`;
//! * `inv` balls have `val(center) > 0` (or center `0`) and `radius > 0`;
//! * the center is reduced modulo the ball, so equal balls are equal values.
//!
//! The Gauss point is `(std, 0, 0)`.  Every ball of the standard metric has
//! radius in `[0, ∞]`, so negative radii only appear as raw input and are
//! rewritten in the other chart: the generic point of `B(0, r)` with `r < 0`
//! is `(inv, 0, −r)`.
//!
//! Canonical extension to ball points: for `a = B(c, r)` and a simple `d` in
//! the same chart, a generic point `x` of the ball has `val(x − d) = r` when
//! `d` lies in the ball and `val(c − d)` otherwise, hence
//! `ρ(a, d) = min(r, val(c − d))`.  The tie `val(c − d) = r` gives `r`.  Points
//! in different charts (valuations of strictly different signs) are at
//! distance `0`.  Likewise `ψ(t, B(c, r)) = B(c, min(t, r))`.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gamma::{GammaValue, Rational};
use crate::topo::{FiniteMetricTree, TreeVertex};
use crate::valfield::ValuedField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Std,
    Inv,
}

impl Chart {
    pub fn other(self) -> Chart {
        match self {
            Chart::Std => Chart::Inv,
            Chart::Inv => Chart::Std,
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chart::Std => "std",
            Chart::Inv => "inv",
        })
    }
}

/// A point of the stable completion of `P^1`, always in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PLinePoint<E> {
    chart: Chart,
    center: E,
    radius: GammaValue,
}

impl<E> PLinePoint<E> {
    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn center(&self) -> &E {
        &self.center
    }

    pub fn radius(&self) -> &GammaValue {
        &self.radius
    }

    pub fn is_simple(&self) -> bool {
        self.radius.is_infinite()
    }
}

impl<E: fmt::Display> fmt::Display for PLinePoint<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.chart, self.center, self.radius)
    }
}

/// Normalizes a raw `(chart, center, radius)` triple.
pub fn normalize_point<F: ValuedField>(
    field: &F,
    chart: Chart,
    center: F::Elem,
    radius: GammaValue,
) -> PLinePoint<F::Elem> {
    let v = field.val(&center);
    let (chart, center, radius) = match &radius {
        GammaValue::Infinity => {
            let stays = match chart {
                Chart::Std => v >= GammaValue::zero(),
                Chart::Inv => v > GammaValue::zero(),
            };
            if stays {
                (chart, center, radius)
            } else {
                (chart.other(), field.inv(&center).expect("nonzero center"), radius)
            }
        }
        GammaValue::Finite(r) => {
            if radius <= v {
                // the ball contains 0 in this chart
                if r.is_negative() {
                    (chart.other(), field.zero(), GammaValue::Finite(-r))
                } else if r.is_zero() {
                    (Chart::Std, field.zero(), radius)
                } else {
                    (chart, field.zero(), radius)
                }
            } else {
                let vq = v.finite().expect("finite valuation").clone();
                let stays = match chart {
                    Chart::Std => !vq.is_negative(),
                    Chart::Inv => vq.is_positive(),
                };
                if stays {
                    (chart, center, radius)
                } else {
                    let r_other = r - &vq - &vq;
                    (chart.other(), field.inv(&center).expect("nonzero center"), GammaValue::Finite(r_other))
                }
            }
        }
    };
    let center = match &radius {
        GammaValue::Finite(r) => field.reduce_mod_ball(&center, r),
        GammaValue::Infinity => center,
    };
    PLinePoint { chart, center, radius }
}

impl<E: Clone> PLinePoint<E> {
    pub fn simple<F: ValuedField<Elem = E>>(field: &F, x: &E) -> Self {
        normalize_point(field, Chart::Std, x.clone(), GammaValue::Infinity)
    }

    /// The simple point `∞`.
    pub fn infinity<F: ValuedField<Elem = E>>(field: &F) -> Self {
        PLinePoint { chart: Chart::Inv, center: field.zero(), radius: GammaValue::Infinity }
    }

    pub fn gauss<F: ValuedField<Elem = E>>(field: &F) -> Self {
        PLinePoint { chart: Chart::Std, center: field.zero(), radius: GammaValue::zero() }
    }

    pub fn ball<F: ValuedField<Elem = E>>(field: &F, chart: Chart, center: &E, radius: GammaValue) -> Self {
        normalize_point(field, chart, center.clone(), radius)
    }

    pub fn to_json<F: ValuedField<Elem = E>>(&self, field: &F) -> Value {
        json!({
            "chart": self.chart,
            "center": field.elem_to_json(&self.center),
            "radius": self.radius.to_string(),
        })
    }

    pub fn from_json<F: ValuedField<Elem = E>>(field: &F, v: &Value) -> Result<Self> {
        if let Some(s) = v.as_str() {
            if s == "inf" {
                return Ok(Self::infinity(field));
            }
        }
        let obj = match v.as_object() {
            Some(o) if o.contains_key("center") || o.contains_key("chart") => o,
            _ => return Ok(Self::simple(field, &field.elem_from_json(v)?)),
        };
        let chart: Chart = match obj.get("chart") {
            Some(c) => serde_json::from_value(c.clone()).map_err(|e| Error::malformed(e.to_string()))?,
            None => Chart::Std,
        };
        let center = field.elem_from_json(obj.get("center").ok_or_else(|| Error::malformed("missing center"))?)?;
        let radius = match obj.get("radius") {
            Some(Value::String(s)) => s.parse()?,
            Some(Value::Number(n)) => GammaValue::from_int(n.as_i64().ok_or_else(|| Error::malformed("bad radius"))?),
            None => GammaValue::Infinity,
            Some(other) => return Err(Error::malformed(format!("bad radius {other}"))),
        };
        Ok(normalize_point(field, chart, center, radius))
    }
}

/// Chart-aware distance between the centers of two normalized points: the
/// valuation of their difference in a common chart, `0` across charts.
fn center_distance<F: ValuedField>(field: &F, a: &PLinePoint<F::Elem>, b: &PLinePoint<F::Elem>) -> GammaValue {
    if a.chart == b.chart {
        field.val(&field.sub(&a.center, &b.center))
    } else {
        GammaValue::zero()
    }
}

fn require_simple<E>(p: &PLinePoint<E>, what: &str) -> Result<()> {
    if p.is_simple() {
        Ok(())
    } else {
        Err(Error::precondition(format!("{what} must be a simple point")))
    }
}

/// The standard metric on simple points.
pub fn metric_d<F: ValuedField>(field: &F, x: &PLinePoint<F::Elem>, y: &PLinePoint<F::Elem>) -> Result<GammaValue> {
    require_simple(x, "x")?;
    require_simple(y, "y")?;
    Ok(center_distance(field, x, y))
}

/// Smallest ball containing both points.
pub fn join<F: ValuedField>(field: &F, x: &PLinePoint<F::Elem>, y: &PLinePoint<F::Elem>) -> PLinePoint<F::Elem> {
    let r = x.radius.clone().min(y.radius.clone()).min(center_distance(field, x, y));
    normalize_point(field, x.chart, x.center.clone(), r)
}

/// Whether the ball `outer` contains the ball `inner`.
pub fn contains<F: ValuedField>(field: &F, outer: &PLinePoint<F::Elem>, inner: &PLinePoint<F::Elem>) -> bool {
    outer.radius <= inner.radius && center_distance(field, outer, inner) >= outer.radius
}

/// Gauss valuation of a polynomial in the chart coordinate of `b`.
pub fn gauss_val_in_chart<F: ValuedField>(field: &F, f: &[F::Elem], b: &PLinePoint<F::Elem>) -> Result<GammaValue> {
    match &b.radius {
        GammaValue::Infinity => Ok(field.val(&field.poly_eval(f, &b.center))),
        GammaValue::Finite(r) => {
            let shifted = field.taylor_shift(f, &b.center)?;
            Ok(shifted
                .iter()
                .enumerate()
                .map(|(i, a)| field.val(a).add_rational(&(r * Rational::from_integer(i.into()))))
                .min()
                .unwrap_or(GammaValue::Infinity))
        }
    }
}

/// Gauss valuation `min_i (val a_i + i·r)` of `f` at a ball point of the `std` chart.
pub fn gauss_val<F: ValuedField>(field: &F, f: &[F::Elem], b: &PLinePoint<F::Elem>) -> Result<GammaValue> {
    if b.chart != Chart::Std {
        return Err(Error::precondition("gauss_val needs a point of the std chart"));
    }
    gauss_val_in_chart(field, f, b)
}

/// The standard homotopy: generic point of the ball of radius `t` around `a`.
pub fn psi<F: ValuedField>(field: &F, t: &GammaValue, a: &PLinePoint<F::Elem>) -> Result<PLinePoint<F::Elem>> {
    if *t < GammaValue::zero() {
        return Err(Error::precondition("psi needs t in [0, inf]"));
    }
    let r = t.clone().min(a.radius.clone());
    Ok(normalize_point(field, a.chart, a.center.clone(), r))
}

/// A finite set of simple points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divisor<E> {
    points: Vec<PLinePoint<E>>,
}

impl<E: Clone + PartialEq> Divisor<E> {
    /// Deduplicates while keeping first occurrences in order.
    pub fn new(points: Vec<PLinePoint<E>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::precondition("divisor must be nonempty"));
        }
        let mut out: Vec<PLinePoint<E>> = Vec::with_capacity(points.len());
        for p in points {
            require_simple(&p, "divisor point")?;
            if !out.contains(&p) {
                out.push(p);
            }
        }
        Ok(Divisor { points: out })
    }

    pub fn points(&self) -> &[PLinePoint<E>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `ρ(a, D) = max_{d ∈ D} min(r_a, d(center_a, d))`.
pub fn rho<F: ValuedField>(field: &F, a: &PLinePoint<F::Elem>, d: &Divisor<F::Elem>) -> GammaValue {
    d.points.iter().map(|p| a.radius.clone().min(center_distance(field, a, p))).max().expect("nonempty divisor")
}

/// The divisor-stopped homotopy `ψ_D(t, a) = ψ(max(t, ρ(a, D)), a)`.
pub fn psi_d<F: ValuedField>(
    field: &F,
    t: &GammaValue,
    a: &PLinePoint<F::Elem>,
    d: &Divisor<F::Elem>,
) -> Result<PLinePoint<F::Elem>> {
    psi(field, &t.clone().max(rho(field, a, d)), a)
}

/// Final image of `ψ_D`.
pub fn retract<F: ValuedField>(field: &F, a: &PLinePoint<F::Elem>, d: &Divisor<F::Elem>) -> PLinePoint<F::Elem> {
    psi_d(field, &GammaValue::zero(), a, d).expect("t = 0 is admissible")
}

/// Whether `a` lies on the skeleton of `D`: some ball of the tree path from a
/// divisor point up to the Gauss point.
pub fn on_skeleton<F: ValuedField>(field: &F, a: &PLinePoint<F::Elem>, d: &Divisor<F::Elem>) -> bool {
    d.points.iter().any(|p| contains(field, a, p))
}

/// Points `ψ(t, d)` for every divisor point `d` and every listed `t`, without
/// repetitions; all of them lie on the skeleton of `D`.
pub fn skeleton_samples<F: ValuedField>(
    field: &F,
    d: &Divisor<F::Elem>,
    radii: &[GammaValue],
) -> Result<Vec<PLinePoint<F::Elem>>> {
    let mut out: Vec<PLinePoint<F::Elem>> = Vec::new();
    for p in &d.points {
        for t in radii {
            let q = psi(field, t, p)?;
            if !out.contains(&q) {
                out.push(q);
            }
        }
    }
    Ok(out)
}

/// A skeleton together with the points behind its vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton<E> {
    pub points: Vec<PLinePoint<E>>,
    pub tree: FiniteMetricTree,
}

/// Convex hull of `D` and the Gauss point inside the ball tree.
///
/// Vertices are the divisor points, the Gauss point and all pairwise joins;
/// each non-root vertex is linked to the smallest vertex strictly containing
/// it, with length the difference of radii.  Divisor points are marked with
/// their index in `D`.
pub fn skeleton<F: ValuedField>(field: &F, d: &Divisor<F::Elem>) -> Skeleton<F::Elem> {
    let gauss = PLinePoint::gauss(field);
    let mut points: Vec<PLinePoint<F::Elem>> = d.points.clone();
    let push = |p: PLinePoint<F::Elem>, points: &mut Vec<PLinePoint<F::Elem>>| {
        if !points.contains(&p) {
            points.push(p);
        }
    };
    push(gauss.clone(), &mut points);
    for (i, a) in d.points.iter().enumerate() {
        for b in &d.points[i + 1..] {
            push(join(field, a, b), &mut points);
        }
    }
    let mut edges = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if *p == gauss {
            continue;
        }
        let parent = points
            .iter()
            .enumerate()
            .filter(|(j, q)| *j != i && contains(field, q, p))
            .max_by(|(_, a), (_, b)| a.radius.cmp(&b.radius))
            .map(|(j, _)| j)
            .expect("the Gauss point contains everything");
        let len = p.radius.checked_sub(&points[parent].radius).expect("parent radius is finite");
        edges.push((parent.min(i), parent.max(i), len));
    }
    edges.sort();
    let vertices = points
        .iter()
        .map(|p| TreeVertex { label: p.to_string(), mark: d.points.iter().position(|q| q == p) })
        .collect();
    Skeleton { points, tree: FiniteMetricTree::new(vertices, edges).expect("skeleton is a tree") }
}

/// Locates `a` on a skeleton: a vertex index, or the edge whose interior holds it.
pub fn locate_on_skeleton<F: ValuedField>(
    field: &F,
    s: &Skeleton<F::Elem>,
    a: &PLinePoint<F::Elem>,
) -> Option<SkeletonPosition> {
    if let Some(i) = s.points.iter().position(|p| p == a) {
        return Some(SkeletonPosition::Vertex(i));
    }
    s.tree
        .edges()
        .iter()
        .position(|(i, j, _)| {
            let (lo, hi) = if contains(field, &s.points[*i], &s.points[*j]) { (*j, *i) } else { (*i, *j) };
            contains(field, a, &s.points[lo]) && contains(field, &s.points[hi], a)
        })
        .map(SkeletonPosition::Edge)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkeletonPosition {
    Vertex(usize),
    Edge(usize),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{frac, int, INF};
    use crate::valfield::{PAdic, QPoly, RatFunc, TAdic};

    fn g(n: i64) -> GammaValue {
        GammaValue::from_int(n)
    }

    fn f5() -> PAdic {
        PAdic::new(5).unwrap()
    }

    fn pt(f: &PAdic, x: i64) -> PLinePoint<Rational> {
        PLinePoint::simple(f, &int(x))
    }

    fn ball(f: &PAdic, c: i64, r: i64) -> PLinePoint<Rational> {
        PLinePoint::ball(f, Chart::Std, &int(c), g(r))
    }

    fn div(pts: Vec<PLinePoint<Rational>>) -> Divisor<Rational> {
        Divisor::new(pts).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let f7 = PAdic::new(7).unwrap();
        let p = normalize_point(&f7, Chart::Std, int(7), g(1));
        assert_eq!((p.chart(), p.center().clone(), p.radius().clone()), (Chart::Std, int(0), g(1)));
        // B(1/7, 0) = {val(1/x − 7) ≥ 2} in the inv chart
        let q = normalize_point(&f7, Chart::Std, frac(1, 7), g(0));
        assert_eq!((q.chart(), q.center().clone(), q.radius().clone()), (Chart::Inv, int(7), g(2)));
        let z = normalize_point(&f7, Chart::Std, int(0), INF);
        assert_eq!(z, pt(&f7, 0));
        assert_eq!(z.chart(), Chart::Std);
    }

    #[test]
    fn negative_radius_moves_to_inv_chart() {
        let f = f5();
        let p = normalize_point(&f, Chart::Std, int(3), g(-2));
        assert_eq!((p.chart(), p.center().clone(), p.radius().clone()), (Chart::Inv, int(0), g(2)));
        let back = normalize_point(&f, Chart::Inv, int(0), g(-2));
        assert_eq!(back, ball(&f, 0, 2));
    }

    #[test]
    fn normalization_is_idempotent_and_identifies_equal_balls() {
        let f = f5();
        for (c, r) in [(0, 0), (3, 1), (26, 2), (1, 0), (-7, 3)] {
            let p = ball(&f, c, r);
            let again = normalize_point(&f, p.chart(), p.center().clone(), p.radius().clone());
            assert_eq!(p, again);
        }
        assert_eq!(ball(&f, 1, 1), ball(&f, 6, 1));
        assert_eq!(ball(&f, 3, 0), PLinePoint::gauss(&f));
        assert_eq!(PLinePoint::ball(&f, Chart::Inv, &int(1), g(0)), PLinePoint::gauss(&f),);
        // unit-circle points sit in the std chart whichever chart they came from
        assert_eq!(PLinePoint::ball(&f, Chart::Inv, &int(2), g(1)), ball(&f, 3, 1));
    }

    #[test]
    fn simple_points_pick_their_chart() {
        let f = f5();
        assert_eq!(PLinePoint::simple(&f, &frac(1, 5)).chart(), Chart::Inv);
        assert_eq!(PLinePoint::simple(&f, &frac(1, 5)).center(), &int(5));
        assert_eq!(PLinePoint::infinity(&f).center(), &int(0));
        assert_eq!(pt(&f, 2).chart(), Chart::Std);
    }

    #[test]
    fn metric_examples() {
        let f = f5();
        assert_eq!(metric_d(&f, &pt(&f, 3), &pt(&f, 3)).unwrap(), INF);
        assert_eq!(metric_d(&f, &pt(&f, 1), &pt(&f, 6)).unwrap(), g(1));
        let a = PLinePoint::simple(&f, &frac(1, 5));
        assert_eq!(metric_d(&f, &a, &pt(&f, 5)).unwrap(), g(0));
        // 1/5 and 1/10 are both in the inv chart: val(5 − 10) = 1
        let b = PLinePoint::simple(&f, &frac(1, 10));
        assert_eq!(metric_d(&f, &a, &b).unwrap(), g(1));
        assert!(metric_d(&f, &ball(&f, 0, 1), &pt(&f, 0)).is_err());
    }

    #[test]
    fn join_examples() {
        let f = f5();
        let inf = PLinePoint::infinity(&f);
        assert_eq!(join(&f, &pt(&f, 0), &inf), PLinePoint::gauss(&f));
        assert_eq!(join(&f, &pt(&f, 4), &pt(&f, 4)), pt(&f, 4));
        assert_eq!(join(&f, &pt(&f, 1), &pt(&f, 6)), ball(&f, 1, 1));
        assert_eq!(join(&f, &pt(&f, 0), &pt(&f, 25)), ball(&f, 0, 2));
    }

    #[test]
    fn gauss_val_examples() {
        let f = f5();
        let p = |cs: &[i64]| cs.iter().map(|&c| int(c)).collect::<Vec<_>>();
        assert_eq!(gauss_val(&f, &p(&[0, -1, 1]), &ball(&f, 0, 2)).unwrap(), g(2));
        assert_eq!(gauss_val(&f, &p(&[50]), &ball(&f, 3, 7)).unwrap(), g(2));
        assert_eq!(gauss_val(&f, &p(&[50]), &pt(&f, 3)).unwrap(), g(2));
        assert_eq!(gauss_val(&f, &p(&[-5, 0, 1]), &ball(&f, 0, 0)).unwrap(), g(0));
        assert_eq!(gauss_val(&f, &[], &ball(&f, 0, 0)).unwrap(), INF);
        let inv = PLinePoint::simple(&f, &frac(1, 5));
        assert!(gauss_val(&f, &p(&[1]), &inv).is_err());
    }

    #[test]
    fn psi_examples() {
        let f = f5();
        let a = ball(&f, 7, 3);
        assert_eq!(psi(&f, &INF, &a).unwrap(), a);
        assert_eq!(psi(&f, &g(0), &pt(&f, 3)).unwrap(), PLinePoint::gauss(&f));
        assert_eq!(psi(&f, &g(5), &ball(&f, 0, 2)).unwrap(), ball(&f, 0, 2));
        assert!(psi(&f, &g(-1), &a).is_err());
    }

    #[test]
    fn rho_examples() {
        let f = f5();
        let inf = PLinePoint::infinity(&f);
        let d = div(vec![pt(&f, 0), inf.clone()]);
        assert_eq!(rho(&f, &pt(&f, 0), &d), INF);
        assert_eq!(rho(&f, &pt(&f, 1), &d), g(0));
        assert_eq!(rho(&f, &ball(&f, 0, 3), &div(vec![pt(&f, 0)])), g(3));
        // tie val(c − d) = r
        assert_eq!(rho(&f, &ball(&f, 5, 1), &div(vec![pt(&f, 0)])), g(1));
    }

    #[test]
    fn psi_d_examples() {
        let f = f5();
        let d = div(vec![pt(&f, 0), PLinePoint::infinity(&f)]);
        let a = ball(&f, 2, 4);
        assert_eq!(psi_d(&f, &INF, &a, &d).unwrap(), a);
        assert_eq!(psi_d(&f, &g(0), &pt(&f, 1), &d).unwrap(), PLinePoint::gauss(&f));
        for t in [0, 1, 5] {
            assert_eq!(psi_d(&f, &g(t), &pt(&f, 0), &d).unwrap(), pt(&f, 0));
        }
    }

    #[test]
    fn retract_examples() {
        let f = f5();
        let d = div(vec![pt(&f, 0), pt(&f, 25), PLinePoint::infinity(&f)]);
        assert_eq!(retract(&f, &pt(&f, 26), &d), PLinePoint::gauss(&f));
        assert_eq!(retract(&f, &pt(&f, 50), &d), ball(&f, 0, 2));
        assert_eq!(retract(&f, &pt(&f, 125), &d), ball(&f, 0, 3));
        let on = ball(&f, 0, 1);
        assert_eq!(retract(&f, &on, &d), on);
        // a ball point retracts like a simple point inside it with ρ ≤ r
        let b = ball(&f, 250, 4);
        assert_eq!(retract(&f, &b, &d), retract(&f, &pt(&f, 250), &d));
    }

    #[test]
    fn skeleton_of_zero_and_infinity_is_a_path() {
        let f = f5();
        let s = skeleton(&f, &div(vec![pt(&f, 0), PLinePoint::infinity(&f)]));
        assert_eq!(s.points.len(), 3);
        assert_eq!(s.tree.edges().len(), 2);
        assert!(s.tree.edges().iter().all(|e| e.2 == INF));
        let gi = s.points.iter().position(|p| *p == PLinePoint::gauss(&f)).unwrap();
        assert_eq!(s.tree.degree(gi), 2);
    }

    #[test]
    fn skeleton_of_three_points_is_a_star() {
        let f = f5();
        let s = skeleton(&f, &div(vec![pt(&f, 0), pt(&f, 1), PLinePoint::infinity(&f)]));
        assert_eq!(s.points.len(), 4);
        let gi = s.points.iter().position(|p| *p == PLinePoint::gauss(&f)).unwrap();
        assert_eq!(s.tree.degree(gi), 3);
        assert!(s.tree.edges().iter().all(|e| e.2 == INF));
    }

    #[test]
    fn skeleton_with_finite_edge() {
        let f = f5();
        let s = skeleton(&f, &div(vec![pt(&f, 0), pt(&f, 25), PLinePoint::infinity(&f)]));
        assert_eq!(s.points.len(), 5);
        let finite: Vec<_> = s.tree.edges().iter().filter(|e| !e.2.is_infinite()).collect();
        assert_eq!(finite.len(), 1);
        assert_eq!(finite[0].2, g(2));
        let ends = [&s.points[finite[0].0], &s.points[finite[0].1]];
        assert!(ends.contains(&&PLinePoint::gauss(&f)));
        assert!(ends.contains(&&ball(&f, 0, 2)));
    }

    #[test]
    fn skeleton_of_single_point_reaches_gauss() {
        let f = f5();
        let s = skeleton(&f, &div(vec![pt(&f, 0)]));
        assert_eq!(s.points.len(), 2);
        assert!(on_skeleton(&f, &retract(&f, &pt(&f, 3), &div(vec![pt(&f, 0)])), &div(vec![pt(&f, 0)])));
    }

    #[test]
    fn skeleton_positions() {
        let f = f5();
        let d = div(vec![pt(&f, 0), pt(&f, 25), PLinePoint::infinity(&f)]);
        let s = skeleton(&f, &d);
        assert!(matches!(locate_on_skeleton(&f, &s, &ball(&f, 0, 2)), Some(SkeletonPosition::Vertex(_))));
        assert!(matches!(locate_on_skeleton(&f, &s, &ball(&f, 0, 1)), Some(SkeletonPosition::Edge(_))));
        assert!(matches!(locate_on_skeleton(&f, &s, &ball(&f, 25, 7)), Some(SkeletonPosition::Edge(_))));
        assert_eq!(locate_on_skeleton(&f, &s, &ball(&f, 1, 1)), None);
    }

    #[test]
    fn tadic_points() {
        let f = TAdic::new();
        let t = RatFunc::poly(QPoly::monomial(int(1), 1));
        let t2 = f.mul(&t, &t);
        let p = PLinePoint::simple(&f, &t2);
        let q = PLinePoint::simple(&f, &f.zero());
        assert_eq!(metric_d(&f, &p, &q).unwrap(), g(2));
        assert_eq!(join(&f, &p, &q), PLinePoint::ball(&f, Chart::Std, &f.zero(), g(2)));
        let inv_t = f.inv(&t).unwrap();
        assert_eq!(PLinePoint::simple(&f, &inv_t).chart(), Chart::Inv);
    }

    #[test]
    fn json_round_trip() {
        let f = f5();
        let p = PLinePoint::simple(&f, &frac(1, 5));
        let v = p.to_json(&f);
        assert_eq!(v, serde_json::json!({"chart":"inv","center":"5","radius":"inf"}));
        assert_eq!(PLinePoint::from_json(&f, &v).unwrap(), p);
        assert_eq!(PLinePoint::from_json(&f, &serde_json::json!("inf")).unwrap(), PLinePoint::infinity(&f));
        assert_eq!(PLinePoint::from_json(&f, &serde_json::json!("3")).unwrap(), pt(&f, 3));
    }
}
