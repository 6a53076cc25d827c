//! The value group `Q ∪ {∞}` and min-affine functions of one variable.
//!
//! Valuations along paths in the projective line are finite minima of affine
//! functions `t ↦ intercept + slope·t`.  [`MinAffine`] keeps them in a
//! canonical form: only terms that attain the minimum on a nonempty open
//! interval survive, sorted by increasing slope.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::malformed(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::malformed(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// Input form of a rational or a value of `Γ_∞`: canonical text or a bare
/// JSON integer.
#[derive(Deserialize)]
#[serde(untagged)]
enum Lenient {
    Text(String),
    Int(i64),
}

impl Lenient {
    fn text(self) -> String {
        match self {
            Lenient::Text(s) => s,
            Lenient::Int(n) => n.to_string(),
        }
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = Lenient::deserialize(d)?.text();
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(format_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let strs = Vec::<Lenient>::deserialize(d)?;
        strs.into_iter().map(|s| parse_rational(&s.text()).map_err(serde::de::Error::custom)).collect()
    }
}

/// An element of `Γ_∞ = Q ∪ {∞}`.
///
/// Variant order gives the total order: every finite value lies below `∞`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GammaValue {
    Finite(Rational),
    Infinity,
}

pub use GammaValue::Infinity as INF;

impl GammaValue {
    pub fn zero() -> Self {
        GammaValue::Finite(Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        GammaValue::Finite(int(n))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, GammaValue::Infinity)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            GammaValue::Finite(q) => Some(q),
            GammaValue::Infinity => None,
        }
    }

    pub fn expect_finite(&self, what: &'static str) -> Result<&Rational> {
        self.finite().ok_or(Error::Undefined(what))
    }

    /// `self - other`; `∞ - ∞` and `q - ∞` are rejected.
    pub fn checked_sub(&self, other: &GammaValue) -> Result<GammaValue> {
        match (self, other) {
            (GammaValue::Finite(a), GammaValue::Finite(b)) => Ok(GammaValue::Finite(a - b)),
            (GammaValue::Infinity, GammaValue::Finite(_)) => Ok(GammaValue::Infinity),
            (GammaValue::Infinity, GammaValue::Infinity) => Err(Error::Undefined("inf - inf")),
            (GammaValue::Finite(_), GammaValue::Infinity) => Err(Error::Undefined("q - inf")),
        }
    }

    /// Multiplication by a rational scalar. `∞·0` and `∞·(negative)` are rejected.
    pub fn checked_scale(&self, k: &Rational) -> Result<GammaValue> {
        match self {
            GammaValue::Finite(a) => Ok(GammaValue::Finite(a * k)),
            GammaValue::Infinity if k.is_positive() => Ok(GammaValue::Infinity),
            GammaValue::Infinity if k.is_zero() => Err(Error::Undefined("inf * 0")),
            GammaValue::Infinity => Err(Error::Undefined("inf * negative")),
        }
    }

    pub fn add_rational(&self, q: &Rational) -> GammaValue {
        match self {
            GammaValue::Finite(a) => GammaValue::Finite(a + q),
            GammaValue::Infinity => GammaValue::Infinity,
        }
    }
}

impl From<Rational> for GammaValue {
    fn from(q: Rational) -> Self {
        GammaValue::Finite(q)
    }
}

impl Add for &GammaValue {
    type Output = GammaValue;

    fn add(self, rhs: &GammaValue) -> GammaValue {
        match (self, rhs) {
            (GammaValue::Finite(a), GammaValue::Finite(b)) => GammaValue::Finite(a + b),
            _ => GammaValue::Infinity,
        }
    }
}

impl Add for GammaValue {
    type Output = GammaValue;

    fn add(self, rhs: GammaValue) -> GammaValue {
        &self + &rhs
    }
}

pub fn gamma_add(a: &GammaValue, b: &GammaValue) -> GammaValue {
    a + b
}

impl fmt::Display for GammaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaValue::Finite(q) => f.write_str(&format_rational(q)),
            GammaValue::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for GammaValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" => Ok(GammaValue::Infinity),
            other => parse_rational(other).map(GammaValue::Finite),
        }
    }
}

impl Serialize for GammaValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GammaValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Lenient::deserialize(d)?.text().parse().map_err(serde::de::Error::custom)
    }
}

/// A finite affine function `t ↦ intercept + slope·t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Affine {
    #[serde(with = "serde_rational")]
    pub slope: Rational,
    #[serde(with = "serde_rational")]
    pub intercept: Rational,
}

impl Affine {
    pub fn new(slope: Rational, intercept: Rational) -> Self {
        Affine { slope, intercept }
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        &self.intercept + &self.slope * t
    }

    pub fn scale(&self, k: &Rational) -> Affine {
        Affine::new(&self.slope * k, &self.intercept * k)
    }
}

impl Add for &Affine {
    type Output = Affine;

    fn add(self, rhs: &Affine) -> Affine {
        Affine::new(&self.slope + &rhs.slope, &self.intercept + &rhs.intercept)
    }
}

impl std::ops::Sub for &Affine {
    type Output = Affine;

    fn sub(self, rhs: &Affine) -> Affine {
        Affine::new(&self.slope - &rhs.slope, &self.intercept - &rhs.intercept)
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}t", format_rational(&self.intercept), format_rational(&self.slope))
    }
}

/// One term `intercept + slope·t` of a [`MinAffine`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "serde_rational")]
    pub slope: Rational,
    pub intercept: GammaValue,
}

impl Term {
    pub fn new(slope: Rational, intercept: GammaValue) -> Self {
        Term { slope, intercept }
    }

    fn eval(&self, t: &Rational) -> GammaValue {
        self.intercept.add_rational(&(&self.slope * t))
    }
}

/// A finite minimum of affine functions of one variable, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MinAffine {
    terms: Vec<Term>,
}

impl<'de> Deserialize<'de> for MinAffine {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            terms: Vec<Term>,
        }
        let raw = Raw::deserialize(d)?;
        MinAffine::new(raw.terms).map_err(serde::de::Error::custom)
    }
}

/// Point where two lines meet; slopes must differ.
fn crossing(a: &Affine, b: &Affine) -> Rational {
    (&b.intercept - &a.intercept) / (&a.slope - &b.slope)
}

impl MinAffine {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::malformed("MinAffine needs at least one term"));
        }
        Ok(Self::canonical(terms))
    }

    pub fn constant(value: GammaValue) -> Self {
        MinAffine { terms: vec![Term::new(Rational::zero(), value)] }
    }

    pub fn affine(f: Affine) -> Self {
        MinAffine { terms: vec![Term::new(f.slope, GammaValue::Finite(f.intercept))] }
    }

    fn canonical(terms: Vec<Term>) -> Self {
        let mut lines: Vec<Affine> = terms
            .into_iter()
            .filter_map(|t| match t.intercept {
                GammaValue::Finite(b) => Some(Affine::new(t.slope, b)),
                GammaValue::Infinity => None,
            })
            .collect();
        if lines.is_empty() {
            return MinAffine::constant(GammaValue::Infinity);
        }
        // Steepest first: that is the order in which lines attain the minimum
        // as t runs from -∞ to +∞.
        lines.sort_by(|a, b| b.slope.cmp(&a.slope).then(a.intercept.cmp(&b.intercept)));
        lines.dedup_by(|later, earlier| later.slope == earlier.slope);
        let mut hull: Vec<Affine> = Vec::with_capacity(lines.len());
        for line in lines {
            while hull.len() >= 2 {
                let a = &hull[hull.len() - 2];
                let b = &hull[hull.len() - 1];
                if crossing(b, &line) <= crossing(a, b) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(line);
        }
        hull.reverse();
        MinAffine { terms: hull.into_iter().map(|l| Term::new(l.slope, GammaValue::Finite(l.intercept))).collect() }
    }

    /// Terms sorted by increasing slope.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_infinite(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].intercept.is_infinite()
    }

    pub fn pointwise_min(&self, other: &MinAffine) -> MinAffine {
        Self::canonical(self.terms.iter().chain(other.terms.iter()).cloned().collect())
    }

    pub fn add_affine(&self, f: &Affine) -> MinAffine {
        Self::canonical(
            self.terms.iter().map(|t| Term::new(&t.slope + &f.slope, t.intercept.add_rational(&f.intercept))).collect(),
        )
    }

    pub fn eval(&self, t: &GammaValue) -> Result<GammaValue> {
        match t {
            GammaValue::Finite(t) => Ok(self.eval_finite(t)),
            GammaValue::Infinity => {
                let first = &self.terms[0];
                if first.intercept.is_infinite() {
                    return Ok(GammaValue::Infinity);
                }
                match first.slope.cmp(&Rational::zero()) {
                    Ordering::Greater => Ok(GammaValue::Infinity),
                    Ordering::Equal => Ok(first.intercept.clone()),
                    Ordering::Less => Err(Error::Undefined("min-affine diverges to -inf")),
                }
            }
        }
    }

    pub fn eval_finite(&self, t: &Rational) -> GammaValue {
        self.terms.iter().map(|term| term.eval(t)).min().expect("nonempty")
    }

    /// Increasing list of the points where the attaining term changes.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let lines = self.finite_lines();
        lines.windows(2).rev().map(|w| crossing(&w[0], &w[1])).collect()
    }

    fn finite_lines(&self) -> Vec<Affine> {
        self.terms
            .iter()
            .filter_map(|t| t.intercept.finite().map(|b| Affine::new(t.slope.clone(), b.clone())))
            .collect()
    }

    /// The affine piece attaining the minimum just to the right of `t`
    /// (at `t` itself when `t` is not a breakpoint). `None` for the constant `∞`.
    pub fn piece_right_of(&self, t: &Rational) -> Option<Affine> {
        let lines = self.finite_lines();
        // lines are sorted by increasing slope; for large t the first one wins
        let mut best: Option<&Affine> = None;
        for l in &lines {
            best = match best {
                None => Some(l),
                Some(b) => {
                    let (lv, bv) = (l.eval(t), b.eval(t));
                    if lv < bv || (lv == bv && l.slope < b.slope) {
                        Some(l)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best.cloned()
    }
}

pub fn minaffine_eval(f: &MinAffine, t: &GammaValue) -> Result<GammaValue> {
    f.eval(t)
}

pub fn minaffine_breakpoints(f: &MinAffine) -> Vec<GammaValue> {
    f.breakpoints().into_iter().map(GammaValue::Finite).collect()
}

impl fmt::Display for MinAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("min(")?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} + {}t", t.intercept, format_rational(&t.slope))?;
        }
        f.write_str(")")
    }
}
