//! Tropical projective space, the valuation maps `τ` and `τ_h`, and Gauss
//! valuations of polydisks centered at the origin.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gamma::{GammaValue, Rational};
use crate::pline::{gauss_val_in_chart, Chart, PLinePoint};
use crate::valfield::ValuedField;

/// A point of `Trop P^n`: coordinates with minimum `0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TropPoint {
    coords: Vec<GammaValue>,
}

impl TropPoint {
    pub fn coords(&self) -> &[GammaValue] {
        &self.coords
    }
}

impl fmt::Display for TropPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Subtracts the minimum coordinate.
pub fn trop_normalize(raw: &[GammaValue]) -> Result<TropPoint> {
    let min = raw
        .iter()
        .min()
        .and_then(|m| m.finite())
        .cloned()
        .ok_or_else(|| Error::precondition("tropical point with every coordinate infinite"))?;
    let neg = -min;
    Ok(TropPoint { coords: raw.iter().map(|c| c.add_rational(&neg)).collect() })
}

/// Sparse polynomial in `nvars` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly<E> {
    nvars: usize,
    terms: Vec<(Vec<u32>, E)>,
}

impl<E: Clone + PartialEq> MPoly<E> {
    /// Merges repeated exponents and drops zero coefficients.
    pub fn new<F: ValuedField<Elem = E>>(field: &F, nvars: usize, terms: Vec<(Vec<u32>, E)>) -> Result<Self> {
        let mut merged: Vec<(Vec<u32>, E)> = Vec::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::malformed(format!("exponent {e:?} has the wrong length, expected {nvars}")));
            }
            match merged.iter_mut().find(|(f, _)| *f == e) {
                Some((_, acc)) => *acc = field.add(acc, &c),
                None => merged.push((e, c)),
            }
        }
        merged.retain(|(_, c)| !field.is_zero(c));
        merged.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(MPoly { nvars, terms: merged })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Vec<u32>, E)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.iter().all(|(e, _)| e.iter().sum::<u32>() == d)
    }

    pub fn scale<F: ValuedField<Elem = E>>(&self, field: &F, k: &E) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), field.mul(c, k))).collect();
        MPoly::new(field, self.nvars, terms).expect("same shape")
    }

    pub fn add<F: ValuedField<Elem = E>>(&self, field: &F, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::malformed("adding polynomials in different numbers of variables"));
        }
        MPoly::new(field, self.nvars, self.terms.iter().chain(other.terms.iter()).cloned().collect())
    }

    pub fn eval<F: ValuedField<Elem = E>>(&self, field: &F, x: &[E]) -> Result<E> {
        if x.len() != self.nvars {
            return Err(Error::malformed("evaluation point has the wrong dimension"));
        }
        Ok(self.terms.iter().fold(field.zero(), |acc, (e, c)| {
            let m = e.iter().zip(x).fold(c.clone(), |m, (&k, xi)| field.mul(&m, &field.pow(xi, k)));
            field.add(&acc, &m)
        }))
    }

    /// Univariate polynomial in variable `var` after fixing every other
    /// variable to one.
    fn dehomogenize<F: ValuedField<Elem = E>>(&self, field: &F, var: usize) -> Vec<E> {
        let mut out: Vec<E> = Vec::new();
        for (e, c) in &self.terms {
            let k = e[var] as usize;
            if out.len() <= k {
                out.resize(k + 1, field.zero());
            }
            out[k] = field.add(&out[k], c);
        }
        field.poly_trim(out)
    }

    /// JSON form: a list of `{"c": coefficient, "e": [exponents]}`.
    pub fn to_json<F: ValuedField<Elem = E>>(&self, field: &F) -> Value {
        Value::Array(self.terms.iter().map(|(e, c)| json!({"c": field.elem_to_json(c), "e": e})).collect())
    }

    pub fn from_json<F: ValuedField<Elem = E>>(field: &F, nvars: usize, v: &Value) -> Result<Self> {
        let items = v.as_array().ok_or_else(|| Error::malformed("polynomial must be a list of terms"))?;
        let mut terms = Vec::with_capacity(items.len());
        for item in items {
            let c = item.get("c").ok_or_else(|| Error::malformed("term without coefficient \"c\""))?;
            let e: Vec<u32> = item
                .get("e")
                .cloned()
                .map(serde_json::from_value)
                .transpose()
                .map_err(|err| Error::malformed(format!("bad exponent list: {err}")))?
                .ok_or_else(|| Error::malformed("term without exponents \"e\""))?;
            terms.push((e, field.elem_from_json(c)?));
        }
        MPoly::new(field, nvars, terms)
    }
}

/// Homogeneous polynomials `h_0, …, h_m` of a common degree in `n + 1` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyTuple<E> {
    degree: u32,
    polys: Vec<MPoly<E>>,
}

impl<E: Clone + PartialEq> PolyTuple<E> {
    pub fn new(degree: u32, polys: Vec<MPoly<E>>) -> Result<Self> {
        let Some(first) = polys.first() else {
            return Err(Error::malformed("empty polynomial tuple"));
        };
        let nvars = first.nvars;
        if nvars == 0 {
            return Err(Error::malformed("polynomials need at least one variable"));
        }
        for (i, h) in polys.iter().enumerate() {
            if h.nvars != nvars {
                return Err(Error::malformed(format!("h_{i} has a different number of variables")));
            }
            if !h.is_homogeneous(degree) {
                return Err(Error::malformed(format!("h_{i} is not homogeneous of degree {degree}")));
            }
        }
        Ok(PolyTuple { degree, polys })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn polys(&self) -> &[MPoly<E>] {
        &self.polys
    }

    pub fn nvars(&self) -> usize {
        self.polys[0].nvars
    }

    pub fn scale<F: ValuedField<Elem = E>>(&self, field: &F, k: &E) -> Self {
        PolyTuple { degree: self.degree, polys: self.polys.iter().map(|h| h.scale(field, k)).collect() }
    }
}

/// A point at which `τ_h` can be evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TropInput<E> {
    /// Homogeneous coordinates `[x_0 : … : x_n]`.
    Projective(Vec<E>),
    /// A point of the stable completion of `P^1` with `x = x_1/x_0`.
    Line(PLinePoint<E>),
}

/// `τ_h(x) = [val h_0(x) : … : val h_m(x)]`, normalized.
pub fn tau_h<F: ValuedField>(field: &F, h: &PolyTuple<F::Elem>, x: &TropInput<F::Elem>) -> Result<TropPoint> {
    let vals: Vec<GammaValue> = match x {
        TropInput::Projective(coords) => {
            if coords.len() != h.nvars() {
                return Err(Error::malformed("point and polynomials have different dimensions"));
            }
            if coords.iter().all(|c| field.is_zero(c)) {
                return Err(Error::malformed("the origin is not a projective point"));
            }
            h.polys.iter().map(|p| p.eval(field, coords).map(|v| field.val(&v))).collect::<Result<_>>()?
        }
        TropInput::Line(b) => {
            if h.nvars() != 2 {
                return Err(Error::precondition("points of P^1 need bivariate polynomials"));
            }
            // std chart: [1 : x]; inv chart: [u : 1]. The two differ by the
            // common factor x_1^d, which normalization removes.
            let var = match b.chart() {
                Chart::Std => 1,
                Chart::Inv => 0,
            };
            h.polys.iter().map(|p| gauss_val_in_chart(field, &p.dehomogenize(field, var), b)).collect::<Result<_>>()?
        }
    };
    if vals.iter().all(GammaValue::is_infinite) {
        return Err(Error::precondition("every h_i vanishes at the point"));
    }
    trop_normalize(&vals)
}

/// `min_e (val c_e + e·γ)` over the monomials of `h`, with `0·∞ = 0`.
pub fn polydisk_gauss_val<F: ValuedField>(field: &F, h: &MPoly<F::Elem>, gamma: &[GammaValue]) -> Result<GammaValue> {
    if gamma.len() != h.nvars {
        return Err(Error::malformed("radius vector has the wrong dimension"));
    }
    if gamma.iter().any(|g| *g < GammaValue::zero()) {
        return Err(Error::precondition("polydisk radii must be nonnegative"));
    }
    Ok(h.terms
        .iter()
        .map(|(e, c)| {
            e.iter().zip(gamma).filter(|(k, _)| **k > 0).fold(field.val(c), |acc, (&k, g)| {
                &acc + &g.checked_scale(&Rational::from_integer(k.into())).expect("positive factor")
            })
        })
        .min()
        .unwrap_or(GammaValue::Infinity))
}

/// Membership of `h` in the semi-lattice `J_d` of the polydisk generic point
/// with radii `γ`: `polydisk_gauss_val(h, γ) ≥ 0`.
pub fn semilattice_member<F: ValuedField>(field: &F, h: &MPoly<F::Elem>, gamma: &[GammaValue], d: u32) -> Result<bool> {
    if h.degree().is_some_and(|deg| deg > d) {
        return Err(Error::precondition(format!("polynomial degree exceeds {d}")));
    }
    Ok(polydisk_gauss_val(field, h, gamma)? >= GammaValue::zero())
}
