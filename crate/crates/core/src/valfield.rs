//! Exact valued fields: `Q` with a p-adic valuation and `Q(t)` with the
//! t-adic valuation.
//!
//! Neither field is algebraically closed. Valuations of roots are always read
//! off Newton polygons, so nothing downstream needs roots themselves.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gamma::{format_rational, int, parse_rational, GammaValue, Rational};

pub const DEFAULT_DEGREE_CAP: usize = 64;

/// Field selector as it appears in scene files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldSpec {
    Padic { p: u64 },
    Tadic,
}

impl FieldSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::Padic { p } if !is_prime(*p) => Err(Error::malformed("p not prime")),
            _ => Ok(()),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A valued field with exact elements.
///
/// Polynomials are coefficient vectors, lowest degree first, with no trailing
/// zeros; the zero polynomial is the empty vector.
#[allow(clippy::wrong_self_convention)]
pub trait ValuedField: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync;

    fn spec(&self) -> FieldSpec;
    fn from_rational(&self, q: &Rational) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn val(&self, a: &Self::Elem) -> GammaValue;
    /// An element of valuation one.
    fn uniformizer(&self) -> Self::Elem;
    /// The canonical representative of `c + {x : val x ≥ r}`: the expansion of
    /// `c` in powers of the uniformizer, truncated below level `r`.
    fn reduce_mod_ball(&self, c: &Self::Elem, r: &Rational) -> Self::Elem;
    fn degree_cap(&self) -> usize;
    /// Characteristic of the residue field (`0` for `Q(t)`).
    fn residue_char(&self) -> u64;
    /// Image of an integral element in the residue field, as a rational
    /// (an integer in `[0, p)` for the p-adic field).
    fn residue(&self, a: &Self::Elem) -> Result<Rational>;
    fn elem_to_json(&self, a: &Self::Elem) -> Value;
    fn elem_from_json(&self, v: &Value) -> Result<Self::Elem>;

    fn zero(&self) -> Self::Elem {
        self.from_rational(&Rational::zero())
    }

    fn one(&self) -> Self::Elem {
        self.from_rational(&Rational::one())
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.from_rational(&int(n))
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn pow(&self, a: &Self::Elem, mut e: u32) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `π^k` for the uniformizer `π`, any integer `k`.
    fn uniformizer_pow(&self, k: i64) -> Self::Elem {
        let u = self.pow(&self.uniformizer(), k.unsigned_abs() as u32);
        if k >= 0 {
            u
        } else {
            self.inv(&u).expect("uniformizer is nonzero")
        }
    }

    fn poly_trim(&self, mut f: Vec<Self::Elem>) -> Vec<Self::Elem> {
        while f.last().is_some_and(|c| self.is_zero(c)) {
            f.pop();
        }
        f
    }

    fn poly_add(&self, f: &[Self::Elem], g: &[Self::Elem]) -> Vec<Self::Elem> {
        let n = f.len().max(g.len());
        let zero = self.zero();
        let out = (0..n).map(|i| self.add(f.get(i).unwrap_or(&zero), g.get(i).unwrap_or(&zero))).collect();
        self.poly_trim(out)
    }

    fn poly_scale(&self, f: &[Self::Elem], k: &Self::Elem) -> Vec<Self::Elem> {
        self.poly_trim(f.iter().map(|c| self.mul(c, k)).collect())
    }

    fn poly_mul(&self, f: &[Self::Elem], g: &[Self::Elem]) -> Vec<Self::Elem> {
        if f.is_empty() || g.is_empty() {
            return vec![];
        }
        let mut out = vec![self.zero(); f.len() + g.len() - 1];
        for (i, a) in f.iter().enumerate() {
            for (j, b) in g.iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(a, b));
            }
        }
        self.poly_trim(out)
    }

    fn poly_eval(&self, f: &[Self::Elem], x: &Self::Elem) -> Self::Elem {
        f.iter().rev().fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), c))
    }

    /// Coefficients `a_i` with `f(x) = Σ a_i (x − c)^i`.
    fn taylor_shift(&self, f: &[Self::Elem], c: &Self::Elem) -> Result<Vec<Self::Elem>> {
        let f = self.poly_trim(f.to_vec());
        if f.len() > self.degree_cap() + 1 {
            return Err(Error::precondition(format!(
                "polynomial degree {} exceeds the cap {}",
                f.len() - 1,
                self.degree_cap()
            )));
        }
        // Horner in the shifted variable: f = (...(a_d (y + c) + a_{d-1})(y + c) + ...)
        let mut acc: Vec<Self::Elem> = vec![];
        for coeff in f.iter().rev() {
            let mut next = vec![self.zero(); acc.len() + 1];
            for (i, a) in acc.iter().enumerate() {
                next[i + 1] = self.add(&next[i + 1], a);
                next[i] = self.add(&next[i], &self.mul(a, c));
            }
            next[0] = self.add(&next[0], coeff);
            acc = self.poly_trim(next);
        }
        Ok(acc)
    }
}

pub fn val<F: ValuedField>(field: &F, a: &F::Elem) -> GammaValue {
    field.val(a)
}

pub fn taylor_shift<F: ValuedField>(field: &F, f: &[F::Elem], c: &F::Elem) -> Result<Vec<F::Elem>> {
    field.taylor_shift(f, c)
}

fn pow_big(p: &BigInt, e: u64) -> BigInt {
    num_traits::pow(p.clone(), e as usize)
}

/// Exponent of `p` in a nonzero integer.
fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut v = 0;
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

/// `Q` with the p-adic valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdic {
    p: u64,
    p_big: BigInt,
    degree_cap: usize,
}

impl PAdic {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::malformed("p not prime"));
        }
        Ok(PAdic { p, p_big: BigInt::from(p), degree_cap: DEFAULT_DEGREE_CAP })
    }

    pub fn with_degree_cap(mut self, cap: usize) -> Self {
        self.degree_cap = cap;
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn val_q(&self, q: &Rational) -> Option<i64> {
        if q.is_zero() {
            None
        } else {
            Some(int_valuation(q.numer(), &self.p_big) - int_valuation(q.denom(), &self.p_big))
        }
    }
}

impl ValuedField for PAdic {
    type Elem = Rational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Padic { p: self.p }
    }

    fn from_rational(&self, q: &Rational) -> Rational {
        q.clone()
    }

    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }

    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }

    fn neg(&self, a: &Rational) -> Rational {
        -a
    }

    fn inv(&self, a: &Rational) -> Result<Rational> {
        if a.is_zero() {
            Err(Error::precondition("division by zero"))
        } else {
            Ok(a.recip())
        }
    }

    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }

    fn val(&self, a: &Rational) -> GammaValue {
        match self.val_q(a) {
            Some(v) => GammaValue::from_int(v),
            None => GammaValue::Infinity,
        }
    }

    fn uniformizer(&self) -> Rational {
        Rational::from_integer(self.p_big.clone())
    }

    fn reduce_mod_ball(&self, c: &Rational, r: &Rational) -> Rational {
        let level = r.ceil().to_integer();
        let Some(v) = self.val_q(c) else {
            return Rational::zero();
        };
        let v_big = BigInt::from(v);
        if v_big >= level {
            return Rational::zero();
        }
        let digits = (&level - &v_big).to_u64().expect("ball level fits in u64");
        // c = p^v · a/b with a, b prime to p; keep a·b⁻¹ mod p^digits.
        let unit = c / pow_q(&self.uniformizer(), v);
        let modulus = pow_big(&self.p_big, digits);
        let a = unit.numer().mod_floor(&modulus);
        let b = unit.denom().mod_floor(&modulus);
        let b_inv = mod_inverse(&b, &modulus);
        let digits_value = (a * b_inv).mod_floor(&modulus);
        Rational::from_integer(digits_value) * pow_q(&self.uniformizer(), v)
    }

    fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    fn residue_char(&self) -> u64 {
        self.p
    }

    fn residue(&self, a: &Rational) -> Result<Rational> {
        if self.val(a) < GammaValue::zero() {
            return Err(Error::precondition("residue of a non-integral element"));
        }
        Ok(self.reduce_mod_ball(a, &Rational::one()))
    }

    fn elem_to_json(&self, a: &Rational) -> Value {
        Value::String(format_rational(a))
    }

    fn elem_from_json(&self, v: &Value) -> Result<Rational> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => n.as_i64().map(int).ok_or_else(|| Error::malformed(format!("not an integer: {n}"))),
            other => Err(Error::malformed(format!("expected a rational, got {other}"))),
        }
    }
}

fn pow_q(q: &Rational, e: i64) -> Rational {
    let base = num_traits::pow(q.clone(), e.unsigned_abs() as usize);
    if e >= 0 {
        base
    } else {
        base.recip()
    }
}

fn mod_inverse(b: &BigInt, m: &BigInt) -> BigInt {
    let ext = b.extended_gcd(m);
    debug_assert!(ext.gcd.is_one());
    ext.x.mod_floor(m)
}

/// Dense polynomial over `Q`, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly(Vec<Rational>);

impl QPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly(coeffs)
    }

    pub fn constant(c: Rational) -> Self {
        QPoly::new(vec![c])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k];
        v.push(c);
        QPoly::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.0.last()
    }

    /// Order of vanishing at 0.
    pub fn order(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        let z = Rational::zero();
        QPoly::new((0..n).map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z)).collect())
    }

    pub fn neg(&self) -> QPoly {
        QPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::default();
        }
        let mut out = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn scale(&self, k: &Rational) -> QPoly {
        QPoly::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading().unwrap().clone();
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (QPoly::default(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (i, dc) in d.0.iter().enumerate() {
                    rem[k + i] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (QPoly::new(quot), QPoly::new(rem))
    }

    pub fn monic(&self) -> QPoly {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => QPoly::default(),
        }
    }

    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Drops the factor `t^k`; `k` must not exceed the order.
    fn shift_down(&self, k: usize) -> QPoly {
        QPoly::new(self.0[k..].to_vec())
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", format_rational(c))?,
                1 => write!(f, "{}*t", format_rational(c))?,
                _ => write!(f, "{}*t^{}", format_rational(c), i)?,
            }
        }
        Ok(())
    }
}

/// Element of `Q(t)`: reduced fraction with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: QPoly,
    den: QPoly,
}

impl RatFunc {
    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::malformed("zero denominator"));
        }
        if num.is_zero() {
            return Ok(RatFunc::constant(Rational::zero()));
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lead = den.leading().unwrap().recip();
        Ok(RatFunc { num: num.scale(&lead), den: den.scale(&lead) })
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc { num: QPoly::constant(c), den: QPoly::constant(Rational::one()) }
    }

    pub fn poly(p: QPoly) -> Self {
        RatFunc { num: p, den: QPoly::constant(Rational::one()) }
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Evaluation at a rational point; `None` at a pole.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// `Q(t)` with the valuation given by the order of vanishing at `t = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TAdic {
    degree_cap: usize,
}

impl Default for TAdic {
    fn default() -> Self {
        TAdic { degree_cap: DEFAULT_DEGREE_CAP }
    }
}

impl TAdic {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_degree_cap(mut self, cap: usize) -> Self {
        self.degree_cap = cap;
        self
    }

    fn val_i(&self, a: &RatFunc) -> Option<i64> {
        let n = a.num.order()?;
        let d = a.den.order().expect("nonzero denominator");
        Some(n as i64 - d as i64)
    }
}

fn json_coeffs(v: &Value) -> Result<QPoly> {
    let arr = v.as_array().ok_or_else(|| Error::malformed("expected a coefficient list"))?;
    let coeffs = arr
        .iter()
        .map(|c| match c {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => n.as_i64().map(int).ok_or_else(|| Error::malformed("bad coefficient")),
            _ => Err(Error::malformed("bad coefficient")),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QPoly::new(coeffs))
}

impl ValuedField for TAdic {
    type Elem = RatFunc;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Tadic
    }

    fn from_rational(&self, q: &Rational) -> RatFunc {
        RatFunc::constant(q.clone())
    }

    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        if a.den == b.den {
            return RatFunc::new(a.num.add(&b.num), a.den.clone()).expect("nonzero denominator");
        }
        RatFunc::new(a.num.mul(&b.den).add(&b.num.mul(&a.den)), a.den.mul(&b.den)).expect("nonzero denominator")
    }

    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        RatFunc::new(a.num.mul(&b.num), a.den.mul(&b.den)).expect("nonzero denominator")
    }

    fn neg(&self, a: &RatFunc) -> RatFunc {
        RatFunc { num: a.num.neg(), den: a.den.clone() }
    }

    fn inv(&self, a: &RatFunc) -> Result<RatFunc> {
        if a.is_zero() {
            return Err(Error::precondition("division by zero"));
        }
        RatFunc::new(a.den.clone(), a.num.clone())
    }

    fn is_zero(&self, a: &RatFunc) -> bool {
        a.is_zero()
    }

    fn val(&self, a: &RatFunc) -> GammaValue {
        match self.val_i(a) {
            Some(v) => GammaValue::from_int(v),
            None => GammaValue::Infinity,
        }
    }

    fn uniformizer(&self) -> RatFunc {
        RatFunc::poly(QPoly::monomial(Rational::one(), 1))
    }

    fn reduce_mod_ball(&self, c: &RatFunc, r: &Rational) -> RatFunc {
        let level = r.ceil().to_integer().to_i64().expect("ball level fits in i64");
        let Some(v) = self.val_i(c) else {
            return RatFunc::constant(Rational::zero());
        };
        if v >= level {
            return RatFunc::constant(Rational::zero());
        }
        let terms = (level - v) as usize;
        // c = t^v · n/d with n(0), d(0) ≠ 0; expand n/d as a power series.
        let n = c.num.shift_down(c.num.order().unwrap());
        let d = c.den.shift_down(c.den.order().unwrap());
        let d0 = d.coeffs()[0].clone();
        let mut series = Vec::with_capacity(terms);
        for k in 0..terms {
            let mut s = n.coeffs().get(k).cloned().unwrap_or_else(Rational::zero);
            for j in 1..=k.min(d.coeffs().len() - 1) {
                s -= &d.coeffs()[j] * &series[k - j];
            }
            series.push(s / &d0);
        }
        let body = QPoly::new(series);
        if v >= 0 {
            RatFunc::poly(QPoly::monomial(Rational::one(), v as usize).mul(&body))
        } else {
            RatFunc::new(body, QPoly::monomial(Rational::one(), (-v) as usize)).expect("nonzero")
        }
    }

    fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    fn residue_char(&self) -> u64 {
        0
    }

    fn residue(&self, a: &RatFunc) -> Result<Rational> {
        if self.val(a) < GammaValue::zero() {
            return Err(Error::precondition("residue of a non-integral element"));
        }
        let r = self.reduce_mod_ball(a, &Rational::one());
        Ok(r.num().coeffs().first().cloned().unwrap_or_else(Rational::zero))
    }

    fn elem_to_json(&self, a: &RatFunc) -> Value {
        let coeffs = |p: &QPoly| Value::Array(p.coeffs().iter().map(|c| Value::String(format_rational(c))).collect());
        serde_json::json!({ "num": coeffs(&a.num), "den": coeffs(&a.den) })
    }

    fn elem_from_json(&self, v: &Value) -> Result<RatFunc> {
        match v {
            Value::String(s) => Ok(RatFunc::constant(parse_rational(s)?)),
            Value::Number(n) => Ok(RatFunc::constant(int(n.as_i64().ok_or_else(|| Error::malformed("bad number"))?))),
            Value::Object(map) => {
                let num = json_coeffs(map.get("num").ok_or_else(|| Error::malformed("missing num"))?)?;
                let den = match map.get("den") {
                    Some(d) => json_coeffs(d)?,
                    None => QPoly::constant(Rational::one()),
                };
                RatFunc::new(num, den)
            }
            other => Err(Error::malformed(format!("expected a t-adic element, got {other}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{frac, INF};
    use proptest::prelude::*;

    fn qp(cs: &[i64]) -> QPoly {
        QPoly::new(cs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn padic_valuations() {
        let f = PAdic::new(5).unwrap();
        assert_eq!(f.val(&int(50)), GammaValue::from_int(2));
        assert_eq!(f.val(&int(0)), INF);
        assert_eq!(f.val(&frac(3, 25)), GammaValue::from_int(-2));
        assert_eq!(f.val(&int(-7)), GammaValue::from_int(0));
    }

    #[test]
    fn composite_modulus_is_rejected() {
        assert_eq!(PAdic::new(4).unwrap_err(), Error::malformed("p not prime"));
        assert!(FieldSpec::Padic { p: 1 }.validate().is_err());
        assert!(FieldSpec::Padic { p: 7 }.validate().is_ok());
    }

    #[test]
    fn tadic_valuation_of_quotient() {
        let f = TAdic::new();
        let a = RatFunc::new(qp(&[0, 0, 1]), qp(&[1, 1])).unwrap();
        assert_eq!(f.val(&a), GammaValue::from_int(2));
        let b = RatFunc::new(qp(&[3]), qp(&[0, 0, 0, 2])).unwrap();
        assert_eq!(f.val(&b), GammaValue::from_int(-3));
        assert_eq!(f.val(&f.zero()), INF);
    }

    #[test]
    fn ratfunc_is_reduced_with_monic_denominator() {
        // (t^2 - 1)/(2t - 2) = (t + 1)/2
        let a = RatFunc::new(qp(&[-1, 0, 1]), qp(&[-2, 2])).unwrap();
        assert_eq!(a.num(), &QPoly::new(vec![frac(1, 2), frac(1, 2)]));
        assert_eq!(a.den(), &qp(&[1]));
    }

    #[test]
    fn taylor_shift_examples() {
        let f = PAdic::new(5).unwrap();
        let p = |cs: &[i64]| cs.iter().map(|&c| int(c)).collect::<Vec<_>>();
        assert_eq!(f.taylor_shift(&p(&[0, -1, 1]), &int(0)).unwrap(), p(&[0, -1, 1]));
        assert_eq!(f.taylor_shift(&p(&[0, 0, 1]), &int(1)).unwrap(), p(&[1, 2, 1]));
        assert_eq!(f.taylor_shift(&p(&[3]), &int(7)).unwrap(), p(&[3]));
        assert!(f.taylor_shift(&[], &int(7)).unwrap().is_empty());
    }

    #[test]
    fn degree_cap_is_enforced() {
        let f = PAdic::new(3).unwrap().with_degree_cap(4);
        let big: Vec<Rational> = (0..6).map(int).collect();
        assert!(matches!(f.taylor_shift(&big, &int(1)), Err(Error::Precondition(_))));
    }

    #[test]
    fn padic_reduction_truncates_expansion() {
        let f = PAdic::new(7).unwrap();
        assert_eq!(f.reduce_mod_ball(&int(7), &int(1)), int(0));
        assert_eq!(f.reduce_mod_ball(&int(7 * 3 + 5), &int(1)), int(5));
        assert_eq!(f.reduce_mod_ball(&int(7 * 3 + 5), &int(2)), int(26));
        // 1/2 ≡ 4 mod 7
        assert_eq!(f.reduce_mod_ball(&frac(1, 2), &int(1)), int(4));
        // 1/7 keeps its polar part
        assert_eq!(f.reduce_mod_ball(&frac(1, 7), &int(0)), frac(1, 7));
        // non-integral levels round up
        assert_eq!(f.reduce_mod_ball(&int(7 * 3 + 5), &frac(1, 2)), int(5));
    }

    #[test]
    fn tadic_reduction_truncates_laurent_series() {
        let f = TAdic::new();
        // 1/(1 - t) = 1 + t + t^2 + ...
        let g = RatFunc::new(qp(&[1]), qp(&[1, -1])).unwrap();
        assert_eq!(f.reduce_mod_ball(&g, &int(3)), RatFunc::poly(qp(&[1, 1, 1])));
        let h = RatFunc::new(qp(&[1]), qp(&[0, 1, -1])).unwrap(); // t^-1 + 1 + t + ...
        let r = f.reduce_mod_ball(&h, &int(1));
        assert_eq!(r, RatFunc::new(qp(&[1, 1]), qp(&[0, 1])).unwrap());
    }

    fn padic_elem() -> impl Strategy<Value = Rational> {
        (-300i64..300, 1i64..60).prop_map(|(n, d)| frac(n, d))
    }

    fn tadic_elem() -> impl Strategy<Value = RatFunc> {
        (proptest::collection::vec(-4i64..5, 0..4), proptest::collection::vec(-4i64..5, 1..3), 0usize..3)
            .prop_filter_map("nonzero den", |(n, d, shift)| {
                let mut den = vec![0i64; shift];
                den.extend(d);
                let den = qp(&den);
                if den.is_zero() {
                    None
                } else {
                    RatFunc::new(qp(&n), den).ok()
                }
            })
    }

    proptest! {
        #[test]
        fn padic_valuation_axioms(a in padic_elem(), b in padic_elem(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let f = PAdic::new(p).unwrap();
            prop_assert_eq!(f.val(&(&a * &b)), f.val(&a) + f.val(&b));
            let s = f.val(&(&a + &b));
            let m = f.val(&a).min(f.val(&b));
            prop_assert!(s >= m);
            if f.val(&a) != f.val(&b) {
                prop_assert_eq!(s, m);
            }
        }

        #[test]
        fn tadic_valuation_axioms(a in tadic_elem(), b in tadic_elem()) {
            let f = TAdic::new();
            prop_assert_eq!(f.val(&f.mul(&a, &b)), f.val(&a) + f.val(&b));
            let s = f.val(&f.add(&a, &b));
            let m = f.val(&a).min(f.val(&b));
            prop_assert!(s >= m);
            if f.val(&a) != f.val(&b) {
                prop_assert_eq!(s, m);
            }
        }

        #[test]
        fn shifted_expansion_reproduces_polynomial(
            coeffs in proptest::collection::vec(padic_elem(), 0..7),
            c in padic_elem(),
            xs in proptest::collection::vec(padic_elem(), 20),
        ) {
            let f = PAdic::new(3).unwrap();
            let shifted = f.taylor_shift(&coeffs, &c).unwrap();
            for x in &xs {
                let direct = f.poly_eval(&coeffs, x);
                let via = f.poly_eval(&shifted, &(x - &c));
                prop_assert_eq!(direct, via);
            }
        }

        #[test]
        fn reduction_stays_in_ball_and_is_canonical(c in padic_elem(), d in padic_elem(), r in -2i64..5) {
            let f = PAdic::new(5).unwrap();
            let r = int(r);
            let rc = f.reduce_mod_ball(&c, &r);
            prop_assert!(f.val(&(&rc - &c)) >= GammaValue::Finite(r.clone()));
            if f.val(&(&c - &d)) >= GammaValue::Finite(r.clone()) {
                prop_assert_eq!(rc, f.reduce_mod_ball(&d, &r));
            }
        }

        #[test]
        fn tadic_reduction_stays_in_ball(c in tadic_elem(), r in -2i64..4) {
            let f = TAdic::new();
            let r = int(r);
            let rc = f.reduce_mod_ball(&c, &r);
            prop_assert!(f.val(&f.sub(&rc, &c)) >= GammaValue::Finite(r));
        }
    }
}
