//! Newton polygons and root-valuation profiles of a plane curve along an
//! outward path.
//!
//! Convention: the reported slope of a segment is the common valuation of the
//! roots it accounts for, so `y − c` has the single slope `val c`.
//!
//! A cover is given as `F(x, y) = Σ_j a_j(x) y^j`, stored as the list of
//! coefficient polynomials `a_j` (each lowest degree first). Along the path
//! `t ↦ B(c, t)` the valuation of `a_j` at the moving Gauss point is a
//! min-affine function of `t`, and the roots of `F(x_t, y)` have valuations
//! read off the Newton polygon of those values.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{format_rational, serde_rational, Affine, GammaValue, MinAffine, Rational, Term};
use crate::valfield::ValuedField;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonSegment {
    #[serde(with = "serde_rational")]
    pub slope: Rational,
    pub multiplicity: usize,
}

/// Segments sorted by strictly increasing slope. Roots at `y = 0` (leading
/// infinite entries) are counted separately in `vanishing`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub segments: Vec<NewtonSegment>,
    pub vanishing: usize,
}

impl NewtonPolygon {
    /// Number of nonzero roots, i.e. the sum of multiplicities.
    pub fn root_count(&self) -> usize {
        self.segments.iter().map(|s| s.multiplicity).sum()
    }

    /// Root valuations with repetition, in increasing order, zero roots last.
    pub fn root_valuations(&self) -> Vec<GammaValue> {
        let mut out = Vec::new();
        for s in &self.segments {
            out.extend(std::iter::repeat_n(GammaValue::Finite(s.slope.clone()), s.multiplicity));
        }
        out.extend(std::iter::repeat_n(GammaValue::Infinity, self.vanishing));
        out
    }
}

fn idx(i: usize) -> Rational {
    Rational::from_integer(BigInt::from(i))
}

/// Vertices of the lower convex hull of `(x, y)` points sorted by `x`;
/// points in the relative interior of an edge are dropped.
fn lower_hull(points: &[(usize, Rational)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(points.len());
    for k in 0..points.len() {
        while hull.len() >= 2 {
            let (o, a, b) = (&points[hull[hull.len() - 2]], &points[hull[hull.len() - 1]], &points[k]);
            let cross = idx(a.0 - o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * idx(b.0 - o.0);
            if cross <= Rational::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    hull
}

pub fn newton_polygon(coeff_vals: &[GammaValue]) -> Result<NewtonPolygon> {
    let points: Vec<(usize, Rational)> =
        coeff_vals.iter().enumerate().filter_map(|(i, v)| v.finite().map(|w| (i, w.clone()))).collect();
    if points.is_empty() {
        return Err(Error::precondition("Newton polygon of the zero polynomial"));
    }
    let hull = lower_hull(&points);
    let mut segments: Vec<NewtonSegment> = hull
        .windows(2)
        .map(|w| {
            let (i1, w1) = &points[w[0]];
            let (i2, w2) = &points[w[1]];
            NewtonSegment { slope: (w1 - w2) / idx(i2 - i1), multiplicity: i2 - i1 }
        })
        .collect();
    segments.reverse();
    Ok(NewtonPolygon { segments, vanishing: points[0].0 })
}

/// `t ↦ gauss_val(a, B(c, t))` as a min-affine function.
pub fn coeff_val_path<F: ValuedField>(field: &F, a: &[F::Elem], c: &F::Elem) -> Result<MinAffine> {
    let shifted = field.taylor_shift(a, c)?;
    if shifted.is_empty() {
        return Ok(MinAffine::constant(GammaValue::Infinity));
    }
    MinAffine::new(shifted.iter().enumerate().map(|(i, b)| Term::new(idx(i), field.val(b))).collect())
}

/// A set of roots whose valuation is the same affine function of `t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootBranch {
    pub valuation: Affine,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfilePiece {
    #[serde(with = "serde_rational")]
    pub start: Rational,
    pub end: GammaValue,
    /// Sorted by valuation function.
    pub roots: Vec<RootBranch>,
    /// Roots that are identically zero along the path.
    pub vanishing: usize,
}

impl ProfilePiece {
    fn same_data(&self, other: &ProfilePiece) -> bool {
        self.roots == other.roots && self.vanishing == other.vanishing
    }

    pub fn mass(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum::<usize>() + self.vanishing
    }
}

impl fmt::Display for ProfilePiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]:", format_rational(&self.start), self.end)?;
        for r in &self.roots {
            write!(f, " ({})x{}", r.valuation, r.multiplicity)?;
        }
        if self.vanishing > 0 {
            write!(f, " (inf)x{}", self.vanishing)?;
        }
        Ok(())
    }
}

/// Consecutive pieces covering `[0, ∞]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootProfile {
    pub pieces: Vec<ProfilePiece>,
}

impl RootProfile {
    /// Root valuations at `t`, with repetition, sorted increasingly.
    pub fn valuations_at(&self, t: &GammaValue) -> Result<Vec<GammaValue>> {
        let piece = self
            .pieces
            .iter()
            .find(|p| GammaValue::Finite(p.start.clone()) <= *t && *t <= p.end)
            .ok_or_else(|| Error::precondition("t outside [0, inf]"))?;
        let mut out = Vec::with_capacity(piece.mass());
        for r in &piece.roots {
            let v = match t {
                GammaValue::Finite(t) => GammaValue::Finite(r.valuation.eval(t)),
                GammaValue::Infinity => affine_at_infinity(&r.valuation),
            };
            out.extend(std::iter::repeat_n(v, r.multiplicity));
        }
        out.extend(std::iter::repeat_n(GammaValue::Infinity, piece.vanishing));
        out.sort();
        Ok(out)
    }
}

fn affine_at_infinity(a: &Affine) -> GammaValue {
    if a.slope.is_positive() {
        GammaValue::Infinity
    } else {
        // root valuations along the path never decrease
        GammaValue::Finite(a.intercept.clone())
    }
}

/// Root data on an interval where every coefficient is the affine function
/// `lines[j]` (or identically `∞`) and the hull does not change.
fn piece_roots(lines: &[Option<Affine>], sample: &Rational) -> Vec<RootBranch> {
    let pts: Vec<(usize, Rational)> =
        lines.iter().enumerate().filter_map(|(j, l)| l.as_ref().map(|l| (j, l.eval(sample)))).collect();
    let hull = lower_hull(&pts);
    let mut roots: Vec<RootBranch> = hull
        .windows(2)
        .map(|w| {
            let (i1, i2) = (pts[w[0]].0, pts[w[1]].0);
            let a1 = lines[i1].as_ref().expect("finite");
            let a2 = lines[i2].as_ref().expect("finite");
            RootBranch { valuation: (a1 - a2).scale(&(Rational::one() / idx(i2 - i1))), multiplicity: i2 - i1 }
        })
        .collect();
    roots.sort();
    roots
}

/// Parameters in `(lo, hi)` where three coefficient points become collinear.
fn collinearity_cuts(lines: &[Option<Affine>], lo: &Rational, hi: Option<&Rational>) -> Vec<Rational> {
    let finite: Vec<(usize, &Affine)> =
        lines.iter().enumerate().filter_map(|(j, l)| l.as_ref().map(|l| (j, l))).collect();
    let mut cuts = Vec::new();
    for a in 0..finite.len() {
        for b in a + 1..finite.len() {
            for c in b + 1..finite.len() {
                let (i, li) = finite[a];
                let (j, lj) = finite[b];
                let (k, lk) = finite[c];
                let g = &(lj - li).scale(&idx(k - i)) - &(lk - li).scale(&idx(j - i));
                if g.slope.is_zero() {
                    continue;
                }
                let t = -&g.intercept / &g.slope;
                if t > *lo && hi.is_none_or(|h| t < *h) {
                    cuts.push(t);
                }
            }
        }
    }
    cuts
}

/// Root-valuation profile of `F(x, y) = Σ f[j](x) y^j` along `t ↦ B(c, t)`.
pub fn root_valuations_along_path<F: ValuedField>(field: &F, f: &[Vec<F::Elem>], c: &F::Elem) -> Result<RootProfile> {
    let mut coeffs: Vec<Vec<F::Elem>> = f.iter().map(|a| field.poly_trim(a.clone())).collect();
    while coeffs.last().is_some_and(|a| a.is_empty()) {
        coeffs.pop();
    }
    if coeffs.len() < 2 {
        return Err(Error::precondition("F has y-degree 0"));
    }
    let paths: Vec<MinAffine> = coeffs.iter().map(|a| coeff_val_path(field, a, c)).collect::<Result<_>>()?;
    let vanishing = paths.iter().take_while(|m| m.is_infinite()).count();

    let mut breaks: BTreeSet<Rational> = BTreeSet::new();
    for m in &paths {
        breaks.extend(m.breakpoints().into_iter().filter(|b| b.is_positive()));
    }
    let mut bounds: Vec<Rational> = vec![Rational::zero()];
    bounds.extend(breaks);

    let mut pieces: Vec<ProfilePiece> = Vec::new();
    for (n, lo) in bounds.iter().enumerate() {
        let hi = bounds.get(n + 1);
        let lines: Vec<Option<Affine>> = paths.iter().map(|m| m.piece_right_of(lo)).collect();
        let mut cuts: BTreeSet<Rational> = collinearity_cuts(&lines, lo, hi).into_iter().collect();
        cuts.insert(lo.clone());
        let cuts: Vec<Rational> = cuts.into_iter().collect();
        for (m, start) in cuts.iter().enumerate() {
            let end = cuts.get(m + 1).or(hi);
            let sample = match end {
                Some(e) => (start + e) / Rational::from_integer(2.into()),
                None => start + Rational::one(),
            };
            let piece = ProfilePiece {
                start: start.clone(),
                end: end.map_or(GammaValue::Infinity, |e| GammaValue::Finite(e.clone())),
                roots: piece_roots(&lines, &sample),
                vanishing,
            };
            match pieces.last_mut() {
                Some(prev) if prev.same_data(&piece) => prev.end = piece.end,
                _ => pieces.push(piece),
            }
        }
    }
    Ok(RootProfile { pieces })
}

/// Piece boundaries at which the root data changes.
pub fn branch_events(profile: &RootProfile) -> Vec<GammaValue> {
    profile
        .pieces
        .windows(2)
        .filter(|w| !w[0].same_data(&w[1]))
        .map(|w| GammaValue::Finite(w[1].start.clone()))
        .collect()
}

/// Arithmetic in the residue field: `F_p` or `Q`.
#[derive(Clone, Debug)]
struct Residue {
    p: Option<BigInt>,
}

impl Residue {
    fn norm(&self, q: Rational) -> Rational {
        match &self.p {
            None => q,
            Some(p) => {
                let d = q.denom().modpow(&(p - 2u32), p);
                Rational::from_integer((q.numer() * d).mod_floor(p))
            }
        }
    }

    fn inv(&self, q: &Rational) -> Rational {
        self.norm(Rational::one() / q)
    }

    fn sqrt(&self, q: &Rational) -> Option<Rational> {
        if q.is_zero() {
            return Some(Rational::zero());
        }
        match &self.p {
            None => {
                if q.is_negative() {
                    return None;
                }
                let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
                (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
            }
            Some(p) => tonelli_shanks(q.numer(), p).map(Rational::from_integer),
        }
    }
}

fn tonelli_shanks(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let one = BigInt::one();
    let half = (p - 1u32) / 2u32;
    if a.modpow(&half, p) != one {
        return None;
    }
    let (mut q, mut s) = (p - 1u32, 0u32);
    while q.is_even() {
        q /= 2u32;
        s += 1;
    }
    let mut z = BigInt::from(2);
    while z.modpow(&half, p) == one {
        z += 1u32;
    }
    let mut c = z.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1u32) / 2u32), p);
    let mut t = a.modpow(&q, p);
    let mut m = s;
    while t != one {
        let mut i = 0u32;
        let mut tt = t.clone();
        while tt != one {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1)), p);
        r = (&r * &b) % p;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        m = i;
    }
    Some(r)
}

/// Whether a residual polynomial (lowest degree first, no trailing zeros) is a
/// square in `k[z]`, by extracting the root from the top down.
fn residual_is_square(k: &Residue, f: &[Rational]) -> bool {
    if f.is_empty() {
        return true;
    }
    let deg = f.len() - 1;
    if deg % 2 == 1 {
        return false;
    }
    let n = deg / 2;
    let Some(top) = k.sqrt(&f[deg]) else { return false };
    let mut g = vec![Rational::zero(); n + 1];
    g[n] = top;
    let two_top_inv = k.inv(&(&g[n] * Rational::from_integer(2.into())));
    for step in 1..=n {
        let e = deg - step;
        let mut acc = f[e].clone();
        for i in (n - step + 1)..=n {
            let j = e - i;
            if j > n - step && j <= n {
                acc -= &g[i] * &g[j];
            }
        }
        g[n - step] = k.norm(acc * &two_top_inv);
    }
    (0..=deg).all(|e| {
        let lo = e.saturating_sub(n);
        let s: Rational = (lo..=e.min(n)).map(|i| &g[i] * &g[e - i]).sum();
        k.norm(s - &f[e]).is_zero()
    })
}

/// Residual-square test for a quadratic cover at the ball `B(c, r)`, `r` an
/// integer: whether the discriminant `a_1² − 4 a_0 a_2`, rescaled to the
/// residue field of the ball, is a square there (even valuation and a square
/// residual polynomial). `None` outside its scope: `F` not quadratic in `y`,
/// residue characteristic 2, or vanishing discriminant.
pub fn residual_split<F: ValuedField>(field: &F, f: &[Vec<F::Elem>], c: &F::Elem, r: i64) -> Result<Option<bool>> {
    let coeffs: Vec<Vec<F::Elem>> = f.iter().map(|a| field.poly_trim(a.clone())).collect();
    let degree = coeffs.iter().rposition(|a| !a.is_empty());
    if degree != Some(2) || field.residue_char() == 2 {
        return Ok(None);
    }
    let four = field.from_int(4);
    let disc = field.poly_add(
        &field.poly_mul(&coeffs[1], &coeffs[1]),
        &field.poly_scale(&field.poly_mul(&coeffs[0], &coeffs[2]), &field.neg(&four)),
    );
    if disc.is_empty() {
        return Ok(None);
    }
    let scaled: Vec<F::Elem> = field
        .taylor_shift(&disc, c)?
        .iter()
        .enumerate()
        .map(|(i, b)| field.mul(b, &field.uniformizer_pow(r * i as i64)))
        .collect();
    let m = scaled.iter().map(|b| field.val(b)).min().expect("nonzero discriminant");
    let m = m.expect_finite("discriminant valuation")?;
    if !m.is_integer() {
        return Err(Error::inconsistency("non-integral discriminant valuation"));
    }
    let m = m.to_integer();
    if m.is_odd() {
        return Ok(Some(false));
    }
    let m: i64 = m.try_into().map_err(|_| Error::precondition("valuation out of range"))?;
    let unit = field.uniformizer_pow(-m);
    let k = Residue { p: (field.residue_char() != 0).then(|| BigInt::from(field.residue_char())) };
    let mut residual: Vec<Rational> =
        scaled.iter().map(|b| field.residue(&field.mul(b, &unit)).map(|q| k.norm(q))).collect::<Result<_>>()?;
    while residual.last().is_some_and(|q| q.is_zero()) {
        residual.pop();
    }
    Ok(Some(residual_is_square(&k, &residual)))
}
