//! Exact polyhedral cones by the double-description method.
//!
//! A cone `{y : E y = 0, A y ≥ 0}` is kept as a lineality basis plus its
//! extreme rays (modulo the lineality space). Constraints are added one at a
//! time; adjacency of rays uses the combinatorial zero-set test.
//!
//! Generators are primitive integer vectors. Arithmetic is checked `i128`;
//! an overflow is reported as an error rather than wrapped.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gamma::Rational;

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Positive multiple of `v` with coprime integer entries.
pub fn primitive(v: &[Rational]) -> Vec<Rational> {
    let lcm = v.iter().fold(BigInt::from(1), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, n| acc.gcd(n));
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|n| Rational::from_integer(n / &g)).collect()
}

fn overflow() -> Error {
    Error::precondition("coefficients too large for exact cone arithmetic")
}

/// Integer row proportional to a rational one.
fn to_int_row(v: &[Rational]) -> Result<Vec<i128>> {
    primitive(v).iter().map(|q| q.numer().to_i128().ok_or_else(overflow)).collect()
}

fn idot(a: &[i128], b: &[i128]) -> Result<i128> {
    a.iter()
        .zip(b)
        .try_fold(0i128, |acc, (x, y)| x.checked_mul(*y).and_then(|p| acc.checked_add(p)).ok_or_else(overflow))
}

fn iprimitive(mut v: Vec<i128>) -> Vec<i128> {
    let g = v.iter().fold(0i128, |acc, x| acc.gcd(x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
    v
}

/// `p·y − q·x`, made primitive.
fn combine(p: i128, y: &[i128], q: i128, x: &[i128]) -> Result<Vec<i128>> {
    let v = y
        .iter()
        .zip(x)
        .map(|(a, b)| {
            let l = p.checked_mul(*a)?;
            let r = q.checked_mul(*b)?;
            l.checked_sub(r)
        })
        .collect::<Option<Vec<i128>>>()
        .ok_or_else(overflow)?;
    Ok(iprimitive(v))
}

fn to_rational(v: &[i128]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    dim: usize,
    /// Inequalities `a·y ≥ 0` processed so far (equalities are not kept:
    /// every generator is zero on them).
    constraints: Vec<Vec<i128>>,
    lineality: Vec<Vec<i128>>,
    rays: Vec<Vec<i128>>,
}

impl Cone {
    /// The whole space `Q^dim`.
    pub fn full(dim: usize) -> Self {
        let lineality = (0..dim).map(|i| (0..dim).map(|j| i128::from(i == j)).collect()).collect();
        Cone { dim, constraints: Vec::new(), lineality, rays: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lineality(&self) -> Vec<Vec<Rational>> {
        self.lineality.iter().map(|v| to_rational(v)).collect()
    }

    pub fn rays(&self) -> Vec<Vec<Rational>> {
        self.rays.iter().map(|v| to_rational(v)).collect()
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    pub fn lineality_dim(&self) -> usize {
        self.lineality.len()
    }

    /// Whether the cone is `{0}`.
    pub fn is_trivial(&self) -> bool {
        self.lineality.is_empty() && self.rays.is_empty()
    }

    /// Every generator, lineality vectors in both orientations.
    pub fn generators(&self) -> Vec<Vec<Rational>> {
        self.int_generators().map(|v| to_rational(&v)).collect()
    }

    fn int_generators(&self) -> impl Iterator<Item = Vec<i128>> + '_ {
        self.rays.iter().cloned().chain(self.lineality.iter().flat_map(|l| [l.clone(), l.iter().map(|x| -x).collect()]))
    }

    /// Signs of `a` over all generators: `(some positive, some negative)`.
    pub fn sign_range(&self, a: &[Rational]) -> Result<(bool, bool)> {
        let a = to_int_row(a)?;
        let (mut pos, mut neg) = (false, false);
        for r in &self.rays {
            let v = idot(&a, r)?;
            pos |= v > 0;
            neg |= v < 0;
        }
        for l in &self.lineality {
            if idot(&a, l)? != 0 {
                return Ok((true, true));
            }
        }
        Ok((pos, neg))
    }

    /// Splits off a lineality vector not orthogonal to `a`, oriented so that
    /// `a·l > 0`, and projects everything else onto `a·y = 0`.
    fn pivot(&mut self, a: &[i128]) -> Result<Option<Vec<i128>>> {
        let mut found = None;
        for (k, l) in self.lineality.iter().enumerate() {
            if idot(a, l)? != 0 {
                found = Some(k);
                break;
            }
        }
        let Some(k) = found else { return Ok(None) };
        let mut l = self.lineality.remove(k);
        let mut al = idot(a, &l)?;
        if al < 0 {
            l.iter_mut().for_each(|x| *x = -*x);
            al = -al;
        }
        for v in self.lineality.iter_mut().chain(self.rays.iter_mut()) {
            let av = idot(a, v)?;
            if av != 0 {
                // al > 0 keeps the orientation of rays
                *v = combine(al, v, av, &l)?;
            }
        }
        Ok(Some(iprimitive(l)))
    }

    fn zero_set(&self, r: &[i128]) -> Result<Vec<u64>> {
        let mut bits = vec![0u64; self.constraints.len().div_ceil(64).max(1)];
        for (i, c) in self.constraints.iter().enumerate() {
            if idot(c, r)? == 0 {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        Ok(bits)
    }

    /// Keeps the rays on the zero side (and the positive side if asked) and
    /// adds the crossings of adjacent pairs with opposite signs on `a`.
    fn split(&mut self, a: &[i128], keep_positive: bool) -> Result<()> {
        let vals: Vec<i128> = self.rays.iter().map(|r| idot(a, r)).collect::<Result<_>>()?;
        if vals.iter().all(|&v| v >= 0) && keep_positive {
            return Ok(());
        }
        let zs: Vec<Vec<u64>> = self.rays.iter().map(|r| self.zero_set(r)).collect::<Result<_>>()?;
        let pos: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0).collect();
        let neg: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] < 0).collect();
        let mut next: Vec<Vec<i128>> = Vec::new();
        for (i, r) in self.rays.iter().enumerate() {
            if vals[i] == 0 || (keep_positive && vals[i] > 0) {
                next.push(r.clone());
            }
        }
        for &p in &pos {
            for &q in &neg {
                let common: Vec<u64> = zs[p].iter().zip(&zs[q]).map(|(x, y)| x & y).collect();
                let blocked = (0..self.rays.len())
                    .any(|r| r != p && r != q && common.iter().zip(&zs[r]).all(|(c, z)| c & !z == 0));
                if !blocked {
                    next.push(combine(vals[p], &self.rays[q], vals[q], &self.rays[p])?);
                }
            }
        }
        next.sort();
        next.dedup();
        self.rays = next;
        Ok(())
    }

    pub fn add_ineq(&mut self, a: &[Rational]) -> Result<()> {
        assert_eq!(a.len(), self.dim, "constraint dimension");
        let a = to_int_row(a)?;
        if let Some(l) = self.pivot(&a)? {
            self.rays.push(l);
        } else {
            self.split(&a, true)?;
        }
        self.constraints.push(a);
        Ok(())
    }

    pub fn add_eq(&mut self, a: &[Rational]) -> Result<()> {
        assert_eq!(a.len(), self.dim, "constraint dimension");
        let a = to_int_row(a)?;
        if self.pivot(&a)?.is_none() {
            self.split(&a, false)?;
        }
        Ok(())
    }

    /// Dimension of the linear span of the cone.
    pub fn span_dim(&self) -> usize {
        rank(self.lineality().into_iter().chain(self.rays()).collect())
    }
}

/// Rank of a list of rational vectors.
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let mut r = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for col in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let k = &rows[i][col] / &rows[r][col];
                rows[i] = rows[i].iter().zip(&rows[r]).map(|(a, b)| a - &k * b).collect();
            }
        }
        r += 1;
    }
    r
}
