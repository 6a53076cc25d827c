//! Seeded instance generators and brute-force oracles shared by the test
//! suites and benches of `skeleta`.
//!
//! The oracles here avoid the library's own kernels: valuations are counted
//! by trial division, Taylor shifts use the binomial formula, and polynomial
//! values come from plain Horner evaluation.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skeleta::gamma::{frac, int, GammaValue, Rational};
use skeleta::gflow::{AffineForm, ComplexSpec, RegionConstraint, Relation};
use skeleta::newton::RootProfile;
use skeleta::pline::{Chart, PLinePoint};
use skeleta::valfield::PAdic;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn big_val(p: u64, n: &BigInt) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut k = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        k += 1;
    }
    k
}

/// p-adic valuation of a rational by trial division.
pub fn padic_val(p: u64, q: &Rational) -> GammaValue {
    if q.is_zero() {
        return GammaValue::Infinity;
    }
    GammaValue::from_int(big_val(p, q.numer()) - big_val(p, q.denom()))
}

pub fn pow(p: u64, k: i64) -> Rational {
    let base = int(p as i64);
    let mut acc = Rational::one();
    for _ in 0..k.unsigned_abs() {
        acc *= &base;
    }
    if k < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// `u·p^k / d` with small `u`, `d` coprime-ish to nothing in particular.
pub fn rational(rng: &mut Rng8, p: u64) -> Rational {
    let u = rng.gen_range(-30i64..=30);
    let d = rng.gen_range(1i64..=9);
    frac(u, d) * pow(p, rng.gen_range(-2..=3))
}

pub fn nonzero_rational(rng: &mut Rng8, p: u64) -> Rational {
    loop {
        let q = rational(rng, p);
        if !q.is_zero() {
            return q;
        }
    }
}

/// Polynomial of degree at most `max_deg` with a nonzero leading coefficient;
/// some coefficients are zero.
pub fn poly(rng: &mut Rng8, p: u64, max_deg: usize) -> Vec<Rational> {
    let deg = rng.gen_range(0..=max_deg);
    let mut f: Vec<Rational> =
        (0..deg).map(|_| if rng.gen_bool(0.25) { Rational::zero() } else { rational(rng, p) }).collect();
    f.push(nonzero_rational(rng, p));
    f
}

pub fn horner(f: &[Rational], x: &Rational) -> Rational {
    f.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn binom(n: usize, k: usize) -> Rational {
    (0..k).fold(Rational::one(), |acc, i| acc * int((n - i) as i64) / int((i + 1) as i64))
}

/// Coefficients of `f` in powers of `x − c`, by the binomial formula.
pub fn binomial_shift(f: &[Rational], c: &Rational) -> Vec<Rational> {
    (0..f.len())
        .map(|k| {
            (k..f.len()).fold(Rational::zero(), |acc, i| {
                let mut cp = Rational::one();
                for _ in 0..i - k {
                    cp *= c;
                }
                acc + &f[i] * binom(i, k) * cp
            })
        })
        .collect()
}

/// `min_i (val a_i + i·r)` over the binomial Taylor coefficients.
pub fn gauss_by_shift(p: u64, f: &[Rational], c: &Rational, r: &Rational) -> GammaValue {
    binomial_shift(f, c)
        .iter()
        .enumerate()
        .map(|(i, a)| padic_val(p, a).add_rational(&(r * int(i as i64))))
        .min()
        .unwrap_or(GammaValue::Infinity)
}

/// `n` points `c + p^r·u`, `u = 0, 1, …`, of the ball `B(c, r)`.
pub fn ball_grid(p: u64, c: &Rational, r: i64, n: usize) -> Vec<Rational> {
    let step = pow(p, r);
    (0..n).map(|u| c + &step * int(u as i64)).collect()
}

/// Minimum of `val f` over the grid, `∞` for an empty grid.
pub fn grid_min(p: u64, f: &[Rational], grid: &[Rational]) -> GammaValue {
    grid.iter().map(|x| padic_val(p, &horner(f, x))).min().unwrap_or(GammaValue::Infinity)
}

/// Whether the residual polynomial of `f` at `B(c, r)` vanishes on all of
/// `F_p`. Exactly then no rational point of the ball attains the Gauss value.
pub fn residual_vanishes_on_fp(p: u64, f: &[Rational], c: &Rational, r: i64) -> bool {
    let shifted = binomial_shift(f, c);
    let gauss = gauss_by_shift(p, f, c, &int(r));
    let Some(g) = gauss.finite() else { return true };
    let pi = BigInt::from(p);
    let residual: Vec<(u64, BigInt)> = shifted
        .iter()
        .enumerate()
        .filter(|(i, a)| padic_val(p, a).add_rational(&int(r * *i as i64)) == gauss)
        .map(|(i, a)| {
            let q = a * pow(p, r * i as i64) / pow(p, g.to_integer().try_into().expect("small exponent"));
            let inv = q.denom().modpow(&(&pi - 2u32), &pi);
            (i as u64, ((q.numer() * inv) % &pi + &pi) % &pi)
        })
        .collect();
    (0..p).all(|y| {
        let y = BigInt::from(y);
        let total = residual.iter().fold(BigInt::zero(), |acc, (i, cf)| acc + cf * y.pow(*i as u32));
        (total % &pi).is_zero()
    })
}

pub fn radius(rng: &mut Rng8) -> GammaValue {
    if rng.gen_bool(0.15) {
        GammaValue::Infinity
    } else {
        GammaValue::Finite(frac(rng.gen_range(-9i64..=18), rng.gen_range(1i64..=3)))
    }
}

/// A random point: simple, a ball of either chart, or `∞`.
pub fn point(rng: &mut Rng8, k: &PAdic) -> PLinePoint<Rational> {
    match rng.gen_range(0..10) {
        0 => PLinePoint::infinity(k),
        1..=3 => PLinePoint::simple(k, &rational(rng, k.p())),
        _ => {
            let chart = if rng.gen_bool(0.7) { Chart::Std } else { Chart::Inv };
            PLinePoint::ball(k, chart, &rational(rng, k.p()), radius(rng))
        }
    }
}

pub fn simple_point(rng: &mut Rng8, k: &PAdic) -> PLinePoint<Rational> {
    if rng.gen_bool(0.1) {
        PLinePoint::infinity(k)
    } else {
        PLinePoint::simple(k, &rational(rng, k.p()))
    }
}

/// Up to `max` simple points (duplicates allowed; divisors drop them).
pub fn divisor_points(rng: &mut Rng8, k: &PAdic, max: usize) -> Vec<PLinePoint<Rational>> {
    let n = rng.gen_range(1..=max);
    (0..n).map(|_| simple_point(rng, k)).collect()
}

/// `Π (y − g_i(x))` as x-polynomials indexed by the power of `y`.
pub fn linear_product(gs: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    fn trim(mut f: Vec<Rational>) -> Vec<Rational> {
        while f.last().is_some_and(Zero::is_zero) {
            f.pop();
        }
        f
    }
    fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = a.len().max(b.len());
        trim((0..n).map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default()).collect())
    }
    fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }
    let mut f: Vec<Vec<Rational>> = vec![vec![Rational::one()]];
    for g in gs {
        let neg: Vec<Rational> = g.iter().map(|c| -c).collect();
        let mut next: Vec<Vec<Rational>> = vec![vec![]; f.len() + 1];
        for (j, a) in f.iter().enumerate() {
            next[j + 1] = add(&next[j + 1], a);
            next[j] = add(&next[j], &mul(a, &neg));
        }
        f = next;
    }
    f
}

/// Affine pieces `t ↦ val a_i + i·t` of the Gauss value of `g` along `B(c, t)`,
/// as `(slope, intercept)` with finite intercept.
pub fn gauss_lines(p: u64, g: &[Rational], c: &Rational) -> Vec<(Rational, Rational)> {
    binomial_shift(g, c)
        .iter()
        .enumerate()
        .filter_map(|(i, a)| padic_val(p, a).finite().map(|v| (int(i as i64), v.clone())))
        .collect()
}

/// Class of `b` in the family `{0, 1, b, ∞}`: which leg of the 3-star absorbs
/// `b`, or `3` when it branches at the Gauss point.
pub fn four_point_class(p: u64, b: &Rational) -> u8 {
    let zero = GammaValue::zero();
    if padic_val(p, b) > zero {
        0
    } else if padic_val(p, b) < zero {
        1
    } else if padic_val(p, &(b - Rational::one())) > zero {
        2
    } else {
        3
    }
}

/// A sample parameter `b ∉ {0, 1}`, biased so that every class shows up.
pub fn family_parameter(rng: &mut Rng8, p: u64) -> Rational {
    loop {
        let b = match rng.gen_range(0..4) {
            0 => nonzero_rational(rng, p) * pow(p, rng.gen_range(1..=3)),
            1 => nonzero_rational(rng, p) / pow(p, rng.gen_range(3..=5)),
            2 => Rational::one() + nonzero_rational(rng, p) * pow(p, rng.gen_range(3..=5)),
            _ => rational(rng, p),
        };
        if !b.is_zero() && !b.is_one() {
            return b;
        }
    }
}

fn coord_names(n: usize) -> Vec<String> {
    (0..n).map(|i| if i + 1 == n { "h".to_string() } else { format!("x{i}") }).collect()
}

/// A complex on `n ≥ 2` coordinates `x0, …, h` with the standard hyperplanes,
/// `extra` random functionals, region `x0 ≤ h` and preserved `ξ = x0 + 2h`.
/// `x0` is bounded by `h` on `W`, so every flow direction has `e_x0 = e_h = 0`
/// and `ξ` is invariant.
pub fn flow_complex(rng: &mut Rng8, n: usize, extra: usize) -> ComplexSpec {
    let w = coord_names(n);
    let form = |alpha: Vec<i64>, c: i64| AffineForm::new(alpha.into_iter().map(int).collect(), int(c));
    let mut functionals = Vec::new();
    while functionals.len() < extra {
        let alpha: Vec<i64> = (0..n).map(|_| rng.gen_range(-3i64..=3)).collect();
        if alpha.iter().all(|&a| a == 0) {
            continue;
        }
        functionals.push(form(alpha, rng.gen_range(-6i64..=6)));
    }
    let mut bound = vec![0; n];
    bound[0] = 1;
    bound[n - 1] = -1;
    let mut xi = vec![0; n];
    xi[0] = 1;
    xi[n - 1] = 2;
    ComplexSpec {
        w,
        h: "h".into(),
        functionals,
        xi: vec![form(xi, 0)],
        region: vec![RegionConstraint { form: form(bound, 0), rel: Relation::Le }],
        symmetry: vec![],
        standard_hyperplanes: true,
    }
}

/// A start point of `W'` for [`flow_complex`]: nonnegative rationals with
/// `x0 ≤ h`, occasionally `h = ∞`.
pub fn flow_start(rng: &mut Rng8, n: usize) -> Vec<GammaValue> {
    if rng.gen_bool(0.05) {
        let mut x: Vec<GammaValue> = (0..n).map(|_| GammaValue::Infinity).collect();
        x[0] = GammaValue::from_int(rng.gen_range(0..10));
        return x;
    }
    let mut x: Vec<Rational> = (0..n).map(|_| frac(rng.gen_range(0i64..=40), rng.gen_range(1i64..=3))).collect();
    if x[0] > x[n - 1] {
        x.swap(0, n - 1);
    }
    x.into_iter().map(GammaValue::Finite).collect()
}

/// A random flow time in `[0, 20]`.
pub fn flow_time(rng: &mut Rng8) -> GammaValue {
    GammaValue::Finite(frac(rng.gen_range(0i64..=60), rng.gen_range(1i64..=3)))
}

/// Whether a rational vector is componentwise nonnegative.
pub fn nonnegative(x: &[Rational]) -> bool {
    x.iter().all(|v| !v.is_negative())
}

/// Checks a root profile of `Π (y − g_i(x))` against the Gauss values of the
/// `g_i` on `[0, t_max]`, piece by piece.
///
/// Both sides are piecewise affine. Between consecutive candidate points
/// (crossings of any two oracle lines and the piece boundaries) every sorted
/// value is affine, so agreement at the candidates and their midpoints is
/// agreement everywhere.
pub fn check_factor_oracle(
    p: u64,
    gs: &[Vec<Rational>],
    c: &Rational,
    profile: &RootProfile,
    t_max: &Rational,
) -> Result<(), String> {
    let lines: Vec<Vec<(Rational, Rational)>> = gs.iter().map(|g| gauss_lines(p, g, c)).collect();
    let oracle = |t: &Rational| -> Vec<GammaValue> {
        let mut v: Vec<GammaValue> = lines
            .iter()
            .map(|ls| ls.iter().map(|(s, b)| GammaValue::Finite(b + s * t)).min().unwrap_or(GammaValue::Infinity))
            .collect();
        v.sort();
        v
    };
    let all: Vec<&(Rational, Rational)> = lines.iter().flatten().collect();
    let zero = Rational::zero();
    let mut cand: Vec<Rational> = vec![zero.clone(), t_max.clone()];
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            if a.0 != b.0 {
                let t = (&b.1 - &a.1) / (&a.0 - &b.0);
                if t > zero && t < *t_max {
                    cand.push(t);
                }
            }
        }
    }
    for piece in &profile.pieces {
        if piece.start > zero && piece.start < *t_max {
            cand.push(piece.start.clone());
        }
    }
    cand.sort();
    cand.dedup();
    let mut samples = cand.clone();
    samples.extend(cand.windows(2).map(|w| (&w[0] + &w[1]) / int(2)));
    samples.sort();
    if profile.pieces.first().map(|q| &q.start) != Some(&zero) {
        return Err("profile does not start at 0".into());
    }
    for t in &samples {
        let tg = GammaValue::Finite(t.clone());
        let mut covered = false;
        for piece in &profile.pieces {
            if piece.start > *t || tg > piece.end {
                continue;
            }
            covered = true;
            let mut got: Vec<GammaValue> = Vec::new();
            for r in &piece.roots {
                got.extend(std::iter::repeat_n(GammaValue::Finite(r.valuation.eval(t)), r.multiplicity));
            }
            got.extend(std::iter::repeat_n(GammaValue::Infinity, piece.vanishing));
            got.sort();
            let want = oracle(t);
            if got != want {
                return Err(format!("at t = {t}: profile {got:?}, oracle {want:?}"));
            }
        }
        if !covered {
            return Err(format!("no piece covers t = {t}"));
        }
    }
    Ok(())
}

/// Random `g_i(x)` of degree at most 2.
pub fn linear_factors(rng: &mut Rng8, p: u64, max: usize) -> Vec<Vec<Rational>> {
    let n = rng.gen_range(1..=max);
    (0..n)
        .map(|_| {
            let mut g: Vec<Rational> = (0..rng.gen_range(1..=3)).map(|_| rational(rng, p)).collect();
            while g.last().is_some_and(Zero::is_zero) {
                g.pop();
            }
            g
        })
        .collect()
}
