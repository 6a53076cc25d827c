//! A piecewise-linear deformation retraction of `Γ^w ∪ [x_h = ∞]` onto a
//! definably compact core.
//!
//! Space is cut into cells by the sign patterns of finitely many affine
//! functionals `α·x − c`. A cell is in `D_0` when every coordinate is bounded
//! by `m·x_h + c` on it; `W_0` is the union of the `D_0` cells and `[x_h = ∞]`.
//! Any other cell `C` carries the direction `e_C`, the barycenter of the
//! polytope `β'C ∩ [Σ v_i = 1]` where `β'C` is the closed recession cone of `C`
//! cut by `v_h = 0`. A point moves along `x − t·e_C` until it leaves its cell
//! at time `τ(x)` through a face of smaller dimension, and continues from
//! there: `H(t, x) = H(t − τ(x), x − τ(x)·e_C)`. Every cell of the trajectory
//! has smaller dimension than the previous one, so the flow stops after at
//! most `|w| + 1` cells.
//!
//! `D_0` membership is read off the generators of the recession cone: the
//! supremum of `x_i − m·x_h` on a cell is finite iff `v_i ≤ m·v_h` for every
//! recession direction `v`, which is the dual form of the bounded LP.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cone::{dot, primitive, rank, Cone};
use crate::error::{Error, Result};
use crate::gamma::{format_rational, int, serde_rational, serde_rational_vec, GammaValue, Rational};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">")]
    Gt,
}

impl Sign {
    fn of(q: &Rational) -> Sign {
        if q.is_positive() {
            Sign::Gt
        } else if q.is_negative() {
            Sign::Lt
        } else {
            Sign::Eq
        }
    }

    fn as_char(self) -> char {
        match self {
            Sign::Lt => '<',
            Sign::Eq => '=',
            Sign::Gt => '>',
        }
    }

    /// `+1` for `>`, `−1` for `<`, `0` for `=`.
    fn factor(self) -> Rational {
        match self {
            Sign::Lt => int(-1),
            Sign::Eq => Rational::zero(),
            Sign::Gt => int(1),
        }
    }
}

/// The affine form `x ↦ α·x − c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineForm {
    #[serde(with = "serde_rational_vec")]
    pub alpha: Vec<Rational>,
    #[serde(with = "serde_rational", default = "Rational::zero")]
    pub c: Rational,
}

impl AffineForm {
    pub fn new(alpha: Vec<Rational>, c: Rational) -> Self {
        AffineForm { alpha, c }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.alpha, x) - &self.c
    }

    /// Homogenized coefficients `(α, −c)` acting on `(x, s)`.
    fn homogenized(&self) -> Vec<Rational> {
        let mut v = self.alpha.clone();
        v.push(-&self.c);
        v
    }

    /// Scaled copy whose first nonzero coefficient is `1`; equal keys mean
    /// equal hyperplanes.
    fn hyperplane_key(&self) -> Option<(Vec<Rational>, Rational)> {
        let lead = self.alpha.iter().find(|a| !a.is_zero())?.clone();
        Some((self.alpha.iter().map(|a| a / &lead).collect(), &self.c / &lead))
    }

    fn permuted(&self, perm: &[usize]) -> AffineForm {
        let mut alpha = vec![Rational::zero(); self.alpha.len()];
        for (i, a) in self.alpha.iter().enumerate() {
            alpha[perm[i]] = a.clone();
        }
        AffineForm { alpha, c: self.c.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    fn allows(self, s: Sign) -> bool {
        matches!((self, s), (Relation::Ge, Sign::Gt | Sign::Eq) | (Relation::Le, Sign::Lt | Sign::Eq) | (_, Sign::Eq))
    }

    fn flipped(self) -> Relation {
        match self {
            Relation::Ge => Relation::Le,
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
        }
    }
}

/// One closed condition `α·x − c (≥ | ≤ | =) 0` cutting out the region `W`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionConstraint {
    #[serde(flatten)]
    pub form: AffineForm,
    pub rel: Relation,
}

/// Input description of a complex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub w: Vec<String>,
    pub h: String,
    #[serde(default)]
    pub functionals: Vec<AffineForm>,
    #[serde(default)]
    pub xi: Vec<AffineForm>,
    #[serde(default)]
    pub region: Vec<RegionConstraint>,
    /// Generators of the symmetry group; each lists the image of every
    /// coordinate of `w`, in order.
    #[serde(default)]
    pub symmetry: Vec<Vec<String>>,
    /// Adds `[x_a = 0]` and `[x_a = x_b]` for all coordinates.
    #[serde(default)]
    pub standard_hyperplanes: bool,
}

/// A sign pattern, one entry per functional of the complex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cell {
    signs: Vec<Sign>,
}

impl Cell {
    pub fn new(signs: Vec<Sign>) -> Self {
        Cell { signs }
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.signs.iter().map(|s| s.as_char().to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Data attached to a nonempty cell.
#[derive(Clone, Debug)]
pub struct CellData {
    pub dimension: usize,
    pub in_d0: bool,
    /// `e_C`; zero for `D_0` cells.
    pub direction: Vec<Rational>,
    /// Strict constraints the flow can cross: `(functional, σ·α·e_C > 0)`.
    exits: Vec<(usize, Rational)>,
    /// Lipschitz constant (sup norm) of one step of the flow on this cell.
    pub lipschitz: Rational,
    recession: Cone,
}

/// One leg of a trajectory: time spent moving along `−direction` in `cell`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowStep {
    pub time: GammaValue,
    pub cell: Cell,
    pub dimension: usize,
    #[serde(with = "serde_rational_vec")]
    pub direction: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowResult {
    pub trajectory: Vec<FlowStep>,
    pub endpoint: Vec<GammaValue>,
    /// Whether the endpoint lies in `W_0`.
    pub settled: bool,
    /// Product of the per-cell Lipschitz constants along the trajectory.
    #[serde(with = "serde_rational")]
    pub lipschitz: Rational,
}

/// `x_i ≤ m_i·x_h + c_i` on `W_0 ∩ Γ^w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreBounds {
    pub m: Vec<u64>,
    #[serde(with = "serde_rational_vec")]
    pub c: Vec<Rational>,
}

/// A cell with the homogenized cone over its closure (last coordinate `s`).
#[derive(Clone, Debug)]
pub struct EnumeratedCell {
    pub cell: Cell,
    pub closure: Cone,
}

pub struct CellComplex {
    coords: Vec<String>,
    h: usize,
    functionals: Vec<AffineForm>,
    xi: Vec<AffineForm>,
    /// Region constraints as `(functional index, relation on that functional)`.
    region: Vec<(usize, Relation)>,
    perms: Vec<Vec<usize>>,
    cache: RwLock<HashMap<Cell, Arc<CellData>>>,
}

impl fmt::Debug for CellComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CellComplex")
            .field("coords", &self.coords)
            .field("h", &self.coords[self.h])
            .field("functionals", &self.functionals.len())
            .finish()
    }
}

impl Clone for CellComplex {
    fn clone(&self) -> Self {
        CellComplex {
            coords: self.coords.clone(),
            h: self.h,
            functionals: self.functionals.clone(),
            xi: self.xi.clone(),
            region: self.region.clone(),
            perms: self.perms.clone(),
            cache: RwLock::new(self.cache.read().expect("cache lock").clone()),
        }
    }
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

fn ceil_natural(q: &Rational) -> u64 {
    if q.is_positive() {
        q.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
    } else {
        0
    }
}

/// Smallest natural `m` with `g_i ≤ m·g_h` for every generator `g` of a cone,
/// if any.
fn bounding_slope(gens: &[Vec<Rational>], i: usize, h: usize) -> Option<u64> {
    let mut lo = Rational::zero();
    let mut hi: Option<Rational> = None;
    for g in gens {
        if g[h].is_zero() {
            if g[i].is_positive() {
                return None;
            }
        } else {
            let q = &g[i] / &g[h];
            if g[h].is_positive() {
                lo = lo.max(q);
            } else {
                hi = Some(hi.map_or(q.clone(), |x| x.min(q)));
            }
        }
    }
    let m = ceil_natural(&lo);
    match hi {
        Some(hi) if Rational::from_integer(m.into()) > hi => None,
        _ => Some(m),
    }
}

pub fn build_complex(spec: &ComplexSpec) -> Result<CellComplex> {
    let n = spec.w.len();
    if n == 0 {
        return Err(Error::malformed("empty coordinate set"));
    }
    for (i, a) in spec.w.iter().enumerate() {
        if spec.w[..i].contains(a) {
            return Err(Error::malformed(format!("duplicate coordinate {a}")));
        }
    }
    let pos = |name: &str| {
        spec.w.iter().position(|a| a == name).ok_or_else(|| Error::malformed(format!("unknown coordinate {name}")))
    };
    let h = pos(&spec.h)?;
    let check = |f: &AffineForm, what: &str| -> Result<()> {
        if f.alpha.len() != n {
            return Err(Error::malformed(format!("{what} has {} coefficients, expected {n}", f.alpha.len())));
        }
        Ok(())
    };
    let mut perms = Vec::new();
    for p in &spec.symmetry {
        if p.len() != n {
            return Err(Error::malformed("symmetry must list an image for every coordinate"));
        }
        let perm: Vec<usize> = p.iter().map(|s| pos(s)).collect::<Result<_>>()?;
        let mut seen = perm.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != n {
            return Err(Error::malformed("symmetry is not a permutation"));
        }
        if perm[h] != h {
            return Err(Error::malformed("symmetries must fix the coordinate h"));
        }
        perms.push(perm);
    }

    let mut forms: Vec<AffineForm> = Vec::new();
    for f in &spec.functionals {
        check(f, "functional")?;
        forms.push(f.clone());
    }
    for r in &spec.region {
        check(&r.form, "region constraint")?;
        forms.push(r.form.clone());
    }
    if spec.standard_hyperplanes {
        for a in 0..n {
            forms.push(AffineForm::new(unit(n, a), Rational::zero()));
        }
        for a in 0..n {
            for b in a + 1..n {
                let alpha = unit(n, a).iter().zip(unit(n, b)).map(|(x, y)| x - y).collect();
                forms.push(AffineForm::new(alpha, Rational::zero()));
            }
        }
    }
    let mut functionals: Vec<AffineForm> = Vec::new();
    let mut keys: Vec<(Vec<Rational>, Rational)> = Vec::new();
    let mut queue: std::collections::VecDeque<AffineForm> = forms.into_iter().collect();
    while let Some(f) = queue.pop_front() {
        let key = f.hyperplane_key().ok_or_else(|| Error::malformed("functional with all coefficients zero"))?;
        if keys.contains(&key) {
            continue;
        }
        keys.push(key);
        for p in &perms {
            queue.push_back(f.permuted(p));
        }
        functionals.push(f);
    }

    let mut region = Vec::new();
    for r in &spec.region {
        let key = r.form.hyperplane_key().expect("checked above");
        let k = keys.iter().position(|x| *x == key).expect("region forms are functionals");
        let lead_r = r.form.alpha.iter().find(|a| !a.is_zero()).expect("nonzero");
        let lead_f = functionals[k].alpha.iter().find(|a| !a.is_zero()).expect("nonzero");
        let same = (lead_r / lead_f).is_positive();
        region.push((k, if same { r.rel } else { r.rel.flipped() }));
    }

    let mut xi = Vec::new();
    for f in &spec.xi {
        check(f, "preserved function")?;
        xi.push(f.clone());
    }

    let complex =
        CellComplex { coords: spec.w.clone(), h, functionals, xi, region, perms, cache: RwLock::new(HashMap::new()) };
    if !spec.region.is_empty() && complex.region_cone()?.rays().iter().all(|r| r[n].is_zero()) {
        return Err(Error::malformed("the region W is empty"));
    }
    Ok(complex)
}

impl CellComplex {
    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn functionals(&self) -> &[AffineForm] {
        &self.functionals
    }

    pub fn xi(&self) -> &[AffineForm] {
        &self.xi
    }

    /// Symmetry generators as index permutations.
    pub fn symmetries(&self) -> &[Vec<usize>] {
        &self.perms
    }

    fn n(&self) -> usize {
        self.coords.len()
    }

    /// Homogenized closed region `W` with `s ≥ 0`.
    fn region_cone(&self) -> Result<Cone> {
        let n = self.n();
        let mut cone = Cone::full(n + 1);
        cone.add_ineq(&unit(n + 1, n))?;
        for &(k, rel) in &self.region {
            let a = self.functionals[k].homogenized();
            match rel {
                Relation::Ge => cone.add_ineq(&a)?,
                Relation::Le => cone.add_ineq(&a.iter().map(|x| -x).collect::<Vec<_>>())?,
                Relation::Eq => cone.add_eq(&a)?,
            }
        }
        Ok(cone)
    }

    pub fn locate_cell(&self, x: &[Rational]) -> Result<Cell> {
        if x.len() != self.n() {
            return Err(Error::malformed("point has the wrong dimension"));
        }
        Ok(Cell { signs: self.functionals.iter().map(|f| Sign::of(&f.eval(x))).collect() })
    }

    pub fn in_region(&self, x: &[Rational]) -> bool {
        self.region.iter().all(|&(k, rel)| rel.allows(Sign::of(&self.functionals[k].eval(x))))
    }

    fn check_cell(&self, c: &Cell) -> Result<()> {
        if c.signs.len() != self.functionals.len() {
            return Err(Error::malformed("sign pattern has the wrong length"));
        }
        Ok(())
    }

    /// Memoized data of a nonempty cell.
    pub fn cell_data(&self, c: &Cell) -> Result<Arc<CellData>> {
        self.check_cell(c)?;
        if let Some(d) = self.cache.read().expect("cache lock").get(c) {
            return Ok(d.clone());
        }
        let data = Arc::new(self.compute_cell_data(c)?);
        self.cache.write().expect("cache lock").insert(c.clone(), data.clone());
        Ok(data)
    }

    fn compute_cell_data(&self, c: &Cell) -> Result<CellData> {
        let n = self.n();
        let mut rec = Cone::full(n);
        let mut eq_rows = Vec::new();
        for (f, s) in self.functionals.iter().zip(&c.signs) {
            match s {
                Sign::Eq => {
                    rec.add_eq(&f.alpha)?;
                    eq_rows.push(f.alpha.clone());
                }
                Sign::Gt => rec.add_ineq(&f.alpha)?,
                Sign::Lt => rec.add_ineq(&f.alpha.iter().map(|x| -x).collect::<Vec<_>>())?,
            }
        }
        let dimension = n - rank(eq_rows);
        let gens = rec.generators();
        let in_d0 = (0..n).all(|i| bounding_slope(&gens, i, self.h).is_some());
        let mut direction = vec![Rational::zero(); n];
        let mut exits = Vec::new();
        let mut lipschitz = Rational::one();
        if !in_d0 {
            let mut slice = rec.clone();
            slice.add_eq(&unit(n, self.h))?;
            if !slice.lineality().is_empty() || slice.rays().iter().any(|r| !r.iter().sum::<Rational>().is_positive()) {
                return Err(Error::precondition(format!(
                    "recession slice of cell {c} is unbounded; the complex needs the hyperplanes [x_a = 0]"
                )));
            }
            if slice.rays().is_empty() {
                return Err(Error::inconsistency(format!("cell {c} is outside D_0 but its recession slice is empty")));
            }
            let k = Rational::from_integer(slice.rays().len().into());
            for r in slice.rays() {
                let s: Rational = r.iter().sum();
                for (d, x) in direction.iter_mut().zip(r) {
                    *d += x / &s;
                }
            }
            direction.iter_mut().for_each(|d| *d /= &k);
            let e_max = direction.iter().map(|d| d.abs()).max().unwrap_or_default();
            let mut worst = Rational::zero();
            for (j, (f, s)) in self.functionals.iter().zip(&c.signs).enumerate() {
                let gamma = s.factor() * dot(&f.alpha, &direction);
                if gamma.is_positive() {
                    let norm: Rational = f.alpha.iter().map(|a| a.abs()).sum();
                    worst = worst.max(norm / &gamma);
                    exits.push((j, gamma));
                }
            }
            lipschitz = Rational::one() + e_max * worst;
        }
        Ok(CellData { dimension, in_d0, direction, exits, lipschitz, recession: rec })
    }

    pub fn classify_d0(&self, c: &Cell) -> Result<bool> {
        Ok(self.cell_data(c)?.in_d0)
    }

    pub fn recession_barycenter(&self, c: &Cell) -> Result<Vec<Rational>> {
        Ok(self.cell_data(c)?.direction.clone())
    }

    /// Generators of the closed recession cone of a cell.
    pub fn recession_generators(&self, c: &Cell) -> Result<Vec<Vec<Rational>>> {
        Ok(self.cell_data(c)?.recession.generators())
    }

    /// Time at which `x − t·e_C` leaves `C`; `∞` if it never does.
    pub fn exit_time(&self, c: &Cell, x: &[Rational]) -> Result<GammaValue> {
        let data = self.cell_data(c)?;
        Ok(self.exit_time_with(&data, c, x))
    }

    fn exit_time_with(&self, data: &CellData, c: &Cell, x: &[Rational]) -> GammaValue {
        data.exits
            .iter()
            .map(|(j, gamma)| GammaValue::Finite(c.signs[*j].factor() * self.functionals[*j].eval(x) / gamma))
            .min()
            .unwrap_or(GammaValue::Infinity)
    }

    fn has_coordinate_hyperplanes(&self) -> bool {
        let n = self.n();
        (0..n).all(|a| {
            let key = AffineForm::new(unit(n, a), Rational::zero()).hyperplane_key();
            self.functionals.iter().any(|f| f.hyperplane_key() == key)
        })
    }

    /// Validates a start point of `W' = (W ∩ Γ^w) ∪ [x_h = ∞]`; `None` means
    /// `x_h = ∞`.
    fn finite_start(&self, x: &[GammaValue]) -> Result<Option<Vec<Rational>>> {
        if x.len() != self.n() {
            return Err(Error::malformed("point has the wrong dimension"));
        }
        if x[self.h].is_infinite() {
            return Ok(None);
        }
        let pt: Vec<Rational> = x
            .iter()
            .map(|v| {
                v.finite()
                    .cloned()
                    .ok_or_else(|| Error::precondition("point outside W': x_h finite, other coordinate infinite"))
            })
            .collect::<Result<_>>()?;
        if pt.iter().any(Signed::is_negative) {
            return Err(Error::precondition("coordinates of Γ^w points are nonnegative"));
        }
        if !self.in_region(&pt) {
            return Err(Error::precondition("start point lies outside W"));
        }
        Ok(Some(pt))
    }

    /// Flows of many starts for the same time; parallel under the `parallel`
    /// feature, sharing the cell cache.
    pub fn flow_batch(&self, t: &GammaValue, starts: &[Vec<GammaValue>]) -> Vec<Result<FlowResult>> {
        par::map_items(starts, |x| self.flow(t, x))
    }

    pub fn flow(&self, t: &GammaValue, x: &[GammaValue]) -> Result<FlowResult> {
        if *t < GammaValue::zero() {
            return Err(Error::precondition("flow time must be in [0, inf]"));
        }
        let Some(mut pt) = self.finite_start(x)? else {
            return Ok(FlowResult {
                trajectory: vec![],
                endpoint: x.to_vec(),
                settled: true,
                lipschitz: Rational::one(),
            });
        };
        if !self.has_coordinate_hyperplanes() {
            return Err(Error::precondition("flows need every hyperplane [x_a = 0] in the complex"));
        }
        let mut remaining = t.clone();
        let mut trajectory: Vec<FlowStep> = Vec::new();
        let mut lipschitz = Rational::one();
        let mut cell = self.locate_cell(&pt)?;
        let mut data = self.cell_data(&cell)?;
        let settled = loop {
            if data.in_d0 {
                break true;
            }
            for (i, f) in self.xi.iter().enumerate() {
                if !dot(&f.alpha, &data.direction).is_zero() {
                    return Err(Error::inconsistency(format!("xi_{i} is not invariant on cell {cell}")));
                }
            }
            let tau = self.exit_time_with(&data, &cell, &pt);
            if remaining <= tau {
                let GammaValue::Finite(s) = &remaining else {
                    return Err(Error::inconsistency(format!("trajectory never leaves cell {cell}")));
                };
                if !s.is_zero() {
                    pt = pt.iter().zip(&data.direction).map(|(a, e)| a - s * e).collect();
                    lipschitz *= &data.lipschitz;
                    trajectory.push(FlowStep {
                        time: remaining.clone(),
                        cell: cell.clone(),
                        dimension: data.dimension,
                        direction: data.direction.clone(),
                    });
                }
                break self.cell_data(&self.locate_cell(&pt)?)?.in_d0;
            }
            let tau = tau.finite().expect("tau < remaining").clone();
            pt = pt.iter().zip(&data.direction).map(|(a, e)| a - &tau * e).collect();
            remaining = remaining.checked_sub(&GammaValue::Finite(tau.clone()))?;
            lipschitz *= &data.lipschitz;
            trajectory.push(FlowStep {
                time: GammaValue::Finite(tau),
                cell: cell.clone(),
                dimension: data.dimension,
                direction: data.direction.clone(),
            });
            let next = self.locate_cell(&pt)?;
            let next_data = self.cell_data(&next)?;
            if next_data.dimension >= data.dimension {
                return Err(Error::inconsistency(format!(
                    "flow re-enters a cell of dimension {} from dimension {}",
                    next_data.dimension, data.dimension
                )));
            }
            if trajectory.len() > self.n() + 1 {
                return Err(Error::inconsistency("trajectory visits more cells than dimensions allow"));
            }
            cell = next;
            data = next_data;
        };
        Ok(FlowResult { trajectory, endpoint: pt.into_iter().map(GammaValue::Finite).collect(), settled, lipschitz })
    }

    pub fn final_image_membership(&self, x: &[GammaValue]) -> Result<bool> {
        if x.len() != self.n() {
            return Err(Error::malformed("point has the wrong dimension"));
        }
        if x[self.h].is_infinite() {
            return Ok(true);
        }
        let pt: Vec<Rational> = x
            .iter()
            .map(|v| v.finite().cloned().ok_or_else(|| Error::precondition("point outside W'")))
            .collect::<Result<_>>()?;
        self.classify_d0(&self.locate_cell(&pt)?)
    }

    /// Applies a coordinate permutation to a point.
    pub fn act<T: Clone>(perm: &[usize], x: &[T]) -> Vec<T> {
        let mut out = x.to_vec();
        for (i, v) in x.iter().enumerate() {
            out[perm[i]] = v.clone();
        }
        out
    }

    /// All nonempty cells, by refining one functional at a time. With
    /// `domain_only` the enumeration is restricted to `W` inside the
    /// nonnegative orthant.
    pub fn enumerate_cells(&self, domain_only: bool) -> Result<Vec<EnumeratedCell>> {
        let n = self.n();
        let m = self.functionals.len();
        let mut allowed: Vec<Vec<Sign>> = vec![vec![Sign::Lt, Sign::Eq, Sign::Gt]; m];
        let mut root = Cone::full(n + 1);
        root.add_ineq(&unit(n + 1, n))?;
        if domain_only {
            for &(k, rel) in &self.region {
                allowed[k].retain(|s| rel.allows(*s));
            }
            for a in 0..n {
                let key = AffineForm::new(unit(n, a), Rational::zero()).hyperplane_key();
                if let Some(k) = self.functionals.iter().position(|f| f.hyperplane_key() == key) {
                    let positive = self.functionals[k].alpha[a].is_positive();
                    allowed[k].retain(|s| *s == Sign::Eq || (*s == Sign::Gt) == positive);
                } else {
                    root.add_ineq(&unit(n + 1, a))?;
                }
            }
        }
        // most constrained functionals first keeps the frontier small
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&k| allowed[k].len());
        let mut frontier: Vec<(Vec<Option<Sign>>, Cone)> = vec![(vec![None; m], root)];
        for &k in &order {
            let a = self.functionals[k].homogenized();
            let neg: Vec<Rational> = a.iter().map(|x| -x).collect();
            let mut next = Vec::new();
            for (signs, cone) in frontier {
                let (has_pos, has_neg) = cone.sign_range(&a)?;
                for &s in &allowed[k] {
                    let feasible = match s {
                        Sign::Gt => has_pos,
                        Sign::Lt => has_neg,
                        Sign::Eq => has_pos == has_neg,
                    };
                    if !feasible {
                        continue;
                    }
                    let mut child = cone.clone();
                    match s {
                        Sign::Gt => child.add_ineq(&a)?,
                        Sign::Lt => child.add_ineq(&neg)?,
                        Sign::Eq => child.add_eq(&a)?,
                    }
                    let mut sg = signs.clone();
                    sg[k] = Some(s);
                    next.push((sg, child));
                }
            }
            frontier = next;
        }
        let mut cells: Vec<EnumeratedCell> = frontier
            .into_iter()
            .map(|(signs, closure)| EnumeratedCell {
                cell: Cell { signs: signs.into_iter().map(|s| s.expect("every functional decided")).collect() },
                closure,
            })
            .collect();
        cells.sort_by(|a, b| a.cell.cmp(&b.cell));
        Ok(cells)
    }

    /// Bounds `x_i ≤ m_i·x_h + c_i` valid on every `D_0` cell of the domain.
    pub fn compact_core_bounds(&self) -> Result<CoreBounds> {
        let n = self.n();
        let cells = self.enumerate_cells(true)?;
        let mut m = vec![0u64; n];
        m[self.h] = 1;
        // the s = 0 slice of a closure cone is the closed recession cone of the cell
        let mut core: Vec<Vec<Vec<Rational>>> = Vec::new();
        for c in &cells {
            let gens = c.closure.generators();
            let rec: Vec<Vec<Rational>> = gens.iter().filter(|g| g[n].is_zero()).map(|g| g[..n].to_vec()).collect();
            let slopes: Option<Vec<u64>> = (0..n).map(|i| bounding_slope(&rec, i, self.h)).collect();
            if let Some(slopes) = slopes {
                m.iter_mut().zip(slopes).for_each(|(mi, s)| *mi = (*mi).max(s));
                core.push(gens);
            }
        }
        let mut c_out: Vec<Option<Rational>> = vec![None; n];
        for gens in &core {
            for g in gens {
                let s = &g[n];
                for i in 0..n {
                    let val = &g[i] - Rational::from_integer(m[i].into()) * &g[self.h];
                    if s.is_zero() {
                        if val.is_positive() {
                            return Err(Error::inconsistency("core bound fails on a recession direction"));
                        }
                        continue;
                    }
                    let v = val / s;
                    c_out[i] = Some(c_out[i].take().map_or(v.clone(), |x| x.max(v)));
                }
            }
        }
        Ok(CoreBounds { m, c: c_out.into_iter().map(|c| c.unwrap_or_default()).collect() })
    }

    /// Formats a point with coordinate names, for diagnostics.
    pub fn describe(&self, x: &[Rational]) -> String {
        let parts: Vec<String> =
            self.coords.iter().zip(x).map(|(a, v)| format!("{a}={}", format_rational(v))).collect();
        parts.join(", ")
    }

    /// Direction vector normalized to coprime integers, for display.
    pub fn integral_direction(&self, c: &Cell) -> Result<Vec<Rational>> {
        Ok(primitive(&self.cell_data(c)?.direction))
    }
}
