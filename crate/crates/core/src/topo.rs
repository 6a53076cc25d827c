//! Finite metric trees, homeomorphism fingerprints and family sweeps.
//!
//! A fingerprint suppresses degree-2 vertices and encodes the remaining tree
//! with the AHU canonical code rooted at its center.  This records the
//! homeomorphism type, which is finer than the homotopy type (every tree is
//! contractible).  The marked variant also keeps the labels of marked
//! vertices, which separates configurations of a divisor that have the same
//! unlabeled shape.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gamma::GammaValue;
use crate::par;
use crate::pline::{skeleton, Divisor, PLinePoint};
use crate::valfield::ValuedField;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeVertex {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mark: Option<usize>,
}

impl TreeVertex {
    pub fn plain(label: impl Into<String>) -> Self {
        TreeVertex { label: label.into(), mark: None }
    }
}

pub type Edge = (usize, usize, GammaValue);

/// A finite tree with lengths in `Γ_∞` on its edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteMetricTree {
    vertices: Vec<TreeVertex>,
    edges: Vec<Edge>,
}

impl<'de> Deserialize<'de> for FiniteMetricTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            vertices: Vec<TreeVertex>,
            edges: Vec<Edge>,
        }
        let raw = Raw::deserialize(d)?;
        FiniteMetricTree::new(raw.vertices, raw.edges).map_err(serde::de::Error::custom)
    }
}

impl FiniteMetricTree {
    pub fn new(vertices: Vec<TreeVertex>, edges: Vec<Edge>) -> Result<Self> {
        let n = vertices.len();
        if n == 0 {
            return Err(Error::precondition("tree has no vertices"));
        }
        if edges.len() + 1 != n {
            return Err(Error::precondition("tree needs |edges| = |vertices| - 1"));
        }
        for (i, j, len) in &edges {
            if *i >= n || *j >= n || i == j {
                return Err(Error::precondition(format!("bad edge ({i}, {j})")));
            }
            if *len <= GammaValue::zero() {
                return Err(Error::precondition("edge lengths must be positive"));
            }
        }
        let tree = FiniteMetricTree { vertices, edges };
        let seen = tree.component_of(0);
        if seen.iter().any(|s| !s) {
            return Err(Error::precondition("tree is disconnected"));
        }
        Ok(tree)
    }

    /// Path with vertices `0..n` and the given lengths; handy for tests and sweeps.
    pub fn path(lengths: Vec<GammaValue>) -> Result<Self> {
        let vertices = (0..=lengths.len()).map(|i| TreeVertex::plain(format!("v{i}"))).collect();
        let edges = lengths.into_iter().enumerate().map(|(i, l)| (i, i + 1, l)).collect();
        Self::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[TreeVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|(i, j, _)| *i == v || *j == v).count()
    }

    fn adjacency(&self) -> Vec<Vec<(usize, GammaValue)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (i, j, l) in &self.edges {
            adj[*i].push((*j, l.clone()));
            adj[*j].push((*i, l.clone()));
        }
        adj
    }

    fn component_of(&self, start: usize) -> Vec<bool> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for (w, _) in &adj[v] {
                if !seen[*w] {
                    seen[*w] = true;
                    queue.push_back(*w);
                }
            }
        }
        seen
    }

    /// Splits edge `e` at an interior point at distance `at` from its first end.
    pub fn subdivide(&self, e: usize, at: GammaValue) -> Result<Self> {
        let (i, j, len) = self.edges[e].clone();
        let rest = len.checked_sub(&at)?;
        let mut vertices = self.vertices.clone();
        vertices.push(TreeVertex::plain(format!("sub{}", vertices.len())));
        let k = vertices.len() - 1;
        let mut edges = self.edges.clone();
        edges[e] = (i, k, at);
        edges.push((k, j, rest));
        Self::new(vertices, edges)
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("graph {name} {{\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let shape = if v.mark.is_some() { ", shape=box" } else { "" };
            let _ = writeln!(out, "  v{i} [label=\"{}\"{shape}];", v.label.replace('"', "\\\""));
        }
        for (i, j, l) in &self.edges {
            let _ = writeln!(out, "  v{i} -- v{j} [label=\"{l}\"];");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.vertices.iter().map(|v| json!(v)).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|(i, j, l)| json!([i, j, l.to_string()])).collect::<Vec<_>>(),
        })
    }
}

/// Canonical homeomorphism code plus the pattern of finite edge lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub shape: String,
    pub lengths: Vec<GammaValue>,
}

struct Reduced {
    adj: Vec<Vec<(usize, GammaValue)>>,
    marks: Vec<Option<usize>>,
    alive: Vec<bool>,
}

/// Removes degree-2 vertices (unmarked ones only when `keep_marked`),
/// merging the two incident edges.
fn suppress(tree: &FiniteMetricTree, keep_marked: bool) -> Reduced {
    let n = tree.vertices.len();
    let mut adj = tree.adjacency();
    let marks: Vec<Option<usize>> = tree.vertices.iter().map(|v| if keep_marked { v.mark } else { None }).collect();
    let mut alive = vec![true; n];
    while let Some(v) = (0..n).find(|&v| alive[v] && adj[v].len() == 2 && marks[v].is_none()) {
        let (a, la) = adj[v][0].clone();
        let (b, lb) = adj[v][1].clone();
        let merged = &la + &lb;
        adj[a].retain(|(w, _)| *w != v);
        adj[b].retain(|(w, _)| *w != v);
        adj[a].push((b, merged.clone()));
        adj[b].push((a, merged));
        adj[v].clear();
        alive[v] = false;
    }
    Reduced { adj, marks, alive }
}

fn rooted_code(r: &Reduced, v: usize, parent: Option<usize>) -> String {
    let mut children: Vec<String> =
        r.adj[v].iter().filter(|(w, _)| Some(*w) != parent).map(|(w, _)| rooted_code(r, *w, Some(v))).collect();
    children.sort();
    let label = r.marks[v].map(|m| format!("m{m}")).unwrap_or_default();
    format!("({label}{})", children.concat())
}

fn centers(r: &Reduced) -> Vec<usize> {
    let n = r.adj.len();
    let mut degree: Vec<usize> = r.adj.iter().map(Vec::len).collect();
    let mut remaining: Vec<usize> = (0..n).filter(|&v| r.alive[v]).collect();
    let mut removed = vec![false; n];
    while remaining.len() > 2 {
        let leaves: Vec<usize> = remaining.iter().copied().filter(|&v| degree[v] <= 1).collect();
        for &leaf in &leaves {
            removed[leaf] = true;
            for (w, _) in &r.adj[leaf] {
                if !removed[*w] {
                    degree[*w] -= 1;
                }
            }
        }
        remaining.retain(|v| !removed[*v]);
    }
    remaining
}

fn fingerprint_with(tree: &FiniteMetricTree, marked: bool) -> Fingerprint {
    let r = suppress(tree, marked);
    let cs = centers(&r);
    let shape = match cs.as_slice() {
        [c] => rooted_code(&r, *c, None),
        [a, b] => {
            let mut pair = [rooted_code(&r, *a, Some(*b)), rooted_code(&r, *b, Some(*a))];
            pair.sort();
            format!("[{}{}]", pair[0], pair[1])
        }
        _ => unreachable!("a tree has one or two centers"),
    };
    let mut lengths: Vec<GammaValue> = Vec::new();
    for (v, nbrs) in r.adj.iter().enumerate() {
        for (w, l) in nbrs {
            if v < *w && !l.is_infinite() {
                lengths.push(l.clone());
            }
        }
    }
    lengths.sort();
    Fingerprint { shape, lengths }
}

/// Fingerprint of the unlabeled tree.
pub fn tree_fingerprint(tree: &FiniteMetricTree) -> Fingerprint {
    fingerprint_with(tree, false)
}

/// Fingerprint keeping vertex marks.
pub fn tree_fingerprint_marked(tree: &FiniteMetricTree) -> Fingerprint {
    fingerprint_with(tree, true)
}

/// Homeomorphism test; `strict` also compares the finite length patterns.
pub fn tree_iso(a: &FiniteMetricTree, b: &FiniteMetricTree, strict: bool) -> bool {
    let (fa, fb) = (tree_fingerprint(a), tree_fingerprint(b));
    fa.shape == fb.shape && (!strict || fa.lengths == fb.lengths)
}

/// One member of a divisor family: `∞`, or `constant + coefficient·b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyMember<E> {
    Infinity,
    Affine { constant: E, coefficient: E },
}

/// `b ↦ D_b`, a divisor whose members depend affinely on a parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorFamily<E> {
    pub members: Vec<FamilyMember<E>>,
}

impl<E: Clone + PartialEq> DivisorFamily<E> {
    pub fn at<F: ValuedField<Elem = E>>(&self, field: &F, b: &E) -> Result<(Divisor<E>, Vec<usize>)> {
        let points: Vec<PLinePoint<E>> = self
            .members
            .iter()
            .map(|m| match m {
                FamilyMember::Infinity => PLinePoint::infinity(field),
                FamilyMember::Affine { constant, coefficient } => {
                    PLinePoint::simple(field, &field.add(constant, &field.mul(coefficient, b)))
                }
            })
            .collect();
        let divisor = Divisor::new(points.clone())?;
        // mark each divisor point with the first member landing on it
        let marks =
            divisor.points().iter().map(|p| points.iter().position(|q| q == p).expect("member present")).collect();
        Ok((divisor, marks))
    }
}

/// Samples sharing one marked shape.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepClass<E> {
    pub shape: String,
    pub unmarked_shape: String,
    pub samples: Vec<E>,
    pub example: FiniteMetricTree,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport<E> {
    pub classes: Vec<SweepClass<E>>,
}

impl<E> SweepReport<E> {
    pub fn fingerprint_count(&self) -> usize {
        self.classes.len()
    }
}

/// Skeleton fingerprints of `D_b` over the samples, partitioned by marked shape.
pub fn family_sweep<F: ValuedField>(
    field: &F,
    family: &DivisorFamily<F::Elem>,
    samples: &[F::Elem],
) -> Result<SweepReport<F::Elem>> {
    let trees = par::map_items(samples, |b| -> Result<FiniteMetricTree> {
        let (divisor, marks) = family.at(field, b)?;
        let sk = skeleton(field, &divisor);
        let mut vertices = sk.tree.vertices().to_vec();
        for v in vertices.iter_mut() {
            v.mark = v.mark.map(|i| marks[i]);
        }
        FiniteMetricTree::new(vertices, sk.tree.edges().to_vec())
    });
    let mut classes: BTreeMap<String, SweepClass<F::Elem>> = BTreeMap::new();
    for (b, tree) in samples.iter().zip(trees) {
        let tree = tree?;
        let shape = tree_fingerprint_marked(&tree).shape;
        classes
            .entry(shape.clone())
            .or_insert_with(|| SweepClass {
                shape,
                unmarked_shape: tree_fingerprint(&tree).shape,
                samples: Vec::new(),
                example: tree.clone(),
            })
            .samples
            .push(b.clone());
    }
    Ok(SweepReport { classes: classes.into_values().collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{frac, int, Rational, INF};
    use crate::pline::PLinePoint;
    use crate::valfield::PAdic;

    fn g(n: i64) -> GammaValue {
        GammaValue::from_int(n)
    }

    fn star(k: usize) -> FiniteMetricTree {
        let vertices = (0..=k).map(|i| TreeVertex::plain(format!("s{i}"))).collect();
        let edges = (1..=k).map(|i| (0, i, INF)).collect();
        FiniteMetricTree::new(vertices, edges).unwrap()
    }

    fn sk(f: &PAdic, xs: &[Option<Rational>]) -> FiniteMetricTree {
        let pts = xs
            .iter()
            .map(|x| match x {
                Some(x) => PLinePoint::simple(f, x),
                None => PLinePoint::infinity(f),
            })
            .collect();
        skeleton(f, &Divisor::new(pts).unwrap()).tree
    }

    #[test]
    fn validation() {
        let v = |n: usize| (0..n).map(|i| TreeVertex::plain(i.to_string())).collect::<Vec<_>>();
        assert!(FiniteMetricTree::new(v(3), vec![(0, 1, g(1))]).is_err());
        assert!(FiniteMetricTree::new(v(3), vec![(0, 1, g(1)), (0, 1, g(1))]).is_err());
        assert!(FiniteMetricTree::new(v(2), vec![(0, 1, g(0))]).is_err());
        assert!(FiniteMetricTree::new(v(1), vec![]).is_ok());
    }

    #[test]
    fn three_point_skeleton_is_a_star() {
        let f = PAdic::new(5).unwrap();
        let t = sk(&f, &[Some(int(0)), Some(int(1)), None]);
        assert_eq!(tree_fingerprint(&t), tree_fingerprint(&star(3)));
        assert_eq!(tree_fingerprint(&t).shape, "(()()())");
    }

    #[test]
    fn two_point_skeleton_is_an_arc() {
        let f = PAdic::new(5).unwrap();
        let t = sk(&f, &[Some(int(0)), None]);
        let fp = tree_fingerprint(&t);
        assert_eq!(fp, tree_fingerprint(&FiniteMetricTree::path(vec![INF]).unwrap()));
        assert!(fp.lengths.is_empty());
    }

    #[test]
    fn relabeling_does_not_matter() {
        let a = FiniteMetricTree::new(
            vec![TreeVertex::plain("a"), TreeVertex::plain("b"), TreeVertex::plain("c"), TreeVertex::plain("d")],
            vec![(0, 1, g(1)), (1, 2, INF), (1, 3, INF)],
        )
        .unwrap();
        let b = FiniteMetricTree::new(
            vec![TreeVertex::plain("x"), TreeVertex::plain("y"), TreeVertex::plain("z"), TreeVertex::plain("w")],
            vec![(3, 2, INF), (3, 0, g(1)), (1, 3, INF)],
        )
        .unwrap();
        assert_eq!(tree_fingerprint(&a), tree_fingerprint(&b));
    }

    #[test]
    fn iso_examples() {
        let s = star(3);
        assert!(tree_iso(&s, &s, true));
        let path = FiniteMetricTree::path(vec![INF, INF, INF]).unwrap();
        assert!(!tree_iso(&s, &path, false));
        let h1 = FiniteMetricTree::new(
            (0..6).map(|i| TreeVertex::plain(i.to_string())).collect(),
            vec![(0, 1, g(1)), (0, 2, INF), (0, 3, INF), (1, 4, INF), (1, 5, INF)],
        )
        .unwrap();
        let h2 = FiniteMetricTree::new(
            (0..6).map(|i| TreeVertex::plain(i.to_string())).collect(),
            vec![(0, 1, g(2)), (0, 2, INF), (0, 3, INF), (1, 4, INF), (1, 5, INF)],
        )
        .unwrap();
        assert!(tree_iso(&h1, &h2, false));
        assert!(!tree_iso(&h1, &h2, true));
    }

    #[test]
    fn subdividing_keeps_the_fingerprint() {
        let t = FiniteMetricTree::new(
            (0..6).map(|i| TreeVertex::plain(i.to_string())).collect(),
            vec![(0, 1, g(3)), (0, 2, INF), (0, 3, INF), (1, 4, INF), (1, 5, INF)],
        )
        .unwrap();
        let fp = tree_fingerprint(&t);
        for (e, at) in [(0, g(1)), (1, g(5)), (4, frac(1, 2).into())] {
            let s = t.subdivide(e, at).unwrap();
            assert_eq!(tree_fingerprint(&s), fp);
        }
    }

    #[test]
    fn two_centers_are_handled() {
        let p = FiniteMetricTree::path(vec![g(1), g(1), g(1)]).unwrap();
        assert_eq!(tree_fingerprint(&p), tree_fingerprint(&FiniteMetricTree::path(vec![g(3)]).unwrap()));
        let marked = FiniteMetricTree::new(
            vec![
                TreeVertex { label: "a".into(), mark: Some(0) },
                TreeVertex::plain("b"),
                TreeVertex::plain("c"),
                TreeVertex { label: "d".into(), mark: Some(1) },
            ],
            vec![(0, 1, g(1)), (1, 2, g(1)), (2, 3, g(1))],
        )
        .unwrap();
        assert_eq!(tree_fingerprint_marked(&marked).shape, "[(m0)(m1)]");
    }

    #[test]
    fn four_point_family_has_four_classes() {
        let f = PAdic::new(5).unwrap();
        let c = |x: i64| FamilyMember::Affine { constant: int(x), coefficient: int(0) };
        let family = DivisorFamily {
            members: vec![
                c(0),
                c(1),
                FamilyMember::Affine { constant: int(0), coefficient: int(1) },
                FamilyMember::Infinity,
            ],
        };
        let samples = vec![int(5), frac(1, 5), int(6), int(2), int(26)];
        let report = family_sweep(&f, &family, &samples).unwrap();
        assert_eq!(report.fingerprint_count(), 4);
        let class_of = |b: &Rational| report.classes.iter().position(|c| c.samples.contains(b)).unwrap();
        assert_eq!(class_of(&int(6)), class_of(&int(26)));
        assert_ne!(class_of(&int(5)), class_of(&int(6)));
        assert_ne!(class_of(&int(5)), class_of(&frac(1, 5)));
        let star4 = report.classes.iter().find(|c| c.samples.contains(&int(2))).unwrap();
        assert_eq!(star4.unmarked_shape, tree_fingerprint(&star(4)).shape);
    }

    #[test]
    fn three_point_family_has_one_shape() {
        let f = PAdic::new(5).unwrap();
        let family = DivisorFamily {
            members: vec![
                FamilyMember::Affine { constant: int(0), coefficient: int(0) },
                FamilyMember::Affine { constant: int(0), coefficient: int(1) },
                FamilyMember::Infinity,
            ],
        };
        let samples = vec![int(5), frac(1, 5), int(2), int(125), frac(3, 25)];
        let report = family_sweep(&f, &family, &samples).unwrap();
        assert_eq!(report.fingerprint_count(), 1);
    }

    #[test]
    fn constant_family_has_one_class() {
        let f = PAdic::new(3).unwrap();
        let family = DivisorFamily {
            members: vec![
                FamilyMember::Affine { constant: int(0), coefficient: int(0) },
                FamilyMember::Affine { constant: int(1), coefficient: int(0) },
                FamilyMember::Infinity,
            ],
        };
        let report = family_sweep(&f, &family, &[int(1), int(2), int(3)]).unwrap();
        assert_eq!(report.fingerprint_count(), 1);
        assert_eq!(report.classes[0].samples.len(), 3);
    }

    #[test]
    fn tree_json_round_trip() {
        let t = star(3);
        let back: FiniteMetricTree = serde_json::from_value(t.to_json()).unwrap();
        assert_eq!(back, t);
        assert!(t.to_dot("t").contains("v0 -- v1 [label=\"inf\"]"));
    }
}
