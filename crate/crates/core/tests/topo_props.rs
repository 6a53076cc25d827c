//! Fingerprints and family sweeps.

use rand::Rng;
use skeleta::gamma::{frac, GammaValue, Rational};
use skeleta::pline::{skeleton, Divisor};
use skeleta::topo::*;
use skeleta::valfield::{PAdic, ValuedField};
use skeleta_testkit as kit;

fn four_point_family(k: &PAdic) -> DivisorFamily<Rational> {
    let constant = |c: i64| FamilyMember::Affine { constant: k.from_int(c), coefficient: k.zero() };
    DivisorFamily {
        members: vec![
            constant(0),
            constant(1),
            FamilyMember::Affine { constant: k.zero(), coefficient: k.one() },
            FamilyMember::Infinity,
        ],
    }
}

#[test]
fn four_point_family_has_four_classes_with_the_predicted_members() {
    for p in [2u64, 3, 5, 7] {
        let k = PAdic::new(p).unwrap();
        let mut rng = kit::rng(30 + p);
        let samples: Vec<Rational> = (0..200).map(|_| kit::family_parameter(&mut rng, p)).collect();
        let report = family_sweep(&k, &four_point_family(&k), &samples).unwrap();
        // over F_2 every unit is 1 mod 2, so b cannot branch at the Gauss point
        let expected: Vec<u8> = if p == 2 { vec![0, 1, 2] } else { vec![0, 1, 2, 3] };
        assert_eq!(report.fingerprint_count(), expected.len(), "p = {p}");
        let mut keys: Vec<u8> = Vec::new();
        for class in &report.classes {
            let key = kit::four_point_class(p, &class.samples[0]);
            assert!(class.samples.iter().all(|b| kit::four_point_class(p, b) == key));
            keys.push(key);
        }
        keys.sort();
        assert_eq!(keys, expected);
    }
}

/// Affine families `D_b` with at most five members give at most 16 classes.
#[test]
fn random_affine_families_have_few_fingerprints() {
    let mut rng = kit::rng(31);
    for case in 0..12 {
        let p = [2u64, 3, 5][case % 3];
        let k = PAdic::new(p).unwrap();
        let members = (0..rng.gen_range(2..=5))
            .map(|_| {
                if rng.gen_bool(0.15) {
                    FamilyMember::Infinity
                } else {
                    FamilyMember::Affine {
                        constant: kit::rational(&mut rng, p),
                        coefficient: if rng.gen_bool(0.5) { k.zero() } else { kit::nonzero_rational(&mut rng, p) },
                    }
                }
            })
            .collect();
        let family = DivisorFamily { members };
        let samples: Vec<Rational> = (0..200).map(|_| kit::family_parameter(&mut rng, p)).collect();
        let report = family_sweep(&k, &family, &samples).unwrap();
        assert!((1..=16).contains(&report.fingerprint_count()), "{} classes", report.fingerprint_count());
        let total: usize = report.classes.iter().map(|c| c.samples.len()).sum();
        assert_eq!(total, samples.len());
    }
}

#[test]
fn subdividing_an_edge_keeps_the_shape() {
    let mut rng = kit::rng(32);
    for case in 0..60 {
        let p = [2u64, 3, 5][case % 3];
        let k = PAdic::new(p).unwrap();
        let d = Divisor::new(kit::divisor_points(&mut rng, &k, 5)).unwrap();
        let tree = skeleton(&k, &d).tree;
        if tree.edges().is_empty() {
            continue;
        }
        let e = rng.gen_range(0..tree.edges().len());
        let len = tree.edges()[e].2.clone();
        let at = match len.finite() {
            Some(l) => GammaValue::Finite(l * frac(1, 3)),
            None => GammaValue::from_int(1),
        };
        let finer = tree.subdivide(e, at).unwrap();
        assert_eq!(tree_fingerprint(&finer).shape, tree_fingerprint(&tree).shape);
        assert!(tree_iso(&finer, &tree, false));
    }
}

#[test]
fn fingerprints_ignore_vertex_order() {
    let mut rng = kit::rng(33);
    let k = PAdic::new(3).unwrap();
    for _ in 0..40 {
        let pts = kit::divisor_points(&mut rng, &k, 5);
        let mut rev = pts.clone();
        rev.reverse();
        let a = skeleton(&k, &Divisor::new(pts).unwrap()).tree;
        let b = skeleton(&k, &Divisor::new(rev).unwrap()).tree;
        assert_eq!(tree_fingerprint(&a), tree_fingerprint(&b));
        assert!(tree_iso(&a, &b, true));
    }
}
