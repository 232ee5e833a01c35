use arrgate_core::fixtures;
use arrgate_core::lattice::{
    intersect, is_characteristic, lemma_km_residue, point_line_incidence_identity,
    strict_transform_class, total_strict_transform, HomologyClass, IncidenceStructure,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn class_with(t: usize) -> impl Strategy<Value = HomologyClass> {
    (-50i64..=50, prop::collection::vec(-50i64..=50, t)).prop_map(|(h, e)| HomologyClass::new(h, e))
}

fn three_classes() -> impl Strategy<Value = (HomologyClass, HomologyClass, HomologyClass)> {
    (0usize..=12).prop_flat_map(|t| (class_with(t), class_with(t), class_with(t)))
}

proptest! {
    #[test]
    fn intersect_is_symmetric((a, b, _) in three_classes()) {
        prop_assert_eq!(intersect(&a, &b).unwrap(), intersect(&b, &a).unwrap());
    }

    #[test]
    fn intersect_is_bilinear((a, b, c) in three_classes(), k in -20i64..=20) {
        let ab = a.add(&b).unwrap();
        prop_assert_eq!(
            intersect(&ab, &c).unwrap(),
            intersect(&a, &c).unwrap() + intersect(&b, &c).unwrap()
        );
        prop_assert_eq!(intersect(&a.scale(k), &c).unwrap(), k * intersect(&a, &c).unwrap());
        prop_assert_eq!(intersect(&c, &a.scale(k)).unwrap(), k * intersect(&c, &a).unwrap());
    }
}

fn pairing_criterion(c: &HomologyClass) -> bool {
    HomologyClass::basis(c.blowup_count()).iter().all(|b| {
        let cb = intersect(c, b).unwrap();
        let bb = intersect(b, b).unwrap();
        (cb - bb).rem_euclid(2) == 0
    })
}

#[test]
fn characteristic_matches_pairing_criterion() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut characteristic = 0;
    for _ in 0..1000 {
        let t = rng.gen_range(0..=10);
        // skew towards odd coordinates so both outcomes are well represented
        let odd_bias = rng.gen_bool(0.5);
        let coord = |rng: &mut ChaCha8Rng| {
            let x: i64 = rng.gen_range(-9..=9);
            if odd_bias && x % 2 == 0 && rng.gen_bool(0.9) {
                x + 1
            } else {
                x
            }
        };
        let h = coord(&mut rng);
        let e = (0..t).map(|_| coord(&mut rng)).collect();
        let c = HomologyClass::new(h, e);
        assert_eq!(is_characteristic(&c), pairing_criterion(&c), "{c}");
        characteristic += usize::from(is_characteristic(&c));
    }
    assert!(
        characteristic > 100 && characteristic < 900,
        "{characteristic}"
    );
}

/// Greedily adds random points of random size until `attempts` run out.
fn random_structure(rng: &mut ChaCha8Rng, degree: usize, attempts: usize) -> IncidenceStructure {
    let mut points: Vec<Vec<usize>> = Vec::new();
    let mut covered = vec![false; degree * degree];
    let lines: Vec<usize> = (0..degree).collect();
    for _ in 0..attempts {
        let size = rng.gen_range(2..=degree.min(5));
        let mut p: Vec<usize> = lines.choose_multiple(rng, size).copied().collect();
        p.sort_unstable();
        let clash = p
            .iter()
            .any(|&a| p.iter().any(|&b| a < b && covered[a * degree + b]));
        if clash {
            continue;
        }
        for &a in &p {
            for &b in &p {
                covered[a * degree + b] = true;
            }
        }
        points.push(p);
    }
    IncidenceStructure::new(degree, points).unwrap()
}

fn drop_random_point(rng: &mut ChaCha8Rng, inc: &IncidenceStructure) -> IncidenceStructure {
    let mut points = inc.points().to_vec();
    let i = rng.gen_range(0..points.len());
    points.remove(i);
    IncidenceStructure::new(inc.degree(), points).unwrap()
}

#[test]
fn total_class_is_characteristic_iff_covered_and_odd() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut samples: Vec<IncidenceStructure> = vec![fixtures::fano(), fixtures::dual_hesse()];
    for d in (3..=21).step_by(2) {
        samples.push(fixtures::pencil(d).unwrap());
    }
    for d in (2..=20).step_by(2) {
        samples.push(fixtures::pencil(d).unwrap());
    }
    for _ in 0..300 {
        let d = rng.gen_range(3..=12);
        let attempts = rng.gen_range(0..=40);
        samples.push(random_structure(&mut rng, d, attempts));
    }
    for base in [fixtures::fano(), fixtures::dual_hesse()] {
        for _ in 0..20 {
            samples.push(drop_random_point(&mut rng, &base));
        }
    }
    let (mut yes, mut no) = (0, 0);
    for inc in &samples {
        let expected = inc.fully_covered() && inc.points().iter().all(|p| p.len() % 2 == 1);
        // every intersection point is blown up, double points included
        let complete = inc.with_implicit_doubles();
        let total = total_strict_transform(&complete);
        assert_eq!(total.h, inc.degree() as i64);
        for (coefficient, point) in total.e.iter().zip(complete.points()) {
            assert_eq!(*coefficient, point.len() as i64);
        }
        assert_eq!(is_characteristic(&total), expected, "{:?}", inc.points());
        assert_eq!(lemma_km_residue(inc).is_ok(), expected);
        if expected {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes >= 12 && no >= 100, "{yes} / {no}");
}

#[test]
fn strict_transform_squares_to_one_minus_points_on_line() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut samples = vec![
        fixtures::fano(),
        fixtures::dual_hesse(),
        fixtures::pencil(3).unwrap(),
        fixtures::pencil(8).unwrap(),
    ];
    for _ in 0..100 {
        let d = rng.gen_range(2..=14);
        samples.push(random_structure(&mut rng, d, 30));
    }
    for inc in &samples {
        let per_line = inc.points_per_line();
        for (k, &p) in per_line.iter().enumerate() {
            let f = strict_transform_class(inc, k).unwrap();
            assert_eq!(f.self_intersection(), 1 - p as i64);
        }
        assert!(point_line_incidence_identity(inc).holds());
    }
}

#[test]
fn residue_ignores_blowup_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for base in [
        fixtures::fano(),
        fixtures::dual_hesse(),
        fixtures::pencil(9).unwrap(),
    ] {
        let expected = lemma_km_residue(&base).unwrap();
        for _ in 0..25 {
            let mut order: Vec<usize> = (0..base.blowup_count()).collect();
            order.shuffle(&mut rng);
            assert_eq!(
                lemma_km_residue(&base.with_point_order(&order)).unwrap(),
                expected
            );
        }
    }
}
