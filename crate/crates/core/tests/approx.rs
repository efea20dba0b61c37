use approxgrp::approx::{
    is_quasi_homomorphism, multiplicative_defect, quasi_action_defect, weight_bound_check, ApproxParams,
    ApproximationMap, CheckBudget, CoordPerm, Method, QhomMode, QuasiAction,
};
use approxgrp::groups::{Element, Group, Perm};
use approxgrp::length::{LengthFunction, WeightFunction};
use approxgrp::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p(images: &[usize]) -> Perm {
    Perm::new(images.to_vec()).unwrap()
}

fn z3_images() -> [Perm; 3] {
    [p(&[0, 1, 2]), p(&[1, 0, 2]), p(&[1, 2, 0])]
}

fn z3_map(images: &[Perm; 3], eps: f64) -> ApproximationMap {
    ApproximationMap::new(
        Group::Cyclic { m: 3 },
        Group::Symmetric { n: 3 },
        LengthFunction::hamming(),
        WeightFunction::constant(0.5).unwrap(),
        ApproxParams::new((0..3).map(Element::Table).collect(), eps).unwrap(),
        (1..3).map(|i| (Element::Table(i), Element::Perm(images[i].clone()))),
    )
    .unwrap()
}

/// Fraction of points where `φ(g)` then `φ(h)` differs from `φ(g+h)`.
fn hand_defect(images: &[Perm; 3], g: usize, h: usize) -> f64 {
    let gh = (g + h) % 3;
    let differ = (0..3)
        .filter(|&x| images[h].apply(images[g].apply(x)) != images[gh].apply(x))
        .count();
    differ as f64 / 3.0
}

#[test]
fn nine_pair_defects_match_hand_computation() {
    let images = z3_images();
    let r = multiplicative_defect(&z3_map(&images, 0.1), &CheckBudget::default()).unwrap();
    assert_eq!(r.method, Method::Exhaustive);
    assert_eq!(r.pair_defects.len(), 9);
    for pd in &r.pair_defects {
        let (g, h) = (pd.g.as_index().unwrap(), pd.h.as_index().unwrap());
        assert!((pd.defect - hand_defect(&images, g, h)).abs() < 1e-12, "{g},{h}");
    }
    let max = (0..3)
        .flat_map(|g| (0..3).map(move |h| (g, h)))
        .map(|(g, h)| hand_defect(&images, g, h))
        .fold(0.0, f64::max);
    assert_eq!(r.max_defect, max);
    assert_eq!(r.max_defect, 1.0);
}

#[test]
fn exact_homomorphism_has_zero_defect() {
    let images = [p(&[0, 1, 2]), p(&[1, 2, 0]), p(&[2, 0, 1])];
    let v = is_quasi_homomorphism(&z3_map(&images, 0.01), QhomMode::Weighted, &CheckBudget::default()).unwrap();
    assert_eq!(v.report.max_defect, 0.0);
    assert_eq!(v.report.min_slack, Some(0.5));
    assert!(v.holds);
}

#[test]
fn weight_slack_is_length_minus_weight() {
    let images = z3_images();
    let r = weight_bound_check(&z3_map(&images, 0.1)).unwrap();
    for s in &r.weight_slacks {
        let i = s.g.as_index().unwrap();
        let expected = images[i].moved_points() as f64 / 3.0 - 0.5;
        assert!((s.slack - expected).abs() < 1e-12);
    }
    assert_eq!(r.weight_slacks.len(), 2);
}

#[test]
fn strong_and_discrete_modes() {
    let images = [p(&[0, 1, 2]), p(&[1, 2, 0]), p(&[2, 0, 1])];
    let phi = z3_map(&images, 0.1);
    let strong = is_quasi_homomorphism(&phi, QhomMode::Strong, &CheckBudget::default()).unwrap();
    // diam(Sym(3), Hamming) = 1, so the bound is 0.9 and 3-cycles reach 1.
    assert!(strong.holds);
    assert!(strong.report.weight_slacks.iter().all(|s| (s.bound - 0.9).abs() < 1e-12));
    assert!(!strong.report.notes.is_empty());
    let discrete = is_quasi_homomorphism(&phi, QhomMode::Discrete, &CheckBudget::default()).unwrap();
    assert!(discrete.holds);

    let table_weight = ApproximationMap::new(
        Group::Cyclic { m: 3 },
        Group::Symmetric { n: 3 },
        LengthFunction::hamming(),
        WeightFunction::table([(Element::Table(1), 0.5), (Element::Table(2), 0.5)].into(), None).unwrap(),
        ApproxParams::new((0..3).map(Element::Table).collect(), 0.1).unwrap(),
        (1..3).map(|i| (Element::Table(i), Element::Perm(images[i].clone()))),
    )
    .unwrap();
    assert!(matches!(
        is_quasi_homomorphism(&table_weight, QhomMode::Discrete, &CheckBudget::default()),
        Err(Error::Parameter(_))
    ));
}

#[test]
fn missing_products_are_reported() {
    let phi = ApproximationMap::new(
        Group::Cyclic { m: 5 },
        Group::Symmetric { n: 2 },
        LengthFunction::hamming(),
        WeightFunction::constant(1.0).unwrap(),
        ApproxParams::new(vec![Element::Table(1)], 0.1).unwrap(),
        [(Element::Table(1), Element::Perm(p(&[1, 0])))],
    )
    .unwrap();
    match multiplicative_defect(&phi, &CheckBudget::default()) {
        Err(Error::Coverage { missing }) => assert_eq!(missing, vec![Element::Table(2)]),
        other => panic!("expected a coverage error, got {other:?}"),
    }
}

#[test]
fn sampled_pairs_are_reproducible() {
    let images = z3_images();
    let phi = z3_map(&images, 0.1);
    let budget = CheckBudget { budget: 4, samples: 50, seed: 99 };
    let a = multiplicative_defect(&phi, &budget).unwrap();
    let b = multiplicative_defect(&phi, &budget).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.method, Method::Sampled { samples: 50, seed: 99 });
    assert_eq!(a.pair_defects.len(), 50);
    for pd in &a.pair_defects {
        let (g, h) = (pd.g.as_index().unwrap(), pd.h.as_index().unwrap());
        assert!((pd.defect - hand_defect(&images, g, h)).abs() < 1e-12);
    }
}

fn rotation_action(perturbed: bool) -> QuasiAction {
    let mut table = vec![
        (Element::Table(1), p(&[1, 2, 3, 0])),
        (Element::Table(2), p(&[2, 3, 0, 1])),
        (Element::Table(3), p(&[3, 0, 1, 2])),
    ];
    if perturbed {
        // Swap the images of points 0 and 1 under the half turn.
        table[1].1 = p(&[3, 2, 0, 1]);
    }
    QuasiAction::on_points(
        Group::Cyclic { m: 4 },
        4,
        ApproxParams::new((0..4).map(Element::Table).collect(), 0.6).unwrap(),
        table,
    )
    .unwrap()
}

#[test]
fn perturbed_action_agreement_matches_hand_count() {
    let exact = quasi_action_defect(&rotation_action(false), &CheckBudget::default()).unwrap();
    assert_eq!(exact.min_agreement, 1.0);
    assert_eq!(exact.max_fixed, Some(0.0));

    let q = rotation_action(true);
    let r = quasi_action_defect(&q, &CheckBudget::default()).unwrap();
    let img = |i: usize| -> Perm { if i == 0 { Perm::identity(4) } else { q.image(&Element::Table(i)).unwrap().as_plain().unwrap().clone() } };
    for pa in &r.pair_agreements {
        let (g, h) = (pa.g.as_index().unwrap(), pa.h.as_index().unwrap());
        let agree = (0..4)
            .filter(|&x| img(h).apply(img(g).apply(x)) == img((g + h) % 4).apply(x))
            .count() as f64
            / 4.0;
        assert_eq!(pa.agreement, agree, "{g},{h}");
        assert_eq!(pa.exact, agree);
    }
    // The perturbed half turn squared moves every point.
    assert_eq!(r.min_agreement, 0.0);
    assert!(!r.agreement_ok && !r.holds);
}

#[test]
fn hamming_bridge_agrees_with_action_report() {
    let q = rotation_action(true);
    let action = quasi_action_defect(&q, &CheckBudget::default()).unwrap();
    let phi = q.to_approximation_map(WeightFunction::constant(0.25).unwrap()).unwrap();
    let defects = multiplicative_defect(&phi, &CheckBudget::default()).unwrap();
    assert_eq!(action.pair_agreements.len(), defects.pair_defects.len());
    for (a, d) in action.pair_agreements.iter().zip(&defects.pair_defects) {
        assert_eq!((&a.g, &a.h), (&d.g, &d.h));
        assert!((1.0 - a.agreement - d.defect).abs() < 1e-12);
    }
}

/// An action of `ℤ/4` on `{0,1,2}^4` that permutes coordinates cyclically
/// and perturbs the symbols on one coordinate of the half turn.
fn coordinate_action() -> QuasiAction {
    let x = 3;
    let shift = |k: usize| -> Vec<usize> { (0..4).map(|c| (c + 4 - k) % 4).collect() };
    let mut table = Vec::new();
    for k in 1..4 {
        let mut taus = vec![Perm::identity(x); 4];
        if k == 2 {
            taus[1] = p(&[1, 0, 2]);
        }
        table.push((Element::Table(k), CoordPerm::new(x, shift(k), taus).unwrap()));
    }
    QuasiAction::new(
        Group::Cyclic { m: 4 },
        x,
        4,
        ApproxParams::new((0..4).map(Element::Table).collect(), 0.5).unwrap(),
        table,
    )
    .unwrap()
}

#[test]
fn sampled_points_agree_with_enumeration_within_three_sigma() {
    let q = coordinate_action();
    assert_eq!(q.point_count(), Some(81));
    let full = quasi_action_defect(&q, &CheckBudget::default()).unwrap();
    assert_eq!(full.method, Method::Exhaustive);
    let samples = 4000;
    let sampled = quasi_action_defect(&q, &CheckBudget { budget: 16, samples, seed: 3 }).unwrap();
    assert!(matches!(sampled.method, Method::Sampled { .. }));
    for (a, b) in full.pair_agreements.iter().zip(&sampled.pair_agreements) {
        assert_eq!(a.agreement, a.exact);
        let sigma = (a.exact * (1.0 - a.exact) / samples as f64).sqrt();
        assert!((b.agreement - a.exact).abs() <= 3.0 * sigma + 1e-12, "{a:?} vs {b:?}");
    }
    for (a, b) in full.fixed_proportions.iter().zip(&sampled.fixed_proportions) {
        let sigma = (a.exact * (1.0 - a.exact) / samples as f64).sqrt();
        assert!((b.fixed - a.exact).abs() <= 3.0 * sigma + 1e-12, "{a:?} vs {b:?}");
    }
}

fn perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Perm::new(v).unwrap())
}

proptest! {
    #[test]
    fn conjugating_the_target_preserves_defects(
        a in perm(4), b in perm(4), c in perm(4), k in perm(4),
    ) {
        let images = [Perm::identity(4), a, b, c];
        let build = |imgs: &[Perm]| {
            ApproximationMap::new(
                Group::Cyclic { m: 4 },
                Group::Symmetric { n: 4 },
                LengthFunction::hamming(),
                WeightFunction::constant(0.25).unwrap(),
                ApproxParams::new((0..4).map(Element::Table).collect(), 0.5).unwrap(),
                (1..4).map(|i| (Element::Table(i), Element::Perm(imgs[i].clone()))),
            )
            .unwrap()
        };
        let conj: Vec<Perm> = images
            .iter()
            .map(|x| k.inverse().then(x).unwrap().then(&k).unwrap())
            .collect();
        let budget = CheckBudget::default();
        let r1 = multiplicative_defect(&build(&images), &budget)?;
        let r2 = multiplicative_defect(&build(&conj), &budget)?;
        for (x, y) in r1.pair_defects.iter().zip(&r2.pair_defects) {
            prop_assert!((x.defect - y.defect).abs() < 1e-12);
        }
    }

    #[test]
    fn coordinate_permutation_agreement_is_exact(
        seed in any::<u64>(),
    ) {
        // Random coordinate permutations on {0,1}^3: cycle formula against enumeration.
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut make = || {
            let mut source: Vec<usize> = (0..3).collect();
            source.shuffle(&mut rng);
            let taus = (0..3)
                .map(|_| if rand::Rng::random_bool(&mut rng, 0.5) { p(&[1, 0]) } else { Perm::identity(2) })
                .collect();
            CoordPerm::new(2, source, taus).unwrap()
        };
        let (x, y) = (make(), make());
        let mut agree = 0;
        for idx in 0..8usize {
            let point: Vec<usize> = (0..3).map(|c| (idx >> c) & 1).collect();
            if x.apply(&point) == y.apply(&point) {
                agree += 1;
            }
        }
        prop_assert_eq!(x.agreement(&y)?, agree as f64 / 8.0);
        let fixed = (0..8usize)
            .filter(|&idx| {
                let point: Vec<usize> = (0..3).map(|c| (idx >> c) & 1).collect();
                x.apply(&point) == point
            })
            .count();
        prop_assert_eq!(x.fixed_proportion(), fixed as f64 / 8.0);
    }
}
