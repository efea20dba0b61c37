//! Acceptance suite: one PASS/FAIL line per criterion.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use approxgrp::approx::{
    is_quasi_homomorphism, multiplicative_defect, quasi_action_defect, weight_bound_check, ApproxParams,
    ApproximationMap, CheckBudget, Method, QhomMode, QuasiAction,
};
use approxgrp::construct::{
    build_amenable_extension, build_direct_product, build_sofic_wreath, build_wreath, FolnerProvider,
    PermutationRule, QuotientProvider,
};
use approxgrp::groups::{diagonal_sign_generators, Element, FiniteSupport, Group, Matrix, Perm};
use approxgrp::length::{
    check_axioms, check_commutator_contractive, search_lp_counterexample, unitary_parallelogram_check,
    CheckMode, Exponent, LengthFunction, WeightFunction, AXIOM_TOLERANCE,
};
use approxgrp::witnesses::{box_set, folner_ratio, folner_set, separating_quotient, QuotientMap};
use approxgrp::Error;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Slack for comparing measured defects and slacks against bounds.
const BOUND_TOLERANCE: f64 = 1e-12;
/// Largest allowed parallelogram residual.
const PARALLELOGRAM_TOLERANCE: f64 = 1e-8;
const EXHAUSTIVE_ORDER_LIMIT: u128 = 200;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn p(images: &[usize]) -> Perm {
    Perm::new(images.to_vec()).unwrap()
}

fn sign_group() -> Group {
    Group::matrix_closure(diagonal_sign_generators(2)).unwrap()
}

fn plus_minus_identity() -> Group {
    Group::matrix_closure(vec![Matrix::scalar(2, Complex64::new(-1.0, 0.0))]).unwrap()
}

fn mode_for(group: &Group, rng: &mut ChaCha8Rng) -> CheckMode {
    match group.order() {
        Some(n) if n <= EXHAUSTIVE_ORDER_LIMIT => CheckMode::Exhaustive,
        _ => {
            let elems = group.elements().unwrap();
            CheckMode::Pairs(
                (0..5000)
                    .map(|_| {
                        (
                            elems[rng.random_range(0..elems.len())].clone(),
                            elems[rng.random_range(0..elems.len())].clone(),
                        )
                    })
                    .collect(),
            )
        }
    }
}

fn random_gl2(rng: &mut ChaCha8Rng) -> Element {
    loop {
        let e: Vec<f64> = (0..4).map(|_| rng.random_range(-4i32..=4) as f64).collect();
        if e[0] * e[3] - e[1] * e[2] != 0.0 {
            return Element::Matrix(Matrix::from_real(2, &e).unwrap());
        }
    }
}

fn length_axioms() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut cases: Vec<(String, Group, LengthFunction)> = Vec::new();
    for n in 1..=6 {
        cases.push((format!("hamming Sym({n})"), Group::Symmetric { n }, LengthFunction::hamming()));
    }
    cases.push(("trivial Sym(4)".into(), Group::Symmetric { n: 4 }, LengthFunction::trivial()));
    cases.push(("HS {±I}".into(), plus_minus_identity(), LengthFunction::hilbert_schmidt()));
    cases.push(("HS diagonal signs".into(), sign_group(), LengthFunction::hilbert_schmidt()));
    for p in [Exponent::new(1).unwrap(), Exponent::new(2).unwrap(), Exponent::Infinity] {
        cases.push((
            format!("L^{p} Sym(3) x signs"),
            Group::direct(Group::Symmetric { n: 3 }, sign_group()),
            LengthFunction::lp(LengthFunction::hamming(), LengthFunction::hilbert_schmidt(), p),
        ));
        cases.push((
            format!("L^{p} Sym(4) x Sym(3)"),
            Group::direct(Group::Symmetric { n: 4 }, Group::Symmetric { n: 3 }),
            LengthFunction::lp(LengthFunction::hamming(), LengthFunction::trivial(), p),
        ));
    }
    cases.push((
        "wreath max (Z/2) wr (Z/3)".into(),
        Group::wreath(Group::Cyclic { m: 2 }, Group::Cyclic { m: 3 }),
        LengthFunction::wreath_max(LengthFunction::trivial()),
    ));
    cases.push((
        "wreath avg (Z/2) wr Sym(3)".into(),
        Group::perm_wreath(Group::Cyclic { m: 2 }, 3),
        LengthFunction::wreath_avg(LengthFunction::trivial()),
    ));
    let mut checked = 0;
    for (name, group, l) in &cases {
        let mode = mode_for(group, &mut rng);
        let r = check_axioms(group, l, &mode).map_err(err)?;
        ensure(r.is_clean(), || format!("{name}: {} violations, first {:?}", r.violations.len(), r.violations.first()))?;
        checked += r.pairs_checked;
    }
    let gl_pairs: Vec<_> = (0..500).map(|_| (random_gl2(&mut rng), random_gl2(&mut rng))).collect();
    let r = check_axioms(&Group::GeneralLinear { n: 2 }, &LengthFunction::rank(), &CheckMode::Pairs(gl_pairs))
        .map_err(err)?;
    ensure(r.is_clean(), || format!("rank GL_2: {:?}", r.violations.first()))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{} families + rank on GL_2, {checked} pairs, 0 violations, {elapsed:.2?}", cases.len()))
}

fn commutator_contractivity() -> Outcome {
    let cases = [
        ("trivial Sym(4)", Group::Symmetric { n: 4 }, LengthFunction::trivial()),
        (
            "L^inf Sym(3) x Z/4",
            Group::direct(Group::Symmetric { n: 3 }, Group::Cyclic { m: 4 }),
            LengthFunction::lp(LengthFunction::trivial(), LengthFunction::trivial(), Exponent::Infinity),
        ),
        (
            "wreath max Sym(3) wr Z/2",
            Group::wreath(Group::Symmetric { n: 3 }, Group::Cyclic { m: 2 }),
            LengthFunction::wreath_max(LengthFunction::trivial()),
        ),
    ];
    for (name, g, l) in &cases {
        let order = g.order().unwrap();
        ensure(order <= 72, || format!("{name}: order {order}"))?;
        let r = check_commutator_contractive(g, l, &CheckMode::Exhaustive).map_err(err)?;
        ensure(r.is_clean(), || format!("{name}: {:?}", r.violations.first()))?;
    }
    let found = search_lp_counterexample(&Group::Symmetric { n: 3 }, &Group::Cyclic { m: 2 }, &[1, 2], &[1.0, 0.5, 0.25])
        .map_err(err)?
        .ok_or("no L^p violation found")?;
    ensure(found.commutator_length > found.bound + AXIOM_TOLERANCE, || format!("{found:?}"))?;
    Ok(format!(
        "3 contractive families clean; L^{} with scales ({}, {}): x={}, y={}, l([x,y])={} > 4 l(x) l(y)={}",
        found.p, found.left_scale, found.right_scale, found.first, found.second, found.commutator_length, found.bound
    ))
}

fn random_cyclic_map(rng: &mut ChaCha8Rng, m: usize, n: usize, f_len: usize, eps: f64) -> ApproximationMap {
    let images: Vec<(Element, Element)> = (1..m)
        .map(|i| {
            let mut v: Vec<usize> = (0..n).collect();
            v.shuffle(rng);
            (Element::Table(i), Element::Perm(Perm::new(v).unwrap()))
        })
        .collect();
    let mut f: Vec<usize> = (0..m).collect();
    f.shuffle(rng);
    f.truncate(f_len);
    ApproximationMap::new(
        Group::Cyclic { m },
        Group::Symmetric { n },
        LengthFunction::hamming(),
        WeightFunction::constant(0.1).unwrap(),
        ApproxParams::new(f.into_iter().map(Element::Table).collect(), eps).unwrap(),
        images,
    )
    .unwrap()
}

fn with_epsilon(phi: &ApproximationMap, eps: f64) -> ApproximationMap {
    ApproximationMap::new(
        phi.source.clone(),
        phi.target.clone(),
        phi.target_length.clone(),
        phi.weight.clone(),
        ApproxParams::new(phi.params.f.clone(), eps).unwrap(),
        phi.assignments().map(|(a, b)| (a.clone(), b.clone())),
    )
    .unwrap()
}

fn direct_product_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let budget = CheckBudget::default();
    let scenarios = 30;
    let mut worst_ratio: f64 = 0.0;
    for k in 0..scenarios {
        let (fl, fr) = [(3, 2), (2, 3), (3, 1), (1, 2), (2, 2)][k % 5];
        let left = random_cyclic_map(&mut rng, 3, 3, fl, 1.0);
        let right = random_cyclic_map(&mut rng, 4, 4, fr, 1.0);
        let e1 = multiplicative_defect(&left, &budget).map_err(err)?.max_defect;
        let e2 = multiplicative_defect(&right, &budget).map_err(err)?.max_defect;
        let left = with_epsilon(&left, e1.max(1e-9));
        let right = with_epsilon(&right, e2.max(1e-9));
        let p = [Exponent::new(1).unwrap(), Exponent::new(2).unwrap(), Exponent::Infinity][k % 3];
        let (s, phi) = build_direct_product(&left, &right, p, None).map_err(err)?;
        ensure(s.f_size <= 6, || format!("|F| = {}", s.f_size))?;
        let out = multiplicative_defect(&phi, &budget).map_err(err)?.max_defect;
        let bound = e1.max(e2);
        ensure(out <= bound + BOUND_TOLERANCE, || format!("scenario {k}: {out} > max({e1}, {e2})"))?;
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(out / bound);
        }
    }
    Ok(format!("{scenarios} scenarios, output/max(input) <= {worst_ratio:.4}, tol {BOUND_TOLERANCE:e}"))
}

fn lamp(head: i64, lamps: &[i64], value: usize) -> Element {
    Element::wreath(
        Element::lattice1(head),
        FiniteSupport::from_entries(lamps.iter().map(|&k| (Element::lattice1(k), Element::Table(value)))),
    )
}

fn lamplighter() -> Group {
    Group::wreath(Group::Cyclic { m: 2 }, Group::Lattice { d: 1 })
}

fn z2_map(image: Perm, c: f64, eps: f64) -> ApproximationMap {
    ApproximationMap::new(
        Group::Cyclic { m: 2 },
        Group::Symmetric { n: image.degree() },
        LengthFunction::hamming(),
        WeightFunction::constant(c).unwrap(),
        ApproxParams::new(vec![Element::Table(0), Element::Table(1)], eps).unwrap(),
        [(Element::Table(1), Element::Perm(image))],
    )
    .unwrap()
}

fn wreath_bound() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let budget = CheckBudget::default();
    // (0 1)(2 3 4) on 10 points: its square is a 3-cycle, defect 3/10.
    let rough = Perm::from_cycles(10, &[&[0, 1], &[2, 3, 4]]).unwrap();
    let inputs = [(z2_map(p(&[1, 0]), 1.0, 0.01), true), (z2_map(rough, 0.5, 0.3), false)];
    let mut runs = 0;
    let mut max_m = 0;
    for _ in 0..20 {
        let size = rng.random_range(1..=4);
        let f: Vec<Element> = (0..size)
            .map(|_| {
                let lamps: Vec<i64> = (-2..=2).filter(|_| rng.random_bool(0.3)).collect();
                lamp(rng.random_range(-2..=2), &lamps, 1)
            })
            .collect();
        for (phi, exact) in &inputs {
            let input = multiplicative_defect(phi, &budget).map_err(err)?.max_defect;
            ensure(input <= phi.params.epsilon + BOUND_TOLERANCE, || "input bound".into())?;
            let (s, psi) = build_wreath(phi, &lamplighter(), f.clone(), &QuotientProvider::AutoMinMod).map_err(err)?;
            ensure(s.m <= 12, || format!("m = {}", s.m))?;
            max_m = max_m.max(s.m);
            let v = is_quasi_homomorphism(&psi, QhomMode::Weighted, &budget).map_err(err)?;
            let r = &v.report;
            ensure(r.method == Method::Exhaustive, || "not exhaustive".into())?;
            ensure(r.max_defect <= phi.params.epsilon + BOUND_TOLERANCE, || format!("defect {} > {}", r.max_defect, phi.params.epsilon))?;
            ensure(r.min_slack.unwrap_or(0.0) >= -BOUND_TOLERANCE, || format!("slack {:?}", r.min_slack))?;
            if *exact {
                ensure(r.max_defect == 0.0, || format!("exact input gave {}", r.max_defect))?;
            }
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("{runs} lamplighter builds, m <= {max_m}, exact inputs give 0, {elapsed:.2?}"))
}

fn swap_action() -> QuasiAction {
    QuasiAction::on_points(
        Group::Cyclic { m: 2 },
        2,
        ApproxParams::new(vec![Element::Table(1)], 0.01).unwrap(),
        [(Element::Table(1), p(&[1, 0]))],
    )
    .unwrap()
}

fn near_z3_action(eps: f64) -> QuasiAction {
    let n = 12;
    let rot = |k: usize| p(&(0..n).map(|i| (i + k) % n).collect::<Vec<_>>());
    let mut swap: Vec<usize> = (0..n).collect();
    swap.swap(0, 1);
    QuasiAction::on_points(
        Group::Cyclic { m: 3 },
        n,
        ApproxParams::new((0..3).map(Element::Table).collect(), eps).unwrap(),
        [(Element::Table(1), rot(4)), (Element::Table(2), rot(8).then(&p(&swap)).unwrap())],
    )
    .unwrap()
}

fn sofic_wreath() -> Outcome {
    let budget = CheckBudget::default();
    let f = vec![lamp(1, &[], 1), lamp(0, &[0], 1), lamp(-1, &[1], 1), lamp(2, &[0, 1], 1)];
    for m in [6i64, 9, 13] {
        let (_, q) = build_sofic_wreath(&swap_action(), &lamplighter(), f.clone(), 0.3, &QuotientProvider::Mod { m })
            .map_err(err)?;
        let points = q.point_count().unwrap();
        ensure(points <= 10_000, || format!("|Y| = {points}"))?;
        let r = quasi_action_defect(&q, &budget).map_err(err)?;
        ensure(r.method == Method::Exhaustive, || "not exhaustive".into())?;
        ensure(r.min_agreement == 1.0, || format!("m={m}: agreement {}", r.min_agreement))?;
        let bound = 2f64.powf(-(m as f64) / 2.0);
        for fp in &r.fixed_proportions {
            if !fp.g.as_wreath().unwrap().head.is_identity() {
                ensure(fp.fixed <= bound + BOUND_TOLERANCE, || format!("m={m}: {fp:?} > {bound}"))?;
            }
        }
    }

    let input = quasi_action_defect(&near_z3_action(0.5), &budget).map_err(err)?;
    let eps = 1.0 - input.min_agreement;
    let w = Group::wreath(Group::Cyclic { m: 3 }, Group::Lattice { d: 1 });
    let pf = vec![lamp(1, &[], 1), lamp(0, &[0], 2), lamp(0, &[1], 1)];
    let (_, q) = build_sofic_wreath(&near_z3_action(eps), &w, pf, eps, &QuotientProvider::Mod { m: 4 }).map_err(err)?;
    let r = quasi_action_defect(&q, &budget).map_err(err)?;
    ensure(r.min_agreement >= 1.0 - eps - BOUND_TOLERANCE, || format!("perturbed: {} < 1 - {eps}", r.min_agreement))?;
    let perturbed = r.min_agreement;

    let samples = 20_000;
    let two = vec![lamp(1, &[], 1), lamp(0, &[0], 1)];
    let (_, q) = build_sofic_wreath(&swap_action(), &lamplighter(), two.clone(), 0.3, &QuotientProvider::Mod { m: 12 })
        .map_err(err)?;
    let full = quasi_action_defect(&q, &budget).map_err(err)?;
    let sampled = quasi_action_defect(&q, &CheckBudget { budget: 100, samples, seed: 17 }).map_err(err)?;
    ensure(matches!(sampled.method, Method::Sampled { .. }), || "not sampled".into())?;
    let mut worst_z: f64 = 0.0;
    for (a, b) in full.fixed_proportions.iter().zip(&sampled.fixed_proportions) {
        let sigma = (a.fixed * (1.0 - a.fixed) / samples as f64).sqrt();
        let diff = (a.fixed - b.fixed).abs();
        ensure(diff <= 3.0 * sigma + BOUND_TOLERANCE, || format!("{a:?} vs {b:?}"))?;
        if sigma > 0.0 {
            worst_z = worst_z.max(diff / sigma);
        }
    }
    let (_, big) = build_sofic_wreath(&swap_action(), &lamplighter(), two, 0.3, &QuotientProvider::Mod { m: 60 })
        .map_err(err)?;
    let r = quasi_action_defect(&big, &CheckBudget { budget: 1_000_000, samples: 2_000, seed: 5 }).map_err(err)?;
    ensure(r.min_agreement == 1.0, || "2^60 instance disagrees".into())?;
    Ok(format!(
        "exact |Y| <= 8192 (m in 6, 9, 13) agreement 1; perturbed agreement {perturbed:.4} >= 1 - {eps:.4}; sampled vs exhaustive within {worst_z:.2} sigma; |Y| = 2^60 sampled"
    ))
}

fn amenable_extension() -> Outcome {
    let start = Instant::now();
    let budget = CheckBudget::default();
    let g = Group::Cyclic { m: 6 };
    let q = QuotientMap::by_normal_subgroup(g.clone(), &[Element::Table(2), Element::Table(4)]).map_err(err)?;
    let psi = ApproximationMap::new(
        g.clone(),
        Group::Symmetric { n: 3 },
        LengthFunction::hamming(),
        WeightFunction::constant(0.5).unwrap(),
        ApproxParams::new(vec![Element::Table(2), Element::Table(4)], 0.1).unwrap(),
        [(Element::Table(2), Element::Perm(p(&[1, 2, 0]))), (Element::Table(4), Element::Perm(p(&[2, 0, 1])))],
    )
    .map_err(err)?;
    let all = g.elements().map_err(err)?;
    let (_, phi) = build_amenable_extension(&psi, &q, &FolnerProvider::AutoBox, all, 0.1, PermutationRule::Ascending, &budget)
        .map_err(err)?;
    let v = is_quasi_homomorphism(&phi, QhomMode::Weighted, &budget).map_err(err)?;
    ensure(v.report.method == Method::Exhaustive, || "not exhaustive".into())?;
    ensure(v.report.max_defect == 0.0, || format!("Z/6 defect {}", v.report.max_defect))?;
    ensure(v.report.min_slack.unwrap() >= -BOUND_TOLERANCE, || "Z/6 slack".into())?;

    let z = Group::Lattice { d: 1 };
    let trivial = ApproximationMap::new(
        z.clone(),
        Group::Trivial,
        LengthFunction::trivial(),
        WeightFunction::constant(1.0).unwrap(),
        ApproxParams::new(vec![], 0.1).unwrap(),
        [],
    )
    .map_err(err)?;
    let f: Vec<Element> = (-1..=1).map(Element::lattice1).collect();
    let mut max_a = 0;
    let mut worst = Vec::new();
    for eps in [0.2, 0.1, 0.05] {
        let (s, phi) = build_amenable_extension(
            &trivial,
            &QuotientMap::identity(z.clone()),
            &FolnerProvider::AutoBox,
            f.clone(),
            eps,
            PermutationRule::Ascending,
            &budget,
        )
        .map_err(err)?;
        max_a = max_a.max(s.a.len());
        for x in f.iter().filter(|x| !x.is_identity()) {
            let l = phi.target_length.evaluate(phi.image(x).unwrap()).map_err(err)?;
            ensure(l >= 1.0 - eps - BOUND_TOLERANCE && l > 0.5, || format!("eps {eps}: length {l} at {x}"))?;
        }
        let v = is_quasi_homomorphism(&phi, QhomMode::Weighted, &budget).map_err(err)?;
        ensure(v.report.max_defect <= 5.0 * eps + BOUND_TOLERANCE, || format!("eps {eps}: defect {}", v.report.max_defect))?;
        worst.push(format!("{eps}: {:.4}", v.report.max_defect));
    }
    ensure(max_a <= 41, || format!("|A| = {max_a}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("Z/6 defect 0; Z defects {{{}}} <= 5 eps; |A| <= {max_a}; {elapsed:.2?}", worst.join(", ")))
}

fn strong_witnesses() -> Outcome {
    // Rescaling lifts every length on F \ {1} to 1.
    let phi = ApproximationMap::new(
        Group::Cyclic { m: 3 },
        Group::Symmetric { n: 3 },
        LengthFunction::hamming(),
        WeightFunction::constant(2.0 / 3.0).unwrap(),
        ApproxParams::new((0..3).map(Element::Table).collect(), 0.5).unwrap(),
        [(Element::Table(1), Element::Perm(p(&[1, 0, 2]))), (Element::Table(2), Element::Perm(p(&[1, 2, 0])))],
    )
    .map_err(err)?;
    let slacks = weight_bound_check(&phi).map_err(err)?;
    let c = slacks.weight_slacks.iter().map(|s| s.length).fold(1.0, f64::min);
    let rescaled = LengthFunction::rescale(LengthFunction::hamming(), c).map_err(err)?;
    for (g, x) in phi.assignments().filter(|(g, _)| !g.is_identity()) {
        let l = rescaled.evaluate(x).map_err(err)?;
        ensure(l == 1.0, || format!("rescaled length {l} at {g}"))?;
    }
    let r = check_axioms(&Group::Symmetric { n: 3 }, &rescaled, &CheckMode::Exhaustive).map_err(err)?;
    ensure(r.is_clean(), || "rescaled length breaks an axiom".into())?;

    let minus = Element::Matrix(Matrix::scalar(2, Complex64::new(-1.0, 0.0)));
    let hs = LengthFunction::hilbert_schmidt();
    let u2 = Group::Unitary { n: 2 };
    let l1 = hs.evaluate(&minus).map_err(err)?;
    let l12 = hs.evaluate(&u2.multiply(&minus, &minus).map_err(err)?).map_err(err)?;
    ensure((l1 - 1.0).abs() < 1e-12 && l12 == 0.0, || format!("l(-I) = {l1}, l((-I)^2) = {l12}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let g = Matrix::random_unitary(2, &mut rng);
        let h = Matrix::random_unitary(2, &mut rng);
        worst = worst.max(unitary_parallelogram_check(&g, &h).map_err(err)?);
    }
    ensure(worst < PARALLELOGRAM_TOLERANCE, || format!("residual {worst}"))?;
    Ok(format!("rescale by c = {c:.4} gives 1 on F; l(-I) = 1, l(I) = 0; parallelogram residual {worst:.2e} < {PARALLELOGRAM_TOLERANCE:e}"))
}

fn witness_minimality() -> Outcome {
    let z = Group::Lattice { d: 1 };
    let mod_cases: [(&[i64], i64); 4] = [(&[-2, 0, 1, 3], 4), (&[0, 5], 2), (&[-3, -1, 0, 2, 7], 6), (&[1, 2, 3, 4, 5], 6)];
    for (xs, expected) in mod_cases {
        let e: Vec<Element> = xs.iter().map(|&x| Element::lattice1(x)).collect();
        let q = separating_quotient(&z, &e).map_err(err)?;
        ensure(q.modulus() == Some(expected), || format!("{xs:?}: modulus {:?}, expected {expected}", q.modulus()))?;
        let smaller = QuotientMap::reduce(z.clone(), expected - 1).map_err(err)?;
        ensure(smaller.check_separation(&e).is_err(), || format!("{xs:?}: mod {} also separates", expected - 1))?;
    }
    let folner_cases: [(&[i64], f64, u64); 4] = [(&[-1, 1], 0.1, 5), (&[-2, 2], 0.5, 2), (&[-1, 0, 1], 0.05, 10), (&[3], 0.25, 6)];
    for (xs, eps, m) in folner_cases {
        let req: Vec<Element> = xs.iter().map(|&x| Element::lattice1(x)).collect();
        let f = folner_set(&z, &req, eps).map_err(err)?;
        ensure(f.radius == Some(m), || format!("{xs:?} eps {eps}: radius {:?}, expected {m}", f.radius))?;
        let bound = BigRational::from_float(eps).unwrap();
        ensure(folner_ratio(&z, &f.elements, &req).map_err(err)? <= bound, || "box misses epsilon".into())?;
        ensure(box_set(&z, m - 1, &req, eps).is_err(), || format!("{xs:?}: radius {} also works", m - 1))?;
    }
    Ok(format!("{} modulus and {} box fixtures minimal", mod_cases.len(), folner_cases.len()))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn cli_contract() -> Outcome {
    let run = |name: &str, extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_approxgrp"))
            .arg("run")
            .arg(fixture(name))
            .args(extra)
            .output()
            .map_err(|e| e.to_string())
    };
    for (name, code) in [("pass_amenable_z6.json", 0), ("violation_qhom.json", 1), ("malformed_epsilon.json", 2)] {
        let o = run(name, &[])?;
        ensure(o.status.code() == Some(code), || format!("{name}: exit {:?}, expected {code}", o.status.code()))?;
    }
    for name in ["pass_sofic_sampled.json", "violation_qhom.json"] {
        let a = run(name, &["--format", "machine", "--seed", "42"])?;
        let b = run(name, &["--format", "machine", "--seed", "42"])?;
        ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || format!("{name}: reports differ"))?;
    }
    Ok("exit codes 0/1/2 on pass/violation/malformed; machine reports byte-identical".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 length axioms", length_axioms),
        ("2 commutator contractivity", commutator_contractivity),
        ("3 direct-product bound", direct_product_bound),
        ("4 wreath bound", wreath_bound),
        ("5 permutation wreath", sofic_wreath),
        ("6 amenable extension", amenable_extension),
        ("7 strong-property witnesses", strong_witnesses),
        ("8 witness minimality", witness_minimality),
        ("9 cli determinism", cli_contract),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS  {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL  {name}: panicked");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
