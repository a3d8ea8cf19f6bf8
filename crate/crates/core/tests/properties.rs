use std::f64::consts::PI;

use cohom1::actions::{admissible_k, classified_triples, degree_of_k_map, make_action, Space, Tangential};
use cohom1::classify::{is_harmonic_k_map, is_linear_solution, linear_residual_oracle, ORACLE_THRESHOLD};
use cohom1::identities::{lemma_sin_2r, lemma_sin_sq, IdentitySample};
use cohom1::ode::{closed_tension, closed_tension_equal_m, raw_tension_sphere, raw_tension_so, rhs};
use cohom1::solver::{brackets, solve, sweep};
use cohom1::{BvpSpec, ShootingConfig, TensionSample};
use proptest::prelude::*;
use proptest::sample::select;

const MARGIN: f64 = 1e-3;

fn triples() -> Vec<(u32, u32, u32)> {
    classified_triples(9, 2)
}

fn spaces() -> Vec<Space> {
    vec![Space::Sphere, Space::OrthogonalGroup]
}

/// Parameter `t ∈ (0, π/g)` kept `MARGIN` away from the poles.
fn interior(g: u32, frac: f64) -> f64 {
    let len = PI / f64::from(g);
    MARGIN + frac * (len - 2.0 * MARGIN)
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / (1.0 + x.abs().max(y.abs()))
}

fn sample() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.0..1.0f64, -10.0..10.0f64, -20.0..20.0f64, -50.0..50.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn raw_sum_matches_closed_form(
        g in 1u32..=12, m0 in 1u32..=9, m1 in 1u32..=9, k in -20i64..=20,
        (frac, r, rdot, rddot) in sample(),
    ) {
        let m1 = if g % 2 == 1 { m0 } else { m1 };
        let spec = BvpSpec::new(g, m0, m1, k).unwrap();
        let t = interior(g, frac);
        let s = TensionSample::new(t, r, rdot, rddot);
        let sin_gt = (f64::from(g) * t).sin();
        let raw = 4.0 * sin_gt * sin_gt * raw_tension_sphere(g, m0, m1, &s).unwrap();
        prop_assert!(rel(raw, closed_tension(&spec, &s).unwrap()) <= 1e-9);
    }

    #[test]
    fn lifted_sum_matches_closed_form_at_twice_g(
        h in 1u32..=6, m0 in 1u32..=9, m1 in 1u32..=9, k in -20i64..=20,
        (frac, r, rdot, rddot) in sample(),
    ) {
        let spec = BvpSpec::new(2 * h, m0, m1, k).unwrap();
        let t = interior(2 * h, frac);
        let s = TensionSample::new(t, r, rdot, rddot);
        let sin_gt = (f64::from(2 * h) * t).sin();
        let raw = raw_tension_so(h, m0, m1, &s).unwrap();
        prop_assert_eq!(raw, raw_tension_sphere(2 * h, m0, m1, &s).unwrap());
        prop_assert!(rel(4.0 * sin_gt * sin_gt * raw, closed_tension(&spec, &s).unwrap()) <= 1e-9);
    }

    #[test]
    fn equal_multiplicity_form_is_half(
        g in 1u32..=12, m in 1u32..=9, k in -20i64..=20,
        (frac, r, rdot, rddot) in sample(),
    ) {
        let spec = BvpSpec::new(g, m, m, k).unwrap();
        let s = TensionSample::new(interior(g, frac), r, rdot, rddot);
        let full = closed_tension(&spec, &s).unwrap();
        prop_assert!(rel(2.0 * closed_tension_equal_m(&spec, &s).unwrap(), full) <= 1e-12);
    }

    #[test]
    fn rhs_solves_closed_form(
        g in 1u32..=12, m0 in 1u32..=9, m1 in 1u32..=9, k in -20i64..=20,
        (frac, r, rdot, _) in sample(),
    ) {
        let spec = BvpSpec::new(g, m0, m1, k).unwrap();
        let t = interior(g, frac);
        let rddot = rhs(&spec).eval(t, r, rdot).unwrap();
        let value = closed_tension(&spec, &TensionSample::new(t, r, rdot, rddot)).unwrap();
        let scale = spec.scale() * (1.0 + rdot.abs());
        prop_assert!(value.abs() <= 1e-11 * scale, "{value} vs scale {scale}");
    }

    #[test]
    fn closed_form_is_pi_periodic_in_r(
        g in 1u32..=12, m0 in 1u32..=9, m1 in 1u32..=9,
        (frac, r, rdot, rddot) in sample(), shift in -3i32..=3,
    ) {
        let spec = BvpSpec::new(g, m0, m1, 1).unwrap();
        let t = interior(g, frac);
        let base = closed_tension(&spec, &TensionSample::new(t, r, rdot, rddot)).unwrap();
        let moved = closed_tension(&spec, &TensionSample::new(t, r + f64::from(shift) * PI, rdot, rddot)).unwrap();
        prop_assert!(rel(base, moved) <= 1e-9);
    }

    #[test]
    fn sin_sq_lemma_holds_and_is_periodic(g in 1u32..=12, r in 0.0..PI, frac in 0.0..1.0f64) {
        let t = MARGIN + frac * (PI - 2.0 * MARGIN);
        let s = IdentitySample::new(g, r, t).with_margin(MARGIN);
        prop_assume!(s.is_regular());
        let sides = lemma_sin_sq(&s).unwrap();
        prop_assert!(sides.holds(1e-10));
        let shifted = lemma_sin_sq(&IdentitySample::new(g, r + PI, t).with_margin(MARGIN)).unwrap();
        prop_assert!(rel(sides.lhs, shifted.lhs) <= 1e-10);
    }

    #[test]
    fn sin_sq_lemma_is_a_trigonometric_polynomial_of_degree_one_in_2r(
        g in 1u32..=12, frac in 0.0..1.0f64, r in 0.0..PI,
    ) {
        let t = MARGIN + frac * (PI - 2.0 * MARGIN);
        prop_assume!(IdentitySample::new(g, 0.0, t).with_margin(MARGIN).is_regular());
        let lhs = |r: f64| lemma_sin_sq(&IdentitySample::new(g, r, t).with_margin(MARGIN)).unwrap().lhs;
        // c + A cos 2r + B sin 2r from r = 0, π/4, π/2.
        let (f0, f1, f2) = (lhs(0.0), lhs(0.25 * PI), lhs(0.5 * PI));
        let c = 0.5 * (f0 + f2);
        let a = 0.5 * (f0 - f2);
        let b = f1 - c;
        let fit = c + a * (2.0 * r).cos() + b * (2.0 * r).sin();
        prop_assert!(rel(fit, lhs(r)) <= 1e-9);
    }

    #[test]
    fn sin_2r_lemma_is_the_r_derivative(g in 1u32..=12, r in 0.0..PI, frac in 0.0..1.0f64) {
        let t = MARGIN + frac * (PI - 2.0 * MARGIN);
        let s = IdentitySample::new(g, r, t).with_margin(MARGIN);
        prop_assume!(s.is_regular());
        let h = 1e-5;
        let at = |r: f64| lemma_sin_sq(&IdentitySample::new(g, r, t).with_margin(MARGIN)).unwrap().lhs;
        let fd = (at(r + h) - at(r - h)) / (2.0 * h);
        let sides = lemma_sin_2r(&s).unwrap();
        prop_assert!(sides.holds(1e-10));
        prop_assert!(rel(fd, sides.lhs) <= 1e-6);
    }

    #[test]
    fn make_action_is_symmetric_in_multiplicities(
        triple in select(triples()), space in select(spaces()),
    ) {
        let (g, m0, m1) = triple;
        let a = make_action(space, g, m0, m1, true).unwrap();
        let b = make_action(space, g, m1, m0, true).unwrap();
        prop_assert_eq!(a.n, b.n);
        prop_assert_eq!(a.weyl_order, b.weyl_order);
        prop_assert_eq!((a.codim0, a.codim1), (b.codim1, b.codim0));
        prop_assert_eq!(a.odd_j_allowed, b.odd_j_allowed);
    }

    #[test]
    fn degree_basic_values(triple in select(triples()), space in select(spaces()), j in -6i64..=6) {
        let (g, m0, m1) = triple;
        let action = make_action(space, g, m0, m1, true).unwrap();
        prop_assume!(action.odd_j_allowed || j % 2 == 0);
        prop_assert_eq!(degree_of_k_map(&action, 0).unwrap(), 1);
        let k = admissible_k(&action, j).unwrap();
        let degree = degree_of_k_map(&action, j).unwrap();
        if j % 2 == 0 {
            prop_assert!(degree == k || degree == 1);
        }
        prop_assert!(degree.abs() <= k.abs().max(1));
    }

    #[test]
    fn admissible_k_is_increasing(triple in select(triples()), space in select(spaces())) {
        let (g, m0, m1) = triple;
        let action = make_action(space, g, m0, m1, true).unwrap();
        let ks: Vec<i64> = (-6..=6).filter_map(|j| admissible_k(&action, j).ok()).collect();
        prop_assert!(ks.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(ks.contains(&1));
    }

    #[test]
    fn harmonic_verdicts_are_consistent(triple in select(triples()), space in select(spaces()), j in -6i64..=6) {
        let (g, m0, m1) = triple;
        let action = make_action(space, g, m0, m1, true).unwrap();
        prop_assume!(action.odd_j_allowed || j % 2 == 0);
        let v = is_harmonic_k_map(&action, j).unwrap();
        if v.harmonic {
            prop_assert!(v.is_linear_solution);
            prop_assert!(v.tangential != Tangential::Unresolved);
        }
        prop_assert_eq!(v.degree, degree_of_k_map(&action, j).unwrap());
    }

    #[test]
    fn rule_agrees_with_oracle_off_the_reflection(
        g in 1u32..=12, m0 in 1u32..=9, m1 in 1u32..=9, j in -6i64..=6,
    ) {
        let m1 = if g % 2 == 1 { m0 } else { m1 };
        // Maps of the classified actions have k ≡ 1 mod G.
        let k = j * i64::from(g) + 1;
        // r = −t also solves the G = 1 problem; the rule omits it.
        prop_assume!(!(g == 1 && k == -1));
        let spec = BvpSpec::new(g, m0, m1, k).unwrap();
        let oracle = linear_residual_oracle(g, m0, m1, k, 64).unwrap() <= ORACLE_THRESHOLD * spec.scale();
        prop_assert_eq!(oracle, is_linear_solution(g, m0, m1, k));
    }
}

fn linear_harmonic_specs() -> Vec<BvpSpec> {
    let mut out = Vec::new();
    for (g, m0, m1) in triples() {
        for space in spaces() {
            let action = make_action(space, g, m0, m1, true).unwrap();
            for j in -4..=4 {
                if let Ok(v) = is_harmonic_k_map(&action, j) {
                    let spec = BvpSpec::from_action(&action, j).unwrap();
                    if v.harmonic && !out.contains(&spec) {
                        out.push(spec);
                    }
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solver_recovers_linear_solutions(spec in select(linear_harmonic_specs())) {
        let config = ShootingConfig::default();
        let p = solve(&spec, &config, None).unwrap();
        prop_assert!(p.residual <= ShootingConfig::residual_bound(&spec));
        prop_assert!(p.max_linear_deviation() <= 1e-6 * (1.0 + spec.k.abs() as f64));
        prop_assert!(p.samples.windows(2).all(|w| w[0].t < w[1].t));
    }

    #[test]
    fn solver_ignores_small_perturbations_of_the_start(
        spec in select(linear_harmonic_specs()), da in -0.05..0.05f64, db in -0.05..0.05f64,
    ) {
        // (1,1,1,1) has a one-parameter family of solutions through r = t.
        prop_assume!(!(spec.g == 1 && spec.k == 1 && spec.m0 == 1));
        let config = ShootingConfig::default();
        let k = spec.k as f64;
        let p = solve(&spec, &config, Some((k + da, k + db))).unwrap();
        prop_assert!((p.slope0 - k).abs() <= 1e-6 * (1.0 + k.abs()));
        prop_assert!((p.slope1 - k).abs() <= 1e-6 * (1.0 + k.abs()));
    }

    #[test]
    fn halving_start_offsets_keeps_slopes(spec in select(linear_harmonic_specs())) {
        prop_assume!(!(spec.g == 1 && spec.k == 1 && spec.m0 == 1));
        let base = ShootingConfig::default();
        let half = ShootingConfig { eps0: 0.5 * base.eps0, eps1: 0.5 * base.eps1, ..base.clone() };
        let p = solve(&spec, &base, None).unwrap();
        let q = solve(&spec, &half, None).unwrap();
        prop_assert!((p.slope0 - q.slope0).abs() <= 1e-7 * (1.0 + spec.k.abs() as f64));
        prop_assert!((p.slope1 - q.slope1).abs() <= 1e-7 * (1.0 + spec.k.abs() as f64));
    }

    #[test]
    fn solve_is_deterministic(spec in select(linear_harmonic_specs())) {
        let config = ShootingConfig::default();
        prop_assert_eq!(solve(&spec, &config, None).unwrap(), solve(&spec, &config, None).unwrap());
    }
}

#[test]
fn refined_sweep_keeps_every_bracket() {
    let spec = BvpSpec::new(1, 2, 2, 1).unwrap();
    let coarse = ShootingConfig {
        bracket: Some((0.0, 20.0)),
        sweep_points: 257,
        ..ShootingConfig::default()
    };
    let fine = ShootingConfig {
        sweep_points: 2 * coarse.sweep_points - 1,
        ..coarse.clone()
    };
    let fine_brackets = brackets(&sweep(&spec, &fine).unwrap());
    let coarse_brackets = brackets(&sweep(&spec, &coarse).unwrap());
    assert!(!coarse_brackets.is_empty());
    for (lo, hi) in &coarse_brackets {
        assert!(
            fine_brackets.iter().any(|(a, b)| lo <= a && b <= hi),
            "coarse bracket ({lo}, {hi}) lost in {fine_brackets:?}"
        );
    }
}

#[test]
fn sweep_threads_do_not_change_results() {
    let spec = BvpSpec::new(2, 1, 1, 1).unwrap();
    let base = ShootingConfig {
        sweep_points: 64,
        ..ShootingConfig::default()
    };
    let one = ShootingConfig { threads: Some(1), ..base.clone() };
    let four = ShootingConfig { threads: Some(4), ..base };
    let (x, y) = (sweep(&spec, &one).unwrap(), sweep(&spec, &four).unwrap());
    assert_eq!(x.len(), y.len());
    for (p, q) in x.iter().zip(&y) {
        assert_eq!(p.a, q.a);
        assert!(p.gap == q.gap || (p.gap.is_nan() && q.gap.is_nan()));
    }
}
