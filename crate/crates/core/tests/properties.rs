use num_complex::Complex64;
use proptest::prelude::*;

use oqdrive::cognition::{
    build_cognition_matrix, build_luce_rates, initial_state_mixed, luce_probability,
    pr_continue_closed_form, pr_continue_from_state, steady_state_pr_continue, weighted_rate,
    CognitionParams, DriverBelief,
};
use oqdrive::engine::{build_generator, evolve, DensityState};
use oqdrive::equilibrium::Game;
use oqdrive::game::{
    agnostic_response_car, best_response_car, car_expected_utility, CarAction, CarResponse,
};
use oqdrive::matrix::ComplexMatrix;
use oqdrive::{Params, Utilities};

fn unit() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1.0), 0.0..=1.0f64]
}

fn alpha() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), 0.05..=1.0f64]
}

fn density() -> impl Strategy<Value = DensityState<f64>> {
    proptest::collection::vec(-1.0..1.0f64, 128).prop_map(|v| {
        let a = ComplexMatrix::from_fn(8, 8, |i, j| {
            Complex64::new(v[2 * (8 * i + j)], v[2 * (8 * i + j) + 1])
        });
        let rho = a.matmul(&a.adjoint()).unwrap();
        let tr = rho.trace();
        DensityState::new(rho.map(|z| z / tr)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_evolution(
        a in alpha(), lambda in 0.0..12.0f64, p in unit(), pa in unit(), t in 0.0..60.0f64,
    ) {
        let u = Utilities::baseline();
        let params = CognitionParams::new(a, lambda).unwrap();
        let rates = build_luce_rates(&u.driver(), lambda).unwrap();
        let g = build_generator(a, &build_cognition_matrix(&rates).into_matrix()).unwrap();
        let rho0 = initial_state_mixed(DriverBelief::new(p).unwrap(), pa).unwrap();
        let numeric = pr_continue_from_state(&evolve(&g, &rho0, t).unwrap()).unwrap();
        let closed = pr_continue_closed_form(&params, &rates, p, pa, t).unwrap();
        prop_assert!((numeric - closed).abs() <= 1e-8, "{numeric} vs {closed}");
    }

    #[test]
    fn evolution_keeps_a_density_matrix(
        rho in density(), a in alpha(), lambda in 0.0..12.0f64,
        t in prop_oneof![Just(0.1), Just(1.0), Just(10.0), Just(100.0)],
    ) {
        let rates = build_luce_rates(&Utilities::baseline().driver(), lambda).unwrap();
        let g = build_generator(a, &build_cognition_matrix(&rates).into_matrix()).unwrap();
        let out = evolve(&g, &rho, t).unwrap();
        prop_assert!((out.trace() - Complex64::new(1.0, 0.0)).norm() <= 1e-10);
        prop_assert!(out.hermiticity_defect() <= 1e-10);
        prop_assert!(out.populations().iter().all(|&x| x >= -1e-9));
    }

    #[test]
    fn steady_state_is_affine_and_centred(
        a in alpha(), lambda in 0.0..12.0f64, p in unit(), pa in unit(),
    ) {
        let params = CognitionParams::new(a, lambda).unwrap();
        let rates = build_luce_rates(&Utilities::baseline().driver(), lambda).unwrap();
        let ss = |p: f64, pa: f64| steady_state_pr_continue(&params, &rates, p, pa).unwrap();
        let v = ss(p, pa);
        prop_assert!((v - ((1.0 - pa) * ss(p, 0.0) + pa * ss(p, 1.0))).abs() <= 1e-12);
        prop_assert!((v - ((1.0 - p) * ss(0.0, pa) + p * ss(1.0, pa))).abs() <= 1e-12);
        let r = weighted_rate(&rates, &p, &pa);
        prop_assert_eq!(v >= 0.5 - 1e-12, r >= 0.5 - 1e-12);
    }

    #[test]
    fn luce_pairs_sum_to_one(x in 0.1..200.0f64, y in 0.1..200.0f64, lambda in 0.0..30.0f64) {
        let a = luce_probability(x, y, lambda).unwrap();
        let b = luce_probability(y, x, lambda).unwrap();
        prop_assert!((a + b - 1.0).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn luce_is_monotone(x in 0.1..200.0f64, dx in 0.0..50.0f64, y in 0.1..200.0f64, lambda in 0.0..30.0f64) {
        let lo = luce_probability(x, y, lambda).unwrap();
        let hi = luce_probability(x + dx, y, lambda).unwrap();
        prop_assert!(hi >= lo - 1e-15);
        if x >= y {
            let sharper = luce_probability(x, y, lambda + 1.0).unwrap();
            prop_assert!(sharper >= lo - 1e-15);
        }
    }

    #[test]
    fn car_utility_is_affine(action in prop_oneof![Just(CarAction::NoAlert), Just(CarAction::Alert)],
                             pc in unit(), q in unit(), s in 0.0..=1.0f64) {
        let u = Utilities::baseline();
        let f = |pc: f64, q: f64| car_expected_utility(action, pc, q, &u).unwrap();
        prop_assert!((f(pc, q) - ((1.0 - pc) * f(0.0, q) + pc * f(1.0, q))).abs() <= 1e-9);
        prop_assert!((f(pc, q) - ((1.0 - q) * f(pc, 0.0) + q * f(pc, 1.0))).abs() <= 1e-9);
        let m = f(pc, s * q);
        prop_assert!((m - ((1.0 - s) * f(pc, 0.0) + s * f(pc, q))).abs() <= 1e-9);
    }

    #[test]
    fn car_response_survives_positive_affine_maps(
        pc in unit(), q in unit(), scale in 0.01..100.0f64, shift in -100.0..100.0f64,
    ) {
        let u = Utilities::baseline();
        let before = best_response_car(pc, q, &u).unwrap();
        let after = best_response_car(pc, q, &u.with_car_affine(scale, shift)).unwrap();
        if before != CarResponse::Indifferent && after != CarResponse::Indifferent {
            prop_assert_eq!(before, after);
        }
    }

    #[test]
    fn agnostic_car_ignores_driver(
        p in unit(), q in unit(), a in 0.0..=1.0f64, lambda in 0.0..20.0f64,
    ) {
        let g = Game::new(Utilities::baseline(), Params::new(a, lambda).unwrap()).unwrap();
        let out = g.agnostic_outcome(p, q).unwrap();
        prop_assert_eq!(out.len(), 1);
        prop_assert_eq!(out.profiles[0].car, agnostic_response_car(q).unwrap());
    }

    #[test]
    fn pure_equilibria_are_fixed_points(
        p in unit(), q in unit(), a in alpha(), lambda in 0.0..12.0f64,
    ) {
        let g = Game::new(Utilities::baseline(), Params::new(a, lambda).unwrap()).unwrap();
        let set = g.pure_equilibria(p, q).unwrap();
        prop_assert!(set.len() <= 2);
        for profile in &set.profiles {
            prop_assert!(g.is_fixed_point(profile, p, q).unwrap());
        }
    }

    #[test]
    fn mixed_equilibria_satisfy_both_conditions(
        p in unit(), q in 10.0 / 19.0..=11.0 / 16.0, a in alpha(), lambda in 0.0..12.0f64,
    ) {
        let g = Game::new(Utilities::baseline(), Params::new(a, lambda).unwrap()).unwrap();
        if let Some(eq) = g.mixed_equilibrium(p, q).unwrap() {
            let n = car_expected_utility(CarAction::NoAlert, eq.pc_star, q, g.utilities()).unwrap();
            let al = car_expected_utility(CarAction::Alert, eq.pc_star, q, g.utilities()).unwrap();
            prop_assert!((n - al).abs() <= 1e-9);
            let response = g.driver().oq_mix(eq.pa_star, p).unwrap();
            prop_assert!((response - eq.pc_star).abs() <= 1e-9);
            prop_assert!(eq.bisection_gap <= 1e-10);
        }
    }
}
