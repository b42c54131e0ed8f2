use proptest::prelude::*;
use varorbit::functionals::action_reduced;
use varorbit::loop_space::{random_loop, random_triple, winding_number};
use varorbit::minimizer::{minimize, recover_period, to_physical};
use varorbit::oracles::{kepler_period, lagrange_period};
use varorbit::verify::{action_identity, equilateral_deviation};
use varorbit::{
    FourierLoop, MinimizeOptions64, QuadratureGrid, QuadratureGrid64, Status, ThreeBodySystem64, TwoBodySystem,
    TwoBodySystem64,
};

#[test]
fn two_body_pipeline_from_random_start_to_checked_orbit() {
    let sys = TwoBodySystem64::new(2.0, -0.25).unwrap();
    let grid = QuadratureGrid64::new(512).unwrap();
    let start = random_loop(7, 16, -1, 0.3).unwrap();
    let r = minimize(&start, &sys, &grid, &MinimizeOptions64::default()).unwrap();
    assert_eq!(r.status, Status::Converged);
    assert_eq!(r.windings, vec![-1]);
    // F = π²a²/(−2h)
    let expected = std::f64::consts::PI.powi(2) * 4.0 / 0.5;
    assert!((r.action - expected).abs() < 1e-8 * expected);
    let law = kepler_period(2.0, -0.25).unwrap();
    assert!((r.period - law).abs() < 1e-8 * law);

    let orbit = to_physical(&r.final_loop, law, &sys, 256).unwrap();
    assert!(action_identity(&orbit, &sys, r.action, 1e-6).unwrap().pass);
}

#[test]
fn three_body_pipeline_with_unequal_masses() {
    let masses = [1.0, 2.0, 3.0];
    let sys = ThreeBodySystem64::new(masses, -1.0).unwrap();
    let grid = QuadratureGrid64::new(512).unwrap();
    let start = random_triple(3, 16, 1, 0.3, masses).unwrap();
    let r = minimize(&start, &sys, &grid, &MinimizeOptions64::default()).unwrap();
    assert_eq!(r.status, Status::Converged);
    assert_eq!(r.windings, vec![1, 1, 1]);
    let composed = lagrange_period(masses, -1.0).unwrap().composed;
    assert!((r.period - composed).abs() < 1e-6 * composed);
    let orbit = to_physical(&r.final_loop, r.period, &sys, 256).unwrap();
    assert!(equilateral_deviation(&orbit).unwrap() < 1e-4);
}

#[test]
fn single_precision_evaluates_the_same_functionals() {
    let sys = TwoBodySystem::<f32>::new(1.0, -0.5).unwrap();
    let grid = QuadratureGrid::<f32>::new(256).unwrap();
    let circle = FourierLoop::<f32>::circle(1.0, 1, 8);
    let f = action_reduced(&circle, &sys, &grid).unwrap();
    assert!((f - std::f32::consts::PI.powi(2)).abs() < 1e-4 * f);
    // the unit circle already sits on the h = −½ manifold, one turn in T = 2π
    let t = recover_period(&circle, &sys, &grid).unwrap();
    assert!((t - std::f32::consts::TAU).abs() < 1e-5 * t);
    let off = circle.scaled(2.0);
    assert!(recover_period(&off, &sys, &grid).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn winding_survives_rotation_shift_and_scaling(
        seed in 0u64..1000,
        w in prop_oneof![-3i64..=-1, 1i64..=3],
        angle in -3.0f64..3.0,
        shift in 0.0f64..1.0,
        scale in 0.01f64..100.0,
    ) {
        let grid = QuadratureGrid64::new(512).unwrap();
        let u = random_loop(seed, 12, w, 0.3).unwrap();
        prop_assert_eq!(winding_number(&u, &grid).unwrap(), w);
        prop_assert_eq!(winding_number(&u.rotated(angle), &grid).unwrap(), w);
        prop_assert_eq!(winding_number(&u.time_shifted(shift), &grid).unwrap(), w);
        prop_assert_eq!(winding_number(&u.scaled(scale), &grid).unwrap(), w);
    }

    #[test]
    fn reduced_action_is_scale_invariant(seed in 0u64..1000, scale in 0.1f64..10.0) {
        let sys = TwoBodySystem64::new(1.0, -0.5).unwrap();
        let grid = QuadratureGrid64::new(256).unwrap();
        let u = random_loop(seed, 8, 1, 0.3).unwrap();
        let f = action_reduced(&u, &sys, &grid).unwrap();
        let g = action_reduced(&u.scaled(scale), &sys, &grid).unwrap();
        prop_assert!((f - g).abs() <= 1e-10 * f);
    }
}
