use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use spinphase::amplitudes::{compose, expectation, probabilities};
use spinphase::conventions::phase_relation;
use spinphase::geometry::normalize_direction;
use spinphase::json::to_json_string;
use spinphase::linalg::Mat2C;
use spinphase::operators::{expectation_sandwich, generalized_component, oracle_component, ObservableSpec, OperatorSet};
use spinphase::simulate::{run_sim, SimConfig};
use spinphase::{amplitude_matrix, build_operator_set, Direction, Outcome, PhaseConvention};

const TOL: f64 = 1e-12;

fn direction() -> impl Strategy<Value = Direction> {
    (0.0..=PI, 0.0..TAU).prop_map(|(t, p)| Direction::new(t, p).unwrap())
}

fn convention() -> impl Strategy<Value = PhaseConvention> {
    prop_oneof![
        Just(PhaseConvention::Old),
        Just(PhaseConvention::New),
        (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b)| PhaseConvention::custom(a, b).unwrap()),
    ]
}

fn wrapped(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normalized_direction_keeps_unit_vector(t in -20.0..20.0f64, p in -20.0..20.0f64) {
        let d = normalize_direction(t, p).unwrap();
        prop_assert!((0.0..=PI).contains(&d.theta()));
        prop_assert!((0.0..TAU).contains(&d.phi()));
        let want = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
        for (g, w) in d.unit_vector().iter().zip(want) {
            prop_assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn amplitudes_are_unitary_and_compose(a in direction(), b in direction(), c in direction(), conv in convention()) {
        let ab = amplitude_matrix(&a, &b, &conv);
        let bc = amplitude_matrix(&b, &c, &conv);
        prop_assert!(ab.psi.unitary_residual() < TOL);
        let via = compose(&ab, &bc).unwrap();
        prop_assert!(via.psi.distance(&amplitude_matrix(&a, &c, &conv).psi) < TOL);
    }

    #[test]
    fn probabilities_are_stochastic_and_phase_free(a in direction(), c in direction(), k1 in convention(), k2 in convention()) {
        let p1 = probabilities(&amplitude_matrix(&a, &c, &k1));
        let p2 = probabilities(&amplitude_matrix(&a, &c, &k2));
        for i in 0..2 {
            prop_assert!((p1[i][0] + p1[i][1] - 1.0).abs() < TOL);
            prop_assert!((p1[0][i] + p1[1][i] - 1.0).abs() < TOL);
            for n in 0..2 {
                prop_assert!((p1[i][n] - p2[i][n]).abs() < TOL);
            }
        }
    }

    #[test]
    fn custom_phases_are_recovered(n in direction(), ap in -3.0..3.0f64, am in -3.0..3.0f64) {
        let (dp, dm) = phase_relation(&PhaseConvention::Old, &PhaseConvention::custom(ap, am).unwrap(), &n).unwrap();
        prop_assert!(wrapped(dp - ap).abs() < 1e-9);
        prop_assert!(wrapped(dm - am).abs() < 1e-9);
    }

    #[test]
    fn component_matches_oracle_and_is_involutory(b in direction(), c in direction(), conv in convention()) {
        let g = generalized_component(&b, &c, &conv, &ObservableSpec::spin_component());
        prop_assert!(g.distance(&oracle_component(&b, &c, &conv)) < TOL);
        prop_assert!(g.hermitian_residual() < TOL);
        prop_assert!((g * g).distance(&Mat2C::identity()) < TOL);
        prop_assert!(g.trace().norm() < TOL);
    }

    #[test]
    fn total_spin_is_scalar(b in direction(), c in direction(), conv in convention()) {
        let g = generalized_component(&b, &c, &conv, &ObservableSpec::total_spin_squared());
        prop_assert!(g.distance(&Mat2C::identity().scale(3.0.into())) < TOL);
    }

    #[test]
    fn operator_set_satisfies_algebra(b in direction(), c in direction(), conv in convention()) {
        let s = build_operator_set(&b, &c, &conv).unwrap();
        prop_assert!(s.commutator_residual() < TOL);
        prop_assert!(s.anticommutator_residual() < TOL);
        prop_assert!(s.square_residual() < TOL);
        prop_assert!(s.eigen_residual() < TOL);
        prop_assert!(s.ladder_residual() < TOL);
    }

    #[test]
    fn axis_component_diagonal_is_phase_free(b in direction(), c in direction(), k1 in convention(), k2 in convention()) {
        let s1 = build_operator_set(&b, &c, &k1).unwrap();
        let s2 = build_operator_set(&b, &c, &k2).unwrap();
        prop_assert!((s1.sigma_c.get(0, 0) - s2.sigma_c.get(0, 0)).norm() < TOL);
        prop_assert!((s1.sigma_c.get(0, 1).norm() - s2.sigma_c.get(0, 1).norm()).abs() < TOL);
        for (_, m, _) in s1.components().iter().chain(s2.components().iter()) {
            prop_assert!((m.det() + 1.0).norm() < TOL);
        }
    }

    #[test]
    fn expectation_two_ways(a in direction(), b in direction(), c in direction(), conv in convention(), r1 in -5.0..5.0f64, r2 in -5.0..5.0f64, up in any::<bool>()) {
        let r = ObservableSpec::new(r1, r2).unwrap();
        let initial = if up { Outcome::Up } else { Outcome::Down };
        let direct = expectation(initial, &amplitude_matrix(&a, &c, &conv), &r);
        let sandwich = expectation_sandwich(initial, &a, &b, &c, &conv, &r);
        prop_assert!((direct - sandwich).abs() < 1e-11);
    }

    #[test]
    fn operator_set_json_round_trips(b in direction(), c in direction(), conv in convention()) {
        let s = build_operator_set(&b, &c, &conv).unwrap();
        let back: OperatorSet = serde_json::from_str(&to_json_string(&s)).unwrap();
        prop_assert_eq!(back, s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn simulation_counts_sum(chain in proptest::collection::vec(direction(), 2..5), shots in 1u64..500, seed in any::<u64>(), conv in convention()) {
        let cfg = SimConfig { chain, initial: Outcome::Up, n_shots: shots, seed, convention: conv };
        let r = run_sim(&cfg).unwrap();
        prop_assert_eq!(r.paths.iter().map(|p| p.count).sum::<u64>(), shots);
        prop_assert!((r.paths.iter().map(|p| p.predicted).sum::<f64>() - 1.0).abs() < TOL);
        prop_assert_eq!(r, run_sim(&cfg).unwrap());
    }
}
