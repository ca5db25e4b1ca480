mod common;

use hybrid_squeeze::dynamics::{noise_matrix, DriftSpec};
use hybrid_squeeze::solver::{
    floquet_stability, lyapunov_residual, relax_absent_ensembles, steady_state, SolveMethod,
    SolverOptions, PHYSICAL_TOLERANCE, RESIDUAL_BOUND, TRUNCATION_TOLERANCE,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn converged_states_are_physical(seed in any::<u64>()) {
        let p = relax_absent_ensembles(&common::random_params(&mut ChaCha8Rng::seed_from_u64(seed)));
        prop_assume!(floquet_stability(&DriftSpec::full(p)).unwrap().stable);
        let ss = steady_state(&p, &SolverOptions::default()).unwrap();
        prop_assert!(ss.v_mean.min_symplectic_eigenvalue() >= 0.5 - PHYSICAL_TOLERANCE);
        prop_assert!(ss.residual <= TRUNCATION_TOLERANCE);
        prop_assert!(ss.var_xb_min <= ss.var_xb() && ss.var_xb() <= ss.var_xb_max);
        prop_assert!(ss.v_mean.asymmetry() == 0.0);
    }

    #[test]
    fn lyapunov_solves_meet_the_residual_bound(seed in any::<u64>()) {
        let p = relax_absent_ensembles(&common::random_params(&mut ChaCha8Rng::seed_from_u64(seed)));
        let spec = DriftSpec::rwa(p);
        prop_assume!(floquet_stability(&spec).unwrap().stable);
        let ss = steady_state(&p, &SolverOptions::default().with_method(SolveMethod::AlgebraicLyapunov)).unwrap();
        let d = noise_matrix(&p);
        let r = lyapunov_residual(&spec.matrix(0.0), ss.v_mean.matrix(), &d).amax();
        prop_assert!(r < RESIDUAL_BOUND * d.max_entry());
        prop_assert!(ss.v_mean.min_symplectic_eigenvalue() >= 0.5 - PHYSICAL_TOLERANCE);
    }
}

#[test]
fn time_integrated_orbits_close_on_themselves() {
    let opts = SolverOptions::default().with_method(SolveMethod::TimeIntegration);
    for p in common::stable_draws(5, 6) {
        let ss = steady_state(&p, &opts).unwrap();
        assert!(ss.residual < 1e-6, "periodic defect {}", ss.residual);
        assert!(ss.v_mean.min_symplectic_eigenvalue() >= 0.5 - PHYSICAL_TOLERANCE);
    }
}
