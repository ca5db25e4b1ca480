#![allow(dead_code)]

use hybrid_squeeze::dynamics::DriftSpec;
use hybrid_squeeze::model::SystemParams;
use hybrid_squeeze::solver::{floquet_stability, relax_absent_ensembles};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// One random point of the parameter space used for cross-validation.
pub fn random_params(rng: &mut impl Rng) -> SystemParams {
    SystemParams {
        kappa: log_uniform(rng, 0.1, 1000.0),
        gamma_m: log_uniform(rng, 1e-3, 1e-1),
        gamma_1: log_uniform(rng, 1e-2, 1.0),
        gamma_2: log_uniform(rng, 1e-2, 1.0),
        g_a1: rng.random_range(0.0..10.0),
        g_a2: rng.random_range(0.0..10.0),
        delta_1: rng.random_range(-5.0..5.0),
        delta_2: rng.random_range(-5.0..5.0),
        g_minus: rng.random_range(0.1..2.0),
        g_plus: 0.0,
        n_th: rng.random_range(0.0..5.0),
    }
    .with_ratio(rng.random_range(0.0..0.95))
}

/// `count` draws whose full and rotating-wave drifts are both stable.
pub fn stable_draws(seed: u64, count: usize) -> Vec<SystemParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = relax_absent_ensembles(&random_params(&mut rng));
        let full = floquet_stability(&DriftSpec::full(p))
            .map(|r| r.stable)
            .unwrap_or(false);
        let rwa = floquet_stability(&DriftSpec::rwa(p))
            .map(|r| r.stable)
            .unwrap_or(false);
        if full && rwa {
            out.push(p);
        }
    }
    out
}

/// Largest absolute entry of `a − b`.
pub fn max_diff(a: &hybrid_squeeze::Matrix8, b: &hybrid_squeeze::Matrix8) -> f64 {
    (a - b).amax()
}
