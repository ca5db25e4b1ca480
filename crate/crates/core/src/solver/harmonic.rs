//! Harmonic balance for the periodic steady state.
//!
//! With `A(t) = A₀ + A₊e^{2iω_m t} + A₋e^{−2iω_m t}` the ansatz
//! `V(t) = Σ_n V_n e^{2inω_m t}` turns the covariance dynamics into
//!
//! ```text
//! (L₀ − 2inω_m) V_n + L₊ V_{n−1} + L₋ V_{n+1} = −D δ_{n0}
//! ```
//!
//! with `L_k X = A_k X + X A_kᵀ`. The block-tridiagonal system is truncated
//! at `|n| ≤ N` and solved by eliminating from both ends toward `n = 0`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::packed::{index, lyapunov_operator, pack, unpack, PACKED};
use super::{
    check_physical, floquet_stability_with, CovarianceMatrix, SolveMethod, SolverError,
    SolverOptions, SteadyState,
};
use crate::dynamics::quadrature::X_B;
use crate::dynamics::{drift_harmonics, DriftSpec, NoiseMatrix, PERIOD};
use crate::model::OMEGA_M;

/// Largest truncation order tried before giving up.
pub const MAX_HARMONICS: usize = 64;
/// The truncation is accepted once `max|V_N| ≤ TRUNCATION_TOLERANCE·max|V_0|`.
pub const TRUNCATION_TOLERANCE: f64 = 1e-3;
/// Allowed violation of `V_{−n} = conj(V_n)`, relative to `max|V_0|`.
const HERMITIAN_TOLERANCE: f64 = 1e-8;
const MIN_SAMPLES: usize = 256;

type CMat = DMatrix<Complex64>;
type CVec = DVector<Complex64>;

struct Operators {
    l0: CMat,
    lp: CMat,
    lm: CMat,
    d: CVec,
}

fn solve_lu(m: CMat, rhs: &CMat) -> Result<CMat, SolverError> {
    m.lu().solve(rhs).ok_or(SolverError::Singular {
        context: "harmonic balance block",
    })
}

fn shifted(l0: &CMat, n: i64) -> CMat {
    let mut m = l0.clone();
    let s = Complex64::new(0.0, 2.0 * OMEGA_M * n as f64);
    for k in 0..PACKED {
        m[(k, k)] -= s;
    }
    m
}

/// Harmonics `V_{−N}, …, V_N` (index `n + N`) of the truncated system.
fn solve_truncated(ops: &Operators, n_max: usize) -> Result<Vec<CVec>, SolverError> {
    let n = n_max as i64;
    // Upper side: V_k = X_k V_{k−1} for k = 1..N.
    let mut x: Vec<CMat> = vec![CMat::zeros(PACKED, PACKED); n_max + 2];
    for k in (1..=n).rev() {
        let m = shifted(&ops.l0, k) + &ops.lm * &x[(k + 1) as usize];
        x[k as usize] = -solve_lu(m, &ops.lp)?;
    }
    // Lower side: V_{−k} = Y_k V_{−k+1} for k = 1..N.
    let mut y: Vec<CMat> = vec![CMat::zeros(PACKED, PACKED); n_max + 2];
    for k in (1..=n).rev() {
        let m = shifted(&ops.l0, -k) + &ops.lp * &y[(k + 1) as usize];
        y[k as usize] = -solve_lu(m, &ops.lm)?;
    }
    let mut center = ops.l0.clone();
    if n_max > 0 {
        center += &ops.lm * &x[1] + &ops.lp * &y[1];
    }
    let v0 = center.lu().solve(&(-&ops.d)).ok_or(SolverError::Singular {
        context: "harmonic balance centre",
    })?;

    let mut out = vec![CVec::zeros(PACKED); 2 * n_max + 1];
    out[n_max] = v0;
    for k in 1..=n_max {
        out[n_max + k] = &x[k] * &out[n_max + k - 1];
        out[n_max - k] = &y[k] * &out[n_max - k + 1];
    }
    Ok(out)
}

/// Periodic steady state by harmonic balance.
///
/// Starts at truncation order `opts.harmonics` and raises it by two until the
/// outermost harmonic is negligible or [`MAX_HARMONICS`] is exceeded. Fails
/// with [`SolverError::Unstable`] when the drift has no stable periodic
/// orbit. A rotating-wave `spec` reduces to the algebraic Lyapunov solution.
pub fn harmonic_balance_steady(
    spec: &DriftSpec,
    d: &NoiseMatrix,
    opts: &SolverOptions,
) -> Result<SteadyState, SolverError> {
    opts.validate()?;
    let floquet = floquet_stability_with(spec, opts)?;
    if !floquet.stable {
        return Err(SolverError::Unstable {
            max_multiplier: floquet.max_modulus,
        });
    }
    let h = drift_harmonics(spec);
    let ops = Operators {
        l0: lyapunov_operator(&h.mean).map(Complex64::from),
        lp: lyapunov_operator(&h.up),
        lm: lyapunov_operator(&h.down),
        d: pack(&d.matrix()).map(Complex64::from),
    };

    let mut n_max = opts.harmonics;
    let (harmonics, tail) = loop {
        let v = solve_truncated(&ops, n_max)?;
        let scale = v[n_max].camax();
        let tail = v[0].camax().max(v[2 * n_max].camax()) / scale;
        if tail <= TRUNCATION_TOLERANCE {
            break (v, tail);
        }
        if n_max + 2 > MAX_HARMONICS {
            return Err(SolverError::TruncationNotConverged {
                harmonics: n_max,
                tail_ratio: tail,
            });
        }
        n_max += 2;
    };

    let scale = harmonics[n_max].camax();
    let mut defect = harmonics[n_max]
        .iter()
        .map(|z| z.im.abs())
        .fold(0.0, f64::max);
    for k in 1..=n_max {
        let diff = &harmonics[n_max - k] - harmonics[n_max + k].map(|z| z.conj());
        defect = defect.max(diff.camax());
    }
    if defect > HERMITIAN_TOLERANCE * scale {
        return Err(SolverError::Inconsistent {
            what: "Hermitian symmetry of the harmonics",
            defect: defect / scale,
        });
    }

    let v_mean = CovarianceMatrix::new(unpack(&harmonics[n_max].map(|z| z.re)));
    check_physical(&v_mean)?;

    let xb = index(X_B, X_B);
    let samples = MIN_SAMPLES.max(8 * n_max);
    let mut lo = v_mean.var_xb();
    let mut hi = lo;
    for s in 0..samples {
        let t = PERIOD * s as f64 / samples as f64;
        let mut value = harmonics[n_max][xb].re;
        for k in 1..=n_max {
            let e = Complex64::from_polar(1.0, 2.0 * OMEGA_M * k as f64 * t);
            value += 2.0 * (harmonics[n_max + k][xb] * e).re;
        }
        lo = lo.min(value);
        hi = hi.max(value);
    }

    Ok(SteadyState {
        v_mean,
        var_xb_min: lo,
        var_xb_max: hi,
        stable: true,
        periods_used: 0,
        method: SolveMethod::HarmonicBalance,
        harmonics_used: n_max,
        residual: tail,
        convergence_history: Vec::new(),
        max_multiplier: floquet.max_modulus,
    })
}

/// Covariance at time `t` reconstructed from the harmonics; test helper.
#[cfg(test)]
fn reconstruct(harmonics: &[CVec], t: f64) -> crate::Matrix8 {
    let n_max = (harmonics.len() - 1) / 2;
    let mut sum = CVec::zeros(PACKED);
    for (i, v) in harmonics.iter().enumerate() {
        let n = i as f64 - n_max as f64;
        sum += v * Complex64::from_polar(1.0, 2.0 * OMEGA_M * n * t);
    }
    unpack(&sum.map(|z| z.re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::noise_matrix;
    use crate::model::SystemParams;
    use crate::solver::{lyapunov_residual, lyapunov_steady};

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn rwa_reduces_to_lyapunov() {
        let p = SystemParams::hursb_two_ensembles(0.005).with_ratio(0.8);
        let d = noise_matrix(&p);
        let spec = DriftSpec::rwa(p);
        let hb = harmonic_balance_steady(&spec, &d, &opts()).unwrap();
        let ly = lyapunov_steady(&spec.matrix(0.0), &d).unwrap();
        assert!((hb.v_mean.matrix() - ly.matrix()).amax() < 1e-10 * ly.matrix().amax());
        assert_eq!(hb.var_xb_min, hb.var_xb_max);
    }

    #[test]
    fn harmonics_satisfy_the_differential_equation() {
        // Check V̇ = AV + VAᵀ + D pointwise on the reconstructed orbit.
        let mut p = SystemParams::hursb_two_ensembles(0.01).with_ratio(0.7);
        p.kappa = 3.0;
        p.gamma_m = 0.01;
        let spec = DriftSpec::full(p);
        let d = noise_matrix(&p);
        let h = drift_harmonics(&spec);
        let ops = Operators {
            l0: lyapunov_operator(&h.mean).map(Complex64::from),
            lp: lyapunov_operator(&h.up),
            lm: lyapunov_operator(&h.down),
            d: pack(&d.matrix()).map(Complex64::from),
        };
        let v = solve_truncated(&ops, 12).unwrap();
        for &t in &[0.0, 0.37, 1.1, 2.9] {
            let eps = 1e-5;
            let dv = (reconstruct(&v, t + eps) - reconstruct(&v, t - eps)) / (2.0 * eps);
            let rhs = lyapunov_residual(&spec.matrix(t), &reconstruct(&v, t), &d);
            assert!((dv - rhs).amax() < 1e-6 * rhs.amax().max(1.0), "t = {t}");
        }
    }

    #[test]
    fn truncation_order_converges() {
        let p = SystemParams::hursb_two_ensembles(0.001).with_ratio(0.9);
        let d = noise_matrix(&p);
        let spec = DriftSpec::full(p);
        let low = harmonic_balance_steady(
            &spec,
            &d,
            &SolverOptions {
                harmonics: 2,
                ..opts()
            },
        )
        .unwrap();
        let high = harmonic_balance_steady(
            &spec,
            &d,
            &SolverOptions {
                harmonics: 10,
                ..opts()
            },
        )
        .unwrap();
        let diff = (low.v_mean.matrix() - high.v_mean.matrix()).amax();
        assert!(diff < 1e-10 * high.v_mean.matrix().amax());
        assert!(high.var_xb_min <= high.var_xb() && high.var_xb() <= high.var_xb_max);
    }

    #[test]
    fn unstable_drift_is_rejected() {
        let mut p = SystemParams::decoupled(1.0, 1e-3, 0.0);
        p.gamma_1 = 1.0;
        p.gamma_2 = 1.0;
        p.g_minus = 0.1;
        p.g_plus = 0.3;
        let err =
            harmonic_balance_steady(&DriftSpec::full(p), &noise_matrix(&p), &opts()).unwrap_err();
        assert!(err.is_instability());
    }
}
