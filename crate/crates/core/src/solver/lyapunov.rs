use nalgebra::DVector;

use super::packed::kronecker_sum;
use super::{check_physical, CovarianceMatrix, SolveMethod, SolverError, SteadyState};
use crate::dynamics::{DriftSpec, DriftVariant, NoiseMatrix};
use crate::Matrix8;

/// Accepted residual `max|A V + V Aᵀ + D|`, relative to `max|D|`.
pub const RESIDUAL_BOUND: f64 = 1e-10;

const REFINEMENT_STEPS: usize = 3;

/// `A V + V Aᵀ + D`.
pub fn lyapunov_residual(a: &Matrix8, v: &Matrix8, d: &NoiseMatrix) -> Matrix8 {
    a * v + v * a.transpose() + d.matrix()
}

/// Eigenvalues of `a` with non-negative real part (up to rounding).
fn offending_eigenvalues(a: &Matrix8) -> Vec<num_complex::Complex64> {
    let scale = a.amax().max(1.0);
    a.complex_eigenvalues()
        .iter()
        .filter(|z| z.re >= -1e-14 * scale)
        .cloned()
        .collect()
}

/// Solves `A V + V Aᵀ + D = 0` for Hurwitz `A`.
///
/// The equation is vectorised with the Kronecker sum and solved by LU, then
/// refined against the residual if needed.
pub fn lyapunov_steady(a: &Matrix8, d: &NoiseMatrix) -> Result<CovarianceMatrix, SolverError> {
    let offending = offending_eigenvalues(a);
    if !offending.is_empty() {
        return Err(SolverError::NotHurwitz {
            eigenvalues: offending,
        });
    }
    let lu = kronecker_sum(a).lu();
    let vec = |m: &Matrix8| DVector::from_iterator(64, m.transpose().iter().cloned());
    let solve = |rhs: &Matrix8| -> Result<Matrix8, SolverError> {
        let x = lu.solve(&vec(rhs)).ok_or(SolverError::Singular {
            context: "Lyapunov equation",
        })?;
        Ok(Matrix8::from_fn(|i, j| x[8 * i + j]))
    };

    let bound = RESIDUAL_BOUND * d.max_entry().max(f64::MIN_POSITIVE);
    let mut v = solve(&(-d.matrix()))?;
    v = (v + v.transpose()) * 0.5;
    let mut residual = lyapunov_residual(a, &v, d).amax();
    for _ in 0..REFINEMENT_STEPS {
        if residual <= bound {
            break;
        }
        let r = lyapunov_residual(a, &v, d);
        let dv = solve(&(-r))?;
        v += (dv + dv.transpose()) * 0.5;
        residual = lyapunov_residual(a, &v, d).amax();
    }
    if residual > bound {
        return Err(SolverError::ResidualTooLarge { residual, bound });
    }
    Ok(CovarianceMatrix::new(v))
}

/// Full [`SteadyState`] of a static drift.
pub(super) fn steady_state(spec: &DriftSpec, d: &NoiseMatrix) -> Result<SteadyState, SolverError> {
    if spec.variant != DriftVariant::Rwa {
        return Err(SolverError::UnsupportedVariant {
            method: SolveMethod::AlgebraicLyapunov,
            variant: spec.variant,
        });
    }
    let a = spec.matrix(0.0);
    let v = lyapunov_steady(&a, d)?;
    check_physical(&v)?;
    let residual =
        lyapunov_residual(&a, v.matrix(), d).amax() / d.max_entry().max(f64::MIN_POSITIVE);
    let max_re = a
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SteadyState {
        v_mean: v,
        var_xb_min: v.var_xb(),
        var_xb_max: v.var_xb(),
        stable: true,
        periods_used: 0,
        method: SolveMethod::AlgebraicLyapunov,
        harmonics_used: 0,
        residual,
        convergence_history: Vec::new(),
        max_multiplier: (max_re * crate::dynamics::PERIOD).exp(),
    })
}
