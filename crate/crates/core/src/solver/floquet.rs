use nalgebra::DMatrix;
use num_complex::Complex64;

use super::radau::{refine, uniform};
use super::{SolverError, SolverOptions, INITIAL_STEP};
use crate::dynamics::{DriftSpec, DriftVariant, PERIOD};
use crate::Matrix8;

/// Multipliers with modulus at or above `1 − STABILITY_MARGIN` are unstable.
pub const STABILITY_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetReport {
    pub stable: bool,
    /// Eigenvalues of the one-period fundamental matrix.
    pub multipliers: Vec<Complex64>,
    pub max_modulus: f64,
}

impl FloquetReport {
    fn from_multipliers(multipliers: Vec<Complex64>) -> Self {
        let max_modulus = multipliers.iter().map(|z| z.norm()).fold(0.0, f64::max);
        FloquetReport {
            stable: max_modulus < 1.0 - STABILITY_MARGIN,
            multipliers,
            max_modulus,
        }
    }
}

/// Floquet multipliers of `ẋ = A(t) x` with default integrator tolerances.
pub fn floquet_stability(spec: &DriftSpec) -> Result<FloquetReport, SolverError> {
    floquet_stability_with(spec, &SolverOptions::default())
}

/// Floquet multipliers with the integrator tolerances of `opts`; the
/// largest modulus is converged to them.
///
/// For the static rotating-wave drift the multipliers are `exp(λ T)` of the
/// eigenvalues `λ` of `A`.
pub fn floquet_stability_with(
    spec: &DriftSpec,
    opts: &SolverOptions,
) -> Result<FloquetReport, SolverError> {
    if spec.variant == DriftVariant::Rwa {
        let lambda = spec.matrix(0.0).complex_eigenvalues();
        return Ok(FloquetReport::from_multipliers(
            lambda.iter().map(|l| (l * PERIOD).exp()).collect(),
        ));
    }
    let generator = |t: f64| DMatrix::from_column_slice(8, 8, spec.matrix(t).as_slice());
    let build = |n: usize| -> Result<FloquetReport, SolverError> {
        let mut phi = DMatrix::<f64>::identity(8, 8);
        uniform(&generator, None, PERIOD, n, false, |m| {
            phi = &m.trans * &phi
        })?;
        let phi = Matrix8::from_column_slice(phi.as_slice());
        Ok(FloquetReport::from_multipliers(
            phi.complex_eigenvalues().iter().cloned().collect(),
        ))
    };
    let close = |a: &FloquetReport, b: &FloquetReport| {
        let change = (a.max_modulus - b.max_modulus).abs();
        (change > opts.abs_tol + opts.rel_tol * b.max_modulus).then_some(change)
    };
    Ok(refine(PERIOD, INITIAL_STEP, build, close)?.0)
}
