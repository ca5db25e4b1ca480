//! Steady-state covariance of `V̇ = A(t) V + V A(t)ᵀ + D`.
//!
//! Three routes are provided:
//!
//! * [`lyapunov_steady`]: algebraic solve of `A V + V Aᵀ + D = 0` for a
//!   constant (rotating-wave) drift matrix.
//! * [`integrate_covariance`]: stiff time integration of the periodic
//!   dynamics, period by period, until the period-averaged covariance settles.
//! * [`harmonic_balance_steady`]: direct solve for the Fourier components of
//!   the periodic steady state. This is the production route; time
//!   integration is its independent check.
//!
//! [`floquet_stability`] decides whether a periodic steady state exists at all.

mod covariance;
mod floquet;
mod harmonic;
mod integrate;
mod lyapunov;
mod packed;
mod radau;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::{noise_matrix, DriftSpec, DriftVariant};
use crate::model::SystemParams;

pub use covariance::{CovarianceMatrix, PHYSICAL_TOLERANCE};
pub use floquet::{floquet_stability, floquet_stability_with, FloquetReport, STABILITY_MARGIN};
pub use harmonic::{harmonic_balance_steady, MAX_HARMONICS, TRUNCATION_TOLERANCE};
pub use integrate::integrate_covariance;
pub use lyapunov::{lyapunov_residual, lyapunov_steady, RESIDUAL_BOUND};
pub use radau::MAX_STEPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveMethod {
    /// Algebraic Lyapunov equation; rotating-wave drift only.
    AlgebraicLyapunov,
    TimeIntegration,
    HarmonicBalance,
}

impl SolveMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SolveMethod::AlgebraicLyapunov => "lyapunov",
            SolveMethod::TimeIntegration => "time-integration",
            SolveMethod::HarmonicBalance => "harmonic-balance",
        }
    }

    /// Drift variant this method solves when driven through [`steady_state`].
    pub fn variant(&self) -> DriftVariant {
        match self {
            SolveMethod::AlgebraicLyapunov => DriftVariant::Rwa,
            _ => DriftVariant::Full,
        }
    }
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolveMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lyapunov" | "algebraic-lyapunov" => Ok(SolveMethod::AlgebraicLyapunov),
            "time-integration" => Ok(SolveMethod::TimeIntegration),
            "harmonic-balance" => Ok(SolveMethod::HarmonicBalance),
            other => Err(format!(
                "unknown method `{other}` (expected lyapunov, time-integration or harmonic-balance)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub method: SolveMethod,
    /// Relative tolerance of the time integrator: the step count per period
    /// is doubled until two successive results agree to
    /// `abs_tol + rel_tol·max|result|`.
    pub rel_tol: f64,
    /// Absolute tolerance of the time integrator.
    pub abs_tol: f64,
    /// Relative change of the period-averaged covariance between successive
    /// periods at which time integration stops.
    pub convergence_tol: f64,
    pub max_periods: u64,
    /// Initial truncation order of the harmonic expansion.
    pub harmonics: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            method: SolveMethod::HarmonicBalance,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            convergence_tol: 1e-7,
            max_periods: 1_000_000,
            harmonics: 6,
        }
    }
}

impl SolverOptions {
    pub fn with_method(self, method: SolveMethod) -> Self {
        SolverOptions { method, ..self }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("convergence_tol", self.convergence_tol),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SolverError::InvalidOptions(format!(
                    "{name} = {value} must be positive"
                )));
            }
        }
        if self.harmonics < 1 {
            return Err(SolverError::InvalidOptions("harmonics must be >= 1".into()));
        }
        if self.max_periods < 2 {
            return Err(SolverError::InvalidOptions(
                "max_periods must be >= 2".into(),
            ));
        }
        Ok(())
    }
}

/// Periodic steady state and its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    /// Covariance averaged over one drive period.
    pub v_mean: CovarianceMatrix,
    /// Smallest `⟨ΔX_b²⟩` over one period.
    pub var_xb_min: f64,
    /// Largest `⟨ΔX_b²⟩` over one period.
    pub var_xb_max: f64,
    pub stable: bool,
    /// Periods integrated (time integration only).
    pub periods_used: u64,
    pub method: SolveMethod,
    /// Truncation order actually used (harmonic balance only).
    pub harmonics_used: usize,
    /// Method-specific residual: Lyapunov residual relative to `max|D|`,
    /// harmonic tail `max|V_N| / max|V_0|`, or the periodic defect
    /// `max|V(T) − V(0)| / max|V|` of time integration.
    pub residual: f64,
    /// Relative period-to-period changes of the averaged covariance over the
    /// last (up to ten) periods, oldest first.
    pub convergence_history: Vec<f64>,
    /// Largest Floquet multiplier modulus.
    pub max_multiplier: f64,
}

impl SteadyState {
    pub fn var_xb(&self) -> f64 {
        self.v_mean.var_xb()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("drift matrix is not Hurwitz; offending eigenvalues: {}", format_eigenvalues(.eigenvalues))]
    NotHurwitz { eigenvalues: Vec<Complex64> },
    #[error("Floquet-unstable: largest multiplier modulus {max_multiplier}")]
    Unstable { max_multiplier: f64 },
    #[error("no convergence after {periods} periods (last relative change {last_change:e})")]
    NonConvergence { periods: u64, last_change: f64 },
    #[error("harmonic truncation not converged at N = {harmonics} (tail ratio {tail_ratio:e})")]
    TruncationNotConverged { harmonics: usize, tail_ratio: f64 },
    #[error(
        "time step refinement not converged at {steps} steps per period (last change {change:e})"
    )]
    StepRefinement { steps: usize, change: f64 },
    #[error("singular linear system in {context}")]
    Singular { context: &'static str },
    #[error("residual {residual:e} exceeds bound {bound:e}")]
    ResidualTooLarge { residual: f64, bound: f64 },
    #[error("unphysical covariance: smallest symplectic eigenvalue {min_symplectic}")]
    Unphysical { min_symplectic: f64 },
    #[error("{what} violated by {defect:e}")]
    Inconsistent { what: &'static str, defect: f64 },
    #[error("{method} cannot solve the {variant:?} drift")]
    UnsupportedVariant {
        method: SolveMethod,
        variant: DriftVariant,
    },
}

impl SolverError {
    pub fn is_instability(&self) -> bool {
        matches!(
            self,
            SolverError::NotHurwitz { .. } | SolverError::Unstable { .. }
        )
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            SolverError::NonConvergence { .. }
                | SolverError::TruncationNotConverged { .. }
                | SolverError::StepRefinement { .. }
        )
    }
}

fn format_eigenvalues(eigenvalues: &[Complex64]) -> String {
    eigenvalues
        .iter()
        .map(|z| format!("{:.6e}{:+.6e}i", z.re, z.im))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Steady state of `params` with the method (and matching drift variant)
/// selected in `opts`.
pub fn steady_state(
    params: &SystemParams,
    opts: &SolverOptions,
) -> Result<SteadyState, SolverError> {
    opts.validate()?;
    let params = &relax_absent_ensembles(params);
    let spec = DriftSpec {
        params: *params,
        variant: opts.method.variant(),
    };
    let d = noise_matrix(params);
    match opts.method {
        SolveMethod::AlgebraicLyapunov => lyapunov::steady_state(&spec, &d),
        SolveMethod::TimeIntegration => {
            integrate_covariance(&spec, &d, &CovarianceMatrix::initial(params), opts)
        }
        SolveMethod::HarmonicBalance => harmonic_balance_steady(&spec, &d, opts),
    }
}

/// An ensemble with zero coupling and zero decay is a frozen mode that never
/// touches the rest of the system. Giving it unit decay makes the dynamics
/// Hurwitz without changing any other entry of the steady state; the ensemble
/// itself then sits in vacuum, which is the only state it could be prepared
/// in.
pub fn relax_absent_ensembles(params: &SystemParams) -> SystemParams {
    let mut p = *params;
    if p.g_a1 == 0.0 && p.gamma_1 == 0.0 {
        p.gamma_1 = 1.0;
    }
    if p.g_a2 == 0.0 && p.gamma_2 == 0.0 {
        p.gamma_2 = 1.0;
    }
    p
}

fn check_physical(v: &CovarianceMatrix) -> Result<(), SolverError> {
    if v.is_physical() {
        Ok(())
    } else {
        Err(SolverError::Unphysical {
            min_symplectic: v.min_symplectic_eigenvalue(),
        })
    }
}

/// Coarsest uniform step of the time integrator.
const INITIAL_STEP: f64 = 0.05 / crate::model::OMEGA_M;
