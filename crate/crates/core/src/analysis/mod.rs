//! Squeezing metrics, parameter sweeps and drive-ratio optimisation.

mod figures;
mod optimize;
mod sweep;

use thiserror::Error;

use crate::model::InvalidParams;
use crate::solver::{CovarianceMatrix, SolverError, SteadyState};

pub use figures::{fig2, fig2_ratios, fig3, fig3_kappas, FigureCurve, FIG2_GAMMAS, FIG3_COUPLINGS};
pub use optimize::{optimize_ratio, RatioOptimum, COARSE_STEP, GOLDEN_TOLERANCE};
pub use sweep::{solve_point, sweep_kappa, sweep_ratio, PointStatus, SweepRecord, SweepResult};

/// Squeezing of the mechanical position quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingResult {
    /// From the period-averaged variance.
    pub s_db: f64,
    pub var_xb: f64,
    /// From the largest variance over one period.
    pub s_db_min: f64,
    /// From the smallest variance over one period.
    pub s_db_max: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("invalid covariance: var_xb = {var_xb} must be positive")]
    InvalidCovariance { var_xb: f64 },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("no Floquet-stable drive ratio found")]
    NoStablePoint,
    #[error(transparent)]
    Params(#[from] InvalidParams),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// `S = −10·log₁₀(2·var)`; zero at the zero-point level.
pub fn db_from_variance(var_xb: f64) -> Result<f64, AnalysisError> {
    if var_xb > 0.0 && var_xb.is_finite() {
        // + 0.0 turns the −0 of the zero-point level into 0
        Ok(-10.0 * (2.0 * var_xb).log10() + 0.0)
    } else {
        Err(AnalysisError::InvalidCovariance { var_xb })
    }
}

/// Squeezing of a single (static) covariance matrix.
pub fn squeezing_db(v: &CovarianceMatrix) -> Result<SqueezingResult, AnalysisError> {
    let var_xb = v.var_xb();
    let s_db = db_from_variance(var_xb)?;
    Ok(SqueezingResult {
        s_db,
        var_xb,
        s_db_min: s_db,
        s_db_max: s_db,
        stable: true,
    })
}

/// Squeezing of a periodic steady state, with the extrema over one period.
pub fn squeezing_of(ss: &SteadyState) -> Result<SqueezingResult, AnalysisError> {
    let mut r = squeezing_db(&ss.v_mean)?;
    r.s_db_min = db_from_variance(ss.var_xb_max)?.min(r.s_db);
    r.s_db_max = db_from_variance(ss.var_xb_min)?.max(r.s_db);
    r.stable = ss.stable;
    Ok(r)
}
