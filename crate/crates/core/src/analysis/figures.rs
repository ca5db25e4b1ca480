//! Preset curves for the drive-ratio and cavity-decay figures.

use super::optimize::COARSE_STEP;
use super::sweep::{sweep_kappa, sweep_ratio, SweepResult};
use super::AnalysisError;
use crate::model::SystemParams;
use crate::solver::SolverOptions;

/// Atomic decay rates of the three drive-ratio curves.
pub const FIG2_GAMMAS: [f64; 3] = [0.001, 0.005, 0.01];
/// `(G_A1, G_A2)` of the two cavity-decay curves.
pub const FIG3_COUPLINGS: [(f64, f64); 2] = [(0.0, 10.0), (10.0, 10.0)];

#[derive(Debug, Clone, PartialEq)]
pub struct FigureCurve {
    pub label: String,
    pub params: SystemParams,
    pub sweep: SweepResult,
}

/// `0, 0.02, …, 0.98`.
pub fn fig2_ratios() -> Vec<f64> {
    (0..50).map(|k| k as f64 * COARSE_STEP).collect()
}

/// 25 log-spaced values from 1 to 1000.
pub fn fig3_kappas() -> Vec<f64> {
    (0..25).map(|k| 10f64.powf(3.0 * k as f64 / 24.0)).collect()
}

/// One drive-ratio sweep per atomic decay rate in [`FIG2_GAMMAS`], all other
/// parameters taken from `base`.
pub fn fig2(
    base: &SystemParams,
    ratios: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<FigureCurve>, AnalysisError> {
    FIG2_GAMMAS
        .iter()
        .map(|&gamma| {
            let params = SystemParams {
                gamma_1: gamma,
                gamma_2: gamma,
                ..*base
            };
            Ok(FigureCurve {
                label: format!("gamma={gamma}"),
                params,
                sweep: sweep_ratio(&params, ratios, opts)?,
            })
        })
        .collect()
}

/// One optimised cavity-decay sweep per coupling pair in [`FIG3_COUPLINGS`].
pub fn fig3(
    base: &SystemParams,
    kappas: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<FigureCurve>, AnalysisError> {
    FIG3_COUPLINGS
        .iter()
        .map(|&(g_a1, g_a2)| {
            let params = SystemParams {
                g_a1,
                g_a2,
                ..*base
            };
            Ok(FigureCurve {
                label: format!("g_a1={g_a1};g_a2={g_a2}"),
                params,
                sweep: sweep_kappa(&params, kappas, opts, true)?,
            })
        })
        .collect()
}
