use rayon::prelude::*;

use super::{squeezing_of, AnalysisError, SqueezingResult};
use crate::model::{validate_params, SystemParams};
use crate::solver::{steady_state, SolveMethod, SolverOptions, SteadyState};

/// Outcome class of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub enum PointStatus {
    Ok,
    /// No stable periodic steady state (Floquet or Hurwitz test failed).
    Unstable,
    /// Parameters rejected before solving.
    Invalid(String),
    /// Solver or metric failure other than instability.
    Failed(String),
}

impl PointStatus {
    pub fn label(&self) -> &'static str {
        match self {
            PointStatus::Ok => "ok",
            PointStatus::Unstable => "unstable",
            PointStatus::Invalid(_) => "invalid",
            PointStatus::Failed(_) => "failed",
        }
    }

    pub fn message(&self) -> Option<&str> {
        match self {
            PointStatus::Invalid(m) | PointStatus::Failed(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    /// Value of the swept parameter.
    pub parameter: f64,
    /// Drive ratio `G₊/G₋` used at this point.
    pub ratio: f64,
    /// Present exactly when `status` is [`PointStatus::Ok`].
    pub squeezing: Option<SqueezingResult>,
    pub stable: bool,
    pub method: SolveMethod,
    pub periods_used: u64,
    pub harmonics_used: usize,
    pub status: PointStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Name of the swept parameter.
    pub parameter: String,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    /// Record with the largest `s_db`, first on ties.
    pub fn best(&self) -> Option<&SweepRecord> {
        self.records.iter().filter(|r| r.squeezing.is_some()).fold(
            None,
            |best: Option<&SweepRecord>, r| match best {
                Some(b) if b.squeezing.unwrap().s_db >= r.squeezing.unwrap().s_db => Some(b),
                _ => Some(r),
            },
        )
    }

    /// `s_db` of every record, `None` where the solve did not succeed.
    pub fn s_db(&self) -> Vec<Option<f64>> {
        self.records
            .iter()
            .map(|r| r.squeezing.map(|s| s.s_db))
            .collect()
    }
}

/// Validates and solves a single parameter point.
///
/// Returns the steady state alongside the record so callers can inspect the
/// covariance; failures are folded into the record's status.
pub fn solve_point(
    p: &SystemParams,
    parameter: f64,
    opts: &SolverOptions,
) -> (SweepRecord, Option<SteadyState>) {
    let mut record = SweepRecord {
        parameter,
        ratio: p.ratio(),
        squeezing: None,
        stable: false,
        method: opts.method,
        periods_used: 0,
        harmonics_used: 0,
        status: PointStatus::Ok,
    };
    if let Err(e) = validate_params(*p) {
        record.status = PointStatus::Invalid(e.to_string());
        return (record, None);
    }
    match steady_state(p, opts) {
        Ok(ss) => {
            record.stable = ss.stable;
            record.periods_used = ss.periods_used;
            record.harmonics_used = ss.harmonics_used;
            match squeezing_of(&ss) {
                Ok(s) => record.squeezing = Some(s),
                Err(e) => record.status = PointStatus::Failed(e.to_string()),
            }
            (record, Some(ss))
        }
        Err(e) if e.is_instability() => {
            record.status = PointStatus::Unstable;
            (record, None)
        }
        Err(e) => {
            // a converged-but-unphysical or non-converged solve is still
            // stable in the Floquet sense, but carries no usable result
            record.status = PointStatus::Failed(e.to_string());
            (record, None)
        }
    }
}

fn check_increasing(name: &str, values: &[f64]) -> Result<(), AnalysisError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::InvalidSweep(format!(
            "{name} values must be finite"
        )));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::InvalidSweep(format!(
            "{name} values must be strictly increasing"
        )));
    }
    Ok(())
}

/// Solves the full model at each drive ratio `G₊/G₋` of `ratios`.
///
/// Points are solved in parallel and returned in input order. Unstable or
/// failed points are kept as records without a squeezing value.
pub fn sweep_ratio(
    base: &SystemParams,
    ratios: &[f64],
    opts: &SolverOptions,
) -> Result<SweepResult, AnalysisError> {
    check_increasing("ratio", ratios)?;
    if ratios.iter().any(|&r| !(0.0..1.0).contains(&r)) {
        return Err(AnalysisError::InvalidSweep(
            "ratios must lie in [0, 1)".into(),
        ));
    }
    let records = ratios
        .par_iter()
        .map(|&r| solve_point(&base.with_ratio(r), r, opts).0)
        .collect();
    Ok(SweepResult {
        parameter: "ratio".into(),
        records,
    })
}

/// Solves at each cavity decay rate of `kappas`, either at the ratio of
/// `base` or, with `optimize`, at the drive ratio maximising the squeezing.
pub fn sweep_kappa(
    base: &SystemParams,
    kappas: &[f64],
    opts: &SolverOptions,
    optimize: bool,
) -> Result<SweepResult, AnalysisError> {
    check_increasing("kappa", kappas)?;
    if kappas.iter().any(|&k| k <= 0.0) {
        return Err(AnalysisError::InvalidSweep(
            "kappa values must be positive".into(),
        ));
    }
    let records = kappas
        .par_iter()
        .map(|&kappa| {
            let p = SystemParams { kappa, ..*base };
            if !optimize {
                return solve_point(&p, kappa, opts).0;
            }
            match super::optimize_ratio(&p, opts) {
                Ok(best) => best.record(kappa),
                Err(AnalysisError::NoStablePoint) => SweepRecord {
                    parameter: kappa,
                    ratio: 0.0,
                    squeezing: None,
                    stable: false,
                    method: opts.method,
                    periods_used: 0,
                    harmonics_used: 0,
                    status: PointStatus::Unstable,
                },
                Err(e) => SweepRecord {
                    parameter: kappa,
                    ratio: 0.0,
                    squeezing: None,
                    stable: false,
                    method: opts.method,
                    periods_used: 0,
                    harmonics_used: 0,
                    status: PointStatus::Failed(e.to_string()),
                },
            }
        })
        .collect();
    Ok(SweepResult {
        parameter: "kappa".into(),
        records,
    })
}
