use rayon::prelude::*;

use super::sweep::{solve_point, SweepRecord};
use super::{AnalysisError, SqueezingResult};
use crate::model::SystemParams;
use crate::solver::SolverOptions;

/// Spacing of the coarse ratio grid `0, 0.02, …, 0.98`.
pub const COARSE_STEP: f64 = 0.02;
const COARSE_POINTS: usize = 50;
/// Width of the final golden-section bracket in ratio.
pub const GOLDEN_TOLERANCE: f64 = 1e-4;
/// Spacing of the fallback grid used when the coarse grid is not unimodal.
const DENSE_STEP: f64 = 1e-3;
/// Upper end of the searched ratios; `G₊ = G₋` itself is excluded.
const RATIO_CAP: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct RatioOptimum {
    pub ratio: f64,
    pub result: SqueezingResult,
    /// Record of the solve at `ratio`.
    pub solve: SweepRecord,
    /// Whether the stable coarse-grid values had a single local maximum.
    pub unimodal: bool,
    pub evaluations: usize,
}

impl RatioOptimum {
    /// The optimum's record, relabelled with `parameter`.
    pub fn record(&self, parameter: f64) -> SweepRecord {
        SweepRecord {
            parameter,
            ..self.solve.clone()
        }
    }
}

struct Objective<'a> {
    base: &'a SystemParams,
    opts: &'a SolverOptions,
}

impl Objective<'_> {
    fn eval(&self, ratio: f64) -> (f64, SweepRecord) {
        let (record, _) = solve_point(&self.base.with_ratio(ratio), ratio, self.opts);
        let value = record.squeezing.map_or(f64::NEG_INFINITY, |s| s.s_db);
        (value, record)
    }
}

/// Number of interior local maxima plus maxima at the ends, counted on the
/// values that are finite. A single one means the grid looks unimodal.
fn local_maxima(values: &[f64]) -> usize {
    let finite: Vec<f64> = values.iter().cloned().filter(|v| v.is_finite()).collect();
    if finite.len() < 2 {
        return finite.len();
    }
    let mut count = 0;
    let mut rising = true;
    for w in finite.windows(2) {
        if w[1] < w[0] {
            if rising {
                count += 1;
            }
            rising = false;
        } else if w[1] > w[0] {
            rising = true;
        }
    }
    if rising {
        count += 1;
    }
    count
}

/// Maximises `S_dB` over the drive ratio `G₊/G₋ ∈ [0, 1)`.
///
/// A coarse grid of step [`COARSE_STEP`] locates the best stable point. When
/// the stable grid values have a single maximum, golden-section search
/// refines it inside the neighbouring grid cells to [`GOLDEN_TOLERANCE`];
/// otherwise a dense grid of step `10⁻³` is searched instead. Unstable ratios
/// count as `−∞`. With `G₋ = 0` the objective is flat and ratio 0 is returned.
pub fn optimize_ratio(
    base: &SystemParams,
    opts: &SolverOptions,
) -> Result<RatioOptimum, AnalysisError> {
    let f = Objective { base, opts };
    if base.g_minus == 0.0 {
        let (value, record) = f.eval(0.0);
        return finish(0.0, value, record, true, 1);
    }

    let grid: Vec<f64> = (0..COARSE_POINTS).map(|k| k as f64 * COARSE_STEP).collect();
    let coarse: Vec<(f64, SweepRecord)> = grid.par_iter().map(|&r| f.eval(r)).collect();
    let mut evaluations = coarse.len();
    let values: Vec<f64> = coarse.iter().map(|c| c.0).collect();
    let Some(k) = argmax(&values) else {
        return Err(AnalysisError::NoStablePoint);
    };
    let unimodal = local_maxima(&values) == 1;

    let (mut best_ratio, mut best_value, mut best_record) =
        (grid[k], values[k], coarse[k].1.clone());
    let candidates: Vec<(f64, f64, SweepRecord)> = if unimodal {
        let lo = if k == 0 { 0.0 } else { grid[k - 1] };
        let hi = if k + 1 < grid.len() {
            grid[k + 1]
        } else {
            RATIO_CAP
        };
        let (r, v, rec, n) = golden_section(&f, lo, hi);
        evaluations += n;
        vec![(r, v, rec)]
    } else {
        let n = (RATIO_CAP / DENSE_STEP) as usize;
        let dense: Vec<f64> = (0..=n).map(|j| j as f64 * DENSE_STEP).collect();
        evaluations += dense.len();
        dense
            .par_iter()
            .map(|&r| {
                let (v, rec) = f.eval(r);
                (r, v, rec)
            })
            .collect()
    };
    for (r, v, rec) in candidates {
        if v > best_value {
            best_ratio = r;
            best_value = v;
            best_record = rec;
        }
    }
    finish(best_ratio, best_value, best_record, unimodal, evaluations)
}

fn finish(
    ratio: f64,
    value: f64,
    record: SweepRecord,
    unimodal: bool,
    evaluations: usize,
) -> Result<RatioOptimum, AnalysisError> {
    match record.squeezing {
        Some(result) if value.is_finite() => Ok(RatioOptimum {
            ratio,
            result,
            solve: record,
            unimodal,
            evaluations,
        }),
        _ => Err(AnalysisError::NoStablePoint),
    }
}

/// Index of the largest finite value, first on ties.
fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_finite() && best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

/// Golden-section search for the maximum on `[lo, hi]`. Returns the best
/// point evaluated and the number of evaluations.
fn golden_section(f: &Objective<'_>, mut lo: f64, mut hi: f64) -> (f64, f64, SweepRecord, usize) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut e1 = f.eval(x1);
    let mut e2 = f.eval(x2);
    let mut n = 2;
    let mut best = if e1.0 >= e2.0 {
        (x1, e1.clone())
    } else {
        (x2, e2.clone())
    };
    while hi - lo > GOLDEN_TOLERANCE {
        if e1.0 >= e2.0 {
            hi = x2;
            x2 = x1;
            e2 = e1;
            x1 = hi - inv_phi * (hi - lo);
            e1 = f.eval(x1);
            n += 1;
            if e1.0 > best.1 .0 {
                best = (x1, e1.clone());
            }
        } else {
            lo = x1;
            x1 = x2;
            e1 = e2;
            x2 = lo + inv_phi * (hi - lo);
            e2 = f.eval(x2);
            n += 1;
            if e2.0 > best.1 .0 {
                best = (x2, e2.clone());
            }
        }
    }
    let (x, (v, rec)) = best;
    (x, v, rec, n)
}
