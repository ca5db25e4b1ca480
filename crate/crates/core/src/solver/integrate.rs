use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use super::packed::{index, lyapunov_operator, pack, unpack, PACKED};
use super::radau::{refine, uniform, StepMap, B};
use super::{
    check_physical, floquet_stability_with, CovarianceMatrix, SolveMethod, SolverError,
    SolverOptions, SteadyState, INITIAL_STEP,
};
use crate::dynamics::quadrature::X_B;
use crate::dynamics::{DriftSpec, DriftVariant, NoiseMatrix, PERIOD};

const HISTORY: usize = 10;
/// A change this small is rounding noise.
const NOISE_FLOOR: f64 = 64.0 * f64::EPSILON;

/// One period of the packed covariance dynamics as affine maps of the value
/// at the start of the period.
struct PeriodMaps {
    steps: usize,
    /// `y(T) = phi·y(0) + q`
    phi: DMatrix<f64>,
    q: DVector<f64>,
    /// `(1/T)∫₀ᵀ y dt = psi·y(0) + c`
    psi: DMatrix<f64>,
    c: DVector<f64>,
}

fn period_maps(
    spec: &DriftSpec,
    forcing: &DVector<f64>,
    steps: usize,
) -> Result<PeriodMaps, SolverError> {
    let mut phi = DMatrix::<f64>::identity(PACKED, PACKED);
    let mut q = DVector::<f64>::zeros(PACKED);
    let mut psi = DMatrix::<f64>::zeros(PACKED, PACKED);
    let mut c = DVector::<f64>::zeros(PACKED);
    step_through(spec, forcing, steps, |s| {
        for i in 0..3 {
            let w = s.h * B[i];
            psi += (&s.stage_trans[i] * &phi) * w;
            c += (&s.stage_trans[i] * &q + &s.stage_shift[i]) * w;
        }
        phi = &s.trans * &phi;
        q = &s.trans * &q + &s.shift;
    })?;
    Ok(PeriodMaps {
        steps,
        phi,
        q,
        psi: psi / PERIOD,
        c: c / PERIOD,
    })
}

fn step_through<F: FnMut(&StepMap)>(
    spec: &DriftSpec,
    forcing: &DVector<f64>,
    steps: usize,
    visit: F,
) -> Result<(), SolverError> {
    let generator = |t: f64| lyapunov_operator(&spec.matrix(t));
    uniform(
        &generator,
        Some(forcing),
        PERIOD,
        steps,
        spec.variant == DriftVariant::Rwa,
        visit,
    )
}

impl PeriodMaps {
    /// Period average of the periodic orbit of these maps, from the fixed
    /// point of `y ↦ phi·y + q`.
    fn orbit_average(&self) -> Result<DVector<f64>, SolverError> {
        let lhs = DMatrix::<f64>::identity(PACKED, PACKED) - &self.phi;
        let y = lhs.lu().solve(&self.q).ok_or(SolverError::Singular {
            context: "periodic orbit",
        })?;
        Ok(&self.psi * y + &self.c)
    }
}

/// Period maps at a step count where the periodic orbit they imply no longer
/// changes under refinement.
fn converged_maps(
    spec: &DriftSpec,
    d: &NoiseMatrix,
    opts: &SolverOptions,
) -> Result<PeriodMaps, SolverError> {
    let forcing = pack(&d.matrix());
    let build = |n: usize| -> Result<(PeriodMaps, DVector<f64>), SolverError> {
        let maps = period_maps(spec, &forcing, n)?;
        let avg = maps.orbit_average()?;
        Ok((maps, avg))
    };
    let close = |a: &(PeriodMaps, DVector<f64>), b: &(PeriodMaps, DVector<f64>)| {
        let change = (&a.1 - &b.1).amax();
        (change > opts.abs_tol + opts.rel_tol * b.1.amax()).then_some(change)
    };
    Ok(refine(PERIOD, INITIAL_STEP, build, close)?.0 .0)
}

/// Integrates the covariance dynamics from `v0`, one period at a time, until
/// the period-averaged covariance stops changing.
///
/// The one-period map is computed once with three-stage Radau IIA steps,
/// refined until the periodic orbit it implies is converged to the
/// integrator tolerances, and then applied repeatedly.
///
/// Iteration stops once the relative change between successive periods is
/// below `convergence_tol`, the last ten changes are non-increasing, and the
/// remaining distance of the period average from the periodic orbit is below
/// `convergence_tol` as well. That distance is `ψ·(I − φ)⁻¹·(y' − y)` for
/// successive period starts `y`, `y'`; a rate estimated from the changes
/// alone is unreliable when slowly rotating Floquet modes make the changes
/// dip without the error shrinking. A change at rounding level lifts the
/// monotonicity requirement. The variant of `spec` may be either; the
/// rotating-wave drift is then integrated as a static system.
pub fn integrate_covariance(
    spec: &DriftSpec,
    d: &NoiseMatrix,
    v0: &CovarianceMatrix,
    opts: &SolverOptions,
) -> Result<SteadyState, SolverError> {
    opts.validate()?;
    let floquet = floquet_stability_with(spec, opts)?;
    if !floquet.stable {
        return Err(SolverError::Unstable {
            max_multiplier: floquet.max_modulus,
        });
    }
    let maps = converged_maps(spec, d, opts)?;
    let resolvent = (DMatrix::<f64>::identity(PACKED, PACKED) - &maps.phi).lu();

    let mut y = pack(v0.matrix());
    let mut prev_avg: Option<DVector<f64>> = None;
    let mut history: VecDeque<f64> = VecDeque::with_capacity(HISTORY);
    let mut last_change = f64::INFINITY;
    for period in 1..=opts.max_periods {
        let avg = &maps.psi * &y + &maps.c;
        let next = &maps.phi * &y + &maps.q;
        if let Some(prev) = &prev_avg {
            let scale = avg.amax();
            let change = (&avg - prev).amax() / scale;
            last_change = change;
            if history.len() == HISTORY {
                history.pop_front();
            }
            history.push_back(change);
            if change < opts.convergence_tol && settled(&history) {
                let step = resolvent
                    .solve(&(&next - &y))
                    .ok_or(SolverError::Singular {
                        context: "periodic orbit",
                    })?;
                if (&maps.psi * step).amax() / scale < opts.convergence_tol {
                    return finish(spec, d, &maps, y, avg, period, history, floquet.max_modulus);
                }
            }
        }
        y = next;
        prev_avg = Some(avg);
    }
    Err(SolverError::NonConvergence {
        periods: opts.max_periods,
        last_change,
    })
}

/// Changes at rounding level, or a full, non-increasing history.
fn settled(history: &VecDeque<f64>) -> bool {
    let change = *history.back().expect("history is non-empty");
    change <= NOISE_FLOOR
        || (history.len() == HISTORY
            && history
                .iter()
                .zip(history.iter().skip(1))
                .all(|(a, b)| b <= a))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    spec: &DriftSpec,
    d: &NoiseMatrix,
    maps: &PeriodMaps,
    y_start: DVector<f64>,
    avg: DVector<f64>,
    periods: u64,
    history: VecDeque<f64>,
    max_multiplier: f64,
) -> Result<SteadyState, SolverError> {
    let v_mean = CovarianceMatrix::new(unpack(&avg));
    check_physical(&v_mean)?;

    let xb = index(X_B, X_B);
    let mut lo = v_mean.var_xb();
    let mut hi = lo;
    let mut y = y_start.clone();
    lo = lo.min(y[xb]);
    hi = hi.max(y[xb]);
    // the step maps are not kept, so the final period is stepped again
    step_through(spec, &pack(&d.matrix()), maps.steps, |s| {
        for i in 0..3 {
            let value = (s.stage_trans[i].row(xb) * &y)[0] + s.stage_shift[i][xb];
            lo = lo.min(value);
            hi = hi.max(value);
        }
        y = &s.trans * &y + &s.shift;
    })?;
    let residual = (&y - &y_start).amax() / y_start.amax();
    Ok(SteadyState {
        v_mean,
        var_xb_min: lo,
        var_xb_max: hi,
        stable: true,
        periods_used: periods,
        method: SolveMethod::TimeIntegration,
        harmonics_used: 0,
        residual,
        convergence_history: history.into_iter().collect(),
        max_multiplier,
    })
}
