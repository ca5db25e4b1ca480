//! Three-stage Radau IIA collocation (order 5, L-stable) for linear systems
//! `y' = L(t) y + f` with constant forcing `f`.
//!
//! Each step is an affine map of the initial value, so the integrator produces
//! step maps rather than trajectories; composing them gives period maps.

use nalgebra::{DMatrix, DVector};

use super::SolverError;

const SQRT6: f64 = 2.449_489_742_783_178;

const C: [f64; 3] = [(4.0 - SQRT6) / 10.0, (4.0 + SQRT6) / 10.0, 1.0];

const A: [[f64; 3]; 3] = [
    [
        (88.0 - 7.0 * SQRT6) / 360.0,
        (296.0 - 169.0 * SQRT6) / 1800.0,
        (-2.0 + 3.0 * SQRT6) / 225.0,
    ],
    [
        (296.0 + 169.0 * SQRT6) / 1800.0,
        (88.0 + 7.0 * SQRT6) / 360.0,
        (-2.0 - 3.0 * SQRT6) / 225.0,
    ],
    [(16.0 - SQRT6) / 36.0, (16.0 + SQRT6) / 36.0, 1.0 / 9.0],
];

/// Quadrature weights; the method is stiffly accurate so they equal the last
/// row of `A`.
pub(crate) const B: [f64; 3] = A[2];

/// Affine map of one step: `y(t + h) = trans·y(t) + shift`, plus the maps of
/// the stage values at `t + c_i h`.
#[derive(Debug, Clone)]
pub(crate) struct StepMap {
    pub h: f64,
    pub trans: DMatrix<f64>,
    pub shift: DVector<f64>,
    pub stage_trans: [DMatrix<f64>; 3],
    pub stage_shift: [DVector<f64>; 3],
}

/// One Radau IIA step from `t` with step `h`.
pub(crate) fn step<G>(
    generator: &G,
    forcing: Option<&DVector<f64>>,
    t: f64,
    h: f64,
) -> Result<StepMap, SolverError>
where
    G: Fn(f64) -> DMatrix<f64>,
{
    let stages: [DMatrix<f64>; 3] = C.map(|c| generator(t + c * h));
    let m = stages[0].nrows();
    let mut k = DMatrix::<f64>::identity(3 * m, 3 * m);
    for i in 0..3 {
        for j in 0..3 {
            let mut block = k.view_mut((i * m, j * m), (m, m));
            block -= &stages[j] * (h * A[i][j]);
        }
    }
    let mut rhs = DMatrix::<f64>::zeros(3 * m, m + 1);
    for i in 0..3 {
        rhs.view_mut((i * m, 0), (m, m)).fill_with_identity();
        if let Some(f) = forcing {
            // Σ_j a_ij = c_i for a collocation method
            rhs.view_mut((i * m, m), (m, 1))
                .copy_from(&(f * (h * C[i])));
        }
    }
    let lu = k.lu();
    let sol = lu.solve(&rhs).ok_or(SolverError::Singular {
        context: "Radau stage system",
    })?;
    let stage_trans: [DMatrix<f64>; 3] =
        [0, 1, 2].map(|i| sol.view((i * m, 0), (m, m)).into_owned());
    let stage_shift: [DVector<f64>; 3] =
        [0, 1, 2].map(|i| sol.view((i * m, m), (m, 1)).column(0).into_owned());
    Ok(StepMap {
        h,
        trans: stage_trans[2].clone(),
        shift: stage_shift[2].clone(),
        stage_trans,
        stage_shift,
    })
}

/// Visits the maps of `steps` equal steps covering `[0, span]` in order,
/// without keeping them. A `constant` generator is stepped once and the map
/// reused.
pub(crate) fn uniform<G, F>(
    generator: &G,
    forcing: Option<&DVector<f64>>,
    span: f64,
    steps: usize,
    constant: bool,
    mut visit: F,
) -> Result<(), SolverError>
where
    G: Fn(f64) -> DMatrix<f64>,
    F: FnMut(&StepMap),
{
    let h = span / steps as f64;
    if constant {
        let m = step(generator, forcing, 0.0, h)?;
        (0..steps).for_each(|_| visit(&m));
    } else {
        for k in 0..steps {
            visit(&step(generator, forcing, k as f64 * h, h)?);
        }
    }
    Ok(())
}

/// Largest number of steps per period tried by [`refine`].
pub const MAX_STEPS: usize = 1 << 17;

/// Global step refinement.
///
/// Starts from `ceil(span / initial_step)` uniform steps and doubles the
/// count until two successive results are `close`. Local step-doubling error
/// control is unsuitable here: on strongly damped modes an L-stable step
/// commits an O(1) relative error that later steps damp away, so a local
/// controller would force steps of order `1/κ` without improving the result.
pub(crate) fn refine<T, B, C>(
    span: f64,
    initial_step: f64,
    mut build: B,
    close: C,
) -> Result<(T, usize), SolverError>
where
    B: FnMut(usize) -> Result<T, SolverError>,
    C: Fn(&T, &T) -> Option<f64>,
{
    let mut n = ((span / initial_step).ceil() as usize).max(1);
    let mut prev = build(n)?;
    loop {
        n *= 2;
        if n > MAX_STEPS {
            return Err(SolverError::StepRefinement {
                steps: n / 2,
                change: f64::NAN,
            });
        }
        let next = build(n)?;
        match close(&prev, &next) {
            None => return Ok((next, n)),
            Some(change) if n * 2 > MAX_STEPS => {
                return Err(SolverError::StepRefinement { steps: n, change });
            }
            Some(_) => prev = next,
        }
    }
}
