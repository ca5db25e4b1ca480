use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use super::{Drives, SystemParams, OMEGA_M};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Classical amplitudes of cavity, mechanics and the two ensembles, in the
/// frame rotating at the cavity frequency.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassicalState {
    pub cavity: Complex64,
    pub mechanics: Complex64,
    pub atoms_1: Complex64,
    pub atoms_2: Complex64,
}

impl ClassicalState {
    fn axpy(&self, h: f64, k: &ClassicalState) -> ClassicalState {
        ClassicalState {
            cavity: self.cavity + h * k.cavity,
            mechanics: self.mechanics + h * k.mechanics,
            atoms_1: self.atoms_1 + h * k.atoms_1,
            atoms_2: self.atoms_2 + h * k.atoms_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalOptions {
    /// Upper bound on the RK4 step. Defaults to half the inverse of a bound on
    /// the largest rate in the problem.
    pub max_step: Option<f64>,
    /// Stored samples per mechanical period `2π/ω_m`.
    pub samples_per_period: usize,
    /// `|α|` above which the run is aborted as classically unstable.
    pub divergence_bound: f64,
}

impl Default for ClassicalOptions {
    fn default() -> Self {
        ClassicalOptions {
            max_step: None,
            samples_per_period: 64,
            divergence_bound: 1e8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassicalError {
    #[error("integration time must be positive, got {0}")]
    InvalidDuration(f64),
    #[error("classical instability: |alpha| = {magnitude:e} exceeded bound at t = {t}")]
    Diverged { t: f64, magnitude: f64 },
}

/// Uniformly sampled classical trajectory starting from the empty state.
#[derive(Debug, Clone)]
pub struct ClassicalTrajectory {
    pub dt: f64,
    pub samples_per_period: usize,
    pub states: Vec<ClassicalState>,
}

impl ClassicalTrajectory {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.states.len()).map(|k| k as f64 * self.dt)
    }

    /// Fourier components of the cavity amplitude at the two drive tones,
    /// `(α'₊, α'₋)`, i.e. the coefficients of `e^{−iω_m t}` and `e^{+iω_m t}`,
    /// projected over the last `periods` whole mechanical periods.
    pub fn tone_amplitudes(&self, periods: usize) -> (Complex64, Complex64) {
        let n = periods * self.samples_per_period;
        let end = self.states.len() - 1;
        assert!(
            n > 0 && n <= end,
            "trajectory shorter than requested window"
        );
        let mut plus = Complex64::new(0.0, 0.0);
        let mut minus = Complex64::new(0.0, 0.0);
        for k in end - n..end {
            let phase = Complex64::from_polar(1.0, OMEGA_M * k as f64 * self.dt);
            let a = self.states[k].cavity;
            plus += a * phase;
            minus += a * phase.conj();
        }
        (plus / n as f64, minus / n as f64)
    }
}

/// Integrates the nonlinear classical equations
///
/// ```text
/// α̇   = −(κ/2) α − i g α (β + β*) − i G_A1 α₁ − i G_A2 α₂ − i (Ω₊ e^{−iω_m t} + Ω₋ e^{iω_m t})
/// β̇   = −(i ω_m + γ_m/2) β − i g |α|²
/// α̇_j = −(i Δ_j + γ_j/2) α_j − i G_Aj α
/// ```
///
/// with RK4 from the empty state up to (at least) `t_final`. The step divides a
/// mechanical period exactly so that [`ClassicalTrajectory::tone_amplitudes`]
/// projects onto exact frequency bins.
pub fn classical_mean_field_ode(
    p: &SystemParams,
    g: f64,
    drives: Drives,
    t_final: f64,
    opts: &ClassicalOptions,
) -> Result<ClassicalTrajectory, ClassicalError> {
    if !(t_final > 0.0) {
        return Err(ClassicalError::InvalidDuration(t_final));
    }
    let rate_bound = p.kappa / 2.0
        + p.gamma_m / 2.0
        + p.gamma_1.max(p.gamma_2) / 2.0
        + p.delta_1.abs()
        + p.delta_2.abs()
        + p.g_a1
        + p.g_a2
        + OMEGA_M;
    let max_step = opts.max_step.unwrap_or(0.5 / rate_bound);
    let period = TAU / OMEGA_M;
    let samples = opts.samples_per_period.max(4);
    let substeps = (period / (samples as f64 * max_step)).ceil().max(1.0) as usize;
    let h = period / (samples * substeps) as f64;
    let dt = h * substeps as f64;
    let n_samples = (t_final / dt).ceil() as usize;

    let rhs = |t: f64, s: &ClassicalState| -> ClassicalState {
        let drive = drives.plus * Complex64::from_polar(1.0, -OMEGA_M * t)
            + drives.minus * Complex64::from_polar(1.0, OMEGA_M * t);
        let x = s.mechanics + s.mechanics.conj();
        ClassicalState {
            cavity: -0.5 * p.kappa * s.cavity
                - I * g * s.cavity * x
                - I * p.g_a1 * s.atoms_1
                - I * p.g_a2 * s.atoms_2
                - I * drive,
            mechanics: -(I * OMEGA_M + 0.5 * p.gamma_m) * s.mechanics - I * g * s.cavity.norm_sqr(),
            atoms_1: -(I * p.delta_1 + 0.5 * p.gamma_1) * s.atoms_1 - I * p.g_a1 * s.cavity,
            atoms_2: -(I * p.delta_2 + 0.5 * p.gamma_2) * s.atoms_2 - I * p.g_a2 * s.cavity,
        }
    };

    let mut states = Vec::with_capacity(n_samples + 1);
    let mut s = ClassicalState::default();
    states.push(s);
    let mut t = 0.0;
    for k in 0..n_samples {
        for j in 0..substeps {
            let k1 = rhs(t, &s);
            let k2 = rhs(t + 0.5 * h, &s.axpy(0.5 * h, &k1));
            let k3 = rhs(t + 0.5 * h, &s.axpy(0.5 * h, &k2));
            let k4 = rhs(t + h, &s.axpy(h, &k3));
            s = ClassicalState {
                cavity: s.cavity
                    + h / 6.0 * (k1.cavity + 2.0 * k2.cavity + 2.0 * k3.cavity + k4.cavity),
                mechanics: s.mechanics
                    + h / 6.0
                        * (k1.mechanics + 2.0 * k2.mechanics + 2.0 * k3.mechanics + k4.mechanics),
                atoms_1: s.atoms_1
                    + h / 6.0 * (k1.atoms_1 + 2.0 * k2.atoms_1 + 2.0 * k3.atoms_1 + k4.atoms_1),
                atoms_2: s.atoms_2
                    + h / 6.0 * (k1.atoms_2 + 2.0 * k2.atoms_2 + 2.0 * k3.atoms_2 + k4.atoms_2),
            };
            // keep t an exact multiple of h
            t = (k * substeps + j + 1) as f64 * h;
        }
        let magnitude = s.cavity.norm();
        if !(magnitude <= opts.divergence_bound) {
            return Err(ClassicalError::Diverged { t, magnitude });
        }
        states.push(s);
    }
    Ok(ClassicalTrajectory {
        dt,
        samples_per_period: samples,
        states,
    })
}
