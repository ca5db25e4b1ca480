use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use super::{SystemParams, OMEGA_M};

/// Smallest accepted magnitude of a mean-field denominator, in units of `ω_m`.
pub const DEFAULT_SINGULARITY_FLOOR: f64 = 1e-12;

/// Relative phase between the two tone amplitudes above which
/// [`EffectiveCouplings::phase_warning`] is raised, in radians.
pub const PHASE_WARNING_THRESHOLD: f64 = 1e-3;

/// Drive amplitudes `Ω₊` (blue tone, `ω_c + ω_m`) and `Ω₋` (red tone, `ω_c − ω_m`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drives {
    pub plus: f64,
    pub minus: f64,
}

/// Classical two-tone cavity amplitudes and the atomic self-energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanField {
    pub alpha_plus: Complex64,
    pub alpha_minus: Complex64,
    /// `xi[j][s]` is the self-energy of ensemble `j + 1` at tone `s`
    /// (`s = 0` for the blue tone, `s = 1` for the red tone).
    pub xi: [[Complex64; 2]; 2],
}

impl MeanField {
    pub fn xi_plus(&self, ensemble: usize) -> Complex64 {
        self.xi[ensemble][0]
    }

    pub fn xi_minus(&self, ensemble: usize) -> Complex64 {
        self.xi[ensemble][1]
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeanFieldError {
    #[error("near-singular {what} denominator: |d| = {magnitude:e} below floor {floor:e}")]
    NearSingular {
        what: &'static str,
        magnitude: f64,
        floor: f64,
    },
}

/// [`mean_field_with_floor`] with the default singularity floor.
pub fn mean_field(drives: Drives, p: &SystemParams) -> Result<MeanField, MeanFieldError> {
    mean_field_with_floor(drives, p, DEFAULT_SINGULARITY_FLOOR)
}

/// Steady two-tone response of the driven cavity dressed by both ensembles.
///
/// In the frame rotating at `ω_c` each tone `s = ±` oscillates at `s·ω_m`, and
///
/// ```text
/// ξ_{j,s} = G_Aj² / (s·ω_m − Δ_j + i γ_j/2)
/// α'_s    = Ω_s   / (s·ω_m + i κ/2 − ξ_{1,s} − ξ_{2,s})
/// ```
pub fn mean_field_with_floor(
    drives: Drives,
    p: &SystemParams,
    floor: f64,
) -> Result<MeanField, MeanFieldError> {
    let ensembles = [
        (p.g_a1, p.delta_1, p.gamma_1),
        (p.g_a2, p.delta_2, p.gamma_2),
    ];
    let mut xi = [[Complex64::new(0.0, 0.0); 2]; 2];
    let mut alpha = [Complex64::new(0.0, 0.0); 2];
    for (s, (sign, drive)) in [(1.0, drives.plus), (-1.0, drives.minus)]
        .into_iter()
        .enumerate()
    {
        let mut denom = Complex64::new(sign * OMEGA_M, p.kappa / 2.0);
        for (j, &(g_a, delta, gamma)) in ensembles.iter().enumerate() {
            if g_a == 0.0 {
                continue;
            }
            let d = self_energy_denominator(sign, delta, gamma);
            check_floor("atomic self-energy", d, floor)?;
            xi[j][s] = g_a * g_a / d;
            denom -= xi[j][s];
        }
        check_floor("cavity amplitude", denom, floor)?;
        alpha[s] = drive / denom;
    }
    Ok(MeanField {
        alpha_plus: alpha[0],
        alpha_minus: alpha[1],
        xi,
    })
}

/// `ξ = G_A² / (s·ω_m − Δ + i γ/2)` for tone sign `s = ±1`, without a
/// singularity check.
pub fn self_energy(g_a: f64, delta: f64, gamma: f64, sign: f64) -> Complex64 {
    g_a * g_a / self_energy_denominator(sign, delta, gamma)
}

fn self_energy_denominator(sign: f64, delta: f64, gamma: f64) -> Complex64 {
    Complex64::new(sign * OMEGA_M - delta, gamma / 2.0)
}

fn check_floor(what: &'static str, d: Complex64, floor: f64) -> Result<(), MeanFieldError> {
    let magnitude = d.norm();
    if magnitude < floor {
        Err(MeanFieldError::NearSingular {
            what,
            magnitude,
            floor,
        })
    } else {
        Ok(())
    }
}

/// Real effective couplings `G_± = |g α'_±|` obtained by stripping the phases
/// of the tone amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCouplings {
    pub g_plus: f64,
    pub g_minus: f64,
    /// `arg α'₊ − arg α'₋`, wrapped to `(−π, π]`.
    pub relative_phase: f64,
    /// Set when the discarded relative phase exceeds [`PHASE_WARNING_THRESHOLD`].
    pub phase_warning: bool,
}

impl EffectiveCouplings {
    /// Copies the couplings into a parameter set.
    pub fn apply(&self, p: SystemParams) -> SystemParams {
        SystemParams {
            g_plus: self.g_plus,
            g_minus: self.g_minus,
            ..p
        }
    }
}

pub fn effective_couplings(g: f64, mf: &MeanField) -> EffectiveCouplings {
    let plus = g * mf.alpha_plus;
    let minus = g * mf.alpha_minus;
    let relative_phase = if plus.norm() == 0.0 || minus.norm() == 0.0 {
        0.0
    } else {
        wrap_phase(plus.arg() - minus.arg())
    };
    EffectiveCouplings {
        g_plus: plus.norm(),
        g_minus: minus.norm(),
        relative_phase,
        phase_warning: relative_phase.abs() > PHASE_WARNING_THRESHOLD,
    }
}

fn wrap_phase(phi: f64) -> f64 {
    let mut x = phi % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}
