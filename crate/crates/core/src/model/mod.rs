//! Physical parameters of the hybrid system, the classical mean field and the
//! Bogoliubov-mode diagnostics.

mod classical;
mod mean_field;

use std::fmt;

use thiserror::Error;

pub use classical::{
    classical_mean_field_ode, ClassicalError, ClassicalOptions, ClassicalState, ClassicalTrajectory,
};
pub use mean_field::{
    effective_couplings, mean_field, mean_field_with_floor, self_energy, Drives,
    EffectiveCouplings, MeanField, MeanFieldError, DEFAULT_SINGULARITY_FLOOR,
    PHASE_WARNING_THRESHOLD,
};

/// Mechanical frequency. Every rate in [`SystemParams`] is measured in this unit.
pub const OMEGA_M: f64 = 1.0;

/// Rates and couplings of the linearised model, in units of `ω_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Cavity decay rate κ.
    pub kappa: f64,
    /// Mechanical decay rate γ_m.
    pub gamma_m: f64,
    /// Decay rate of atomic ensemble 1.
    pub gamma_1: f64,
    /// Decay rate of atomic ensemble 2.
    pub gamma_2: f64,
    /// Collective coupling of ensemble 1 to the cavity.
    pub g_a1: f64,
    /// Collective coupling of ensemble 2 to the cavity.
    pub g_a2: f64,
    /// Detuning `ω_1 − ω_c` of ensemble 1.
    pub delta_1: f64,
    /// Detuning `ω_2 − ω_c` of ensemble 2.
    pub delta_2: f64,
    /// Effective optomechanical coupling from the red-detuned tone.
    pub g_minus: f64,
    /// Effective optomechanical coupling from the blue-detuned tone.
    pub g_plus: f64,
    /// Mean thermal phonon number of the mechanical bath.
    pub n_th: f64,
}

impl SystemParams {
    /// Parameter set of the drive-ratio figure: κ = 1000, γ_m = 1e-5,
    /// G_A1 = G_A2 = 10, Δ₁ = 2, Δ₂ = −2, G₋ = 1, n_th = 0, with both atomic
    /// decay rates set to `gamma_atoms` and no blue-detuned drive.
    pub fn hursb_two_ensembles(gamma_atoms: f64) -> Self {
        SystemParams {
            kappa: 1000.0,
            gamma_m: 1e-5,
            gamma_1: gamma_atoms,
            gamma_2: gamma_atoms,
            g_a1: 10.0,
            g_a2: 10.0,
            delta_1: 2.0,
            delta_2: -2.0,
            g_minus: 1.0,
            g_plus: 0.0,
            n_th: 0.0,
        }
    }

    /// Cavity and mechanics with no couplings at all.
    pub fn decoupled(kappa: f64, gamma_m: f64, n_th: f64) -> Self {
        SystemParams {
            kappa,
            gamma_m,
            gamma_1: 0.0,
            gamma_2: 0.0,
            g_a1: 0.0,
            g_a2: 0.0,
            delta_1: 0.0,
            delta_2: 0.0,
            g_minus: 0.0,
            g_plus: 0.0,
            n_th,
        }
    }

    /// Sets `g_plus = ratio · g_minus`.
    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.g_plus = ratio * self.g_minus;
        self
    }

    /// Ratio `G₊/G₋`, zero when the red tone is off.
    pub fn ratio(&self) -> f64 {
        if self.g_minus == 0.0 {
            0.0
        } else {
            self.g_plus / self.g_minus
        }
    }

    /// Name/value pairs of every field, in declaration order.
    pub fn fields(&self) -> [(&'static str, f64); 11] {
        [
            ("kappa", self.kappa),
            ("gamma_m", self.gamma_m),
            ("gamma_1", self.gamma_1),
            ("gamma_2", self.gamma_2),
            ("g_a1", self.g_a1),
            ("g_a2", self.g_a2),
            ("delta_1", self.delta_1),
            ("delta_2", self.delta_2),
            ("g_minus", self.g_minus),
            ("g_plus", self.g_plus),
            ("n_th", self.n_th),
        ]
    }
}

/// A single violated parameter invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotFinite { field: &'static str },
    Negative { field: &'static str, value: f64 },
    NonPositiveKappa { value: f64 },
    NegativeThermalOccupation { value: f64 },
    BogoliubovUnstable { g_plus: f64, g_minus: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotFinite { field } => write!(f, "{field} must be finite"),
            Violation::Negative { field, value } => write!(f, "{field} = {value} must be >= 0"),
            Violation::NonPositiveKappa { value } => write!(f, "kappa = {value} must be > 0"),
            Violation::NegativeThermalOccupation { value } => {
                write!(
                    f,
                    "negative thermal occupation: n_th = {value} must be >= 0"
                )
            }
            Violation::BogoliubovUnstable { g_plus, g_minus } => write!(
                f,
                "Bogoliubov-unstable configuration: g_plus = {g_plus} must be < g_minus = {g_minus}"
            ),
        }
    }
}

/// Every invariant that [`validate_params`] found violated.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid system parameters: {}", join(.violations))]
pub struct InvalidParams {
    pub violations: Vec<Violation>,
}

impl InvalidParams {
    pub fn is_bogoliubov_unstable(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::BogoliubovUnstable { .. }))
    }
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Checks the parameter invariants and returns the parameters unchanged.
///
/// `g_plus ≥ g_minus` is rejected unless both couplings vanish: the fully
/// decoupled mechanics has a well-defined thermal steady state.
pub fn validate_params(p: SystemParams) -> Result<SystemParams, InvalidParams> {
    let mut violations = Vec::new();
    for (field, value) in p.fields() {
        if !value.is_finite() {
            violations.push(Violation::NotFinite { field });
        }
    }
    if !violations.is_empty() {
        return Err(InvalidParams { violations });
    }
    if p.kappa <= 0.0 {
        violations.push(Violation::NonPositiveKappa { value: p.kappa });
    }
    for (field, value) in [
        ("gamma_m", p.gamma_m),
        ("gamma_1", p.gamma_1),
        ("gamma_2", p.gamma_2),
        ("g_a1", p.g_a1),
        ("g_a2", p.g_a2),
        ("g_minus", p.g_minus),
        ("g_plus", p.g_plus),
    ] {
        if value < 0.0 {
            violations.push(Violation::Negative { field, value });
        }
    }
    if p.n_th < 0.0 {
        violations.push(Violation::NegativeThermalOccupation { value: p.n_th });
    }
    if p.g_plus > 0.0 && p.g_plus >= p.g_minus {
        violations.push(Violation::BogoliubovUnstable {
            g_plus: p.g_plus,
            g_minus: p.g_minus,
        });
    }
    if violations.is_empty() {
        Ok(p)
    } else {
        Err(InvalidParams { violations })
    }
}

/// Squeezing parameter and coupling of the Bogoliubov mode
/// `δB = cosh(r) δb + sinh(r) δb†`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovParams {
    pub r: f64,
    pub g_eff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("Bogoliubov-unstable configuration: g_plus = {g_plus} must be < g_minus = {g_minus}")]
pub struct BogoliubovUnstable {
    pub g_plus: f64,
    pub g_minus: f64,
}

/// `r = ln[(G₋ + G₊)/(G₋ − G₊)]/2` and `G_eff = √(G₋² − G₊²)`.
pub fn bogoliubov(p: &SystemParams) -> Result<BogoliubovParams, BogoliubovUnstable> {
    let (gp, gm) = (p.g_plus, p.g_minus);
    if !(gm > gp && gp >= 0.0) {
        return Err(BogoliubovUnstable {
            g_plus: gp,
            g_minus: gm,
        });
    }
    let r = 0.5 * ((gm + gp) / (gm - gp)).ln();
    let g_eff = ((gm - gp) * (gm + gp)).sqrt();
    Ok(BogoliubovParams { r, g_eff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig2() -> SystemParams {
        SystemParams::hursb_two_ensembles(1e-3).with_ratio(0.5)
    }

    #[test]
    fn caption_parameters_validate() {
        let p = fig2();
        assert_eq!(validate_params(p), Ok(p));
    }

    #[test]
    fn equal_couplings_are_bogoliubov_unstable() {
        let p = SystemParams {
            g_plus: 1.0,
            g_minus: 1.0,
            ..fig2()
        };
        let err = validate_params(p).unwrap_err();
        assert!(err.is_bogoliubov_unstable());
        assert!(err.to_string().contains("Bogoliubov-unstable"));
    }

    #[test]
    fn negative_thermal_occupation_rejected() {
        let p = SystemParams {
            n_th: -1.0,
            ..fig2()
        };
        let err = validate_params(p).unwrap_err();
        assert_eq!(
            err.violations,
            vec![Violation::NegativeThermalOccupation { value: -1.0 }]
        );
        assert!(err.to_string().contains("n_th"));
    }

    #[test]
    fn all_violations_reported() {
        let p = SystemParams {
            kappa: 0.0,
            gamma_1: -1.0,
            n_th: -2.0,
            ..fig2()
        };
        let err = validate_params(p).unwrap_err();
        assert_eq!(err.violations.len(), 3);
        let msg = err.to_string();
        assert!(msg.contains("kappa") && msg.contains("gamma_1") && msg.contains("n_th"));
    }

    #[test]
    fn fully_decoupled_is_valid() {
        assert!(validate_params(SystemParams::decoupled(1000.0, 1e-5, 3.0)).is_ok());
    }

    #[test]
    fn non_finite_rejected() {
        let p = SystemParams {
            delta_1: f64::NAN,
            ..fig2()
        };
        assert_eq!(
            validate_params(p).unwrap_err().violations,
            vec![Violation::NotFinite { field: "delta_1" }]
        );
    }

    #[test]
    fn bogoliubov_without_blue_tone() {
        let p = SystemParams::hursb_two_ensembles(1e-3);
        let b = bogoliubov(&p).unwrap();
        assert_eq!(b.r, 0.0);
        assert_eq!(b.g_eff, 1.0);
    }

    #[test]
    fn bogoliubov_arithmetic() {
        let p = fig2().with_ratio(0.6);
        let b = bogoliubov(&p).unwrap();
        assert_relative_eq!(b.r, 4f64.ln() / 2.0, epsilon = 1e-15);
        assert_relative_eq!(b.g_eff, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn bogoliubov_diverges_monotonically() {
        let base = SystemParams::hursb_two_ensembles(1e-3);
        let mut last = bogoliubov(&base).unwrap();
        for k in 1..=12 {
            let ratio = 1.0 - 10f64.powi(-k);
            let b = bogoliubov(&base.with_ratio(ratio)).unwrap();
            assert!(b.r > last.r);
            assert!(b.g_eff < last.g_eff);
            last = b;
        }
        assert!(last.r > 14.0);
        assert!(last.g_eff < 1e-5);
        assert!(bogoliubov(&base.with_ratio(1.0)).is_err());
    }

    proptest! {
        #[test]
        fn bogoliubov_identities(gm in 1e-3f64..10.0, ratio in 0.0f64..0.999) {
            let p = SystemParams { g_minus: gm, ..SystemParams::hursb_two_ensembles(1e-3) }.with_ratio(ratio);
            let b = bogoliubov(&p).unwrap();
            prop_assert!(b.r >= 0.0);
            prop_assert!(b.g_eff > 0.0);
            let scale = gm * gm;
            prop_assert!((p.g_minus.powi(2) - p.g_plus.powi(2) - b.g_eff.powi(2)).abs() <= 1e-12 * scale);
            // G₊ = G_eff·sinh r and G₋ = G_eff·cosh r
            prop_assert!((b.g_eff * b.r.sinh() - p.g_plus).abs() <= 1e-9 * gm);
            prop_assert!((b.g_eff * b.r.cosh() - p.g_minus).abs() <= 1e-9 * gm);
        }
    }
}
