//! Drift and noise matrices of the linearised Langevin equations
//! `u̇ = A(t) u + n`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::model::{SystemParams, OMEGA_M};
use crate::{CMatrix8, Matrix8};

/// Canonical quadrature ordering used for every vector and matrix.
pub mod quadrature {
    pub const X_A: usize = 0;
    pub const Y_A: usize = 1;
    pub const X_B: usize = 2;
    pub const Y_B: usize = 3;
    pub const X_A1: usize = 4;
    pub const Y_A1: usize = 5;
    pub const X_A2: usize = 6;
    pub const Y_A2: usize = 7;

    pub const LABELS: [&str; 8] = ["X_a", "Y_a", "X_b", "Y_b", "X_a1", "Y_a1", "X_a2", "Y_a2"];
}

/// Period of the drift matrix, `π/ω_m`.
pub const PERIOD: f64 = PI / OMEGA_M;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DriftVariant {
    /// Counter-rotating terms kept: `A(t)` is periodic with period `π/ω_m`.
    Full,
    /// Counter-rotating terms dropped: `A` is constant.
    Rwa,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftSpec {
    pub params: SystemParams,
    pub variant: DriftVariant,
}

impl DriftSpec {
    pub fn full(params: SystemParams) -> Self {
        DriftSpec {
            params,
            variant: DriftVariant::Full,
        }
    }

    pub fn rwa(params: SystemParams) -> Self {
        DriftSpec {
            params,
            variant: DriftVariant::Rwa,
        }
    }

    pub fn matrix(&self, t: f64) -> Matrix8 {
        drift_matrix(self, t)
    }
}

/// Values of the modulation functions `f₁`, `f₂`, `f₃` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulation {
    pub f1: Complex64,
    pub f2: Complex64,
    pub f3: Complex64,
}

impl Modulation {
    /// Time-independent part, which is all that survives the rotating-wave
    /// approximation.
    pub fn rwa(p: &SystemParams) -> Self {
        Modulation {
            f1: Complex64::from(-p.g_plus),
            f2: Complex64::from(-p.g_minus),
            f3: Complex64::from(-p.g_minus),
        }
    }
}

/// `f₁ = −(G₊ + G₋ e^{2iω_m t})`, `f₂ = −(G₋ + G₊ e^{−2iω_m t})`,
/// `f₃ = −(G₋ + G₊ e^{2iω_m t})`.
pub fn modulation_values(p: &SystemParams, t: f64) -> Modulation {
    let e = Complex64::from_polar(1.0, 2.0 * OMEGA_M * t);
    Modulation {
        f1: -(p.g_plus + p.g_minus * e),
        f2: -(p.g_minus + p.g_plus * e.conj()),
        f3: -(p.g_minus + p.g_plus * e),
    }
}

/// Assembles the drift matrix from the modulation values. The `f`'s stay
/// complex until the final real/imaginary projection.
fn assemble(p: &SystemParams, m: &Modulation) -> Matrix8 {
    use quadrature::*;

    let f12p = m.f1 + m.f2;
    let f12m = m.f1 - m.f2;
    let f13p = m.f1 + m.f3;
    let f13m = m.f1 - m.f3;

    let mut a = Matrix8::zeros();
    a[(X_A, X_A)] = -p.kappa / 2.0;
    a[(Y_A, Y_A)] = -p.kappa / 2.0;
    a[(X_B, X_B)] = -p.gamma_m / 2.0;
    a[(Y_B, Y_B)] = -p.gamma_m / 2.0;
    a[(X_A1, X_A1)] = -p.gamma_1 / 2.0;
    a[(Y_A1, Y_A1)] = -p.gamma_1 / 2.0;
    a[(X_A2, X_A2)] = -p.gamma_2 / 2.0;
    a[(Y_A2, Y_A2)] = -p.gamma_2 / 2.0;

    // cavity <- mechanics
    a[(X_A, X_B)] = -f12p.im;
    a[(X_A, Y_B)] = f12m.re;
    a[(Y_A, X_B)] = f12p.re;
    a[(Y_A, Y_B)] = f12m.im;
    // mechanics <- cavity
    a[(X_B, X_A)] = -f13p.im;
    a[(X_B, Y_A)] = f13m.re;
    a[(Y_B, X_A)] = f13p.re;
    a[(Y_B, Y_A)] = f13m.im;

    // cavity <-> ensembles
    a[(X_A, Y_A1)] = p.g_a1;
    a[(X_A, Y_A2)] = p.g_a2;
    a[(Y_A, X_A1)] = -p.g_a1;
    a[(Y_A, X_A2)] = -p.g_a2;
    a[(X_A1, Y_A)] = p.g_a1;
    a[(Y_A1, X_A)] = -p.g_a1;
    a[(X_A2, Y_A)] = p.g_a2;
    a[(Y_A2, X_A)] = -p.g_a2;

    // detuning rotations
    a[(X_A1, Y_A1)] = p.delta_1;
    a[(Y_A1, X_A1)] = -p.delta_1;
    a[(X_A2, Y_A2)] = p.delta_2;
    a[(Y_A2, X_A2)] = -p.delta_2;
    a
}

/// Drift matrix at time `t`. The RWA variant ignores `t`.
pub fn drift_matrix(spec: &DriftSpec, t: f64) -> Matrix8 {
    let m = match spec.variant {
        DriftVariant::Full => modulation_values(&spec.params, t),
        DriftVariant::Rwa => Modulation::rwa(&spec.params),
    };
    assemble(&spec.params, &m)
}

/// Fourier decomposition `A(t) = A₀ + A₊ e^{2iω_m t} + A₋ e^{−2iω_m t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftHarmonics {
    pub mean: Matrix8,
    pub up: CMatrix8,
    pub down: CMatrix8,
}

impl DriftHarmonics {
    pub fn is_static(&self) -> bool {
        self.up
            .iter()
            .chain(self.down.iter())
            .all(|z| z.norm() == 0.0)
    }

    /// Evaluates the decomposition at `t`.
    pub fn eval(&self, t: f64) -> Matrix8 {
        let e = Complex64::from_polar(1.0, 2.0 * OMEGA_M * t);
        let osc = self.up * e + self.down * e.conj();
        self.mean + osc.map(|z| z.re)
    }
}

/// Exact harmonics of the drift matrix. `A(t)` only contains the harmonics
/// `0, ±2ω_m`, so a four-point discrete Fourier transform over one period is
/// exact.
pub fn drift_harmonics(spec: &DriftSpec) -> DriftHarmonics {
    match spec.variant {
        DriftVariant::Rwa => DriftHarmonics {
            mean: drift_matrix(spec, 0.0),
            up: CMatrix8::zeros(),
            down: CMatrix8::zeros(),
        },
        DriftVariant::Full => {
            // e^{2iω_m t_k} = i^k at t_k = k·T/4
            let phases = [
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, -1.0),
            ];
            let mut mean = Matrix8::zeros();
            let mut up = CMatrix8::zeros();
            let mut down = CMatrix8::zeros();
            for (k, phase) in phases.iter().enumerate() {
                let a = drift_matrix(spec, k as f64 * PERIOD / 4.0);
                mean += a;
                let ac = a.map(Complex64::from);
                up += ac * phase.conj();
                down += ac * *phase;
            }
            DriftHarmonics {
                mean: mean / 4.0,
                up: up / Complex64::from(4.0),
                down: down / Complex64::from(4.0),
            }
        }
    }
}

/// Diagonal noise correlation matrix `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseMatrix {
    diagonal: [f64; 8],
}

impl NoiseMatrix {
    pub fn diagonal(&self) -> &[f64; 8] {
        &self.diagonal
    }

    pub fn matrix(&self) -> Matrix8 {
        Matrix8::from_diagonal(&nalgebra::SVector::<f64, 8>::from(self.diagonal))
    }

    pub fn max_entry(&self) -> f64 {
        self.diagonal.iter().cloned().fold(0.0, f64::max)
    }
}

/// `D = diag[κ/2, κ/2, γ_m(2n_th+1)/2, γ_m(2n_th+1)/2, γ₁/2, γ₁/2, γ₂/2, γ₂/2]`.
pub fn noise_matrix(p: &SystemParams) -> NoiseMatrix {
    let mech = p.gamma_m * (2.0 * p.n_th + 1.0) / 2.0;
    NoiseMatrix {
        diagonal: [
            p.kappa / 2.0,
            p.kappa / 2.0,
            mech,
            mech,
            p.gamma_1 / 2.0,
            p.gamma_1 / 2.0,
            p.gamma_2 / 2.0,
            p.gamma_2 / 2.0,
        ],
    }
}
