//! Steady-state mechanical squeezing of a hybrid optomechanical system in
//! which a cavity couples a mechanical resonator to two atomic ensembles and
//! is driven by two tones at `ω_c ± ω_m`.
//!
//! All rates and frequencies are expressed in units of the mechanical
//! frequency `ω_m`, which is fixed to one. Quadratures are ordered
//! `(X_a, Y_a, X_b, Y_b, X_a1, Y_a1, X_a2, Y_a2)` everywhere in the crate,
//! see [`dynamics::quadrature`].
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: physical parameters, classical mean field, Bogoliubov
//!   diagnostics and a classical trajectory integrator.
//! * [`dynamics`]: the time-periodic drift matrix, its rotating-wave limit and
//!   the noise matrix.
//! * [`solver`]: steady-state covariance matrices (algebraic Lyapunov solve,
//!   stiff time integration, harmonic balance) and Floquet stability.
//! * [`analysis`]: squeezing in dB, parameter sweeps and drive-ratio
//!   optimisation.
//! * [`cli`]: configuration parsing, subcommands and CSV output.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod model;
pub mod solver;

pub use analysis::{
    optimize_ratio, squeezing_db, squeezing_of, sweep_kappa, sweep_ratio, AnalysisError,
    RatioOptimum, SqueezingResult, SweepRecord, SweepResult,
};
pub use dynamics::{
    drift_matrix, modulation_values, noise_matrix, DriftSpec, DriftVariant, NoiseMatrix,
};
pub use model::{bogoliubov, validate_params, BogoliubovParams, SystemParams};
pub use solver::{
    floquet_stability, harmonic_balance_steady, integrate_covariance, lyapunov_steady,
    steady_state, CovarianceMatrix, SolveMethod, SolverError, SolverOptions, SteadyState,
};

/// 8×8 real matrix in the canonical quadrature ordering.
pub type Matrix8 = nalgebra::SMatrix<f64, 8, 8>;
/// 8×8 complex matrix in the canonical quadrature ordering.
pub type CMatrix8 = nalgebra::SMatrix<num_complex::Complex64, 8, 8>;
