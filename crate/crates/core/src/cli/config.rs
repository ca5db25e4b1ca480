//! Run configuration: a TOML document with the flat sections `[system]`,
//! `[solver]`, `[sweep]` and `[output]`.
//!
//! ```toml
//! [system]
//! kappa = 1000.0
//! gamma_m = 1e-5
//! g_minus = 1.0
//! g_plus = 0.5
//!
//! [solver]
//! method = "harmonic-balance"
//!
//! [sweep]
//! parameter = "ratio"
//! start = 0.0
//! stop = 0.98
//! count = 50
//! ```
//!
//! All rates are in units of the mechanical frequency.

use std::path::PathBuf;

use serde::Deserialize;
use thiserror::Error;

use crate::model::{validate_params, InvalidParams, SystemParams};
use crate::solver::SolverOptions;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}{}: {message}", .key.as_ref().map(|k| format!(", key `{k}`")).unwrap_or_default())]
    Parse {
        line: usize,
        key: Option<String>,
        message: String,
    },
    #[error("missing required field `{section}.{key}`")]
    Missing {
        section: &'static str,
        key: &'static str,
    },
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error(transparent)]
    Params(#[from] InvalidParams),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    system: RawSystem,
    #[serde(default)]
    solver: RawSolver,
    sweep: Option<RawSweep>,
    #[serde(default)]
    output: RawOutput,
}

/// Parameter overrides; every field is optional at parse time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSystem {
    pub kappa: Option<f64>,
    pub gamma_m: Option<f64>,
    pub gamma_1: Option<f64>,
    pub gamma_2: Option<f64>,
    pub g_a1: Option<f64>,
    pub g_a2: Option<f64>,
    pub delta_1: Option<f64>,
    pub delta_2: Option<f64>,
    pub g_minus: Option<f64>,
    pub g_plus: Option<f64>,
    pub n_th: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    method: Option<String>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    convergence_tol: Option<f64>,
    max_periods: Option<u64>,
    harmonics: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    parameter: String,
    start: f64,
    stop: f64,
    count: usize,
    spacing: Option<String>,
    optimize: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Ratio,
    Kappa,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::Ratio => "ratio",
            SweepParameter::Kappa => "kappa",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
    /// Optimise the drive ratio at every point (κ sweeps only).
    pub optimize: bool,
}

impl SweepSpec {
    /// Grid values from `start` to `stop` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|k| {
                let s = k as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.start + s * (self.stop - self.start),
                    Spacing::Log => {
                        (self.start.ln() + s * (self.stop.ln() - self.start.ln())).exp()
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: RawSystem,
    pub solver: SolverOptions,
    pub sweep: Option<SweepSpec>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Parameters of a config that must stand on its own: `kappa`, `gamma_m`
    /// and `g_minus` are required, every other field defaults to zero.
    pub fn params(&self) -> Result<SystemParams, ConfigError> {
        let s = &self.system;
        let required = |v: Option<f64>, key| {
            v.ok_or(ConfigError::Missing {
                section: "system",
                key,
            })
        };
        let p = SystemParams {
            kappa: required(s.kappa, "kappa")?,
            gamma_m: required(s.gamma_m, "gamma_m")?,
            g_minus: required(s.g_minus, "g_minus")?,
            ..SystemParams::decoupled(0.0, 0.0, 0.0)
        };
        Ok(validate_params(self.overlay(p))?)
    }

    /// `base` with every field present in the config replaced, validated.
    pub fn params_over(&self, base: SystemParams) -> Result<SystemParams, ConfigError> {
        Ok(validate_params(self.overlay(base))?)
    }

    fn overlay(&self, base: SystemParams) -> SystemParams {
        let s = &self.system;
        SystemParams {
            kappa: s.kappa.unwrap_or(base.kappa),
            gamma_m: s.gamma_m.unwrap_or(base.gamma_m),
            gamma_1: s.gamma_1.unwrap_or(base.gamma_1),
            gamma_2: s.gamma_2.unwrap_or(base.gamma_2),
            g_a1: s.g_a1.unwrap_or(base.g_a1),
            g_a2: s.g_a2.unwrap_or(base.g_a2),
            delta_1: s.delta_1.unwrap_or(base.delta_1),
            delta_2: s.delta_2.unwrap_or(base.delta_2),
            g_minus: s.g_minus.unwrap_or(base.g_minus),
            g_plus: s.g_plus.unwrap_or(base.g_plus),
            n_th: s.n_th.unwrap_or(base.n_th),
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.into(),
        message: message.into(),
    }
}

/// Parses a configuration document. Omitted solver fields take their
/// defaults; the system section is kept as overrides until a command decides
/// which fields are required.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(0, |s| line_of(text, s.start));
        let key = line
            .checked_sub(1)
            .and_then(|i| text.lines().nth(i))
            .and_then(|l| l.split_once('='))
            .map(|(k, _)| k.trim().to_string());
        ConfigError::Parse {
            line,
            key,
            message: e.message().trim().to_string(),
        }
    })?;

    let defaults = SolverOptions::default();
    let solver = SolverOptions {
        method: match raw.solver.method.as_deref() {
            None => defaults.method,
            Some(m) => m.parse().map_err(|e: String| invalid("solver.method", e))?,
        },
        rel_tol: raw.solver.rel_tol.unwrap_or(defaults.rel_tol),
        abs_tol: raw.solver.abs_tol.unwrap_or(defaults.abs_tol),
        convergence_tol: raw
            .solver
            .convergence_tol
            .unwrap_or(defaults.convergence_tol),
        max_periods: raw.solver.max_periods.unwrap_or(defaults.max_periods),
        harmonics: raw.solver.harmonics.unwrap_or(defaults.harmonics),
    };
    solver
        .validate()
        .map_err(|e| invalid("solver", e.to_string()))?;

    let sweep = raw.sweep.map(parse_sweep).transpose()?;
    Ok(RunConfig {
        system: raw.system,
        solver,
        sweep,
        output: raw.output.path,
    })
}

fn parse_sweep(raw: RawSweep) -> Result<SweepSpec, ConfigError> {
    let parameter = match raw.parameter.as_str() {
        "ratio" => SweepParameter::Ratio,
        "kappa" => SweepParameter::Kappa,
        other => {
            return Err(invalid(
                "sweep.parameter",
                format!("`{other}` is not one of ratio, kappa"),
            ))
        }
    };
    let spacing = match raw.spacing.as_deref() {
        None | Some("linear") => Spacing::Linear,
        Some("log") => Spacing::Log,
        Some(other) => {
            return Err(invalid(
                "sweep.spacing",
                format!("`{other}` is not one of linear, log"),
            ))
        }
    };
    if raw.count < 2 {
        return Err(invalid(
            "sweep.count",
            format!("{} must be >= 2", raw.count),
        ));
    }
    if !(raw.start.is_finite() && raw.stop.is_finite() && raw.start < raw.stop) {
        return Err(invalid(
            "sweep.start",
            "start must be finite and below stop",
        ));
    }
    if spacing == Spacing::Log && raw.start <= 0.0 {
        return Err(invalid("sweep.start", "log spacing needs a positive start"));
    }
    let optimize = raw.optimize.unwrap_or(false);
    if optimize && parameter != SweepParameter::Kappa {
        return Err(invalid(
            "sweep.optimize",
            "only kappa sweeps can optimise the ratio",
        ));
    }
    Ok(SweepSpec {
        parameter,
        start: raw.start,
        stop: raw.stop,
        count: raw.count,
        spacing,
        optimize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SolveMethod;

    const FIG2: &str = "
[system]
kappa = 1000.0
gamma_m = 1e-5
gamma_1 = 0.001
gamma_2 = 0.001
g_a1 = 10.0
g_a2 = 10.0
delta_1 = 2.0
delta_2 = -2.0
n_th = 0.0
g_minus = 1.0
";

    #[test]
    fn caption_values_are_echoed() {
        let cfg = parse_config(FIG2).unwrap();
        let p = cfg.params().unwrap();
        assert_eq!(p, SystemParams::hursb_two_ensembles(0.001));
    }

    #[test]
    fn empty_solver_section_gives_defaults() {
        let cfg = parse_config(&format!("{FIG2}\n[solver]\n")).unwrap();
        assert_eq!(cfg.solver, SolverOptions::default());
        assert_eq!(cfg.solver.method, SolveMethod::HarmonicBalance);
        assert_eq!(cfg.solver.harmonics, 6);
    }

    #[test]
    fn type_mismatch_names_key_and_line() {
        let err = parse_config("[system]\ngamma_m = 1e-5\nkappa = \"fast\"\n").unwrap_err();
        match &err {
            ConfigError::Parse { line, key, .. } => {
                assert_eq!(*line, 3);
                assert_eq!(key.as_deref(), Some("kappa"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("line 3, key `kappa`"), "{err}");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = parse_config("[system]\nkapa = 1.0\n").unwrap_err();
        assert!(err.to_string().contains("kapa"), "{err}");
        assert!(parse_config("[plot]\nx = 1\n").is_err());
    }

    #[test]
    fn missing_required_field() {
        let cfg = parse_config("[system]\nkappa = 1.0\ng_minus = 0.1\n").unwrap();
        assert_eq!(
            cfg.params().unwrap_err(),
            ConfigError::Missing {
                section: "system",
                key: "gamma_m"
            }
        );
    }

    #[test]
    fn invalid_parameters_are_reported() {
        let cfg =
            parse_config("[system]\nkappa = 1.0\ngamma_m = 0.1\ng_minus = 0.1\ng_plus = 0.2\n")
                .unwrap();
        assert!(matches!(cfg.params(), Err(ConfigError::Params(e)) if e.is_bogoliubov_unstable()));
    }

    #[test]
    fn sweep_grids() {
        let cfg = parse_config("[sweep]\nparameter = \"kappa\"\nstart = 1.0\nstop = 100.0\ncount = 3\nspacing = \"log\"\n").unwrap();
        let v = cfg.sweep.unwrap().values();
        assert_eq!(v.len(), 3);
        assert!((v[1] - 10.0).abs() < 1e-12 && (v[2] - 100.0).abs() < 1e-12);
        assert!(parse_config(
            "[sweep]\nparameter = \"ratio\"\nstart = 0.0\nstop = 0.5\ncount = 1\n"
        )
        .is_err());
        assert!(parse_config(
            "[sweep]\nparameter = \"gamma\"\nstart = 0.0\nstop = 0.5\ncount = 4\n"
        )
        .is_err());
    }

    #[test]
    fn unknown_method_is_rejected() {
        let err = parse_config("[solver]\nmethod = \"euler\"\n").unwrap_err();
        assert!(err.to_string().contains("solver.method"));
    }
}
