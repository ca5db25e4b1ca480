use std::fs::File;
use std::io::{BufWriter, Write};

use super::config::{RunConfig, SweepParameter, SweepSpec};
use super::output::{format_float, write_header, write_matrix, write_sweeps};
use super::{CliError, Command};
use crate::analysis::{
    fig2, fig2_ratios, fig3, fig3_kappas, squeezing_of, sweep_kappa, sweep_ratio, FigureCurve,
    PointStatus, SweepRecord, SweepResult,
};
use crate::dynamics::{noise_matrix, DriftSpec, PERIOD};
use crate::model::SystemParams;
use crate::solver::{floquet_stability_with, relax_absent_ensembles, steady_state};

/// Runs `command` with a configuration that already carries the command-line
/// overrides.
pub fn run(
    command: Command,
    cfg: &RunConfig,
    stdout: &mut (dyn Write + Send),
) -> Result<(), CliError> {
    match command {
        Command::Steady => steady(cfg, stdout),
        Command::SweepRatio => sweep(cfg, SweepParameter::Ratio, stdout),
        Command::SweepKappa => sweep(cfg, SweepParameter::Kappa, stdout),
        Command::Fig2 => figure(cfg, Command::Fig2, stdout),
        Command::Fig3 => figure(cfg, Command::Fig3, stdout),
        Command::Stability => stability(cfg, stdout),
        Command::DumpMatrices => dump(cfg, stdout),
    }
}

fn header(
    command: Command,
    p: &SystemParams,
    cfg: &RunConfig,
    grid: Option<&Grid>,
) -> Vec<(String, String)> {
    let mut h = vec![
        ("command".to_string(), command.name().to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
    ];
    for (k, v) in p.fields() {
        h.push((format!("system.{k}"), format_float(v)));
    }
    let s = &cfg.solver;
    h.push(("solver.method".into(), s.method.name().into()));
    h.push(("solver.rel_tol".into(), format_float(s.rel_tol)));
    h.push(("solver.abs_tol".into(), format_float(s.abs_tol)));
    h.push((
        "solver.convergence_tol".into(),
        format_float(s.convergence_tol),
    ));
    h.push(("solver.max_periods".into(), s.max_periods.to_string()));
    h.push(("solver.harmonics".into(), s.harmonics.to_string()));
    if let Some(g) = grid {
        h.push(("sweep.parameter".into(), g.parameter.name().into()));
        h.push(("sweep.count".into(), g.values.len().to_string()));
        h.push(("sweep.start".into(), format_float(g.values[0])));
        h.push(("sweep.stop".into(), format_float(*g.values.last().unwrap())));
        h.push(("sweep.optimize".into(), g.optimize.to_string()));
    }
    h
}

struct Grid {
    parameter: SweepParameter,
    values: Vec<f64>,
    optimize: bool,
}

/// Grid from the `[sweep]` section, or the figure default when absent.
fn grid(
    cfg: &RunConfig,
    parameter: SweepParameter,
    optimize_default: bool,
) -> Result<Grid, CliError> {
    match cfg.sweep {
        Some(SweepSpec { parameter: p, .. }) if p != parameter => Err(CliError::Usage(format!(
            "[sweep] parameter is {}, this command sweeps {}",
            p.name(),
            parameter.name()
        ))),
        Some(spec) => Ok(Grid {
            parameter,
            values: spec.values(),
            optimize: spec.optimize,
        }),
        None => Ok(Grid {
            parameter,
            values: match parameter {
                SweepParameter::Ratio => fig2_ratios(),
                SweepParameter::Kappa => fig3_kappas(),
            },
            optimize: optimize_default,
        }),
    }
}

/// Sink for the main output: the configured file or standard output.
fn with_output<F>(cfg: &RunConfig, stdout: &mut (dyn Write + Send), f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    match &cfg.output {
        Some(path) => {
            let name = path.display().to_string();
            let file = File::create(path).map_err(|e| CliError::io(&name, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(&name, e))
        }
        None => f(stdout).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn summary(
    stdout: &mut (dyn Write + Send),
    cfg: &RunConfig,
    lines: &[String],
) -> Result<(), CliError> {
    // summaries only when the data went to a file, so stdout stays valid CSV
    if cfg.output.is_some() {
        for l in lines {
            writeln!(stdout, "{l}").map_err(|e| CliError::io("<stdout>", e))?;
        }
    }
    Ok(())
}

fn steady(cfg: &RunConfig, stdout: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let p = cfg.params()?;
    let ss = steady_state(&p, &cfg.solver)?;
    let sq = squeezing_of(&ss)?;
    let result = SweepResult {
        parameter: "ratio".into(),
        records: vec![SweepRecord {
            parameter: p.ratio(),
            ratio: p.ratio(),
            squeezing: Some(sq),
            stable: ss.stable,
            method: ss.method,
            periods_used: ss.periods_used,
            harmonics_used: ss.harmonics_used,
            status: PointStatus::Ok,
        }],
    };
    let h = header(Command::Steady, &p, cfg, None);
    with_output(cfg, stdout, |w| write_sweeps(w, &h, &[("steady", &result)]))?;
    summary(
        stdout,
        cfg,
        &[format!(
            "s_db={} var_xb={} max_multiplier={}",
            format_float(sq.s_db),
            format_float(sq.var_xb),
            format_float(ss.max_multiplier)
        )],
    )
}

fn sweep(
    cfg: &RunConfig,
    parameter: SweepParameter,
    stdout: &mut (dyn Write + Send),
) -> Result<(), CliError> {
    let p = cfg.params()?;
    let g = grid(cfg, parameter, false)?;
    let result = match parameter {
        SweepParameter::Ratio => sweep_ratio(&p, &g.values, &cfg.solver)?,
        SweepParameter::Kappa => sweep_kappa(&p, &g.values, &cfg.solver, g.optimize)?,
    };
    let command = match parameter {
        SweepParameter::Ratio => Command::SweepRatio,
        SweepParameter::Kappa => Command::SweepKappa,
    };
    let h = header(command, &p, cfg, Some(&g));
    with_output(cfg, stdout, |w| {
        write_sweeps(w, &h, &[(command.name(), &result)])
    })?;
    summary(stdout, cfg, &[curve_summary(command.name(), &result)])
}

fn curve_summary(label: &str, sweep: &SweepResult) -> String {
    let ok = sweep
        .records
        .iter()
        .filter(|r| r.squeezing.is_some())
        .count();
    match sweep.best() {
        Some(b) => format!(
            "{label}: {ok}/{} points solved, max s_db={} at {}={} (ratio {})",
            sweep.records.len(),
            format_float(b.squeezing.unwrap().s_db),
            sweep.parameter,
            format_float(b.parameter),
            format_float(b.ratio)
        ),
        None => format!("{label}: no point solved"),
    }
}

fn figure(
    cfg: &RunConfig,
    command: Command,
    stdout: &mut (dyn Write + Send),
) -> Result<(), CliError> {
    let base = cfg.params_over(SystemParams::hursb_two_ensembles(0.001))?;
    let curves: Vec<FigureCurve> = match command {
        Command::Fig2 => {
            let g = grid(cfg, SweepParameter::Ratio, false)?;
            let curves = fig2(&base, &g.values, &cfg.solver)?;
            write_figure(cfg, command, &base, &g, &curves, stdout)?;
            curves
        }
        _ => {
            let g = grid(cfg, SweepParameter::Kappa, true)?;
            let curves = fig3(&base, &g.values, &cfg.solver)?;
            write_figure(cfg, command, &base, &g, &curves, stdout)?;
            curves
        }
    };
    let lines: Vec<String> = curves
        .iter()
        .map(|c| curve_summary(&c.label, &c.sweep))
        .collect();
    summary(stdout, cfg, &lines)
}

fn write_figure(
    cfg: &RunConfig,
    command: Command,
    base: &SystemParams,
    g: &Grid,
    curves: &[FigureCurve],
    stdout: &mut (dyn Write + Send),
) -> Result<(), CliError> {
    let h = header(command, base, cfg, Some(g));
    let refs: Vec<(&str, &SweepResult)> = curves
        .iter()
        .map(|c| (c.label.as_str(), &c.sweep))
        .collect();
    with_output(cfg, stdout, |w| write_sweeps(w, &h, &refs))
}

fn stability(cfg: &RunConfig, stdout: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let p = cfg.params()?;
    // same treatment of uncoupled, undamped ensembles as the steady-state solve
    let report = floquet_stability_with(&DriftSpec::full(relax_absent_ensembles(&p)), &cfg.solver)?;
    let h = header(Command::Stability, &p, cfg, None);
    with_output(cfg, stdout, |w| {
        write_header(w, &h)?;
        writeln!(w, "# stable={}", report.stable)?;
        writeln!(w, "# max_modulus={}", format_float(report.max_modulus))?;
        writeln!(w, "index,re,im,modulus")?;
        for (k, mu) in report.multipliers.iter().enumerate() {
            writeln!(
                w,
                "{k},{},{},{}",
                format_float(mu.re),
                format_float(mu.im),
                format_float(mu.norm())
            )?;
        }
        Ok(())
    })?;
    summary(
        stdout,
        cfg,
        &[format!(
            "stable={} max_modulus={}",
            report.stable,
            format_float(report.max_modulus)
        )],
    )?;
    if report.stable {
        Ok(())
    } else {
        Err(crate::solver::SolverError::Unstable {
            max_multiplier: report.max_modulus,
        }
        .into())
    }
}

fn dump(cfg: &RunConfig, stdout: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let p = cfg.params()?;
    let full = DriftSpec::full(p);
    let h = header(Command::DumpMatrices, &p, cfg, None);
    with_output(cfg, stdout, |w| {
        write_header(w, &h)?;
        write_matrix(w, "A(0)", &full.matrix(0.0))?;
        write_matrix(w, "A(T/4)", &full.matrix(PERIOD / 4.0))?;
        write_matrix(w, "A_RWA", &DriftSpec::rwa(p).matrix(0.0))?;
        write_matrix(w, "D", &noise_matrix(&p).matrix())
    })
}
