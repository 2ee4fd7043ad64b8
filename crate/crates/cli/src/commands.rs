use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use log::info;
use optospring::budget::{format_sci, CSV_COLUMNS};
use optospring::cavity::{
    cavity_linewidth, cooling_ratio_surface, linspace, min_phonon_number, optimal_detuning,
    SurfaceGrid,
};
use optospring::geometry::polarizability;
use optospring::oracle::{
    predicted_parametric_rate, simulate_gas_langevin, simulate_parametric_heating,
};
use optospring::trap::axial_frequency;
use optospring::units::AngularRate;
use optospring::{full_budget, CavityConfig, Execution, NoiseBudgetReport};

use crate::config::{ConfigError, OracleKind, RawConfig, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Model(#[from] optospring::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("no net cooling: gamma_rp = {0:.8e} s^-1")]
    NoCooling(f64),
    #[error("oracle mismatch: {0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::NoCooling(_) => 2,
            CliError::Mismatch(_) => 3,
            _ => 1,
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// A closed pipe (e.g. `| head`) is not an error.
fn print_stdout(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
        _ => Ok(()),
    }
}

/// Writes to `out` when given, else stdout.
fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text),
        None => print_stdout(text),
    }
}

fn evaluate(cfg: &RunConfig) -> Result<NoiseBudgetReport, CliError> {
    Ok(full_budget(
        &cfg.disk,
        &cfg.beams,
        &cfg.cavity,
        &cfg.environment,
    )?)
}

fn parse_list<T: std::str::FromStr>(text: &str, n: usize, what: &str) -> Result<Vec<T>, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let values: Option<Vec<T>> = parts.iter().map(|p| p.parse().ok()).collect();
    match values {
        Some(v) if v.len() == n => Ok(v),
        _ => Err(CliError::Usage(format!(
            "{what}: expected {n} comma-separated values, got `{text}`"
        ))),
    }
}

fn budget_csv(report: &NoiseBudgetReport) -> String {
    format!("{}\n{}\n", CSV_COLUMNS.join(","), report.csv_row())
}

pub fn budget(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let report = evaluate(cfg)?;
    print_stdout(&report.to_key_value())?;
    if let Some(path) = out {
        write_file(path, &budget_csv(&report))?;
    }
    if !report.net_cooling() {
        return Err(CliError::NoCooling(report.gamma_rp));
    }
    Ok(())
}

fn parse_grid(text: &str) -> Result<SurfaceGrid, CliError> {
    let p: Vec<f64> = parse_list(text, 6, "--grid")?;
    let count = |v: f64| -> Result<usize, CliError> {
        if v >= 1.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(CliError::Usage(format!(
                "--grid: point counts must be positive integers, got {v}"
            )))
        }
    };
    Ok(SurfaceGrid::new(
        (p[0], p[1], count(p[2])?),
        (p[3], p[4], count(p[5])?),
    )?)
}

pub fn fig2(cfg: &RunConfig, grid: Option<&str>, out: Option<&Path>) -> Result<(), CliError> {
    let grid = match grid {
        Some(text) => parse_grid(text)?,
        None => SurfaceGrid::default(),
    };
    let pol = polarizability(&cfg.disk)?;
    let omega_z = axial_frequency(&cfg.beams, &pol, &cfg.disk);
    let surface = cooling_ratio_surface(
        &grid,
        &cfg.cavity,
        omega_z,
        cfg.disk.mass,
        Execution::default(),
    )?;

    let mut text = String::from("linewidth/kappa");
    for d in &grid.detuning_over_kappa {
        let _ = write!(text, ",{}", format_sci(Some(*d)));
    }
    text.push('\n');
    for (g, row) in grid.linewidth_over_kappa.iter().zip(&surface.ratios) {
        text.push_str(&format_sci(Some(*g)));
        for r in row {
            text.push(',');
            text.push_str(&format_sci(*r));
        }
        text.push('\n');
    }
    emit(out, &text)
}

fn sweep_values(lo: f64, hi: f64, points: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if points < 2 {
        return Err(CliError::Usage(format!(
            "--points must be at least 2, got {points}"
        )));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(CliError::Usage(format!(
            "--range needs finite lo < hi, got {lo},{hi}"
        )));
    }
    if !log {
        return Ok(linspace(lo, hi, points));
    }
    if !(lo > 0.0) {
        return Err(CliError::Usage(
            "--log needs a strictly positive range".into(),
        ));
    }
    let mut v: Vec<f64> = linspace(lo.log10(), hi.log10(), points)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect();
    v[0] = lo;
    v[points - 1] = hi;
    Ok(v)
}

pub fn sweep(
    raw: &RawConfig,
    param: &str,
    range: &str,
    points: usize,
    log: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let r: Vec<f64> = parse_list(range, 2, "--range")?;
    let values = sweep_values(r[0], r[1], points, log)?;
    RunConfig::from_raw(raw)?;

    // Every point is built and evaluated before anything is written.
    let mut rows = Vec::with_capacity(values.len());
    for v in &values {
        let mut point = raw.clone();
        point.set_number(param, *v)?;
        let cfg = RunConfig::from_raw(&point)?;
        rows.push(evaluate(&cfg)?);
    }

    let mut text = format!("{param},{}\n", CSV_COLUMNS.join(","));
    for (v, report) in values.iter().zip(&rows) {
        let _ = writeln!(text, "{},{}", format_sci(Some(*v)), report.csv_row());
    }
    emit(out, &text)
}

pub fn simulate(
    cfg: &RunConfig,
    seed: Option<u64>,
    strict: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let spec = cfg.oracle.ok_or_else(|| ConfigError {
        line: None,
        key: None,
        message: "simulate needs an [oracle] section".into(),
    })?;
    let pol = polarizability(&cfg.disk)?;
    let omega_z = axial_frequency(&cfg.beams, &pol, &cfg.disk);
    let mut sde = spec.sde_config(omega_z, &cfg.environment, &cfg.disk);
    if let Some(seed) = seed {
        sde.seed = seed;
    }
    sde.validate()?;
    info!(
        "oracle: {} trajectories x {} steps, dt omega_z = {:.3e}",
        sde.n_trajectories,
        sde.n_steps,
        sde.phase_step()
    );

    let exec = Execution::default();
    let (kind, stats, predicted) = match spec.kind {
        OracleKind::Gas => ("gas", simulate_gas_langevin(&sde, exec)?, sde.gamma_bg),
        OracleKind::Parametric => (
            "parametric",
            simulate_parametric_heating(&sde, exec)?,
            predicted_parametric_rate(&sde),
        ),
    };

    let rate_sigma = (stats.fitted_rate - predicted).abs() / stats.fitted_rate_stderr;
    let mut mismatches = Vec::new();
    if rate_sigma > 3.0 {
        mismatches.push(format!("rate off by {rate_sigma:.2} sigma"));
    }

    let mut text = String::new();
    let kv = |text: &mut String, k: &str, v: f64| {
        let _ = writeln!(text, "{k} = {}", format_sci(Some(v)));
    };
    let _ = writeln!(text, "kind = {kind}");
    kv(&mut text, "omega_z", omega_z);
    kv(&mut text, "fitted_rate", stats.fitted_rate);
    kv(&mut text, "fitted_rate_stderr", stats.fitted_rate_stderr);
    kv(&mut text, "predicted_rate", predicted);
    kv(&mut text, "rate_deviation_sigma", rate_sigma);
    if let (Some(eq), Some(se)) = (stats.equilibrium_energy, stats.equilibrium_stderr) {
        let thermal = sde.thermal_energy();
        let eq_sigma = (eq - thermal).abs() / se;
        if eq_sigma > 3.0 {
            mismatches.push(format!("equilibrium energy off by {eq_sigma:.2} sigma"));
        }
        kv(&mut text, "equilibrium_energy", eq);
        kv(&mut text, "equilibrium_stderr", se);
        kv(&mut text, "predicted_equilibrium_energy", thermal);
        kv(&mut text, "equilibrium_deviation_sigma", eq_sigma);
    }
    let _ = writeln!(text, "seed = {}", sde.seed);
    let _ = writeln!(text, "trajectories = {}", sde.n_trajectories);
    let _ = writeln!(text, "steps = {}", sde.n_steps);
    kv(&mut text, "dt", sde.dt);
    kv(&mut text, "phase_step", stats.metadata.phase_step);
    kv(&mut text, "modulation_std", stats.metadata.modulation_std);
    kv(
        &mut text,
        "modulation_band_limit",
        stats.metadata.modulation_band_limit,
    );
    let _ = writeln!(text, "stepper = {}", stats.metadata.stepper);
    print_stdout(&text)?;

    if let Some(path) = out {
        write_file(path, &stats.trajectory_csv())?;
    }
    if strict && !mismatches.is_empty() {
        return Err(CliError::Mismatch(mismatches.join("; ")));
    }
    Ok(())
}

pub fn optimize(cfg: &RunConfig) -> Result<(), CliError> {
    let pol = polarizability(&cfg.disk)?;
    let omega_z = axial_frequency(&cfg.beams, &pol, &cfg.disk);
    let kappa = cavity_linewidth(&cfg.cavity)?;
    let best = optimal_detuning(omega_z, kappa);

    let configured = evaluate(cfg)?;
    let tuned_cfg = RunConfig {
        cavity: CavityConfig {
            detuning: best,
            ..cfg.cavity
        },
        ..cfg.clone()
    };
    let tuned = evaluate(&tuned_cfg)?;
    let n_min_best = min_phonon_number(best, omega_z, kappa)?;

    let mut text = String::new();
    let kv = |text: &mut String, k: &str, v: Option<f64>| {
        let _ = writeln!(text, "{k} = {}", format_sci(v));
    };
    kv(&mut text, "omega_z", Some(omega_z));
    kv(&mut text, "kappa", Some(kappa));
    kv(&mut text, "configured_detuning", Some(cfg.cavity.detuning));
    kv(
        &mut text,
        "configured_detuning_khz",
        Some(AngularRate(cfg.cavity.detuning).to_khz()),
    );
    kv(&mut text, "optimal_detuning", Some(best));
    kv(
        &mut text,
        "optimal_detuning_khz",
        Some(AngularRate(best).to_khz()),
    );
    kv(&mut text, "n_min_configured", configured.n_min);
    kv(&mut text, "n_min_optimal", Some(n_min_best));
    kv(&mut text, "n_final_configured", configured.n_final);
    kv(&mut text, "n_final_optimal", tuned.n_final);
    let ratio = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    };
    kv(
        &mut text,
        "improvement_n_min",
        ratio(configured.n_min, Some(n_min_best)),
    );
    kv(
        &mut text,
        "improvement_n_final",
        ratio(configured.n_final, tuned.n_final),
    );
    print_stdout(&text)?;

    if !tuned.net_cooling() {
        return Err(CliError::NoCooling(tuned.gamma_rp));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_spacing() {
        assert_eq!(sweep_values(1.0, 2.0, 2, false).unwrap(), vec![1.0, 2.0]);
        let v = sweep_values(1e-8, 1e-4, 5, true).unwrap();
        assert_eq!(v[0], 1e-8);
        assert_eq!(v[4], 1e-4);
        assert!((v[2] / 1e-6 - 1.0).abs() < 1e-12);
        assert!(sweep_values(1.0, 2.0, 1, false).is_err());
        assert!(sweep_values(2.0, 1.0, 3, false).is_err());
        assert!(sweep_values(-1.0, 2.0, 3, true).is_err());
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("-2,-1,3,0,1,2").unwrap();
        assert_eq!(g.detuning_over_kappa, vec![-2.0, -1.5, -1.0]);
        assert_eq!(g.linewidth_over_kappa, vec![0.0, 1.0]);
        assert!(parse_grid("-2,-1,3,0,1").is_err());
        assert!(parse_grid("-2,-1,2.5,0,1,2").is_err());
        assert!(parse_grid("1,2,3,0,1,2").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::NoCooling(0.0).exit_code(), 2);
        assert_eq!(CliError::Mismatch(String::new()).exit_code(), 3);
        assert_eq!(CliError::Usage(String::new()).exit_code(), 1);
    }
}
