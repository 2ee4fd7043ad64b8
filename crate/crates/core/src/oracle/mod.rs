//! Stochastic cross-check of the analytic damping and heating rates.
//!
//! The mirror's axial motion is integrated as a classical oscillator,
//! z'' = -omega_z^2 (1 + eps(t)) z - gamma_bg z' + xi(t), where
//! <xi(t) xi(t')> = q delta(t - t') with q = 2 kB T gamma_bg / m and eps is
//! white relative modulation of the trap stiffness. Ensemble-mean energy
//! series are fitted for the relaxation rate (gas) or growth rate
//! (parametric) and compared with the closed forms.
//!
//! Each trajectory draws from its own ChaCha stream keyed by `(seed, index)`,
//! and per-trajectory results are reduced in index order, so sequential and
//! parallel runs agree bit for bit.

mod fit;
mod integrator;

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::budget::{format_sci, intensity_heating_rate};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::units::KB;

use integrator::{draw, initial_state, integrate, trajectory_rng, Dynamics};

/// Upper bound on dt * omega_z.
pub const MAX_PHASE_STEP: f64 = 0.05;
pub const MIN_TRAJECTORIES: usize = 100;
/// Contiguous trajectory batches used for the rate standard error.
pub const N_BATCHES: usize = 10;
/// Energy samples kept per trajectory (approximately).
pub const TARGET_SAMPLES: usize = 400;
/// Largest permitted energy growth per oscillation period.
pub const MAX_GROWTH_PER_PERIOD: f64 = 0.1;

pub const STEPPER: &str =
    "stochastic leapfrog: kick-drift-kick, then v <- v (1 - gamma dt) + sqrt(q dt) N(0,1)";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdeConfig {
    pub omega_z: f64,
    pub gamma_bg: f64,
    pub temperature: f64,
    pub mass: f64,
    /// Relative intensity-noise spectrum, 1/Hz (one-sided).
    pub s_intensity: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub seed: u64,
    /// Starting energy of every trajectory, J. Phases are random.
    pub initial_energy: f64,
}

impl SdeConfig {
    /// Thermal energy kB T.
    pub fn thermal_energy(&self) -> f64 {
        KB * self.temperature
    }

    pub fn phase_step(&self) -> f64 {
        self.dt * self.omega_z
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_z", self.omega_z),
            ("mass", self.mass),
            ("dt", self.dt),
            ("initial_energy", self.initial_energy),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!(
                    "oracle {name} must be positive, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("gamma_bg", self.gamma_bg),
            ("temperature", self.temperature),
            ("s_intensity", self.s_intensity),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(format!(
                    "oracle {name} must be non-negative, got {v}"
                )));
            }
        }
        if self.phase_step() >= MAX_PHASE_STEP {
            return Err(Error::StepSize(self.phase_step()));
        }
        if self.n_steps == 0 || self.n_trajectories == 0 {
            return Err(Error::domain(
                "oracle needs at least one step and one trajectory",
            ));
        }
        Ok(())
    }

    fn validate_for_fit(&self) -> Result<()> {
        self.validate()?;
        if self.n_trajectories < MIN_TRAJECTORIES {
            return Err(Error::TooFewTrajectories(self.n_trajectories));
        }
        Ok(())
    }

    /// Velocity-noise strength from the fluctuation-dissipation theorem.
    pub fn noise_strength(&self) -> f64 {
        2.0 * KB * self.temperature * self.gamma_bg / self.mass
    }

    fn stride(&self) -> usize {
        (self.n_steps / TARGET_SAMPLES).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleMetadata {
    pub stepper: &'static str,
    /// Standard deviation of the per-step relative stiffness modulation.
    pub modulation_std: f64,
    /// Modulation is flat up to this frequency, 1 / (2 dt), Hz.
    pub modulation_band_limit: f64,
    pub phase_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub times: Vec<f64>,
    pub mean_energy: Vec<f64>,
    pub stderr_energy: Vec<f64>,
    /// Relaxation rate (gas) or growth rate (parametric), s^-1.
    pub fitted_rate: f64,
    pub fitted_rate_stderr: f64,
    /// Long-run ensemble average over the second half of the run, J.
    /// `None` for parametric runs, which have no steady state.
    pub equilibrium_energy: Option<f64>,
    pub equilibrium_stderr: Option<f64>,
    pub metadata: OracleMetadata,
}

impl EnsembleStats {
    /// `t,mean_energy,stderr_energy` rows with a header, `\n` line endings.
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("t,mean_energy,stderr_energy\n");
        for ((t, e), s) in self
            .times
            .iter()
            .zip(&self.mean_energy)
            .zip(&self.stderr_energy)
        {
            let _ = writeln!(
                out,
                "{},{},{}",
                format_sci(Some(*t)),
                format_sci(Some(*e)),
                format_sci(Some(*s))
            );
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fit {
    Relaxation,
    Growth,
}

fn metadata(cfg: &SdeConfig, dyn_: &Dynamics) -> OracleMetadata {
    OracleMetadata {
        stepper: STEPPER,
        modulation_std: (dyn_.s_modulation / (2.0 * cfg.dt)).sqrt(),
        modulation_band_limit: 0.5 / cfg.dt,
        phase_step: cfg.phase_step(),
    }
}

/// Integrates every trajectory; rows are in trajectory-index order.
fn run_ensemble(cfg: &SdeConfig, dyn_: &Dynamics, exec: Execution) -> Vec<Vec<f64>> {
    let stride = cfg.stride();
    exec.map_indexed(cfg.n_trajectories, |i| {
        let mut rng = trajectory_rng(cfg.seed, i);
        let start = initial_state(dyn_, cfg.initial_energy, &mut rng);
        integrate(dyn_, start, cfg.dt, cfg.n_steps, stride, || {
            draw(dyn_, &mut rng)
        })
    })
}

fn column_means(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len() as f64;
    let mut acc = vec![0.0; rows[0].len()];
    for row in rows {
        for (a, v) in acc.iter_mut().zip(row) {
            *a += v;
        }
    }
    acc.iter_mut().for_each(|a| *a /= n);
    acc
}

fn fit_series(kind: Fit, t: &[f64], e: &[f64]) -> f64 {
    match kind {
        Fit::Relaxation => fit::relaxation_rate(t, e),
        Fit::Growth => fit::log_linear_slope(t, e),
    }
}

fn reduce(
    cfg: &SdeConfig,
    dyn_: &Dynamics,
    rows: Vec<Vec<f64>>,
    kind: Fit,
    dt: f64,
    stride: usize,
) -> EnsembleStats {
    let n_samples = rows[0].len();
    let times: Vec<f64> = (0..n_samples).map(|k| (k * stride) as f64 * dt).collect();
    let mean_energy = column_means(&rows);
    let n = rows.len() as f64;
    let stderr_energy: Vec<f64> = (0..n_samples)
        .map(|k| {
            let m = mean_energy[k];
            let var = rows.iter().map(|r| (r[k] - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
            (var / n).sqrt()
        })
        .collect();

    let fitted_rate = fit_series(kind, &times, &mean_energy);
    let batch = rows.len() / N_BATCHES;
    let fitted_rate_stderr = if batch == 0 {
        f64::NAN
    } else {
        let rates: Vec<f64> = rows
            .chunks_exact(batch)
            .take(N_BATCHES)
            .map(|chunk| fit_series(kind, &times, &column_means(chunk)))
            .collect();
        fit::mean_and_stderr(&rates).1
    };

    let (equilibrium_energy, equilibrium_stderr) = match kind {
        Fit::Relaxation => {
            let tail = n_samples / 2;
            let per_traj: Vec<f64> = rows
                .iter()
                .map(|r| r[tail..].iter().sum::<f64>() / (n_samples - tail) as f64)
                .collect();
            let (m, s) = fit::mean_and_stderr(&per_traj);
            (Some(m), Some(s))
        }
        Fit::Growth => (None, None),
    };

    EnsembleStats {
        times,
        mean_energy,
        stderr_energy,
        fitted_rate,
        fitted_rate_stderr,
        equilibrium_energy,
        equilibrium_stderr,
        metadata: metadata(cfg, dyn_),
    }
}

fn gas_dynamics(cfg: &SdeConfig) -> Dynamics {
    Dynamics {
        omega_z: cfg.omega_z,
        mass: cfg.mass,
        gamma: cfg.gamma_bg,
        q: cfg.noise_strength(),
        s_modulation: 0.0,
    }
}

fn parametric_dynamics(cfg: &SdeConfig) -> Dynamics {
    Dynamics {
        omega_z: cfg.omega_z,
        mass: cfg.mass,
        gamma: 0.0,
        q: 0.0,
        s_modulation: cfg.s_intensity,
    }
}

/// Gas damping and fluctuating force only (`s_intensity` is ignored).
/// `fitted_rate` is the energy relaxation rate; run for several 1/gamma_bg
/// so the second-half average is an equilibrium estimate.
pub fn simulate_gas_langevin(cfg: &SdeConfig, exec: Execution) -> Result<EnsembleStats> {
    cfg.validate_for_fit()?;
    let d = gas_dynamics(cfg);
    let rows = run_ensemble(cfg, &d, exec);
    Ok(reduce(cfg, &d, rows, Fit::Relaxation, cfg.dt, cfg.stride()))
}

/// Analytic parametric heating rate (1/4) omega_z^2 S_I for this config.
pub fn predicted_parametric_rate(cfg: &SdeConfig) -> f64 {
    intensity_heating_rate(cfg.omega_z, cfg.s_intensity)
}

fn check_growth(cfg: &SdeConfig) -> Result<()> {
    let per_period = predicted_parametric_rate(cfg) * 2.0 * PI / cfg.omega_z;
    if per_period > MAX_GROWTH_PER_PERIOD {
        return Err(Error::GrowthTooFast(format!(
            "predicted growth {per_period:.3} per period exceeds {MAX_GROWTH_PER_PERIOD}"
        )));
    }
    Ok(())
}

/// Stiffness modulation only (no gas). `fitted_rate` is the exponential
/// growth rate of the mean energy.
pub fn simulate_parametric_heating(cfg: &SdeConfig, exec: Execution) -> Result<EnsembleStats> {
    cfg.validate_for_fit()?;
    check_growth(cfg)?;
    let d = parametric_dynamics(cfg);
    let rows = run_ensemble(cfg, &d, exec);
    Ok(reduce(cfg, &d, rows, Fit::Growth, cfg.dt, cfg.stride()))
}

/// Undamped, unmodulated ensemble; returns the mean energy series. Used to
/// check integrator energy conservation.
pub fn simulate_free(cfg: &SdeConfig, exec: Execution) -> Result<Vec<f64>> {
    cfg.validate()?;
    let d = Dynamics {
        omega_z: cfg.omega_z,
        mass: cfg.mass,
        gamma: 0.0,
        q: 0.0,
        s_modulation: 0.0,
    };
    Ok(column_means(&run_ensemble(cfg, &d, exec)))
}

/// Which oracle a step-refinement study exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Gas,
    Parametric,
}

/// Runs `cfg` at dt and at dt/2 with Brownian-coupled noise: each coarse
/// normal is (n_a + n_b) / sqrt(2) of the two fine normals spanning it, so
/// the difference between the two fitted rates isolates discretization error.
/// Returns `(coarse, fine)`.
pub fn halved_step_pair(
    cfg: &SdeConfig,
    kind: OracleKind,
    exec: Execution,
) -> Result<(EnsembleStats, EnsembleStats)> {
    cfg.validate_for_fit()?;
    let (d, fit) = match kind {
        OracleKind::Gas => (gas_dynamics(cfg), Fit::Relaxation),
        OracleKind::Parametric => {
            check_growth(cfg)?;
            (parametric_dynamics(cfg), Fit::Growth)
        }
    };
    let stride = cfg.stride();
    let fine_cfg = SdeConfig {
        dt: 0.5 * cfg.dt,
        n_steps: 2 * cfg.n_steps,
        ..*cfg
    };
    let pairs = exec.map_indexed(cfg.n_trajectories, |i| {
        let start = initial_state(&d, cfg.initial_energy, &mut trajectory_rng(cfg.seed, i));
        let mut rng = trajectory_rng(cfg.seed, i);
        // skip the phase draw so both paths begin from the same state
        initial_state(&d, cfg.initial_energy, &mut rng);
        let mut fine_normals = Vec::with_capacity(2 * cfg.n_steps);
        for _ in 0..2 * cfg.n_steps {
            fine_normals.push(draw(&d, &mut rng));
        }
        let mut it = fine_normals.iter();
        let fine = integrate(&d, start, fine_cfg.dt, fine_cfg.n_steps, 2 * stride, || {
            *it.next().unwrap()
        });
        let mut pairs = fine_normals.chunks_exact(2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let coarse = integrate(&d, start, cfg.dt, cfg.n_steps, stride, || {
            let p = pairs.next().unwrap();
            ((p[0].0 + p[1].0) * s, (p[0].1 + p[1].1) * s)
        });
        (coarse, fine)
    });
    let (coarse, fine): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok((
        reduce(cfg, &d, coarse, fit, cfg.dt, stride),
        reduce(&fine_cfg, &d, fine, fit, fine_cfg.dt, 2 * stride),
    ))
}
