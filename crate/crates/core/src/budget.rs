//! Noise budget: heating and damping channels of the trapped mirror and the
//! final occupation once the thermal reservoir is accounted for.
//!
//! Only intensity noise and gas collisions count as mechanical damping
//! (`gamma_m`). Beam pointing and photon scattering are reported alongside
//! but stay out of `gamma_m`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::cavity::{evaluate_cooling, CavityConfig};
use crate::error::{Error, Result};
use crate::geometry::{polarizability, DiskMirror};
use crate::trap::{characterize, TrapBeams};
use crate::units::{convert_pressure, AMU, C, HBAR, KB};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    /// Pa
    pub pressure: f64,
    /// Mass of one gas molecule, kg.
    pub gas_mass: f64,
    /// K
    pub temperature: f64,
}

impl Environment {
    /// N2 at 1e-6 torr and 300 K.
    pub fn design_point() -> Self {
        Environment {
            pressure: convert_pressure(1e-6).expect("positive pressure"),
            gas_mass: 28.0 * AMU,
            temperature: 300.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pressure >= 0.0 && self.pressure.is_finite()) {
            return Err(Error::domain("pressure must be non-negative"));
        }
        if !(self.gas_mass > 0.0) {
            return Err(Error::domain("gas molecule mass must be positive"));
        }
        if !(self.temperature > 0.0) {
            return Err(Error::domain("temperature must be positive"));
        }
        Ok(())
    }

    /// rms molecular speed sqrt(3 kB T / m_g).
    pub fn gas_speed(&self) -> f64 {
        (3.0 * KB * self.temperature / self.gas_mass).sqrt()
    }
}

/// Parametric heating rate from relative intensity noise, (1/4) omega_z^2 S_I.
pub fn intensity_heating_rate(omega_z: f64, s_intensity: f64) -> f64 {
    0.25 * omega_z * omega_z * s_intensity
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingHeating {
    /// (1/4) omega_z^4 m S_x, W.
    pub power: f64,
    /// `power / (hbar omega_z)`, quanta per second.
    pub quanta_rate: f64,
}

/// Heating from trap-centre fluctuations. The closed form has units of power;
/// the quanta-rate reading divides by one phonon energy.
pub fn pointing_heating_rate(omega_z: f64, mass: f64, s_position: f64) -> PointingHeating {
    let power = 0.25 * omega_z.powi(4) * mass * s_position;
    let quanta_rate = if power == 0.0 {
        0.0
    } else {
        power / (HBAR * omega_z)
    };
    PointingHeating { power, quanta_rate }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringNoise {
    /// Photons per second crossing the disk face area.
    pub photon_flux: f64,
    /// sqrt(2 n0) hbar k theta_z, N / sqrt(Hz).
    pub momentum_noise: f64,
    /// Momentum-diffusion power over one phonon energy, s^-1.
    pub quanta_rate: f64,
}

/// Axial momentum noise from Poissonian trap photons striking the disk at
/// grazing angle `theta_z`.
///
/// n0 = I_total * pi (d/2)^2 / (hbar omega_trap). The rate is
/// (dp/dt)^2 / (2 m hbar omega_z): diffusion power divided by a phonon energy.
pub fn scattering_momentum_rate(
    beams: &TrapBeams,
    disk: &DiskMirror,
    omega_z: f64,
) -> ScatteringNoise {
    let omega_trap = 2.0 * PI * C / beams.wavelength;
    let k = 2.0 * PI / beams.wavelength;
    let photon_flux = beams.total_intensity() * disk.face_area() / (HBAR * omega_trap);
    let momentum_noise = (2.0 * photon_flux).sqrt() * HBAR * k * beams.theta_z;
    let quanta_rate = if momentum_noise == 0.0 {
        0.0
    } else {
        momentum_noise * momentum_noise / (2.0 * disk.mass * HBAR * omega_z)
    };
    ScatteringNoise {
        photon_flux,
        momentum_noise,
        quanta_rate,
    }
}

/// 4 P A / (m v_g), s^-1.
pub fn gas_damping_rate(env: &Environment, disk: &DiskMirror) -> Result<f64> {
    env.validate()?;
    if !(disk.mass > 0.0) {
        return Err(Error::domain("gas damping needs a positive mirror mass"));
    }
    Ok(4.0 * env.pressure * disk.face_area() / (disk.mass * env.gas_speed()))
}

/// Occupation before cooling, kB T / (hbar omega_z).
pub fn reservoir_occupation(omega_z: f64, temperature: f64) -> f64 {
    KB * temperature / (HBAR * omega_z)
}

/// gamma_m n_R / (gamma_rp + gamma_m).
pub fn thermal_correction(
    gamma_m: f64,
    gamma_rp: f64,
    omega_z: f64,
    temperature: f64,
) -> Result<f64> {
    let denom = gamma_rp + gamma_m;
    if !(denom > 0.0) {
        return Err(Error::ZeroDenominator(
            "thermal correction (gamma_rp + gamma_m)",
        ));
    }
    if !(omega_z > 0.0) {
        return Err(Error::domain("thermal correction needs omega_z > 0"));
    }
    Ok(gamma_m * reservoir_occupation(omega_z, temperature) / denom)
}

/// Column order of the CSV row. Fixed; do not reorder.
pub const CSV_COLUMNS: &[&str] = &[
    "omega_z",
    "omega_x",
    "omega_y",
    "omega_wob",
    "kappa",
    "n_min",
    "gamma_rp",
    "gamma_rp_monochromatic",
    "gamma_i",
    "pointing_power",
    "pointing_quanta_rate",
    "scatter_rate",
    "gamma_bg",
    "gamma_m",
    "n_r",
    "thermal_correction",
    "n_final",
    "net_cooling",
];

/// Formula behind each report term.
pub const PROVENANCE: &[(&str, &str)] = &[
    ("omega_z", "sqrt(2 alpha_perp (I0x + I0y) / (m c eps0 w0z^2))"),
    ("omega_x", "sqrt(d2V/dx2 / m), Richardson central difference of -alpha_perp I(r) / (2 eps0 c)"),
    ("omega_y", "sqrt(d2V/dy2 / m), Richardson central difference of -alpha_perp I(r) / (2 eps0 c)"),
    ("omega_wob", "sqrt(12 I0y (alpha_perp - alpha_z) / (eps0 c I_x)), I_x = m (3 d^2 / 4 + h^2)"),
    ("kappa", "pi c / (F L), F = pi (R_f R_m)^(1/4) / (1 - sqrt(R_f R_m))"),
    ("n_min", "-(4 (Delta + omega_z)^2 + kappa^2) / (16 omega_z Delta)"),
    ("gamma_rp", "phase-diffusion backaction rate with sideband weights A_+-, positive = cooling"),
    ("gamma_rp_monochromatic", "gamma_rp at Gamma_L = 0"),
    ("gamma_i", "(1/4) omega_z^2 S_I(2 omega_z)"),
    ("pointing_power", "(1/4) omega_z^4 m S_x(omega_z), units W"),
    ("pointing_quanta_rate", "pointing_power / (hbar omega_z); caveat: the closed form has units of power"),
    ("scatter_rate", "(sqrt(2 n0) hbar k theta_z)^2 / (2 m hbar omega_z), n0 = I_total pi (d/2)^2 / (hbar omega_trap)"),
    ("gamma_bg", "4 P A / (m v_g), v_g = sqrt(3 kB T / m_g)"),
    ("gamma_m", "gamma_i + gamma_bg"),
    ("n_r", "kB T / (hbar omega_z)"),
    ("thermal_correction", "gamma_m n_r / (gamma_rp + gamma_m)"),
    ("n_final", "n_min + thermal_correction"),
];

pub fn provenance(term: &str) -> Option<&'static str> {
    PROVENANCE.iter().find(|(k, _)| *k == term).map(|(_, v)| *v)
}

/// Scientific notation with 9 significant digits; `nan` for undefined.
pub fn format_sci(value: Option<f64>) -> String {
    match value {
        Some(v) if v.is_finite() => format!("{v:.8e}"),
        _ => "nan".to_string(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseBudgetReport {
    pub omega_z: f64,
    pub omega_x: f64,
    pub omega_y: f64,
    pub omega_wob: f64,
    pub kappa: f64,
    pub n_min: Option<f64>,
    /// Signed: negative values are net heating.
    pub gamma_rp: f64,
    pub gamma_rp_monochromatic: f64,
    pub gamma_i: f64,
    pub pointing: PointingHeating,
    pub scattering: ScatteringNoise,
    pub gamma_bg: f64,
    pub gamma_m: f64,
    pub n_r: f64,
    pub thermal_correction: Option<f64>,
    pub n_final: Option<f64>,
    pub warnings: Vec<String>,
}

impl NoiseBudgetReport {
    pub fn net_cooling(&self) -> bool {
        self.gamma_rp > 0.0 && self.n_min.is_some()
    }

    fn values(&self) -> Vec<Option<f64>> {
        vec![
            Some(self.omega_z),
            Some(self.omega_x),
            Some(self.omega_y),
            Some(self.omega_wob),
            Some(self.kappa),
            self.n_min,
            Some(self.gamma_rp),
            Some(self.gamma_rp_monochromatic),
            Some(self.gamma_i),
            Some(self.pointing.power),
            Some(self.pointing.quanta_rate),
            Some(self.scattering.quanta_rate),
            Some(self.gamma_bg),
            Some(self.gamma_m),
            Some(self.n_r),
            self.thermal_correction,
            self.n_final,
        ]
    }

    /// Values in `CSV_COLUMNS` order.
    pub fn csv_fields(&self) -> Vec<String> {
        let mut out: Vec<String> = self.values().into_iter().map(format_sci).collect();
        out.push(if self.net_cooling() { "1" } else { "0" }.to_string());
        out
    }

    pub fn csv_row(&self) -> String {
        self.csv_fields().join(",")
    }

    /// `key = value` lines with provenance and flags.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let status = if self.net_cooling() {
            "ok"
        } else {
            "no net cooling"
        };
        let _ = writeln!(out, "status = {status}");
        for (key, value) in CSV_COLUMNS.iter().zip(self.csv_fields()) {
            let _ = writeln!(out, "{key} = {value}");
        }
        for (key, formula) in PROVENANCE {
            let _ = writeln!(out, "provenance.{key} = {formula}");
        }
        let _ = writeln!(
            out,
            "caveat.pointing = closed form evaluates to a power (W); quanta rate divides by hbar omega_z"
        );
        for w in &self.warnings {
            let _ = writeln!(out, "warning = {w}");
        }
        out
    }
}

/// Evaluates every channel at one configuration.
///
/// When the cavity does not cool (`gamma_rp <= 0` or blue detuning) the report
/// is still produced with `n_min`, `thermal_correction` and `n_final` unset.
pub fn full_budget(
    disk: &DiskMirror,
    beams: &TrapBeams,
    cavity: &CavityConfig,
    env: &Environment,
) -> Result<NoiseBudgetReport> {
    disk.validate().map_err(|e| e.in_term("disk"))?;
    env.validate().map_err(|e| e.in_term("environment"))?;
    let pol = polarizability(disk).map_err(|e| e.in_term("polarizability"))?;
    let trap = characterize(disk, beams, &pol).map_err(|e| e.in_term("trap"))?;
    let cooling =
        evaluate_cooling(cavity, trap.omega_z, disk.mass).map_err(|e| e.in_term("gamma_rp"))?;

    let gamma_i = intensity_heating_rate(trap.omega_z, beams.s_intensity);
    let gamma_bg = gas_damping_rate(env, disk).map_err(|e| e.in_term("gamma_bg"))?;
    let gamma_m = gamma_i + gamma_bg;
    let n_r = reservoir_occupation(trap.omega_z, env.temperature);

    let (n_min, thermal, n_final) = match cooling.n_min {
        Some(n_min) if cooling.net_cooling() => {
            let corr = thermal_correction(gamma_m, cooling.gamma_rp, trap.omega_z, env.temperature)
                .map_err(|e| e.in_term("thermal_correction"))?;
            (Some(n_min), Some(corr), Some(n_min + corr))
        }
        _ => (None, None, None),
    };

    Ok(NoiseBudgetReport {
        omega_z: trap.omega_z,
        omega_x: trap.omega_x,
        omega_y: trap.omega_y,
        omega_wob: trap.omega_wob,
        kappa: cooling.kappa,
        n_min,
        gamma_rp: cooling.gamma_rp,
        gamma_rp_monochromatic: cooling.gamma_rp_monochromatic,
        gamma_i,
        pointing: pointing_heating_rate(trap.omega_z, disk.mass, beams.s_position),
        scattering: scattering_momentum_rate(beams, disk, trap.omega_z),
        gamma_bg,
        gamma_m,
        n_r,
        thermal_correction: thermal,
        n_final,
        warnings: trap.warnings,
    })
}
