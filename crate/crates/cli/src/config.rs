//! INI-style run configuration.
//!
//! Sections `[disk]`, `[beams]`, `[cavity]`, `[environment]` are required,
//! `[oracle]` is optional. Values use laboratory units (see `KEYS`) and are
//! converted to SI when the `RunConfig` is built. Unknown sections or keys,
//! duplicates and missing keys are rejected with the offending line.

use std::collections::BTreeMap;
use std::fmt;

use optospring::units::{
    centimetres, convert_intensity, convert_pressure, micrometres, milliwatts, nanometres,
    AngularRate, AMU, KB,
};
use optospring::{CavityConfig, DiskMirror, Environment, SdeConfig, TrapBeams};

pub const BUNDLED: &str = include_str!("../configs/design_point.ini");

/// Every accepted `section.key` with the unit it is read in.
pub const KEYS: &[(&str, &str)] = &[
    ("disk.diameter", "um"),
    ("disk.height", "um"),
    ("disk.mass", "kg"),
    ("disk.permittivity", "relative"),
    ("disk.reflectivity", "1"),
    ("beams.intensity_x", "mW/um^2"),
    ("beams.intensity_y", "mW/um^2"),
    ("beams.waist_x", "um"),
    ("beams.waist_y", "um"),
    ("beams.waist_z", "um"),
    ("beams.wavelength", "um"),
    ("beams.s_intensity", "1/Hz"),
    ("beams.s_position", "um^2/Hz"),
    ("beams.theta_z", "rad"),
    ("cavity.length", "cm"),
    ("cavity.r_fixed", "1"),
    ("cavity.wavelength", "nm"),
    ("cavity.power", "mW"),
    ("cavity.detuning", "kHz"),
    ("cavity.linewidth", "kHz"),
    ("environment.pressure", "torr"),
    ("environment.gas_mass", "amu"),
    ("environment.temperature", "K"),
    ("oracle.kind", "gas|parametric"),
    ("oracle.damping_ratio", "1"),
    ("oracle.s_intensity", "1/Hz"),
    ("oracle.dt", "s"),
    ("oracle.steps", "count"),
    ("oracle.trajectories", "count"),
    ("oracle.seed", "integer"),
    ("oracle.initial_energy", "kB T"),
];

const REQUIRED_SECTIONS: &[&str] = &["disk", "beams", "cavity", "environment"];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, key: Option<&str>, message: impl Into<String>) -> Self {
        ConfigError {
            line: Some(line),
            key: key.map(str::to_string),
            message: message.into(),
        }
    }

    fn key(key: &str, message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            key: Some(key.to_string()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config")?;
        if let Some(line) = self.line {
            write!(f, " line {line}")?;
        }
        if let Some(key) = &self.key {
            write!(f, " key `{key}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed but not yet interpreted key/value pairs, keyed by `section.key`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
    sections: Vec<String>,
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        let mut section: Option<String> = None;
        for (idx, line) in text.lines().enumerate() {
            let n = idx + 1;
            let line = strip_comment(line).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::at(n, None, "unterminated section header"))?
                    .trim();
                if !KEYS.iter().any(|(k, _)| k.split('.').next() == Some(name)) {
                    return Err(ConfigError::at(
                        n,
                        None,
                        format!("unknown section [{name}]"),
                    ));
                }
                if raw.sections.iter().any(|s| s == name) {
                    return Err(ConfigError::at(
                        n,
                        None,
                        format!("duplicate section [{name}]"),
                    ));
                }
                raw.sections.push(name.to_string());
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::at(n, None, format!("expected `key = value`, got `{line}`"))
            })?;
            let key = key.trim();
            let value = value.trim();
            let section = section
                .as_deref()
                .ok_or_else(|| ConfigError::at(n, Some(key), "key outside of any section"))?;
            let path = format!("{section}.{key}");
            if !KEYS.iter().any(|(k, _)| *k == path) {
                return Err(ConfigError::at(n, Some(&path), "unknown key"));
            }
            if value.is_empty() {
                return Err(ConfigError::at(n, Some(&path), "missing value"));
            }
            if raw.entries.contains_key(&path) {
                return Err(ConfigError::at(n, Some(&path), "duplicate key"));
            }
            raw.entries.insert(
                path,
                Entry {
                    value: value.to_string(),
                    line: n,
                },
            );
        }
        for s in REQUIRED_SECTIONS {
            if !raw.sections.iter().any(|x| x == s) {
                return Err(ConfigError {
                    line: None,
                    key: None,
                    message: format!("missing section [{s}]"),
                });
            }
        }
        Ok(raw)
    }

    fn has_section(&self, name: &str) -> bool {
        self.sections.iter().any(|s| s == name)
    }

    fn text(&self, path: &str) -> Result<(&str, usize), ConfigError> {
        self.entries
            .get(path)
            .map(|e| (e.value.as_str(), e.line))
            .ok_or_else(|| ConfigError::key(path, "missing key"))
    }

    pub fn number(&self, path: &str) -> Result<f64, ConfigError> {
        let (text, line) = self.text(path)?;
        let v: f64 = text
            .parse()
            .map_err(|_| ConfigError::at(line, Some(path), format!("`{text}` is not a number")))?;
        if !v.is_finite() {
            return Err(ConfigError::at(line, Some(path), "value must be finite"));
        }
        Ok(v)
    }

    fn count(&self, path: &str) -> Result<u64, ConfigError> {
        let (text, line) = self.text(path)?;
        text.parse().map_err(|_| {
            ConfigError::at(
                line,
                Some(path),
                format!("`{text}` is not a non-negative integer"),
            )
        })
    }

    /// Overrides a numeric key, as used by sweeps. The key must exist,
    /// be numeric, and already be present in the file.
    pub fn set_number(&mut self, path: &str, value: f64) -> Result<(), ConfigError> {
        if !KEYS.iter().any(|(k, _)| *k == path) {
            return Err(ConfigError::key(path, "unresolvable parameter path"));
        }
        if matches!(
            path,
            "oracle.kind" | "oracle.steps" | "oracle.trajectories" | "oracle.seed"
        ) {
            return Err(ConfigError::key(
                path,
                "parameter is not a continuous numeric field",
            ));
        }
        let entry = self
            .entries
            .get_mut(path)
            .ok_or_else(|| ConfigError::key(path, "parameter not present in config"))?;
        entry.value = format!("{value:e}");
        Ok(())
    }

    fn with_line<T>(&self, path: &str, r: optospring::Result<T>) -> Result<T, ConfigError> {
        r.map_err(|e| {
            let line = self.entries.get(path).map(|e| e.line);
            ConfigError {
                line,
                key: Some(path.to_string()),
                message: e.to_string(),
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Gas,
    Parametric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSpec {
    pub kind: OracleKind,
    pub damping_ratio: f64,
    pub s_intensity: f64,
    pub dt: f64,
    pub steps: usize,
    pub trajectories: usize,
    pub seed: u64,
    /// In units of kB T.
    pub initial_energy: f64,
}

impl OracleSpec {
    pub fn sde_config(&self, omega_z: f64, env: &Environment, disk: &DiskMirror) -> SdeConfig {
        SdeConfig {
            omega_z,
            gamma_bg: match self.kind {
                OracleKind::Gas => self.damping_ratio * omega_z,
                OracleKind::Parametric => 0.0,
            },
            temperature: env.temperature,
            mass: disk.mass,
            s_intensity: match self.kind {
                OracleKind::Gas => 0.0,
                OracleKind::Parametric => self.s_intensity,
            },
            dt: self.dt,
            n_steps: self.steps,
            n_trajectories: self.trajectories,
            seed: self.seed,
            initial_energy: self.initial_energy * KB * env.temperature,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub disk: DiskMirror,
    pub beams: TrapBeams,
    pub cavity: CavityConfig,
    pub environment: Environment,
    pub oracle: Option<OracleSpec>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        RunConfig::from_raw(&RawConfig::parse(text)?)
    }

    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let num = |k: &str| raw.number(k);

        let disk = DiskMirror {
            diameter: micrometres(num("disk.diameter")?),
            height: micrometres(num("disk.height")?),
            mass: num("disk.mass")?,
            relative_permittivity: num("disk.permittivity")?,
            reflectivity: num("disk.reflectivity")?,
        };
        raw.with_line("disk.diameter", disk.validate())?;

        let intensity =
            |k: &str| -> Result<f64, ConfigError> { raw.with_line(k, convert_intensity(num(k)?)) };
        let beams = TrapBeams {
            intensity_x: intensity("beams.intensity_x")?,
            intensity_y: intensity("beams.intensity_y")?,
            waist_x: micrometres(num("beams.waist_x")?),
            waist_y: micrometres(num("beams.waist_y")?),
            waist_z: micrometres(num("beams.waist_z")?),
            wavelength: micrometres(num("beams.wavelength")?),
            s_intensity: num("beams.s_intensity")?,
            s_position: num("beams.s_position")? / 1e12,
            theta_z: num("beams.theta_z")?,
        };
        raw.with_line("beams.intensity_x", beams.validate())?;

        let cavity = CavityConfig {
            length: centimetres(num("cavity.length")?),
            r_fixed: num("cavity.r_fixed")?,
            r_moving: disk.reflectivity,
            wavelength: nanometres(num("cavity.wavelength")?),
            power: milliwatts(num("cavity.power")?),
            detuning: AngularRate::from_khz(num("cavity.detuning")?).value(),
            linewidth: AngularRate::from_khz(num("cavity.linewidth")?).value(),
        };
        raw.with_line("cavity.length", cavity.validate())?;

        let environment = Environment {
            pressure: raw.with_line(
                "environment.pressure",
                convert_pressure(num("environment.pressure")?),
            )?,
            gas_mass: num("environment.gas_mass")? * AMU,
            temperature: num("environment.temperature")?,
        };
        raw.with_line("environment.temperature", environment.validate())?;

        let oracle = if raw.has_section("oracle") {
            let (kind_text, line) = raw.text("oracle.kind")?;
            let kind = match kind_text {
                "gas" => OracleKind::Gas,
                "parametric" => OracleKind::Parametric,
                other => {
                    return Err(ConfigError::at(
                        line,
                        Some("oracle.kind"),
                        format!("expected `gas` or `parametric`, got `{other}`"),
                    ))
                }
            };
            Some(OracleSpec {
                kind,
                damping_ratio: num("oracle.damping_ratio")?,
                s_intensity: num("oracle.s_intensity")?,
                dt: num("oracle.dt")?,
                steps: raw.count("oracle.steps")? as usize,
                trajectories: raw.count("oracle.trajectories")? as usize,
                seed: raw.count("oracle.seed")?,
                initial_energy: num("oracle.initial_energy")?,
            })
        } else {
            None
        };

        Ok(RunConfig {
            disk,
            beams,
            cavity,
            environment,
            oracle,
        })
    }
}
