//! Physical constants and the handful of unit conversions needed to read
//! laboratory-style parameters (torr, mW/um^2, kHz, um, ...).
//!
//! Everything downstream of this module works in SI. Frequencies, detunings,
//! linewidths and rates all live in a single unit, s^-1: a value quoted as
//! "X kHz" becomes `X * 1e3` s^-1 with no 2*pi factor, which is the
//! convention under which the cavity design point is self-consistent.

use crate::error::{Error, Result};

/// CODATA 2018 values, pinned so golden tests are bit-stable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Speed of light, m/s.
    pub c: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub kb: f64,
    /// Atomic mass unit, kg.
    pub amu: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    c: C,
    eps0: EPS0,
    hbar: HBAR,
    kb: KB,
    amu: AMU,
};

pub const C: f64 = 2.997_924_58e8;
pub const EPS0: f64 = 8.854_187_812_8e-12;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const KB: f64 = 1.380_649e-23;
pub const AMU: f64 = 1.660_539_066_60e-27;

pub const PASCAL_PER_TORR: f64 = 133.322;
/// 1 mW/um^2 = 1e-3 W / 1e-12 m^2.
pub const WATT_PER_M2_PER_MW_PER_UM2: f64 = 1e9;

/// A rate, frequency, detuning or linewidth in s^-1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct AngularRate(pub f64);

impl AngularRate {
    pub fn per_second(value: f64) -> Self {
        AngularRate(value)
    }

    /// "X kHz" as quoted for cavity parameters: X * 1e3 s^-1, no 2*pi.
    pub fn from_khz(khz: f64) -> Self {
        AngularRate(khz * 1e3)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn to_khz(self) -> f64 {
        self.0 * 1e-3
    }
}

fn non_negative(value: f64, what: &str) -> Result<f64> {
    if value.is_nan() || value < 0.0 {
        return Err(Error::domain(format!(
            "{what} must be non-negative, got {value}"
        )));
    }
    Ok(value)
}

pub fn convert_pressure(torr: f64) -> Result<f64> {
    Ok(non_negative(torr, "pressure")? * PASCAL_PER_TORR)
}

pub fn pascal_to_torr(pa: f64) -> f64 {
    pa / PASCAL_PER_TORR
}

/// mW/um^2 to W/m^2.
pub fn convert_intensity(mw_per_um2: f64) -> Result<f64> {
    Ok(non_negative(mw_per_um2, "intensity")? * WATT_PER_M2_PER_MW_PER_UM2)
}

pub fn intensity_to_mw_per_um2(w_per_m2: f64) -> f64 {
    w_per_m2 / WATT_PER_M2_PER_MW_PER_UM2
}

pub fn micrometres(um: f64) -> f64 {
    um / 1e6
}

pub fn nanometres(nm: f64) -> f64 {
    nm / 1e9
}

pub fn centimetres(cm: f64) -> f64 {
    cm / 1e2
}

pub fn milliwatts(mw: f64) -> f64 {
    mw / 1e3
}
