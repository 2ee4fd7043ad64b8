//! The Bragg disk modelled as an effective dielectric spheroid.
//!
//! The layered stack is replaced by a uniform slab of effective permittivity.
//! Polarizabilities use the static spheroid depolarization factors together
//! with the cylinder volume of the real disk.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::units::EPS0;

/// Below this value the closed-form depolarization factor is replaced by its
/// Taylor series. The closed form loses ~8 digits to cancellation by e = 1e-4.
pub const SERIES_THRESHOLD: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskMirror {
    /// m
    pub diameter: f64,
    /// m
    pub height: f64,
    /// kg, an independent input (not derived from density)
    pub mass: f64,
    pub relative_permittivity: f64,
    pub reflectivity: f64,
}

impl DiskMirror {
    pub fn new(
        diameter: f64,
        height: f64,
        mass: f64,
        relative_permittivity: f64,
        reflectivity: f64,
    ) -> Result<Self> {
        let disk = DiskMirror {
            diameter,
            height,
            mass,
            relative_permittivity,
            reflectivity,
        };
        disk.validate()?;
        Ok(disk)
    }

    /// The 100 um x 4 um SiO2/Ta2O5 stack with eps_r = 5.9.
    pub fn design_point() -> Self {
        DiskMirror {
            diameter: 100e-6,
            height: 4e-6,
            mass: 1.48e-10,
            relative_permittivity: 5.9,
            reflectivity: 0.9998,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.diameter > 0.0 && self.height > 0.0) {
            return Err(Error::domain("disk diameter and height must be positive"));
        }
        if self.diameter <= self.height {
            return Err(Error::domain(format!(
                "disk must be oblate (d > h), got d = {:e} m, h = {:e} m",
                self.diameter, self.height
            )));
        }
        if !(self.mass >= 0.0) {
            return Err(Error::domain("disk mass must be non-negative"));
        }
        if !(self.relative_permittivity >= 1.0) {
            return Err(Error::domain("relative permittivity must be >= 1"));
        }
        if !(self.reflectivity > 0.0 && self.reflectivity <= 1.0) {
            return Err(Error::domain("disk reflectivity must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Face area pi (d/2)^2, used for gas collisions and photon flux.
    pub fn face_area(&self) -> f64 {
        PI * (0.5 * self.diameter).powi(2)
    }

    /// Cylinder volume pi (d/2)^2 h.
    pub fn volume(&self) -> f64 {
        self.face_area() * self.height
    }
}

/// Static polarizability tensor components, C m^2 / V.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarizability {
    /// Field in the disk plane.
    pub perp: f64,
    /// Field along the disk axis.
    pub axial: f64,
}

/// e = sqrt((d/h)^2 - 1); zero for a sphere.
pub fn eccentricity(disk: &DiskMirror) -> Result<f64> {
    if !(disk.height > 0.0) || disk.diameter <= disk.height {
        return Err(Error::domain(format!(
            "eccentricity needs an oblate disk (d > h), got d = {:e}, h = {:e}",
            disk.diameter, disk.height
        )));
    }
    let ratio = disk.diameter / disk.height;
    Ok((ratio * ratio - 1.0).sqrt())
}

/// Depolarization factors `(N_z, N_perp)` of an oblate spheroid with
/// eccentricity parameter `e`. Always satisfies `N_z + 2 N_perp = 1`.
pub fn depolarization_factors(e: f64) -> (f64, f64) {
    debug_assert!(e >= 0.0);
    let nz = if e < SERIES_THRESHOLD {
        let e2 = e * e;
        1.0 / 3.0 + e2 * (2.0 / 15.0 + e2 * (-2.0 / 35.0 + e2 * (2.0 / 63.0)))
    } else {
        (1.0 + e * e) * (e - e.atan()) / (e * e * e)
    };
    (nz, 0.5 * (1.0 - nz))
}

fn component(volume: f64, eps_r: f64, n: f64) -> f64 {
    let chi = eps_r - 1.0;
    EPS0 * volume * chi / (1.0 + n * chi)
}

pub fn polarizability(disk: &DiskMirror) -> Result<Polarizability> {
    let e = eccentricity(disk)?;
    let (nz, nperp) = depolarization_factors(e);
    let v = disk.volume();
    Ok(Polarizability {
        perp: component(v, disk.relative_permittivity, nperp),
        axial: component(v, disk.relative_permittivity, nz),
    })
}

/// m (3 d^2 / 4 + h^2), the rocking-mode inertia that enters the wobble
/// frequency. Note: carries no 1/12 factor relative to a uniform disk.
pub fn moment_of_inertia_x(disk: &DiskMirror) -> f64 {
    disk.mass * (0.75 * disk.diameter * disk.diameter + disk.height * disk.height)
}
