//! Crossed elliptical Gaussian tweezer: intensity field, gradient-force
//! potential, trap frequencies and the disk's wobble frequency.
//!
//! One beam travels along x (polarized along y), the other along y
//! (polarized along x). Both have their tight waist along z, the disk axis.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{moment_of_inertia_x, DiskMirror, Polarizability};
use crate::units::{C, EPS0};

/// Finite-difference step as a fraction of the waist along the probed axis.
pub const FD_STEP_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapBeams {
    /// On-axis intensity of the x-travelling beam, W/m^2.
    pub intensity_x: f64,
    /// On-axis intensity of the y-travelling beam, W/m^2.
    pub intensity_y: f64,
    pub waist_x: f64,
    pub waist_y: f64,
    pub waist_z: f64,
    pub wavelength: f64,
    /// Relative intensity noise spectrum at twice the axial frequency, 1/Hz.
    pub s_intensity: f64,
    /// Trap-centre position noise spectrum at the axial frequency, m^2/Hz.
    pub s_position: f64,
    /// Residual angle between beam and disk face, rad.
    pub theta_z: f64,
}

impl TrapBeams {
    /// Nd:YAG at 80 mW/um^2 per beam, waists 200/200/8 um.
    pub fn design_point() -> Self {
        TrapBeams {
            intensity_x: 8.0e10,
            intensity_y: 8.0e10,
            waist_x: 200e-6,
            waist_y: 200e-6,
            waist_z: 8e-6,
            wavelength: 1.064e-6,
            s_intensity: 1e-12,
            s_position: 1e-22,
            theta_z: 1e-2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("intensity_x", self.intensity_x),
            ("intensity_y", self.intensity_y),
            ("waist_x", self.waist_x),
            ("waist_y", self.waist_y),
            ("waist_z", self.waist_z),
            ("wavelength", self.wavelength),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!(
                    "beam {name} must be positive, got {v}"
                )));
            }
        }
        let non_negative = [
            ("s_intensity", self.s_intensity),
            ("s_position", self.s_position),
            ("theta_z", self.theta_z),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(format!(
                    "beam {name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn rayleigh_range(&self, waist: f64) -> f64 {
        PI * waist * waist / self.wavelength
    }

    pub fn total_intensity(&self) -> f64 {
        self.intensity_x + self.intensity_y
    }
}

/// Two-beam intensity at `r = [x, y, z]`, W/m^2.
pub fn intensity(r: [f64; 3], beams: &TrapBeams) -> f64 {
    let [x, y, z] = r;
    let xr = beams.rayleigh_range(beams.waist_x);
    let yr = beams.rayleigh_range(beams.waist_y);
    let zr = beams.rayleigh_range(beams.waist_z);

    // beam travelling along x: spreads in y and z as |x| grows
    let gy = 1.0 + (x / yr).powi(2);
    let gz = 1.0 + (x / zr).powi(2);
    let along_x = beams.intensity_x
        * (-2.0 * y * y / (beams.waist_y.powi(2) * gy)
            - 2.0 * z * z / (beams.waist_z.powi(2) * gz))
            .exp()
        / (gy * gz).sqrt();

    let hx = 1.0 + (y / xr).powi(2);
    let hz = 1.0 + (y / zr).powi(2);
    let along_y = beams.intensity_y
        * (-2.0 * x * x / (beams.waist_x.powi(2) * hx)
            - 2.0 * z * z / (beams.waist_z.powi(2) * hz))
            .exp()
        / (hx * hz).sqrt();

    along_x + along_y
}

/// Gradient-force potential -alpha_perp I(r) / (2 eps0 c), J.
pub fn potential(r: [f64; 3], beams: &TrapBeams, pol: &Polarizability) -> f64 {
    -pol.perp * intensity(r, beams) / (2.0 * EPS0 * C)
}

/// Depth of the axial well, V(0,0,inf) - V(0,0,0).
pub fn potential_depth_z(beams: &TrapBeams, pol: &Polarizability) -> f64 {
    pol.perp * beams.total_intensity() / (2.0 * EPS0 * C)
}

fn second_difference(f: &impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h)
}

/// d^2V/dmu^2 at the origin along `axis` (0 = x, 1 = y, 2 = z), J/m^2.
/// Central differences at steps h and h/2 combined by Richardson extrapolation.
pub fn potential_curvature(beams: &TrapBeams, pol: &Polarizability, axis: usize, step: f64) -> f64 {
    let along = |s: f64| {
        let mut r = [0.0; 3];
        r[axis] = s;
        potential(r, beams, pol)
    };
    let coarse = second_difference(&along, step);
    let fine = second_difference(&along, 0.5 * step);
    (4.0 * fine - coarse) / 3.0
}

fn waist(beams: &TrapBeams, axis: usize) -> f64 {
    match axis {
        0 => beams.waist_x,
        1 => beams.waist_y,
        _ => beams.waist_z,
    }
}

fn axis_name(axis: usize) -> char {
    ['x', 'y', 'z'][axis]
}

/// sqrt(curvature / m) along one axis from the numerical Hessian.
pub fn numerical_frequency(
    beams: &TrapBeams,
    pol: &Polarizability,
    disk: &DiskMirror,
    axis: usize,
) -> Result<f64> {
    let step = FD_STEP_FRACTION * waist(beams, axis);
    let curvature = potential_curvature(beams, pol, axis, step);
    if !(curvature > 0.0) {
        return Err(Error::UntrappedAxis {
            axis: axis_name(axis),
            curvature,
        });
    }
    Ok((curvature / disk.mass).sqrt())
}

/// Axial (cavity-axis) trap frequency, s^-1.
pub fn axial_frequency(beams: &TrapBeams, pol: &Polarizability, disk: &DiskMirror) -> f64 {
    (2.0 * pol.perp * beams.total_intensity() / (disk.mass * C * EPS0 * beams.waist_z.powi(2)))
        .sqrt()
}

/// `(omega_x, omega_y)` from the numerical Hessian; includes the curvature
/// contributed by beam divergence as well as the Gaussian profile.
pub fn transverse_frequencies(
    beams: &TrapBeams,
    pol: &Polarizability,
    disk: &DiskMirror,
) -> Result<(f64, f64)> {
    Ok((
        numerical_frequency(beams, pol, disk, 0)?,
        numerical_frequency(beams, pol, disk, 1)?,
    ))
}

/// Small-angle rocking frequency about y, restored by the anisotropy torque
/// of the y-travelling beam alone.
pub fn wobble_frequency(beams: &TrapBeams, pol: &Polarizability, disk: &DiskMirror) -> Result<f64> {
    if pol.perp < pol.axial {
        return Err(Error::domain(format!(
            "wobble needs alpha_perp >= alpha_z, got {:e} < {:e}",
            pol.perp, pol.axial
        )));
    }
    let inertia = moment_of_inertia_x(disk);
    if !(inertia > 0.0) {
        return Err(Error::domain("wobble needs a positive moment of inertia"));
    }
    Ok((12.0 * beams.intensity_y * (pol.perp - pol.axial) / (EPS0 * C * inertia)).sqrt())
}

/// Checks the "field varies little over the disk" conditions h < w0z and
/// d < x_r, y_r. Violations are reported, not rejected.
pub fn validity_warnings(disk: &DiskMirror, beams: &TrapBeams) -> Vec<String> {
    let mut out = Vec::new();
    if disk.height >= beams.waist_z {
        out.push(format!(
            "disk height {:e} m is not below the axial waist {:e} m",
            disk.height, beams.waist_z
        ));
    }
    for (name, range) in [
        ("x_r", beams.rayleigh_range(beams.waist_x)),
        ("y_r", beams.rayleigh_range(beams.waist_y)),
    ] {
        if disk.diameter >= range {
            out.push(format!(
                "disk diameter {:e} m is not below the Rayleigh range {name} = {range:e} m",
                disk.diameter
            ));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrapCharacterization {
    pub omega_z: f64,
    pub omega_x: f64,
    pub omega_y: f64,
    pub omega_wob: f64,
    pub potential_depth_z: f64,
    pub warnings: Vec<String>,
}

impl TrapCharacterization {
    /// omega_z / omega_wob; large values rule out wobble-to-axial parametric coupling.
    pub fn wobble_separation(&self) -> f64 {
        self.omega_z / self.omega_wob
    }
}

pub fn characterize(
    disk: &DiskMirror,
    beams: &TrapBeams,
    pol: &Polarizability,
) -> Result<TrapCharacterization> {
    beams.validate()?;
    let warnings = validity_warnings(disk, beams);
    for w in &warnings {
        log::warn!("{w}");
    }
    let (omega_x, omega_y) = transverse_frequencies(beams, pol, disk)?;
    Ok(TrapCharacterization {
        omega_z: axial_frequency(beams, pol, disk),
        omega_x,
        omega_y,
        omega_wob: wobble_frequency(beams, pol, disk)?,
        potential_depth_z: potential_depth_z(beams, pol),
        warnings,
    })
}
