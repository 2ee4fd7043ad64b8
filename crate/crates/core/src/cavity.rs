//! Fabry-Perot side of the system: cavity linewidth, the backaction-limited
//! phonon number, and the dynamical cooling rate for a drive laser with
//! phase-diffusion linewidth.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::units::C;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityConfig {
    /// m
    pub length: f64,
    pub r_fixed: f64,
    pub r_moving: f64,
    /// Drive laser wavelength, m.
    pub wavelength: f64,
    /// Input power, W.
    pub power: f64,
    /// omega_laser - omega_cavity, s^-1. Negative is red.
    pub detuning: f64,
    /// Phase-diffusion linewidth Gamma_L, s^-1.
    pub linewidth: f64,
}

impl CavityConfig {
    /// 15 cm cavity at 852 nm, 0.1 mW, detuned -160 kHz, 10 kHz linewidth.
    pub fn design_point() -> Self {
        CavityConfig {
            length: 0.15,
            r_fixed: 0.999_998,
            r_moving: 0.9998,
            wavelength: 852e-9,
            power: 1e-4,
            detuning: -1.6e5,
            linewidth: 1e4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, r) in [("r_fixed", self.r_fixed), ("r_moving", self.r_moving)] {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::domain(format!("{name} must lie in (0, 1), got {r}")));
            }
        }
        if !(self.length > 0.0) {
            return Err(Error::domain("cavity length must be positive"));
        }
        if !(self.wavelength > 0.0) {
            return Err(Error::domain("cavity wavelength must be positive"));
        }
        if !(self.power >= 0.0) {
            return Err(Error::domain("input power must be non-negative"));
        }
        if !(self.linewidth >= 0.0) {
            return Err(Error::domain("laser linewidth must be non-negative"));
        }
        if !self.detuning.is_finite() {
            return Err(Error::domain("detuning must be finite"));
        }
        Ok(())
    }

    /// Cavity resonance 2 pi c / lambda, rad/s.
    pub fn omega_c(&self) -> f64 {
        2.0 * PI * C / self.wavelength
    }

    /// pi (R_f R_m)^(1/4) / (1 - sqrt(R_f R_m)).
    pub fn finesse(&self) -> Result<f64> {
        let product = self.r_fixed * self.r_moving;
        let loss = 1.0 - product.sqrt();
        if !(loss > 0.0) {
            return Err(Error::LosslessCavity(product));
        }
        Ok(PI * product.powf(0.25) / loss)
    }
}

/// kappa = pi c / (F L), s^-1.
pub fn cavity_linewidth(cav: &CavityConfig) -> Result<f64> {
    if !(cav.length > 0.0) {
        return Err(Error::domain("cavity length must be positive"));
    }
    Ok(PI * C / (cav.finesse()? * cav.length))
}

/// Backaction-limited occupation -(4(D + w)^2 + k^2) / (16 w D).
pub fn min_phonon_number(detuning: f64, omega_z: f64, kappa: f64) -> Result<f64> {
    if detuning.is_nan() || detuning >= 0.0 {
        return Err(Error::NotCooling(detuning));
    }
    if !(omega_z > 0.0) {
        return Err(Error::domain("min_phonon_number needs omega_z > 0"));
    }
    if !(kappa > 0.0) {
        return Err(Error::domain("min_phonon_number needs kappa > 0"));
    }
    Ok(-(4.0 * (detuning + omega_z).powi(2) + kappa * kappa) / (16.0 * omega_z * detuning))
}

/// Detuning that minimises the backaction-limited occupation,
/// -sqrt(omega_z^2 + kappa^2 / 4).
pub fn optimal_detuning(omega_z: f64, kappa: f64) -> f64 {
    -(omega_z * omega_z + 0.25 * kappa * kappa).sqrt()
}

fn sideband_weight(linewidth: f64, kappa: f64, detuning: f64, omega_z: f64, sign: f64) -> f64 {
    let g = linewidth;
    let broadened = 2.0 * g + kappa;
    let shifted = detuning + sign * omega_z;
    let num = (g + kappa) * broadened * broadened
        + 2.0 * g * (shifted * shifted + detuning * detuning)
        + kappa * omega_z * omega_z;
    num / (broadened * broadened + 4.0 * shifted * shifted)
}

/// Dynamical backaction rate for a phase-diffusing drive, s^-1.
/// Positive means net cooling, negative net heating.
///
/// Valid while the mirror excursion z satisfies |omega_c z / (omega_z L)| << 1.
pub fn cooling_rate_phase_noise(
    cav: &CavityConfig,
    omega_z: f64,
    kappa: f64,
    mass: f64,
) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::domain("cooling rate needs a positive mirror mass"));
    }
    if !(cav.length > 0.0) {
        return Err(Error::domain("cooling rate needs a positive cavity length"));
    }
    if omega_z == 0.0 {
        // no mechanical frequency, no sideband asymmetry
        return Ok(0.0);
    }
    let (g, d) = (cav.linewidth, cav.detuning);
    let a_minus = sideband_weight(g, kappa, d, omega_z, -1.0);
    let a_plus = sideband_weight(g, kappa, d, omega_z, 1.0);
    let prefactor = cav.omega_c() * kappa / (mass * omega_z * cav.length * cav.length);
    let broadened = 2.0 * g + kappa;
    let denom = (broadened * broadened + 4.0 * d * d) * (kappa * kappa + omega_z * omega_z);
    Ok(-prefactor * 8.0 * cav.power * (a_minus - a_plus) / denom)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingResult {
    pub kappa: f64,
    /// `None` when the drive is not red-detuned.
    pub n_min: Option<f64>,
    pub gamma_rp: f64,
    pub gamma_rp_monochromatic: f64,
}

impl CoolingResult {
    pub fn net_cooling(&self) -> bool {
        self.gamma_rp > 0.0
    }
}

pub fn evaluate_cooling(cav: &CavityConfig, omega_z: f64, mass: f64) -> Result<CoolingResult> {
    cav.validate()?;
    let kappa = cavity_linewidth(cav)?;
    let n_min = if cav.detuning < 0.0 {
        Some(min_phonon_number(cav.detuning, omega_z, kappa)?)
    } else {
        None
    };
    let gamma_rp = cooling_rate_phase_noise(cav, omega_z, kappa, mass)?;
    let mono = CavityConfig {
        linewidth: 0.0,
        ..*cav
    };
    let gamma_rp_monochromatic = cooling_rate_phase_noise(&mono, omega_z, kappa, mass)?;
    Ok(CoolingResult {
        kappa,
        n_min,
        gamma_rp,
        gamma_rp_monochromatic,
    })
}

/// Evenly spaced samples from `lo` to `hi`; a single point is `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Axes of the (detuning, linewidth) ratio surface, both in units of kappa.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    pub detuning_over_kappa: Vec<f64>,
    pub linewidth_over_kappa: Vec<f64>,
}

impl Default for SurfaceGrid {
    fn default() -> Self {
        SurfaceGrid::new((-3.0, -0.05, 121), (0.0, 2.0, 81)).expect("default grid is valid")
    }
}

impl SurfaceGrid {
    pub fn new(detuning: (f64, f64, usize), linewidth: (f64, f64, usize)) -> Result<Self> {
        let (dlo, dhi, dn) = detuning;
        let (llo, lhi, ln) = linewidth;
        if dn == 0 || ln == 0 {
            return Err(Error::domain(
                "surface grid needs at least one point per axis",
            ));
        }
        if !(dlo < 0.0 && dhi < 0.0) {
            return Err(Error::domain("surface detunings must be strictly negative"));
        }
        if !(llo >= 0.0 && lhi >= 0.0) {
            return Err(Error::domain("surface linewidths must be non-negative"));
        }
        if (dn > 1 && !(dlo < dhi)) || (ln > 1 && !(llo < lhi)) {
            return Err(Error::domain("surface grid ranges must be increasing"));
        }
        Ok(SurfaceGrid {
            detuning_over_kappa: linspace(dlo, dhi, dn),
            linewidth_over_kappa: linspace(llo, lhi, ln),
        })
    }
}

/// gamma_rp(D, G) / gamma_rp(D, 0) over a grid; rows follow linewidth.
#[derive(Debug, Clone, PartialEq)]
pub struct CoolingSurface {
    pub grid: SurfaceGrid,
    pub kappa: f64,
    /// `None` marks cells whose monochromatic reference rate vanishes.
    pub ratios: Vec<Vec<Option<f64>>>,
}

impl CoolingSurface {
    pub fn defined(&self) -> impl Iterator<Item = f64> + '_ {
        self.ratios.iter().flatten().filter_map(|r| *r)
    }
}

pub fn cooling_ratio_surface(
    grid: &SurfaceGrid,
    cav: &CavityConfig,
    omega_z: f64,
    mass: f64,
    exec: Execution,
) -> Result<CoolingSurface> {
    cav.validate()?;
    let kappa = cavity_linewidth(cav)?;
    // probe once so argument errors surface before the sweep
    cooling_rate_phase_noise(cav, omega_z, kappa, mass)?;
    let rate = |detuning: f64, linewidth: f64| {
        let c = CavityConfig {
            detuning,
            linewidth,
            ..*cav
        };
        cooling_rate_phase_noise(&c, omega_z, kappa, mass).unwrap_or(f64::NAN)
    };
    let ratios = exec.map_indexed(grid.linewidth_over_kappa.len(), |row| {
        let linewidth = grid.linewidth_over_kappa[row] * kappa;
        grid.detuning_over_kappa
            .iter()
            .map(|&d| {
                let detuning = d * kappa;
                let reference = rate(detuning, 0.0);
                let ratio = rate(detuning, linewidth) / reference;
                (reference != 0.0 && ratio.is_finite()).then_some(ratio)
            })
            .collect()
    });
    Ok(CoolingSurface {
        grid: grid.clone(),
        kappa,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const WZ: f64 = 1.235e5;
    const KAPPA: f64 = 2.02e5;
    const MASS: f64 = 1.48e-10;

    #[test]
    fn linewidth_design_point() {
        let k = cavity_linewidth(&CavityConfig::design_point()).unwrap();
        assert!((k / 2.0e5 - 1.0).abs() < 0.03, "{k}");
    }

    #[test]
    fn linewidth_limits() {
        let leaky = |eps: f64| CavityConfig {
            r_fixed: 1.0 - eps,
            r_moving: 1.0 - eps,
            ..CavityConfig::design_point()
        };
        // kappa ~ c eps / L as eps -> 0
        let ratio =
            cavity_linewidth(&leaky(1e-9)).unwrap() / cavity_linewidth(&leaky(1e-6)).unwrap();
        assert!((ratio / 1e-3 - 1.0).abs() < 1e-3, "{ratio}");
        let nearly_lossless = leaky(1e-9);
        let lossless = CavityConfig {
            r_fixed: 1.0,
            r_moving: 1.0,
            ..nearly_lossless
        };
        assert!(matches!(
            cavity_linewidth(&lossless),
            Err(Error::LosslessCavity(_))
        ));

        let cav = CavityConfig::design_point();
        let half = CavityConfig {
            length: 0.5 * cav.length,
            ..cav
        };
        assert_relative_eq!(
            cavity_linewidth(&half).unwrap(),
            2.0 * cavity_linewidth(&cav).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn min_phonon_examples() {
        let n = min_phonon_number(-1.6e5, WZ, KAPPA).unwrap();
        assert!((n / 0.14 - 1.0).abs() < 0.05, "{n}");
        assert_relative_eq!(
            min_phonon_number(-WZ, WZ, KAPPA).unwrap(),
            KAPPA * KAPPA / (16.0 * WZ * WZ),
            max_relative = 1e-14
        );
        assert!(min_phonon_number(-WZ, WZ, 1e-3).unwrap() < 1e-16);
        assert!(matches!(
            min_phonon_number(0.0, WZ, KAPPA),
            Err(Error::NotCooling(_))
        ));
        assert!(matches!(
            min_phonon_number(1e4, WZ, KAPPA),
            Err(Error::NotCooling(_))
        ));
    }

    #[test]
    fn optimal_detuning_examples() {
        assert_relative_eq!(optimal_detuning(WZ, 1e-9), -WZ, max_relative = 1e-12);
        let best = optimal_detuning(WZ, KAPPA);
        assert!((best / -1.59e5 - 1.0).abs() < 0.01, "{best}");
        let n = |d| min_phonon_number(d, WZ, KAPPA).unwrap();
        assert!(n(best) < n(1.1 * best) && n(best) < n(0.9 * best));
    }

    #[test]
    fn optimal_detuning_matches_grid_search() {
        // brute force over (-10 omega_z, 0) at 1e5 points
        let n_pts = 100_000;
        let (mut best_d, mut best_n) = (0.0, f64::INFINITY);
        for i in 1..n_pts {
            let d = -10.0 * WZ * i as f64 / n_pts as f64;
            let n = min_phonon_number(d, WZ, KAPPA).unwrap();
            if n < best_n {
                best_n = n;
                best_d = d;
            }
        }
        assert!((optimal_detuning(WZ, KAPPA) / best_d - 1.0).abs() < 1e-3);
    }

    fn rate(power: f64, linewidth: f64, detuning: f64, omega_z: f64) -> f64 {
        let cav = CavityConfig {
            power,
            linewidth,
            detuning,
            ..CavityConfig::design_point()
        };
        cooling_rate_phase_noise(&cav, omega_z, KAPPA, MASS).unwrap()
    }

    #[test]
    fn cooling_rate_design_point() {
        let g = rate(1e-4, 1e4, -1.6e5, WZ);
        assert!((g / 2.21e7 - 1.0).abs() < 0.03, "{g:e}");
    }

    #[test]
    fn monochromatic_reduction() {
        // with no linewidth the rate collapses to the standard sideband-asymmetry form
        let (p, d, w, k) = (1e-4, -1.6e5, WZ, KAPPA);
        let cav = CavityConfig::design_point();
        let standard = cav.omega_c() * k * 8.0 * p * k
            / (MASS * w * cav.length.powi(2) * (k * k + 4.0 * d * d))
            * (1.0 / (k * k + 4.0 * (d + w).powi(2)) - 1.0 / (k * k + 4.0 * (d - w).powi(2)));
        assert_relative_eq!(rate(p, 0.0, d, w), standard, max_relative = 1e-12);
    }

    #[test]
    fn no_mechanical_frequency_no_cooling() {
        assert_eq!(rate(1e-4, 1e4, -1.6e5, 0.0), 0.0);
        let cav = CavityConfig::design_point();
        assert!(cooling_rate_phase_noise(&cav, WZ, KAPPA, 0.0).is_err());
        assert!(
            cooling_rate_phase_noise(&CavityConfig { length: 0.0, ..cav }, WZ, KAPPA, MASS)
                .is_err()
        );
    }

    #[test]
    fn blue_detuning_heats() {
        assert!(rate(1e-4, 1e4, 1.6e5, WZ) < 0.0);
    }

    #[test]
    fn surface_reference_row_and_undefined_cells() {
        let cav = CavityConfig::design_point();
        let grid = SurfaceGrid::new((-2.0, -0.1, 11), (0.0, 1.0, 3)).unwrap();
        let s = cooling_ratio_surface(&grid, &cav, WZ, MASS, Execution::Sequential).unwrap();
        assert!(s.ratios[0].iter().all(|r| *r == Some(1.0)));

        let dark = CavityConfig { power: 0.0, ..cav };
        let s = cooling_ratio_surface(&grid, &dark, WZ, MASS, Execution::Sequential).unwrap();
        assert!(s.ratios.iter().flatten().all(Option::is_none));
    }

    #[test]
    fn surface_broad_linewidth_on_sideband_is_worse() {
        // Gamma_L = kappa, Delta = -omega_z
        let gamma = rate(1e-4, KAPPA, -WZ, WZ) / rate(1e-4, 0.0, -WZ, WZ);
        assert!(gamma < 1.0, "{gamma}");
    }

    #[test]
    fn surface_is_schedule_independent() {
        let cav = CavityConfig::design_point();
        let grid = SurfaceGrid::default();
        let a = cooling_ratio_surface(&grid, &cav, WZ, MASS, Execution::Sequential).unwrap();
        let b = cooling_ratio_surface(&grid, &cav, WZ, MASS, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_validation() {
        assert!(SurfaceGrid::new((-1.0, 0.5, 3), (0.0, 1.0, 3)).is_err());
        assert!(SurfaceGrid::new((-1.0, -0.5, 3), (-0.1, 1.0, 3)).is_err());
        assert!(SurfaceGrid::new((-1.0, -0.5, 0), (0.0, 1.0, 3)).is_err());
        let one = SurfaceGrid::new((-1.0, -1.0, 1), (0.5, 0.5, 1)).unwrap();
        assert_eq!(one.detuning_over_kappa, vec![-1.0]);
        assert_eq!(one.linewidth_over_kappa, vec![0.5]);
        let d = SurfaceGrid::default();
        assert_eq!(
            (d.detuning_over_kappa.len(), d.linewidth_over_kappa.len()),
            (121, 81)
        );
    }

    proptest::proptest! {
        #[test]
        fn rate_linear_in_power(
            p in 1e-6f64..1e-2, g in 0.0f64..5e5, d in -5e5f64..-1e3, w in 1e3f64..5e5,
        ) {
            let single = rate(p, g, d, w);
            let double = rate(2.0 * p, g, d, w);
            proptest::prop_assert!((double - 2.0 * single).abs() <= 1e-12 * single.abs());
        }

        #[test]
        fn min_phonon_scale_invariant(
            d in -1e6f64..-1e2, w in 1e2f64..1e6, k in 1e2f64..1e6, s in 1e-3f64..1e3,
        ) {
            let a = min_phonon_number(d, w, k).unwrap();
            let b = min_phonon_number(s * d, s * w, s * k).unwrap();
            proptest::prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        }

        #[test]
        fn optimal_detuning_not_beaten(w in 1e3f64..1e6, k in 1e3f64..1e6, f in 0.5f64..2.0) {
            let best = optimal_detuning(w, k);
            let n = |d| min_phonon_number(d, w, k).unwrap();
            proptest::prop_assert!(n(best) <= n(f * best) * (1.0 + 1e-12));
        }
    }
}
