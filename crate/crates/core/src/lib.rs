//! Design and verification toolkit for an optically levitated Bragg-disk
//! mirror used as the movable end-mirror of a Fabry-Perot cavity.
//!
//! - [`geometry`]: disk as an effective dielectric spheroid
//! - [`trap`]: crossed-beam tweezer, trap and wobble frequencies
//! - [`cavity`]: linewidth, backaction-limited occupation, phase-noise cooling rate
//! - [`budget`]: heating/damping channels and the final occupation
//! - [`oracle`]: stochastic Langevin ensembles that cross-check the rates
//!
//! All quantities are SI; see [`units`] for conversions from laboratory units.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod cavity;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod oracle;
pub mod trap;
pub mod units;

pub use budget::{full_budget, Environment, NoiseBudgetReport};
pub use cavity::{CavityConfig, CoolingResult, CoolingSurface, SurfaceGrid};
pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{DiskMirror, Polarizability};
pub use oracle::{EnsembleStats, SdeConfig};
pub use trap::{TrapBeams, TrapCharacterization};
