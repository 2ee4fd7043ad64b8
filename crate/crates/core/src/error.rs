use thiserror::Error;

/// Failures raised by the analytic models and the stochastic oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("untrapped axis {axis}: potential curvature {curvature:e} J/m^2 is not positive at the origin")]
    UntrappedAxis { axis: char, curvature: f64 },
    #[error("not in cooling regime: detuning {0:e} s^-1 must be negative")]
    NotCooling(f64),
    #[error("lossless cavity: R_fixed * R_moving = {0} leaves the finesse unbounded")]
    LosslessCavity(f64),
    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),
    #[error("step-size guard: dt * omega_z = {0:.4} exceeds 0.05")]
    StepSize(f64),
    #[error("too few trajectories for rate extraction: {0} (need at least 100)")]
    TooFewTrajectories(usize),
    #[error("growth too fast for step resolution: {0}")]
    GrowthTooFast(String),
    #[error("{term}: {source}")]
    Term {
        term: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn in_term(self, term: &'static str) -> Self {
        Error::Term {
            term,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
