use thiserror::Error;

use crate::problem::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the region where the quantity is defined.
    #[error("{what} = {value} is outside the admissible range {range}")]
    Domain {
        what: &'static str,
        value: f64,
        range: String,
    },

    /// A closed-form characteristic map hit a singularity. `critical_time` is
    /// the first time at which the denominator (or tan argument) degenerates,
    /// located by bisection when it lies inside the requested interval.
    #[error("characteristic blow-up at t = {critical_time:?} (label s = {label})")]
    FrontBlowup { critical_time: Option<f64>, label: f64 },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("invalid specification: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("ODE integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("quadrature failed near eta = {eta}")]
    Quadrature { eta: f64 },

    #[error("characteristics cross at t = {t}: F(t; .) is not monotone")]
    CharacteristicsCross { t: f64 },

    /// The solver produced a non-finite value. The last finite state is kept.
    #[error("non-finite state at t = {t} after {steps} steps")]
    NonFinite {
        t: f64,
        steps: usize,
        last_good: Box<crate::pde::GridSolution>,
    },

    #[error("time step underflow at t = {t} (dt = {dt:e})")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("mode {mode} amplitude fell below {floor:e} before it could be fitted")]
    FitFailure { mode: usize, floor: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| format!("{}: {}", v.field, v.message))
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, range: impl Into<String>) -> Self {
        Error::Domain {
            what,
            value,
            range: range.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation(_) | Error::Config(_) | Error::Json(_) | Error::Domain { .. }
        )
    }
}
