use thiserror::Error;

/// Errors raised by the lab's numerical routines.
///
/// Coordinates carried by an error are converted to `f64` so the type does
/// not depend on the scalar parameter.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {message}{}", fmt_point(.point))]
    Domain {
        message: String,
        point: Option<Vec<f64>>,
    },

    #[error(
        "divergent time integral at x = 0: integrand behaves like tau^-{exponent} near tau = 0 \
         (non-integrable because n >= 1 + 2/dim = {critical_power})"
    )]
    Divergent { exponent: f64, critical_power: f64 },

    #[error("quadrature did not converge: value {value:e}, error estimate {error:e} after {subdivisions} subdivisions")]
    NonConvergence {
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("time step {dt:e} violates the diffusive stability bound {bound:e}")]
    Cfl { dt: f64, bound: f64 },

    #[error("solution blew up at step {step} (t = {t:e}): {reason}; last good time {last_good_t:e}")]
    BlowUp {
        step: usize,
        t: f64,
        last_good_t: f64,
        reason: String,
    },
}

impl LabError {
    pub fn domain(message: impl Into<String>) -> Self {
        LabError::Domain {
            message: message.into(),
            point: None,
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        LabError::InvalidParameter(message.into())
    }

    /// Attaches the offending coordinates to a domain error; other variants pass through.
    pub fn at(self, point: Vec<f64>) -> Self {
        match self {
            LabError::Domain { message, point: None } => LabError::Domain {
                message,
                point: Some(point),
            },
            other => other,
        }
    }
}

fn fmt_point(point: &Option<Vec<f64>>) -> String {
    match point {
        Some(p) => format!(" at x = {p:?}"),
        None => String::new(),
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
