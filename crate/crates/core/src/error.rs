use thiserror::Error;

/// Errors raised by the scoring, geometry and file-format layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: lower endpoint {lo} exceeds upper endpoint {hi}")]
    InvalidInterval { lo: String, hi: String },

    #[error("level {name}={value} outside its admissible range {range}")]
    InvalidLevel {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("lower endpoint {a} outside the domain of Gamma: F(a-)={left_mass} > 1-alpha={limit}")]
    OutOfDomain { a: String, left_mass: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("grid with {n} cells is too large for exhaustive enumeration (max {max})")]
    TooLarge { n: usize, max: usize },

    #[error("chain of sets is not nested")]
    NotNested,

    #[error("quadrature did not reach tolerance {tol:e} on [{lo}, {hi}]")]
    Quadrature { lo: f64, hi: f64, tol: f64 },

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn param(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }
}

/// Validates a probability level against one of the standard unit ranges.
pub(crate) fn check_level(name: &'static str, value: f64, range: &'static str) -> Result<()> {
    let ok = match range {
        "(0, 1]" => value > 0.0 && value <= 1.0,
        "(0, 1)" => value > 0.0 && value < 1.0,
        "[0, 1]" => (0.0..=1.0).contains(&value),
        _ => unreachable!("unknown level range {range}"),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidLevel { name, value, range })
    }
}
