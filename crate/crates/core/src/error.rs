use thiserror::Error;

use crate::algebra::{LiteralError, MultiIndex};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: u32, right: u32 },

    #[error("substitution argument {index} has a constant term")]
    ConstantTermPresent { index: usize },

    #[error("resonance <m, lambda> = 0 at m = {witness:?}")]
    ResonanceViolation { witness: MultiIndex },

    #[error("diagonal entry {index} of B is zero")]
    ZeroEigenvalue { index: usize },

    #[error("B is not lower triangular: entry ({row}, {col}) is nonzero")]
    NotLowerTriangular { row: usize, col: usize },

    #[error("shifted system has a pure y1 term of degree {degree}")]
    NonVanishingOnCenter { degree: u32 },

    #[error("right-hand side of degree {degree} has a y1^{degree} component")]
    KernelComponentInRHS { degree: u32 },

    #[error("growth analysis needs N >= 4, got {degree}")]
    InsufficientDegrees { degree: u32 },

    #[error("integration overflowed at t = {time} (reduce the step or horizon)")]
    StepUnstable { time: f64 },

    #[error("singularity is isolated: first nonzero term of f1 on the center curve at degree {degree}")]
    Isolated { degree: u32, witness: String },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<LiteralError> for Error {
    fn from(e: LiteralError) -> Self {
        Error::parse(format!("column {}", e.column), e.message)
    }
}

impl Error {
    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }

    /// Short stable identifier used in structured error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegreeMismatch { .. } => "DegreeMismatch",
            Error::ConstantTermPresent { .. } => "ConstantTermPresent",
            Error::ResonanceViolation { .. } => "ResonanceViolation",
            Error::ZeroEigenvalue { .. } => "ZeroEigenvalue",
            Error::NotLowerTriangular { .. } => "NotLowerTriangular",
            Error::NonVanishingOnCenter { .. } => "NonVanishingOnCenter",
            Error::KernelComponentInRHS { .. } => "KernelComponentInRHS",
            Error::InsufficientDegrees { .. } => "InsufficientDegrees",
            Error::StepUnstable { .. } => "StepUnstable",
            Error::Isolated { .. } => "IsolatedAtDegree",
            Error::Parse { .. } => "ParseError",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io(_) => "Io",
            Error::Json(_) => "ParseError",
        }
    }
}
