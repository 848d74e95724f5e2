use thiserror::Error;

use crate::complexes::DegreeProfile;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An object or report failed validation. `path` names the offending field.
    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    #[error("enumeration needs {states} states, budget is {budget} (pass force to override)")]
    BudgetExceeded { states: u128, budget: u128 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("complex is not regular (degrees {} to {})", .0.min, .0.max)]
    Irregular(Box<DegreeProfile>),

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix has nonzero diagonal entry {value} at {index}")]
    NonzeroDiagonal { index: usize, value: f64 },

    #[error("cells {0:?} and {1:?} are not adjacent")]
    NotAdjacent(Vec<usize>, Vec<usize>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { path: path.into(), message: message.into() }
    }
}
