use thiserror::Error;

/// One entry that breaks a declared standard-form pattern.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PatternViolation {
    pub row: usize,
    pub col: usize,
    pub expected: String,
    pub magnitude: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("map is not completely positive (min eigenvalue {min_eigenvalue:e})")]
    NotCp { min_eigenvalue: f64 },
    #[error("map is not trace preserving (residual {residual:e})")]
    NotTp { residual: f64 },
    #[error("state is not in the {form} pattern ({} offending entries)", violations.len())]
    Pattern {
        form: String,
        violations: Vec<PatternViolation>,
    },
    #[error("protocol infeasible: {0}")]
    Infeasible(String),
}

impl Error {
    /// Short machine-readable code used by the CLI and the C API.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Validation(_) => "validation",
            Error::NotCp { .. } => "not_cp",
            Error::NotTp { .. } => "not_tp",
            Error::Pattern { .. } => "pattern",
            Error::Infeasible(_) => "infeasible",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
