use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("gamma function pole at x = {0}")]
    GammaPole(f64),

    #[error("invalid Meijer G specification: {0}")]
    InvalidMeijer(String),

    #[error("Meijer G lower parameters {i} and {j} differ by an integer (b = {bi}, {bj}); perturb before using the residue series")]
    PoleCollision { i: usize, j: usize, bi: f64, bj: f64 },

    #[error("residue series rejected: {0}")]
    SeriesRejected(String),

    #[error("no vertical contour separates the pole families (left max {left}, right min {right})")]
    ContourSelection { left: f64, right: f64 },

    #[error("quadrature did not converge: value {value:e}, error estimate {abs_err:e}")]
    Quadrature { value: f64, abs_err: f64 },

    #[error("Meijer G evaluation failed (series: {series}; contour: {contour})")]
    MeijerFailed { series: String, contour: String },

    #[error("probability {value} outside [0, 1] in {what}")]
    ProbabilityOutOfRange { what: &'static str, value: f64 },

    #[error("invalid parameter {field}: {reason}")]
    InvalidParam { field: String, reason: String },

    #[error("degenerate slope fit: {0}")]
    DegenerateFit(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
