use thiserror::Error;

/// Errors produced by the numerical pipeline.
#[derive(Debug, Error)]
pub enum SusyError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("x = {x} lies outside the tabulated domain [{min}, {max}]")]
    Domain { x: f64, min: f64, max: f64 },

    #[error("solution blew up (|y| > 1e300) at x = {x}")]
    BlowUp { x: f64 },

    #[error("{what} vanishes or changes sign on the grid; zero brackets: {brackets:?}")]
    Singularity {
        what: String,
        brackets: Vec<(f64, f64)>,
    },

    #[error("{what}: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Accuracy {
        what: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("function is not square integrable: {0}")]
    NotSquareIntegrable(String),

    #[error("tabulated potential: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, SusyError>;
