use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero: parameter `{0}` bound to zero appears with a negative exponent")]
    DivisionByZero(String),

    #[error("parameter `{0}` is not bound to a value")]
    UnboundParameter(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0} is not symbolically representable; use the numeric oracle instead")]
    NotRepresentable(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid configuration error: {0}")]
    Grid(String),

    #[error("wavefunctions live on different grids")]
    GridMismatch,

    #[error("resonance: {0}")]
    Resonance(String),

    #[error("operator cannot be evaluated by this backend: {0}")]
    Unsupported(String),

    #[error("energy-law fit failed: {0}")]
    Fit(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("corpus error: {0}")]
    Corpus(String),
}
