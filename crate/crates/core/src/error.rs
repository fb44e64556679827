use thiserror::Error;

/// Errors raised by the numeric kernels and model validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of {function} at x = {x}")]
    Pole { function: &'static str, x: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed system spec: {0}")]
    MalformedSpec(String),

    #[error("layer index {index} out of range for {layers} layers")]
    IndexOutOfRange { index: usize, layers: usize },

    #[error("layer {0} is not doubly occupied")]
    NotDoublyOccupied(usize),

    #[error("decoupling conditions violated (worst residual {worst:e})")]
    DecouplingViolated { worst: f64 },

    #[error("unstable quadratic form: eigenvalue {eigenvalue:e} is negative")]
    UnstableForm { eigenvalue: f64 },

    #[error("energy cap {cap} is below the zero-point energy {zero_point}")]
    CapTooLow { cap: f64, zero_point: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("problem size {size} exceeds cap {cap}")]
    SizeCapExceeded { size: usize, cap: usize },

    #[error("grid too coarse: Richardson estimate {estimate:e} exceeds {limit:e}")]
    ResolutionTooCoarse { estimate: f64, limit: f64 },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("numeric overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
