use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |H - H^dag| = {residual:.3e})")]
    NonHermitian { residual: f64 },

    #[error("matrix is not square or contains non-finite entries: {0}")]
    InvalidMatrix(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("expectation value has imaginary residue {0:.3e}")]
    ImaginaryResidue(f64),

    #[error("invalid model instance: {0}")]
    InvalidInstance(String),

    #[error("band limit must be positive, got {0}")]
    InvalidK(f64),

    #[error("{what} = {value} is not a positive integer")]
    NotInteger { what: &'static str, value: f64 },

    #[error("c/p = {ratio} is not a positive integer")]
    NotMultiple { ratio: f64 },

    #[error("spectrum of {which} is not contained in {{-1, +1}} (deviation {deviation:.3e})")]
    SpectrumError { which: &'static str, deviation: f64 },

    #[error("measure has no atoms")]
    EmptyMeasure,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
