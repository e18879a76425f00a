use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QdtError {
    /// A state that must have unit norm does not.
    #[error("state is not normalized: squared norm {norm_sqr}")]
    Normalization { norm_sqr: f64 },

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operator or data object breaks one of its invariants.
    #[error("validation error: {0}")]
    Validation(String),

    /// A set that must carry positive mass is all zero.
    #[error("degenerate set: {0}")]
    Degenerate(String),

    /// Utilities do not fit the sign regime the operation requires.
    #[error("sign-domain error: {0}")]
    SignDomain(String),

    /// Gains and losses mixed in one choice set.
    #[error("mixed-sign utilities: utility factors are defined only for all-nonnegative or all-negative sets")]
    MixedSign,

    /// Bounds could not be satisfied while keeping the attraction factors zero-sum.
    #[error("infeasible bounds: {0}")]
    Infeasible(String),

    /// The interference term came out with a non-negligible imaginary part.
    #[error("interference term is not real: imaginary part {imag}")]
    NonRealInterference { imag: f64 },

    /// A document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QdtError>;
