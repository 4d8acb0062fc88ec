use thiserror::Error;

use crate::scalar::{fmt_scalar, Scalar};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation mismatch: N_x = {0} vs {1}")]
    TruncationMismatch(usize, usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("inadmissible q = {q}: {reason}")]
    InadmissibleQ { q: String, reason: String },

    #[error("vanishing q-Pochhammer factor (q;q)_{0}")]
    VanishingPochhammer(usize),

    #[error("exponent argument of degree 0 is not allowed")]
    DegreeZeroExponent,

    #[error("leading term is not the identity")]
    LeadingTermNotIdentity,

    #[error("series is not invertible: vanishing constant term")]
    NotInvertible,

    #[error("insufficient depth for {what}: need degree {needed}, known only from {known}")]
    InsufficientDepth {
        what: String,
        needed: i64,
        known: i64,
    },

    #[error("operator basis mismatch")]
    BasisMismatch,

    #[error("operator has negative powers; it does not act on functions")]
    NegativePowers,

    #[error("band overflow: power {power} outside +/-{limit}")]
    BandOverflow { power: i64, limit: i64 },

    #[error("operator coefficients must be z-free for the residue pairing")]
    ZDependentCoefficient,

    #[error("invalid Lax data: {0}")]
    InvalidLax(String),

    #[error("resonance: a_{j} q^{m} = a_{i}")]
    Resonance { i: usize, j: usize, m: usize },

    #[error("diagonal consistency failure at order {order}, entry ({entry},{entry}): constant term {value} must vanish")]
    DiagonalConsistency {
        order: usize,
        entry: usize,
        value: String,
    },

    #[error("not a multiplication operator: {0}")]
    NotMultiplication(String),

    #[error("flow does not preserve u_ii = 0: entry ({entry},{entry}) is {value}")]
    DiagonalNotPreserved { entry: usize, value: String },

    #[error("negative z-degree {degree} present in D_q w * w^-1 (bilinear identity violated)")]
    NegativeDegrees { degree: i64 },

    #[error("tau has vanishing constant term")]
    TauNotInvertible,

    #[error("truncation overflow: {0}")]
    TruncationOverflow(String),

    #[error("classical precheck failed: {0}")]
    ClassicalPrecheck(String),

    #[error("residual does not shrink linearly: {0}")]
    NonShrinking(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

impl Error {
    pub(crate) fn consistency(order: usize, entry: usize, value: &Scalar) -> Self {
        Error::DiagonalConsistency {
            order,
            entry,
            value: fmt_scalar(value),
        }
    }
}
