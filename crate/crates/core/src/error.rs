use thiserror::Error;

use crate::ring::CoeffRing;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coefficient ring mismatch: {0} vs {1}")]
    RingMismatch(CoeffRing, CoeffRing),
    #[error("invalid coefficient ring: {0}")]
    InvalidRing(String),
    #[error("coefficient {0} is not an element of {1}")]
    NotInRing(String, CoeffRing),
    #[error("exponent scale must be nonzero")]
    ZeroScale,
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("operation needs a field or the integers, got {0}")]
    NotEuclidean(CoeffRing),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("xi is zero: the spin-c structure must be non-torsion")]
    TorsionSpinC,
    #[error("invalid manifold data: {0}")]
    InvalidSpec(String),
    #[error("truncation instability: {0}")]
    TruncationInstability(String),
    #[error("perturbation rejected: {0}")]
    InvalidPerturbation(String),
    #[error("module is zero")]
    ZeroModule,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("degree regime violated: {0}")]
    Regime(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}
