use thiserror::Error;

/// Errors raised by geometric and lattice operations on invalid inputs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime number >= 13")]
    InvalidPrime(i64),
    #[error("projection undefined for a class with s = 0")]
    ProjectionUndefined,
    #[error("zero vector has no geometric meaning")]
    ZeroVector,
    #[error("vector in kernel of Z")]
    KernelVector,
    #[error("not a heart phase: charge on the positive real axis")]
    NotHeartPhase,
    #[error("w² must be positive")]
    NonPositiveWSquared,
    #[error("{0} is not a root class")]
    NotRoot(String),
    #[error("root outside cone: its projection is not above the parabola")]
    RootOutsideCone,
    #[error("degenerate line: {0}")]
    DegenerateLine(&'static str),
    #[error("class proportional to v(O_X); bound degenerate")]
    DegenerateBrillNoether,
    #[error("coincides with o'")]
    CoincidesWithOPrime,
    #[error("parity mismatch in group {group}: chi {chi} vs displacement {displacement}")]
    ParityMismatch {
        group: usize,
        chi: i64,
        displacement: String,
    },
    #[error("invalid grouping: {0}")]
    InvalidGrouping(&'static str),
    #[error("at least two parts are needed, got {0}")]
    TooFewParts(i64),
    #[error("invalid chain: {0}")]
    InvalidChain(&'static str),
    #[error("unsupported pair (p, m) = ({0}, {1})")]
    UnsupportedPair(i64, i64),
}

pub type Result<T> = std::result::Result<T, Error>;
