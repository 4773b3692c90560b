use thiserror::Error;

/// Errors produced while building or driving channels, boxes, codes and bounds.
#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol index {0} outside the two-bit alphabet 0..=3")]
    InvalidSymbol(u8),

    #[error("erasure parameter {0} outside [0, 1]")]
    InvalidEpsilon(f64),

    #[error("{context}: probabilities sum to {sum}, expected 1 within {tol}")]
    NotNormalized { context: &'static str, sum: f64, tol: f64 },

    #[error("{context}: negative probability {value}")]
    NegativeProbability { context: &'static str, value: f64 },

    #[error("channel '{name}' declares no erasure symbol but pmf uses one")]
    UnexpectedErasure { name: String },

    #[error("mixture weights must be nonnegative and sum to 1 (got sum {0})")]
    InvalidMixture(f64),

    #[error("trial count must be at least 1")]
    EmptyRun,

    #[error("erasure-channel rate model requires binary messages (strategy sends {arity}-ary symbols)")]
    RateModelMismatch { arity: usize },

    #[error("erasure-channel rate model rejected: {errors} non-erased decode errors over {n} trials")]
    NonErasedErrors { errors: u64, n: u64 },

    #[error("cannot merge trial statistics with different message arities ({0} vs {1})")]
    StatsArityMismatch(usize, usize),

    #[error("vector norm {norm} is not 1 within {tol}")]
    NotUnit { norm: f64, tol: f64 },

    #[error("optimizer config invalid: {0}")]
    InvalidConfig(&'static str),

    #[error("projector angles out of range: theta={theta}, phi={phi}")]
    InvalidAngles { theta: f64, phi: f64 },

    #[error("POVM element weight {0} is negative")]
    NegativeWeight(f64),

    #[error("POVM elements sum to identity only within {deviation}, tolerance {tol}")]
    IncompletePovm { deviation: f64, tol: f64 },

    #[error("shared state requires strictly positive amplitudes with alpha^2+beta^2=1 (got {alpha}, {beta})")]
    InvalidSharedState { alpha: f64, beta: f64 },

    #[error("no POVM element lies in the requested hemisphere")]
    NoElementInHemisphere,

    #[error("encoder table for message {message} has {got} entries, POVM has {expected} elements")]
    EncoderMismatch { message: u8, got: usize, expected: usize },

    #[error("POVM element matrix is not positive semidefinite (eigenvalue {0})")]
    NotPositive(f64),

    #[error("live-cell weight decomposition violates its sum bound: {sum} > 3")]
    WeightBoundViolated { sum: f64 },

    #[error("channel text format: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
