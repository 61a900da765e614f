use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,

    #[error("mass {value} at index {index} is negative or not finite")]
    InvalidMass { index: usize, value: f64 },

    #[error("masses sum to {sum}, outside the accepted window [1 - 1e-9, 1 + 1e-9]")]
    NotNormalized { sum: f64 },

    #[error("transition matrix row {row} has {len} entries, expected {states}")]
    RaggedTransitions {
        row: usize,
        len: usize,
        states: usize,
    },

    #[error("invalid order alpha = {0}: must be positive, finite and different from 1")]
    InvalidAlpha(f64),

    #[error("invalid rho = {0}: must be positive and finite")]
    InvalidRho(f64),

    #[error("invalid rate R = {0}: must be positive and finite")]
    InvalidRate(f64),

    #[error("block length must be a positive integer")]
    InvalidBlockLength,

    #[error("alphabets differ in size: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("{tuples} tuples exceed the enumeration cap of {cap}")]
    CapExceeded { tuples: u128, cap: usize },

    #[error("M = {m} descriptions is too small: need M > log2|X| + 2 = {threshold}")]
    MTooSmall { m: u64, threshold: f64 },

    #[error(
        "rate too small for n = {n}: floor(2^(nR)) = {m} must exceed n log2|X| + 2 = {threshold}"
    )]
    RateTooSmallForN { n: usize, m: u64, threshold: f64 },

    #[error("rate too large for n = {n}: 2^(nR) does not fit in 64 bits")]
    RateTooLarge { n: usize },

    #[error("partition covers {partition} elements but the budget has {budget}")]
    GroundSetMismatch { partition: usize, budget: usize },

    #[error("budget for element {0} is zero; finite budgets must be at least 1")]
    ZeroBudget(usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("encoder uses {blocks} blocks but only {m} descriptions are available")]
    TooManyBlocks { blocks: usize, m: u64 },

    #[error("description id {id} for element {element} is outside 1..={m}")]
    InvalidDescription { element: usize, id: u64, m: u64 },

    #[error("exhaustive search is limited to {max} symbols, got {size}")]
    AlphabetTooLarge { size: usize, max: usize },

    #[error("support of P is not contained in the support of Q")]
    SupportViolation,
}

pub type Result<T> = std::result::Result<T, Error>;
