//! Fixed-length descriptions of randomly drawn tasks.
//!
//! A task `X ~ P` from a finite set is described by one of `M` labels; every task sharing
//! that label must then be performed. This crate builds such descriptions and measures
//! the ρ-th moment of the number of performed tasks against its Rényi-entropy bounds:
//!
//! - [`probability`]: laws, Markov sources, block laws over n-tuples, Rényi entropy and KL.
//! - [`partition`]: partitions with the identity `Σ 1/L(x) = M`, cardinality budgets and
//!   the greedy budget-respecting constructor.
//! - [`task_code`]: encoders, moments, one-shot bounds, exhaustive optimum and block-length
//!   experiments.
//! - [`mismatch`]: the divergence that prices designing for the wrong law.
//! - [`random`]: reproducible random instances.

pub mod error;
pub mod mismatch;
mod numeric;
pub mod partition;
pub mod probability;
pub mod random;
pub mod task_code;

pub use error::{Error, Result};
pub use mismatch::{
    divergence_limits, mismatched_block_experiment, mismatched_bound, mismatched_sweep,
    product_additivity_check, rate_form_bound, renyi_divergence, sundaresan_divergence,
    DivergenceLimits, DivergenceValue, MismatchedCode,
};
pub use partition::{
    build_partition, kraft_sum, subset_count_bound, verify_budget, Budget, BudgetCheck,
    BudgetViolation, LambdaBudget, Partition, SubsetCountBound,
};
pub use probability::{
    iid_joint, kl_divergence, markov_joint, markov_renyi_sum, renyi_entropy, renyi_rho, tilde_rho,
    EnumerationCap, JointLaw, Law, MarkovSource, Pmf, Source, DEFAULT_ENUMERATION_CAP,
};
pub use task_code::{
    block_experiment, block_sweep, brute_force_optimum, build_encoder, lambda_from_law,
    lower_bound, moment, moment_of_partition, one_shot_report, upper_bound, MismatchTerms,
    MomentReport, Rate, TaskEncoder,
};
