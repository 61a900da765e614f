//! Deterministic random instances for property suites and the CLI.
//!
//! Instance `i` under seed `s` always comes from the ChaCha stream `i` keyed by `s`, so any
//! single instance can be regenerated without replaying the ones before it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::partition::{Budget, LambdaBudget, Partition};
use crate::probability::Pmf;

/// Largest integer weight drawn by [`random_pmf`].
pub const MAX_WEIGHT: u32 = 20;

pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Full-support law with integer weights in `1..=20`, normalized. Coarse weights keep
/// exact ties (useful for argmax sets) and bound the ratio between masses.
pub fn random_pmf<R: Rng>(rng: &mut R, size: usize) -> Pmf {
    let weights: Vec<f64> = (0..size)
        .map(|_| rng.random_range(1..=MAX_WEIGHT) as f64)
        .collect();
    Pmf::from_weights(&weights).expect("positive weights")
}

/// Like [`random_pmf`] but each symbol is zeroed with probability `zero_prob`; at least
/// one symbol keeps positive mass.
pub fn random_sparse_pmf<R: Rng>(rng: &mut R, size: usize, zero_prob: f64) -> Pmf {
    let mut weights: Vec<f64> = (0..size)
        .map(|_| {
            if rng.random_bool(zero_prob) {
                0.0
            } else {
                rng.random_range(1..=MAX_WEIGHT) as f64
            }
        })
        .collect();
    if weights.iter().all(|&w| w == 0.0) {
        let x = rng.random_range(0..size);
        weights[x] = rng.random_range(1..=MAX_WEIGHT) as f64;
    }
    Pmf::from_weights(&weights).expect("some positive weight")
}

/// Random partition of `0..size`: a block count is drawn first, then every element
/// picks a label uniformly.
pub fn random_partition<R: Rng>(rng: &mut R, size: usize) -> Partition {
    let labels_available = rng.random_range(1..=size.max(1));
    let labels: Vec<usize> = (0..size)
        .map(|_| rng.random_range(0..labels_available))
        .collect();
    Partition::from_labels(&labels)
}

/// Budgets drawn uniformly from `{1, ..., 2·size} ∪ {∞}`.
pub fn random_budget<R: Rng>(rng: &mut R, size: usize) -> LambdaBudget {
    let top = 2 * size as u64 + 1;
    let budgets = (0..size)
        .map(|_| match rng.random_range(1..=top) {
            v if v == top => Budget::Infinite,
            v => Budget::Finite(v),
        })
        .collect();
    LambdaBudget::new(budgets).expect("budgets start at 1")
}
