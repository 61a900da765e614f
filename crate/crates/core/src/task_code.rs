//! Task encoders `f: X → {1, ..., M}` and the ρ-th moment of the number of performed tasks.
//!
//! Receiving `f(X)` forces every task in `f⁻¹(f(X))` to be performed, so an encoder is
//! judged by `E|f⁻¹(f(X))|^ρ`. For any encoder this is at least
//! `2^(ρ(H_{1/(1+ρ)}(X) − log M))`; [`build_encoder`] achieves less than
//! `1 + 2^(ρ(H_{1/(1+ρ)}(X) − log M̃))` with `M̃ = (M − log|X| − 2)/4`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::partition::{build_partition, Budget, LambdaBudget, Partition};
use crate::probability::{check_rho, renyi_rho, tilde_rho, EnumerationCap, JointLaw, Law, Source};

/// Exhaustive search limit; Bell(10) = 115975 partitions.
pub const BRUTE_FORCE_MAX: usize = 10;

/// An encoder together with the partition of `X` into its nonempty preimages.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskEncoder {
    description_count: u64,
    assignment: Vec<u64>,
    partition: Partition,
}

impl TaskEncoder {
    /// Block `b` of `partition` receives description `b + 1`.
    pub fn from_partition(partition: Partition, description_count: u64) -> Result<Self> {
        if partition.block_count() as u64 > description_count {
            return Err(Error::TooManyBlocks {
                blocks: partition.block_count(),
                m: description_count,
            });
        }
        let assignment = (0..partition.ground_size())
            .map(|x| partition.block_of(x) as u64 + 1)
            .collect();
        Ok(TaskEncoder {
            description_count,
            assignment,
            partition,
        })
    }

    /// Encoder from explicit descriptions in `1..=description_count`.
    pub fn from_assignment(assignment: Vec<u64>, description_count: u64) -> Result<Self> {
        let mut preimages: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (element, &id) in assignment.iter().enumerate() {
            if id == 0 || id > description_count {
                return Err(Error::InvalidDescription {
                    element,
                    id,
                    m: description_count,
                });
            }
            preimages.entry(id).or_default().push(element);
        }
        let partition = Partition::from_blocks(preimages.into_values().collect())?;
        Ok(TaskEncoder {
            description_count,
            assignment,
            partition,
        })
    }

    /// `M`.
    pub fn description_count(&self) -> u64 {
        self.description_count
    }

    /// `N`, the number of nonempty preimages.
    pub fn used_descriptions(&self) -> usize {
        self.partition.block_count()
    }

    pub fn describe(&self, x: usize) -> u64 {
        self.assignment[x]
    }

    pub fn assignment(&self) -> &[u64] {
        &self.assignment
    }

    /// `f⁻¹(f(x))`.
    pub fn preimage(&self, x: usize) -> &[usize] {
        self.partition.block(self.partition.block_of(x))
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn alphabet_size(&self) -> usize {
        self.assignment.len()
    }
}

/// `log2|X| + 2`; the construction needs strictly more descriptions than this.
pub fn description_threshold(alphabet_size: usize) -> f64 {
    (alphabet_size as f64).log2() + 2.0
}

/// `M̃ = (M − log2|X| − 2)/4`.
pub fn m_tilde(m: u64, alphabet_size: usize) -> f64 {
    (m as f64 - description_threshold(alphabet_size)) / 4.0
}

fn check_m(m: u64, alphabet_size: usize) -> Result<()> {
    let threshold = description_threshold(alphabet_size);
    if (m as f64) <= threshold {
        return Err(Error::MTooSmall { m, threshold });
    }
    Ok(())
}

/// Budgets `λ(x) = ⌈β P(x)^(−1/(1+ρ))⌉` (`∞` where `P(x) = 0`) with
/// `β = 2 Σ P(x)^(1/(1+ρ)) / (M − log2|X| − 2)`, so that `μ ≤ (M − log2|X| − 2)/2`.
///
/// Budgets too large for `u64` are recorded as `∞`; every such budget already exceeds
/// `|X|`, so the partition is unchanged and `μ` only shrinks.
pub fn lambda_from_law<L: Law + ?Sized>(law: &L, rho: f64, m: u64) -> Result<LambdaBudget> {
    check_rho(rho)?;
    let size = law.size();
    check_m(m, size)?;
    let order = tilde_rho(rho);
    let power_sum: CompensatedSum = (0..size)
        .map(|x| (order * law.log_mass(x)).exp2())
        .collect();
    let beta = 2.0 * power_sum.value() / (m as f64 - description_threshold(size));
    let budgets = (0..size)
        .map(|x| {
            let lm = law.log_mass(x);
            if lm == f64::NEG_INFINITY {
                return Budget::Infinite;
            }
            let xi = (beta * (-order * lm).exp2()).ceil();
            if xi.is_finite() && xi < u64::MAX as f64 {
                Budget::Finite((xi as u64).max(1))
            } else {
                Budget::Infinite
            }
        })
        .collect();
    LambdaBudget::new(budgets)
}

/// The encoder induced by [`build_partition`] applied to [`lambda_from_law`].
pub fn build_encoder<L: Law + ?Sized>(law: &L, rho: f64, m: u64) -> Result<TaskEncoder> {
    let lambda = lambda_from_law(law, rho, m)?;
    TaskEncoder::from_partition(build_partition(&lambda), m)
}

/// `Σ_x P(x) |f⁻¹(f(x))|^ρ`.
pub fn moment<L: Law + ?Sized>(law: &L, enc: &TaskEncoder, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    moment_of_partition(law, enc.partition(), rho)
}

/// [`moment`] for the encoder whose preimages are the blocks of `part`.
pub fn moment_of_partition<L: Law + ?Sized>(law: &L, part: &Partition, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    if law.size() != part.ground_size() {
        return Err(Error::AlphabetMismatch {
            left: law.size(),
            right: part.ground_size(),
        });
    }
    let powered: Vec<f64> = (0..part.block_count())
        .map(|b| (part.block_len(b) as f64).powf(rho))
        .collect();
    let sum: CompensatedSum = (0..law.size())
        .map(|x| law.mass(x) * powered[part.block_of(x)])
        .collect();
    Ok(sum.value())
}

pub(crate) fn lower_from_entropy(entropy: f64, m: u64, rho: f64) -> f64 {
    (rho * (entropy - (m as f64).log2())).exp2()
}

pub(crate) fn upper_from_exponent(
    exponent_bits: f64,
    m: u64,
    alphabet_size: usize,
    rho: f64,
) -> f64 {
    let mt = m_tilde(m, alphabet_size);
    if mt <= 0.0 || exponent_bits == f64::INFINITY {
        return f64::INFINITY;
    }
    1.0 + (rho * (exponent_bits - mt.log2())).exp2()
}

/// `2^(ρ(H_{1/(1+ρ)} − log2 M))`, valid for every encoder with `M` descriptions.
pub fn lower_bound<L: Law + ?Sized>(law: &L, m: u64, rho: f64) -> Result<f64> {
    let h = renyi_rho(law, rho)?;
    if m == 0 {
        return Err(Error::MTooSmall { m, threshold: 0.0 });
    }
    Ok(lower_from_entropy(h, m, rho))
}

/// `1 + 2^(ρ(H_{1/(1+ρ)} − log2 M̃))`, or `+inf` when `M ≤ log2|X| + 2`.
pub fn upper_bound<L: Law + ?Sized>(law: &L, m: u64, rho: f64) -> Result<f64> {
    let h = renyi_rho(law, rho)?;
    Ok(upper_from_exponent(h, m, law.size(), rho))
}

/// Minimum moment over all partitions of `X` into at most `m` blocks, with the
/// lexicographically smallest restricted-growth string among (near-)ties.
pub fn brute_force_optimum<L: Law + ?Sized>(law: &L, m: u64, rho: f64) -> Result<(f64, Partition)> {
    check_rho(rho)?;
    let size = law.size();
    if size > BRUTE_FORCE_MAX {
        return Err(Error::AlphabetTooLarge {
            size,
            max: BRUTE_FORCE_MAX,
        });
    }
    if size == 0 {
        return Err(Error::EmptyAlphabet);
    }
    if m == 0 {
        return Err(Error::MTooSmall { m, threshold: 0.0 });
    }
    let max_blocks = (m as usize).min(size);
    let masses: Vec<f64> = (0..size).map(|x| law.mass(x)).collect();
    let powers: Vec<f64> = (0..=size).map(|s| (s as f64).powf(rho)).collect();

    let mut search = RgsSearch {
        masses: &masses,
        powers: &powers,
        max_blocks,
        labels: vec![0; size],
        block_mass: vec![0.0; max_blocks],
        block_size: vec![0; max_blocks],
        best_value: f64::INFINITY,
        best_labels: Vec::new(),
    };
    search.descend(0, 0);
    let part = Partition::from_labels(&search.best_labels);
    Ok((search.best_value, part))
}

struct RgsSearch<'a> {
    masses: &'a [f64],
    powers: &'a [f64],
    max_blocks: usize,
    labels: Vec<usize>,
    block_mass: Vec<f64>,
    block_size: Vec<usize>,
    best_value: f64,
    best_labels: Vec<usize>,
}

impl RgsSearch<'_> {
    fn descend(&mut self, index: usize, used: usize) {
        if index == self.labels.len() {
            let value: f64 = (0..used)
                .map(|b| self.block_mass[b] * self.powers[self.block_size[b]])
                .sum();
            if self.best_labels.is_empty() || value < self.best_value * (1.0 - 1e-12) {
                self.best_value = value;
                self.best_labels = self.labels.clone();
            }
            return;
        }
        let limit = (used + 1).min(self.max_blocks);
        for label in 0..limit {
            self.labels[index] = label;
            self.block_mass[label] += self.masses[index];
            self.block_size[label] += 1;
            self.descend(index + 1, used.max(label + 1));
            self.block_mass[label] -= self.masses[index];
            self.block_size[label] -= 1;
        }
    }
}

/// Description rate in bits per task. Decimal input with at most six places is also kept
/// as an exact fraction so that `⌊2^(nR)⌋` is computed without floor-boundary errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Rate {
    bits: f64,
    /// Reduced `(numerator, denominator)`.
    exact: Option<(u64, u64)>,
}

const RATE_DECIMALS: u32 = 6;

impl Rate {
    pub fn new(bits: f64) -> Result<Self> {
        if !(bits.is_finite() && bits > 0.0) {
            return Err(Error::InvalidRate(bits));
        }
        let scale = 10u64.pow(RATE_DECIMALS);
        let scaled = bits * scale as f64;
        let exact = if scaled < 1e15 && (scaled - scaled.round()).abs() < 1e-6 {
            let num = scaled.round() as u64;
            let g = num.gcd(&scale);
            Some((num / g, scale / g))
        } else {
            None
        };
        Ok(Rate { bits, exact })
    }

    pub fn bits(&self) -> f64 {
        self.bits
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// `⌊2^(nR)⌋`.
    pub fn description_count(&self, n: usize) -> Result<u64> {
        if n == 0 {
            return Err(Error::InvalidBlockLength);
        }
        let exponent = n as f64 * self.bits;
        if exponent >= 63.0 {
            return Err(Error::RateTooLarge { n });
        }
        let approx = exponent.exp2();
        let Some((num, den)) = self.exact else {
            return Ok(approx.floor() as u64);
        };
        let total = n as u64 * num;
        if total.is_multiple_of(den) {
            return Ok(1u64 << (total / den));
        }
        // 2^(total/den) is irrational here, so only rounding can put it on the wrong
        // side of an integer.
        let floor = approx.floor();
        let frac = approx - floor;
        let margin = approx * 1e-12 + 1e-9;
        if frac > margin && 1.0 - frac > margin {
            return Ok(floor as u64);
        }
        Ok(exact_floor_pow2(total, den, floor as u64))
    }
}

/// Largest `k` with `k^den ≤ 2^total`, searched upward from `guess - 1`.
fn exact_floor_pow2(total: u64, den: u64, guess: u64) -> u64 {
    let power = BigUint::one() << total;
    let fits = |k: u64| BigUint::from(k).pow(den as u32) <= power;
    let mut k = guess.saturating_sub(1).max(1);
    while !fits(k) && k > 1 {
        k -= 1;
    }
    while fits(k + 1) {
        k += 1;
    }
    k
}

impl FromStr for Rate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: f64 = s.trim().parse().map_err(|_| Error::InvalidRate(f64::NAN))?;
        let mut rate = Rate::new(bits)?;
        // Decimal literals longer than six places are not treated as exact.
        if let Some((_, frac)) = s.trim().split_once('.') {
            if frac.trim_end_matches('0').len() > RATE_DECIMALS as usize {
                rate.exact = None;
            }
        }
        Ok(rate)
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits)
    }
}

/// Penalty terms reported by mismatched experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchTerms {
    /// Single-letter `Δ_{1/(1+ρ)}(P||Q)` in bits.
    pub divergence: f64,
    /// `H_{1/(1+ρ)}(P) + Δ_{1/(1+ρ)}(P||Q)`: the rate the mismatched code needs.
    pub exponent: f64,
}

/// One row of a moment experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub n: usize,
    pub rate: f64,
    pub rho: f64,
    /// `M`.
    pub description_count: u64,
    /// `N`.
    pub used_descriptions: usize,
    pub moment: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub m_tilde: f64,
    /// `R − log2(M̃)/n`.
    pub delta: f64,
    pub mismatch: Option<MismatchTerms>,
}

impl MomentReport {
    pub const CSV_HEADER: [&'static str; 10] = [
        "n", "R", "rho", "M", "N", "moment", "lower", "upper", "m_tilde", "delta",
    ];
}

pub(crate) fn slack(rate: f64, mt: f64, n: usize) -> f64 {
    if mt <= 0.0 {
        f64::INFINITY
    } else {
        rate - mt.log2() / n as f64
    }
}

/// Report for a one-shot encoder (`n = 1`, `R = log2 M`).
pub fn one_shot_report<L: Law + ?Sized>(
    law: &L,
    enc: &TaskEncoder,
    rho: f64,
) -> Result<MomentReport> {
    let m = enc.description_count();
    let h = renyi_rho(law, rho)?;
    let mt = m_tilde(m, law.size());
    let rate = (m as f64).log2();
    Ok(MomentReport {
        n: 1,
        rate,
        rho,
        description_count: m,
        used_descriptions: enc.used_descriptions(),
        moment: moment(law, enc, rho)?,
        lower_bound: lower_from_entropy(h, m, rho),
        upper_bound: upper_from_exponent(h, m, law.size(), rho),
        m_tilde: mt,
        delta: slack(rate, mt, 1),
        mismatch: None,
    })
}

/// Builds the encoder for `X^n` with `⌊2^(nR)⌋` descriptions and reports its moment
/// next to both bounds.
pub fn block_experiment(law: &JointLaw, rate: &Rate, rho: f64) -> Result<MomentReport> {
    check_rho(rho)?;
    let n = law.block_length();
    let m = rate.description_count(n)?;
    let threshold = description_threshold(law.size());
    if (m as f64) <= threshold {
        return Err(Error::RateTooSmallForN { n, m, threshold });
    }
    let enc = build_encoder(law, rho, m)?;
    let h = renyi_rho(law, rho)?;
    let mt = m_tilde(m, law.size());
    Ok(MomentReport {
        n,
        rate: rate.bits(),
        rho,
        description_count: m,
        used_descriptions: enc.used_descriptions(),
        moment: moment(law, &enc, rho)?,
        lower_bound: lower_from_entropy(h, m, rho),
        upper_bound: upper_from_exponent(h, m, law.size(), rho),
        m_tilde: mt,
        delta: slack(rate.bits(), mt, n),
        mismatch: None,
    })
}

/// [`block_experiment`] for each `n` in `ns`, evaluated in parallel; results keep the
/// order of `ns`.
pub fn block_sweep(
    source: &Source,
    ns: &[usize],
    rate: &Rate,
    rho: f64,
    cap: EnumerationCap,
) -> Vec<Result<MomentReport>> {
    ns.par_iter()
        .map(|&n| {
            let law = source.joint(n, cap)?;
            block_experiment(&law, rate, rho)
        })
        .collect()
}

/// `2^(nρ(H_{1/(1+ρ)}(X^n)/n − R))` for the given source without enumerating tuples;
/// the lower bound with `2^(nR)` in place of `⌊2^(nR)⌋`.
pub fn rate_lower_bound(source: &Source, n: usize, rate: &Rate, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let h = source.block_entropy(tilde_rho(rho), n)?;
    Ok((rho * (h - n as f64 * rate.bits())).exp2())
}
