//! Finite distributions, sources over n-tuples, and the Rényi/KL quantities computed on them.
//!
//! Every law exposes log2-masses through [`Law`]; zero mass is `-inf`. Sums over large
//! alphabets go through [`log2_sum_exp2`] so that n-fold products never underflow.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::{log2_sum_exp2, CompensatedSum};

/// Inputs whose masses sum to within this distance of 1 are rescaled; others are rejected.
pub const NORMALIZATION_WINDOW: f64 = 1e-9;

/// Default bound on the number of n-tuples materialized by enumeration paths.
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 22;

/// Upper limit on `|X|^n` for [`iid_joint`], [`markov_joint`] and everything built on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCap(pub usize);

impl Default for EnumerationCap {
    fn default() -> Self {
        EnumerationCap(DEFAULT_ENUMERATION_CAP)
    }
}

impl EnumerationCap {
    fn check(self, base: usize, n: usize) -> Result<usize> {
        let tuples = (base as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if tuples > self.0 as u128 {
            return Err(Error::CapExceeded {
                tuples,
                cap: self.0,
            });
        }
        Ok(tuples as usize)
    }
}

/// A law over the dense alphabet `0..size()`.
pub trait Law: Sync {
    fn size(&self) -> usize;

    /// `log2 P(x)`, `-inf` when `P(x) = 0`.
    fn log_mass(&self, x: usize) -> f64;

    fn mass(&self, x: usize) -> f64 {
        self.log_mass(x).exp2()
    }
}

/// Probability mass function over `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    masses: Vec<f64>,
}

impl Pmf {
    /// Validates and rescales `masses`. The sum must lie in `[1 - 1e-9, 1 + 1e-9]`.
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        for (index, &value) in masses.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidMass { index, value });
            }
        }
        let sum = masses.iter().copied().collect::<CompensatedSum>().value();
        if (sum - 1.0).abs() > NORMALIZATION_WINDOW {
            return Err(Error::NotNormalized { sum });
        }
        let masses = if sum == 1.0 {
            masses
        } else {
            masses.into_iter().map(|m| m / sum).collect()
        };
        Ok(Pmf { masses })
    }

    /// Builds a law from nonnegative weights of any positive total.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidMass { index, value });
            }
        }
        let total = weights.iter().copied().collect::<CompensatedSum>().value();
        if total <= 0.0 {
            return Err(Error::NotNormalized { sum: total });
        }
        Pmf::new(weights.iter().map(|w| w / total).collect())
    }

    /// Exact input: the masses must be nonnegative and sum to exactly 1. Each mass is then
    /// rounded once to the nearest `f64`, so laws given by equal ratios compare equal.
    pub fn from_ratios(masses: &[BigRational]) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut total = BigRational::zero();
        for (index, m) in masses.iter().enumerate() {
            if m.is_negative() {
                return Err(Error::InvalidMass {
                    index,
                    value: m.to_f64().unwrap_or(f64::NAN),
                });
            }
            total += m;
        }
        if !total.is_one() {
            return Err(Error::NotNormalized {
                sum: total.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Pmf {
            masses: masses
                .iter()
                .map(|m| m.to_f64().expect("a ratio within [0, 1]"))
                .collect(),
        })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Pmf {
            masses: vec![1.0 / size as f64; size],
        })
    }

    /// Point mass on `symbol` within an alphabet of `size` symbols.
    pub fn degenerate(size: usize, symbol: usize) -> Result<Self> {
        if symbol >= size {
            return Err(Error::EmptyAlphabet);
        }
        let mut masses = vec![0.0; size];
        masses[symbol] = 1.0;
        Ok(Pmf { masses })
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(x, _)| x)
    }

    pub fn support_size(&self) -> usize {
        self.support().count()
    }

    /// True when `supp(self) ⊆ supp(other)`.
    pub fn support_within(&self, other: &Pmf) -> bool {
        self.len() == other.len() && self.support().all(|x| other.masses[x] > 0.0)
    }

    /// Mass-wise comparison within `tol`.
    pub fn approx_eq(&self, other: &Pmf, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .masses
                .iter()
                .zip(&other.masses)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

impl Law for Pmf {
    fn size(&self) -> usize {
        self.masses.len()
    }

    fn log_mass(&self, x: usize) -> f64 {
        self.masses[x].log2()
    }

    fn mass(&self, x: usize) -> f64 {
        self.masses[x]
    }
}

/// Time-invariant Markov chain over `0..states`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovSource {
    initial: Pmf,
    rows: Vec<Pmf>,
}

impl MarkovSource {
    /// `transitions[i][j]` is the probability of moving from state `i` to state `j`.
    pub fn new(initial: Pmf, transitions: Vec<Vec<f64>>) -> Result<Self> {
        let states = initial.len();
        if transitions.len() != states {
            return Err(Error::AlphabetMismatch {
                left: states,
                right: transitions.len(),
            });
        }
        let rows = transitions
            .into_iter()
            .enumerate()
            .map(|(row, masses)| {
                if masses.len() != states {
                    return Err(Error::RaggedTransitions {
                        row,
                        len: masses.len(),
                        states,
                    });
                }
                Pmf::new(masses)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MarkovSource { initial, rows })
    }

    /// The memoryless chain whose every row equals `p`.
    pub fn memoryless(p: Pmf) -> Self {
        MarkovSource {
            rows: vec![p.clone(); p.len()],
            initial: p,
        }
    }

    /// Two-state chain that keeps its state with probability `stay`, started uniformly.
    pub fn binary_symmetric(stay: f64) -> Result<Self> {
        MarkovSource::new(
            Pmf::uniform(2)?,
            vec![vec![stay, 1.0 - stay], vec![1.0 - stay, stay]],
        )
    }

    pub fn states(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &Pmf {
        &self.initial
    }

    pub fn transition(&self, from: usize, to: usize) -> f64 {
        self.rows[from].masses()[to]
    }

    pub fn rows(&self) -> &[Pmf] {
        &self.rows
    }
}

/// Law of the block `X^n` over the alphabet `0..base^n`.
///
/// Tuple `(x_1, ..., x_n)` has index `Σ x_i · base^(n-i)`, so `x_1` is the most
/// significant digit.
#[derive(Debug, Clone, PartialEq)]
pub struct JointLaw {
    n: usize,
    base: usize,
    log_masses: Vec<f64>,
}

const JOINT_TOLERANCE: f64 = 1e-9;

impl JointLaw {
    /// Wraps explicit log2-masses for tuples over `0..base`.
    pub fn from_log_masses(
        base: usize,
        n: usize,
        log_masses: Vec<f64>,
        cap: EnumerationCap,
    ) -> Result<Self> {
        if base == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if n == 0 {
            return Err(Error::InvalidBlockLength);
        }
        let tuples = cap.check(base, n)?;
        if log_masses.len() != tuples {
            return Err(Error::AlphabetMismatch {
                left: tuples,
                right: log_masses.len(),
            });
        }
        for (index, &value) in log_masses.iter().enumerate() {
            if value.is_nan() || value == f64::INFINITY || value > 1e-12 {
                return Err(Error::InvalidMass {
                    index,
                    value: value.exp2(),
                });
            }
        }
        let total = log2_sum_exp2(log_masses.iter().copied()).exp2();
        if (total - 1.0).abs() > JOINT_TOLERANCE {
            return Err(Error::NotNormalized { sum: total });
        }
        Ok(JointLaw {
            n,
            base,
            log_masses,
        })
    }

    pub fn block_length(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn log_masses(&self) -> &[f64] {
        &self.log_masses
    }

    pub fn tuple(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.n];
        for slot in digits.iter_mut().rev() {
            *slot = index % self.base;
            index /= self.base;
        }
        digits
    }

    pub fn index_of(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &x| acc * self.base + x)
    }
}

impl Law for JointLaw {
    fn size(&self) -> usize {
        self.log_masses.len()
    }

    fn log_mass(&self, x: usize) -> f64 {
        self.log_masses[x]
    }
}

/// The n-fold product law `P^n`.
pub fn iid_joint(p: &Pmf, n: usize, cap: EnumerationCap) -> Result<JointLaw> {
    if n == 0 {
        return Err(Error::InvalidBlockLength);
    }
    let base = p.len();
    let tuples = cap.check(base, n)?;
    let letter: Vec<f64> = (0..base).map(|x| p.log_mass(x)).collect();
    let mut log_masses = Vec::with_capacity(tuples);
    log_masses.extend_from_slice(&letter);
    for _ in 1..n {
        log_masses = log_masses
            .iter()
            .flat_map(|&prefix| letter.iter().map(move |&l| prefix + l))
            .collect();
    }
    Ok(JointLaw {
        n,
        base,
        log_masses,
    })
}

/// Law of the first `n` outputs of a Markov chain.
pub fn markov_joint(src: &MarkovSource, n: usize, cap: EnumerationCap) -> Result<JointLaw> {
    if n == 0 {
        return Err(Error::InvalidBlockLength);
    }
    let base = src.states();
    let tuples = cap.check(base, n)?;
    let log_rows: Vec<Vec<f64>> = src
        .rows()
        .iter()
        .map(|row| (0..base).map(|x| row.log_mass(x)).collect())
        .collect();
    let mut log_masses = Vec::with_capacity(tuples);
    log_masses.extend((0..base).map(|x| src.initial().log_mass(x)));
    for _ in 1..n {
        log_masses = log_masses
            .iter()
            .enumerate()
            .flat_map(|(index, &prefix)| log_rows[index % base].iter().map(move |&l| prefix + l))
            .collect();
    }
    Ok(JointLaw {
        n,
        base,
        log_masses,
    })
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0 && alpha != 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    Ok(())
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidRho(rho));
    }
    Ok(())
}

/// The order `1/(1+ρ)` that pairs with the ρ-th moment.
pub fn tilde_rho(rho: f64) -> f64 {
    1.0 / (1.0 + rho)
}

/// `log2 Σ P(x)^α`.
pub(crate) fn log2_power_sum<L: Law + ?Sized>(law: &L, alpha: f64) -> f64 {
    log2_sum_exp2((0..law.size()).map(|x| alpha * law.log_mass(x)))
}

/// Rényi entropy of order `alpha` in bits.
pub fn renyi_entropy<L: Law + ?Sized>(law: &L, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(log2_power_sum(law, alpha) / (1.0 - alpha))
}

/// Rényi entropy of order `1/(1+rho)`.
pub fn renyi_rho<L: Law + ?Sized>(law: &L, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    renyi_entropy(law, tilde_rho(rho))
}

/// `H_α(X^n)` for a Markov chain, by a forward recursion over states instead of
/// enumerating tuples. Cost is `O(n · states²)`.
pub fn markov_renyi_sum(src: &MarkovSource, alpha: f64, n: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(Error::InvalidBlockLength);
    }
    let states = src.states();
    let powered: Vec<Vec<f64>> = src
        .rows()
        .iter()
        .map(|row| (0..states).map(|x| alpha * row.log_mass(x)).collect())
        .collect();
    // log2 v_k(x)
    let mut v: Vec<f64> = (0..states)
        .map(|x| alpha * src.initial().log_mass(x))
        .collect();
    for _ in 1..n {
        v = (0..states)
            .map(|next| log2_sum_exp2((0..states).map(|cur| v[cur] + powered[cur][next])))
            .collect();
    }
    Ok(log2_sum_exp2(v.iter().copied()) / (1.0 - alpha))
}

/// `D(P||Q)` in bits; `+inf` when `supp(P) ⊄ supp(Q)`.
pub fn kl_divergence<P: Law + ?Sized, Q: Law + ?Sized>(p: &P, q: &Q) -> Result<f64> {
    if p.size() != q.size() {
        return Err(Error::AlphabetMismatch {
            left: p.size(),
            right: q.size(),
        });
    }
    let mut acc = CompensatedSum::new();
    for x in 0..p.size() {
        let px = p.mass(x);
        if px == 0.0 {
            continue;
        }
        let lq = q.log_mass(x);
        if lq == f64::NEG_INFINITY {
            return Ok(f64::INFINITY);
        }
        acc.add(px * (p.log_mass(x) - lq));
    }
    Ok(acc.value())
}

/// A source of task sequences whose block laws can be enumerated or summarized.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Iid(Pmf),
    Markov(MarkovSource),
}

impl Source {
    pub fn alphabet_size(&self) -> usize {
        match self {
            Source::Iid(p) => p.len(),
            Source::Markov(m) => m.states(),
        }
    }

    pub fn joint(&self, n: usize, cap: EnumerationCap) -> Result<JointLaw> {
        match self {
            Source::Iid(p) => iid_joint(p, n, cap),
            Source::Markov(m) => markov_joint(m, n, cap),
        }
    }

    /// `H_α(X^n)` without enumeration.
    pub fn block_entropy(&self, alpha: f64, n: usize) -> Result<f64> {
        match self {
            Source::Iid(p) => {
                if n == 0 {
                    return Err(Error::InvalidBlockLength);
                }
                Ok(n as f64 * renyi_entropy(p, alpha)?)
            }
            Source::Markov(m) => markov_renyi_sum(m, alpha, n),
        }
    }
}
