//! Partitions of `0..k`, cardinality budgets, and the greedy budget-respecting constructor.
//!
//! For any partition into `M` nonempty blocks, `Σ_x 1/L(x) = M` where `L(x)` is the size of
//! the block holding `x` ([`kraft_sum`]). Conversely, given budgets `λ(x)` with
//! `μ = Σ 1/λ(x)`, [`build_partition`] finds a partition with `L(x) ≤ min(λ(x), k)` using
//! at most [`subset_count_bound`] blocks.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A partition of the ground set `0..ground_size()` into nonempty blocks.
///
/// Blocks keep the order they were built in; elements inside a block are ascending.
/// Equality ignores block order.
#[derive(Debug, Clone)]
pub struct Partition {
    /// Elements laid out block after block.
    elements: Vec<usize>,
    /// `offsets[b]..offsets[b + 1]` is block `b` within `elements`.
    offsets: Vec<usize>,
    element_block: Vec<usize>,
}

impl Partition {
    pub fn from_blocks(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let ground: usize = blocks.iter().map(Vec::len).sum();
        let mut element_block = vec![usize::MAX; ground];
        let mut elements = Vec::with_capacity(ground);
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        offsets.push(0);
        for (b, mut block) in blocks.into_iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            block.sort_unstable();
            for &x in &block {
                if x >= ground {
                    return Err(Error::InvalidPartition(format!(
                        "element {x} outside ground set 0..{ground}"
                    )));
                }
                if element_block[x] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "element {x} appears in more than one block"
                    )));
                }
                element_block[x] = b;
            }
            elements.extend_from_slice(&block);
            offsets.push(elements.len());
        }
        Ok(Partition {
            elements,
            offsets,
            element_block,
        })
    }

    /// Partition induced by a labelling; blocks are numbered by first appearance.
    pub fn from_labels<T: Ord + Copy>(labels: &[T]) -> Self {
        let mut ids = BTreeMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (x, label) in labels.iter().enumerate() {
            let b = *ids.entry(*label).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(x);
        }
        Partition::from_blocks(blocks).expect("labelling always induces a partition")
    }

    pub fn singletons(size: usize) -> Self {
        Partition {
            elements: (0..size).collect(),
            offsets: (0..=size).collect(),
            element_block: (0..size).collect(),
        }
    }

    pub fn single_block(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Partition::from_blocks(vec![(0..size).collect()])
    }

    pub fn ground_size(&self) -> usize {
        self.element_block.len()
    }

    pub fn block_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.elements[self.offsets[b]..self.offsets[b + 1]]
    }

    pub fn blocks(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        (0..self.block_count()).map(move |b| self.block(b))
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.element_block[x]
    }

    pub fn block_len(&self, b: usize) -> usize {
        self.offsets[b + 1] - self.offsets[b]
    }

    /// `L(x)`: size of the block containing `x`.
    pub fn cell_size(&self, x: usize) -> usize {
        self.block_len(self.element_block[x])
    }

    /// Blocks sorted by their smallest element.
    pub fn canonical_blocks(&self) -> Vec<&[usize]> {
        let mut blocks: Vec<&[usize]> = self.blocks().collect();
        blocks.sort_unstable_by_key(|b| b[0]);
        blocks
    }

    /// Multiset of block sizes, ascending.
    pub fn block_size_profile(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = (0..self.block_count()).map(|b| self.block_len(b)).collect();
        sizes.sort_unstable();
        sizes
    }
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.ground_size() == other.ground_size()
            && self.block_count() == other.block_count()
            && self.canonical_blocks() == other.canonical_blocks()
    }
}

impl Eq for Partition {}

/// One line per block, space-separated ids, blocks ordered by smallest element.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in self.canonical_blocks() {
            let mut first = true;
            for x in block {
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
                first = false;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let block = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| {
                        Error::InvalidPartition(format!(
                            "line {}: `{tok}` is not an element id",
                            lineno + 1
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
        }
        if blocks.is_empty() {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        Partition::from_blocks(blocks)
    }
}

/// Cardinality budget `λ(x) ∈ ℕ ∪ {∞}`. `Finite` orders below `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Budget {
    Finite(u64),
    Infinite,
}

impl Budget {
    /// Whether a block of `size` elements fits within this budget.
    pub fn admits(self, size: usize) -> bool {
        match self {
            Budget::Finite(b) => size as u64 <= b,
            Budget::Infinite => true,
        }
    }

    /// `min(λ, cap)` as a count.
    pub fn capped(self, cap: usize) -> usize {
        match self {
            Budget::Finite(b) => b.min(cap as u64) as usize,
            Budget::Infinite => cap,
        }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Finite(b) => write!(f, "{b}"),
            Budget::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Budget {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Budget::Infinite),
            _ => match s.parse::<u64>() {
                Ok(0) => Err("budget must be at least 1".into()),
                Ok(b) => Ok(Budget::Finite(b)),
                Err(_) => Err(format!("`{s}` is neither a positive integer nor `inf`")),
            },
        }
    }
}

/// Per-element budgets over `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaBudget {
    budgets: Vec<Budget>,
}

impl LambdaBudget {
    pub fn new(budgets: Vec<Budget>) -> Result<Self> {
        if let Some(x) = budgets.iter().position(|&b| b == Budget::Finite(0)) {
            return Err(Error::ZeroBudget(x));
        }
        Ok(LambdaBudget { budgets })
    }

    pub fn finite(budgets: &[u64]) -> Result<Self> {
        LambdaBudget::new(budgets.iter().map(|&b| Budget::Finite(b)).collect())
    }

    pub fn budgets(&self) -> &[Budget] {
        &self.budgets
    }

    pub fn len(&self) -> usize {
        self.budgets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.budgets.is_empty()
    }

    /// `μ = Σ 1/λ(x)` exactly, with `1/∞ = 0`.
    pub fn mu(&self) -> BigRational {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for b in &self.budgets {
            if let Budget::Finite(v) = b {
                *counts.entry(*v).or_default() += 1;
            }
        }
        counts
            .into_iter()
            .fold(BigRational::zero(), |acc, (value, count)| {
                acc + BigRational::new(BigInt::from(count), BigInt::from(value))
            })
    }
}

/// `Σ_x 1/L(x)` as an exact rational.
pub fn kraft_sum(part: &Partition) -> BigRational {
    let mut by_size: BTreeMap<usize, u64> = BTreeMap::new();
    for x in 0..part.ground_size() {
        *by_size.entry(part.cell_size(x)).or_default() += 1;
    }
    by_size
        .into_iter()
        .fold(BigRational::zero(), |acc, (size, count)| {
            acc + BigRational::new(BigInt::from(count), BigInt::from(size))
        })
}

const GRID_POINTS: usize = 512;
const REFINE_STEPS: usize = 200;

/// Result of minimizing `⌊αμ + log_α k + 2⌋` over `α > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetCountBound {
    /// Smallest floor found over the grid, its refinement and `α = 2`.
    pub value: u64,
    /// An `α` attaining `value`.
    pub argmin_alpha: f64,
    /// The expression's unfloored value at `argmin_alpha`.
    pub argmin_expression: f64,
    /// The floor at `α = 2`.
    pub at_alpha_two: u64,
}

fn count_expression(alpha: f64, mu: f64, log2_size: f64) -> f64 {
    alpha * mu + log2_size / alpha.log2() + 2.0
}

/// Upper bound on the number of blocks [`build_partition`] needs.
///
/// `α` ranges over a geometric grid of 512 points in `(1, max(4, k)]`, the grid minimizer
/// is refined by golden-section search between its neighbours, and `α = 2` is always
/// evaluated. Any `α > 1` yields a valid bound.
pub fn subset_count_bound(mu: &BigRational, alphabet_size: usize) -> SubsetCountBound {
    let mu = mu.to_f64().unwrap_or(f64::INFINITY).max(0.0);
    let log2_size = (alphabet_size.max(1) as f64).log2();
    let top = (alphabet_size as f64).max(4.0);
    let f = |alpha: f64| count_expression(alpha, mu, log2_size);

    let grid: Vec<f64> = (1..=GRID_POINTS)
        .map(|i| top.powf(i as f64 / GRID_POINTS as f64))
        .collect();
    let (best_i, _) =
        grid.iter()
            .enumerate()
            .map(|(i, &a)| (i, f(a)))
            .fold(
                (0, f64::INFINITY),
                |acc, cur| if cur.1 < acc.1 { cur } else { acc },
            );

    let mut candidates = vec![grid[best_i], 2.0];
    // Golden-section refinement inside the bracket around the grid minimizer.
    let mut lo = if best_i == 0 {
        1.0 + 1e-12
    } else {
        grid[best_i - 1]
    };
    let mut hi = grid[(best_i + 1).min(GRID_POINTS - 1)];
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..REFINE_STEPS {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        }
    }
    candidates.push(a);
    candidates.push(b);

    let (argmin_alpha, argmin_expression) =
        candidates
            .iter()
            .map(|&a| (a, f(a)))
            .fold(
                (2.0, f(2.0)),
                |acc, cur| if cur.1 < acc.1 { cur } else { acc },
            );
    SubsetCountBound {
        value: argmin_expression.floor() as u64,
        argmin_alpha,
        argmin_expression,
        at_alpha_two: f(2.0).floor() as u64,
    }
}

/// Greedy construction of a partition with `L(x) ≤ min(λ(x), k)`.
///
/// Elements with `λ(x) ≥ k` form the first block. The rest are sorted by `(λ(x), id)`
/// and swept in order: each new block starts at the first unplaced element `x` and takes
/// the next `λ(x)` elements, or all remaining ones if they fit.
pub fn build_partition(lambda: &LambdaBudget) -> Partition {
    let k = lambda.len();
    let budgets = lambda.budgets();
    let absorbs = |b: Budget| b >= Budget::Finite(k as u64);

    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let first: Vec<usize> = (0..k).filter(|&x| absorbs(budgets[x])).collect();
    if !first.is_empty() {
        blocks.push(first);
    }

    let mut rest: Vec<usize> = (0..k).filter(|&x| !absorbs(budgets[x])).collect();
    rest.sort_by_key(|&x| (budgets[x], x));
    let mut pos = 0;
    while pos < rest.len() {
        let take = budgets[rest[pos]].capped(k);
        let end = if rest.len() - pos <= take {
            rest.len()
        } else {
            pos + take
        };
        blocks.push(rest[pos..end].to_vec());
        pos = end;
    }
    Partition::from_blocks(blocks).expect("sweep covers every element exactly once")
}

/// An element whose block exceeds its budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetViolation {
    pub element: usize,
    pub block_size: usize,
    pub allowed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetCheck {
    Satisfied,
    Violated(BudgetViolation),
}

impl BudgetCheck {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, BudgetCheck::Satisfied)
    }
}

/// Checks `L(x) ≤ min(λ(x), k)` for every element, reporting the first failure.
pub fn verify_budget(part: &Partition, lambda: &LambdaBudget) -> Result<BudgetCheck> {
    let k = part.ground_size();
    if lambda.len() != k {
        return Err(Error::GroundSetMismatch {
            partition: k,
            budget: lambda.len(),
        });
    }
    for (x, &b) in lambda.budgets().iter().enumerate() {
        let allowed = b.capped(k);
        let block_size = part.cell_size(x);
        if block_size > allowed {
            return Ok(BudgetCheck::Violated(BudgetViolation {
                element: x,
                block_size,
                allowed,
            }));
        }
    }
    Ok(BudgetCheck::Satisfied)
}
