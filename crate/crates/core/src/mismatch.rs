//! Encoders designed for the wrong law, and the divergence that prices the mistake.
//!
//! Building the budgets from `Q` while tasks are drawn from `P` costs
//! `Δ_{1/(1+ρ)}(P||Q)` extra bits in the exponent of the moment bound, where
//!
//! ```text
//! Δ_α(P||Q) = log2 [ Σ Q^α / (Σ P^α)^(1/(1−α)) · (Σ P / Q^(1−α))^(α/(1−α)) ]
//! ```
//!
//! with `0/0 = 0` and `a/0 = ∞` for `a > 0`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::log2_sum_exp2;
use crate::probability::{
    check_alpha, check_rho, iid_joint, kl_divergence, log2_power_sum, renyi_rho, tilde_rho,
    EnumerationCap, Law, Pmf,
};
use crate::task_code::{
    build_encoder, description_threshold, lower_from_entropy, m_tilde, moment, slack,
    upper_from_exponent, MismatchTerms, MomentReport, Rate, TaskEncoder,
};

/// Tolerance for membership in the argmax set of `Q`.
pub const ARGMAX_TOLERANCE: f64 = 1e-12;

/// Orders at which [`divergence_limits`] evaluates the divergence numerically.
pub const PROBE_ALPHAS: [f64; 4] = [1e-3, 1.0 - 1e-4, 1.0 + 1e-4, 1e3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceValue {
    pub alpha: f64,
    /// Bits; `+inf` allowed.
    pub value: f64,
}

impl DivergenceValue {
    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }
}

fn check_sizes<P: Law + ?Sized, Q: Law + ?Sized>(p: &P, q: &Q) -> Result<()> {
    if p.size() != q.size() {
        return Err(Error::AlphabetMismatch {
            left: p.size(),
            right: q.size(),
        });
    }
    Ok(())
}

/// `Δ_α(P||Q)`, each of its three power sums taken in the log domain.
pub fn sundaresan_divergence<P: Law + ?Sized, Q: Law + ?Sized>(
    p: &P,
    q: &Q,
    alpha: f64,
) -> Result<DivergenceValue> {
    check_alpha(alpha)?;
    check_sizes(p, q)?;
    let q_power = log2_power_sum(q, alpha);
    let p_power = log2_power_sum(p, alpha);
    // log2 Σ P(x) Q(x)^(α−1); P(x) = 0 contributes nothing, even where Q(x) = 0.
    let cross = log2_sum_exp2((0..p.size()).filter_map(|x| {
        let lp = p.log_mass(x);
        (lp != f64::NEG_INFINITY).then(|| lp + (alpha - 1.0) * q.log_mass(x))
    }));
    let scale = 1.0 - alpha;
    let coefficient = alpha / scale;
    let value = if (coefficient > 0.0 && cross == f64::INFINITY)
        || (coefficient < 0.0 && cross == f64::NEG_INFINITY)
    {
        f64::INFINITY
    } else {
        (q_power - p_power / scale + coefficient * cross).max(0.0)
    };
    Ok(DivergenceValue { alpha, value })
}

/// Rényi divergence `D_α(P||Q) = 1/(α−1) · log2 Σ P^α Q^(1−α)`.
pub fn renyi_divergence<P: Law + ?Sized, Q: Law + ?Sized>(p: &P, q: &Q, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_sizes(p, q)?;
    let sum = log2_sum_exp2((0..p.size()).filter_map(|x| {
        let lp = p.log_mass(x);
        (lp != f64::NEG_INFINITY).then(|| alpha * lp + (1.0 - alpha) * q.log_mass(x))
    }));
    let value = sum / (alpha - 1.0);
    Ok(if value.is_nan() {
        f64::INFINITY
    } else {
        value.max(0.0)
    })
}

/// Closed-form limits of `Δ_α(P||Q)` and numeric probes near each of them.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceLimits {
    /// `α → 1`: `D(P||Q)`.
    pub kl: f64,
    /// `α → 0`: `log2(|supp Q| / |supp P|)`; `None` unless `supp P ⊆ supp Q`.
    pub alpha_to_zero: Option<f64>,
    /// `α → ∞`: `log2(max P / mean of P over argmax Q)`.
    pub alpha_to_infinity: f64,
    /// `(α, Δ_α)` at each of [`PROBE_ALPHAS`].
    pub probes: Vec<(f64, f64)>,
}

fn gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

impl DivergenceLimits {
    /// Largest distance between a probe and the limit it approximates. Limits that are
    /// undefined or infinite are skipped: a probe at finite α cannot get close to them.
    pub fn max_probe_gap(&self) -> f64 {
        let mut worst = 0.0f64;
        for &(alpha, value) in &self.probes {
            let target = if alpha < 0.5 {
                match self.alpha_to_zero {
                    Some(t) => t,
                    None => continue,
                }
            } else if alpha > 2.0 {
                self.alpha_to_infinity
            } else {
                self.kl
            };
            if target.is_infinite() && value.is_finite() {
                continue;
            }
            worst = worst.max(gap(value, target));
        }
        worst
    }

    pub fn probes_agree(&self, tol: f64) -> bool {
        self.max_probe_gap() <= tol
    }
}

pub fn divergence_limits(p: &Pmf, q: &Pmf) -> Result<DivergenceLimits> {
    check_sizes(p, q)?;
    let kl = kl_divergence(p, q)?;
    let alpha_to_zero = p
        .support_within(q)
        .then(|| (q.support_size() as f64 / p.support_size() as f64).log2());

    let q_max = q.masses().iter().copied().fold(0.0, f64::max);
    let argmax: Vec<usize> = (0..q.len())
        .filter(|&x| q.masses()[x] >= q_max - ARGMAX_TOLERANCE)
        .collect();
    let mean = argmax.iter().map(|&x| p.masses()[x]).sum::<f64>() / argmax.len() as f64;
    let p_max = p.masses().iter().copied().fold(0.0, f64::max);
    let alpha_to_infinity = if mean == 0.0 {
        f64::INFINITY
    } else {
        (p_max / mean).log2()
    };

    let probes = PROBE_ALPHAS
        .iter()
        .map(|&a| sundaresan_divergence(p, q, a).map(|d| (a, d.value)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DivergenceLimits {
        kl,
        alpha_to_zero,
        alpha_to_infinity,
        probes,
    })
}

/// Whether `Δ_α(P^n||Q^n) = n Δ_α(P||Q)` within `1e-9 · n`, computed over enumerated
/// n-tuples.
pub fn product_additivity_check(
    p: &Pmf,
    q: &Pmf,
    alpha: f64,
    n: usize,
    cap: EnumerationCap,
) -> Result<bool> {
    let single = sundaresan_divergence(p, q, alpha)?.value;
    let product =
        sundaresan_divergence(&iid_joint(p, n, cap)?, &iid_joint(q, n, cap)?, alpha)?.value;
    if single == f64::INFINITY || product == f64::INFINITY {
        return Ok(single == product);
    }
    Ok((product - n as f64 * single).abs() <= 1e-9 * n as f64)
}

/// An encoder built from `Q` and evaluated under `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct MismatchedCode {
    /// `1 + 2^(ρ(H_{1/(1+ρ)}(P) + Δ_{1/(1+ρ)}(P||Q) − log2 M̃))`.
    pub bound: f64,
    /// Moment of `encoder` under `P`.
    pub moment: f64,
    pub divergence: f64,
    pub encoder: TaskEncoder,
}

pub fn mismatched_bound<P: Law + ?Sized, Q: Law + ?Sized>(
    p: &P,
    q: &Q,
    m: u64,
    rho: f64,
) -> Result<MismatchedCode> {
    check_rho(rho)?;
    check_sizes(p, q)?;
    let encoder = build_encoder(q, rho, m)?;
    let moment = moment(p, &encoder, rho)?;
    let h = renyi_rho(p, rho)?;
    let divergence = sundaresan_divergence(p, q, tilde_rho(rho))?.value;
    let bound = upper_from_exponent(h + divergence, m, p.size(), rho);
    Ok(MismatchedCode {
        bound,
        moment,
        divergence,
        encoder,
    })
}

/// Block experiment with the encoder built from `Q^n` and the moment taken under `P^n`.
pub fn mismatched_block_experiment(
    p: &Pmf,
    q: &Pmf,
    rate: &Rate,
    rho: f64,
    n: usize,
    cap: EnumerationCap,
) -> Result<MomentReport> {
    check_rho(rho)?;
    check_sizes(p, q)?;
    let m = rate.description_count(n)?;
    let pn = iid_joint(p, n, cap)?;
    let threshold = description_threshold(pn.size());
    if (m as f64) <= threshold {
        return Err(Error::RateTooSmallForN { n, m, threshold });
    }
    let qn = iid_joint(q, n, cap)?;
    let order = tilde_rho(rho);
    let encoder = build_encoder(&qn, rho, m)?;
    let h = renyi_rho(&pn, rho)?;
    let divergence_n = sundaresan_divergence(&pn, &qn, order)?.value;
    let divergence = sundaresan_divergence(p, q, order)?.value;
    let mt = m_tilde(m, pn.size());
    Ok(MomentReport {
        n,
        rate: rate.bits(),
        rho,
        description_count: m,
        used_descriptions: encoder.used_descriptions(),
        moment: moment(&pn, &encoder, rho)?,
        lower_bound: lower_from_entropy(h, m, rho),
        upper_bound: upper_from_exponent(h + divergence_n, m, pn.size(), rho),
        m_tilde: mt,
        delta: slack(rate.bits(), mt, n),
        mismatch: Some(MismatchTerms {
            divergence,
            exponent: renyi_rho(p, rho)? + divergence,
        }),
    })
}

/// [`mismatched_block_experiment`] over several block lengths, in parallel, in order.
pub fn mismatched_sweep(
    p: &Pmf,
    q: &Pmf,
    ns: &[usize],
    rate: &Rate,
    rho: f64,
    cap: EnumerationCap,
) -> Vec<Result<MomentReport>> {
    ns.par_iter()
        .map(|&n| mismatched_block_experiment(p, q, rate, rho, n, cap))
        .collect()
}

/// `1 + 2^(nρ(H_{1/(1+ρ)}(X_1) + Δ − R + δ_n))` from the single-letter terms of a
/// mismatched report.
pub fn rate_form_bound(report: &MomentReport) -> Option<f64> {
    let terms = report.mismatch?;
    if terms.exponent == f64::INFINITY || report.delta == f64::INFINITY {
        return Some(f64::INFINITY);
    }
    let n = report.n as f64;
    Some(1.0 + (n * report.rho * (terms.exponent - report.rate + report.delta)).exp2())
}
