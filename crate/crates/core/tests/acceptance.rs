//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits non-zero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use taskcodes::random::{
    instance_rng, random_budget, random_partition, random_pmf, random_sparse_pmf,
};
use taskcodes::{
    block_sweep, brute_force_optimum, build_encoder, build_partition, divergence_limits, kraft_sum,
    lower_bound, markov_joint, markov_renyi_sum, mismatched_sweep, moment,
    product_additivity_check, rate_form_bound, renyi_entropy, renyi_rho, subset_count_bound,
    sundaresan_divergence, upper_bound, verify_budget, EnumerationCap, LambdaBudget, MarkovSource,
    MomentReport, Partition, Pmf, Rate, Source,
};

const SEED: u64 = 0;
const H_HALF_BERNOULLI: f64 = 0.678_07;
const LOG2_4_3: f64 = 0.415_037_499_278_843_8;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// All partitions of `0..size` into at most `max_blocks` blocks, by restricted-growth
/// strings. Independent of the library's search.
fn all_partitions(size: usize, max_blocks: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, used: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for label in 0..(used + 1).min(max) {
            cur[i] = label;
            rec(i + 1, used.max(label + 1), max, cur, out);
        }
    }
    let mut out = Vec::new();
    rec(0, 0, max_blocks, &mut vec![0; size], &mut out);
    out
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

fn non_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + 1e-12)
}

fn reports(results: Vec<taskcodes::Result<MomentReport>>) -> Result<Vec<MomentReport>, String> {
    results
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())
}

fn kraft_identity() -> Outcome {
    let mut failures = 0;
    for i in 0..1000 {
        let mut rng = instance_rng(SEED, i);
        let size = rng.random_range(2..=64);
        let part = random_partition(&mut rng, size);
        if kraft_sum(&part) != int(part.block_count() as i64) {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("1000 partitions, {failures} mismatches"),
    )
}

fn counterexample() -> Outcome {
    let lambda = LambdaBudget::finite(&[1, 2, 4, 4]).unwrap();
    let mu_ok = lambda.mu() == int(2);
    let part = build_partition(&lambda);
    let three = part.block_count() == 3;
    let feasible_two = all_partitions(4, 2)
        .iter()
        .map(|labels| Partition::from_labels(labels))
        .filter(|p| verify_budget(p, &lambda).unwrap().is_satisfied())
        .count();
    outcome(
        mu_ok
            && three
            && feasible_two == 0
            && verify_budget(&part, &lambda).unwrap().is_satisfied(),
        format!(
            "mu = {}, constructed blocks = {}, budget-respecting partitions into <= 2 blocks = {}",
            lambda.mu(),
            part.block_count(),
            feasible_two
        ),
    )
}

fn constructor_guarantee() -> Outcome {
    let mut worst_slack = i64::MAX;
    let mut failures = Vec::new();
    for i in 0..1000 {
        let mut rng = instance_rng(SEED + 1, i);
        let size = rng.random_range(1..=64);
        let lambda = random_budget(&mut rng, size);
        let part = build_partition(&lambda);
        let respects = verify_budget(&part, &lambda).unwrap().is_satisfied();
        let bound = subset_count_bound(&lambda.mu(), size).value;
        worst_slack = worst_slack.min(bound as i64 - part.block_count() as i64);
        if !respects || part.block_count() as u64 > bound {
            failures.push(i);
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "1000 budgets, failures at {:?}, min (bound - blocks) = {worst_slack}",
            failures
        ),
    )
}

fn sandwich() -> Outcome {
    let rhos = [0.5, 1.0, 2.0];
    let mut failures = Vec::new();
    let mut tightest = f64::INFINITY;
    for i in 0..200 {
        let mut rng = instance_rng(SEED + 2, i);
        let size = rng.random_range(1..=8usize);
        let rho = rhos[rng.random_range(0..3)];
        let threshold = (size as f64).log2() + 2.0;
        let lo = threshold.floor() as u64 + 1;
        let m = rng.random_range(lo..=size as u64 + 2);
        let p = random_sparse_pmf(&mut rng, size, 0.15);
        let lb = lower_bound(&p, m, rho).unwrap();
        let (best, _) = brute_force_optimum(&p, m, rho).unwrap();
        let enc = build_encoder(&p, rho, m).unwrap();
        let constructed = moment(&p, &enc, rho).unwrap();
        let ub = upper_bound(&p, m, rho).unwrap();
        tightest = tightest.min(ub - constructed);
        let ok = lb <= best + 1e-9
            && best <= constructed + 1e-9
            && constructed < ub
            && enc.used_descriptions() as u64 <= m;
        if !ok {
            failures.push((i, lb, best, constructed, ub));
        }
    }
    outcome(
        failures.is_empty(),
        format!("200 instances, failures {failures:?}, min (upper - constructed) = {tightest:.4}"),
    )
}

fn hoelder_tightness() -> Outcome {
    let p = Pmf::uniform(8).unwrap();
    let (best, part) = brute_force_optimum(&p, 2, 1.0).unwrap();
    let lb = lower_bound(&p, 2, 1.0).unwrap();
    outcome(
        (best - 4.0).abs() <= 1e-12 && (lb - 4.0).abs() <= 1e-12,
        format!(
            "optimum = {best}, lower bound = {lb}, block sizes {:?}",
            part.block_size_profile()
        ),
    )
}

fn iid_phase_transition() -> Outcome {
    let p = Pmf::new(vec![0.9, 0.1]).unwrap();
    let h = renyi_rho(&p, 1.0).unwrap();
    let rate_ok = (h - H_HALF_BERNOULLI).abs() < 1e-5;
    let source = Source::Iid(p);
    let cap = EnumerationCap::default();

    let above = match reports(block_sweep(
        &source,
        &[8, 12, 16],
        &Rate::new(0.9).unwrap(),
        1.0,
        cap,
    )) {
        Ok(r) => r,
        Err(e) => return outcome(false, e),
    };
    let moments: Vec<f64> = above.iter().map(|r| r.moment).collect();
    let above_ok = strictly_decreasing(&moments) && moments[2] < 1.5;

    let below = match reports(block_sweep(
        &source,
        &[12, 16],
        &Rate::new(0.4).unwrap(),
        1.0,
        cap,
    )) {
        Ok(r) => r,
        Err(e) => return outcome(false, e),
    };
    let lb16 = below[1].lower_bound;
    let predicted = (16.0 * (h - 0.4)).exp2();
    let below_ok = lb16 > (16.0f64 * 0.27).exp2()
        && lb16 >= predicted / 2.0
        && lb16 <= predicted * 2.0
        && below[1].lower_bound > below[0].lower_bound;
    outcome(
        rate_ok && above_ok && below_ok,
        format!(
            "H = {h:.5}; R = 0.9 moments (n = 8, 12, 16) = {moments:.4?}; \
             R = 0.4 lower bound at n = 16 = {lb16:.3} vs 2^(16(H - 0.4)) = {predicted:.3}"
        ),
    )
}

fn divergence_properties() -> Outcome {
    let alphas = [0.3, 0.5, 2.0, 5.0];
    let mut negative = 0;
    let mut zero_mismatch = 0;
    let mut infinity_mismatch = 0;
    let mut limit_failures = 0;
    let mut worst_gap = 0.0f64;
    let mut equal_pairs = 0;
    for i in 0..1000 {
        let mut rng = instance_rng(SEED + 3, i);
        let size = rng.random_range(2..=6);
        let p = random_pmf(&mut rng, size);
        let q = if rng.random_bool(0.1) {
            equal_pairs += 1;
            p.clone()
        } else {
            random_pmf(&mut rng, size)
        };
        let equal = p.approx_eq(&q, 1e-12);
        for &a in &alphas {
            let d = sundaresan_divergence(&p, &q, a).unwrap().value;
            if d < 0.0 {
                negative += 1;
            }
            if (d < 1e-12) != equal {
                zero_mismatch += 1;
            }
        }
        let limits = divergence_limits(&p, &q).unwrap();
        worst_gap = worst_gap.max(limits.max_probe_gap());
        if !limits.probes_agree(1e-2) {
            limit_failures += 1;
        }

        // sparse pairs exercise both support conditions and the α → 0 limit
        let ps = random_sparse_pmf(&mut rng, size, 0.3);
        let qs = random_sparse_pmf(&mut rng, size, 0.3);
        let within = ps.support_within(&qs);
        let disjoint = ps.support().all(|x| qs.masses()[x] == 0.0);
        for &a in &alphas {
            let d = sundaresan_divergence(&ps, &qs, a).unwrap();
            let expected = (a < 1.0 && !within) || (a > 1.0 && disjoint);
            if d.is_infinite() != expected {
                infinity_mismatch += 1;
            }
            if d.value < 0.0 {
                negative += 1;
            }
        }
        if within {
            let limits = divergence_limits(&ps, &qs).unwrap();
            worst_gap = worst_gap.max(limits.max_probe_gap());
            if !limits.probes_agree(1e-2) {
                limit_failures += 1;
            }
        }
    }
    let fair = Pmf::new(vec![0.5, 0.5]).unwrap();
    let skew = Pmf::new(vec![0.9, 0.1]).unwrap();
    let anchor = sundaresan_divergence(&fair, &skew, 0.5).unwrap().value;
    let anchor_ok = (anchor - LOG2_4_3).abs() <= 1e-9;
    outcome(
        negative == 0 && zero_mismatch == 0 && infinity_mismatch == 0 && limit_failures == 0 && anchor_ok,
        format!(
            "1000 pairs ({equal_pairs} equal): negative {negative}, zero-iff-equal violations {zero_mismatch}, \
             infinity violations {infinity_mismatch}, limit failures {limit_failures} (worst gap {worst_gap:.2e}), \
             Delta_1/2 anchor = {anchor:.12}"
        ),
    )
}

fn additivity() -> Outcome {
    let cap = EnumerationCap::default();
    let mut failures = 0;
    let mut checks = 0;
    for i in 0..100 {
        let mut rng = instance_rng(SEED + 4, i);
        let size = rng.random_range(2..=4);
        let p = random_pmf(&mut rng, size);
        let q = random_pmf(&mut rng, size);
        for &a in &[0.3, 0.5, 2.0, 5.0] {
            for n in 1..=6 {
                checks += 1;
                if !product_additivity_check(&p, &q, a, n, cap).unwrap() {
                    failures += 1;
                }
            }
        }
    }
    outcome(
        failures == 0,
        format!("{checks} checks over 100 pairs, {failures} failures"),
    )
}

fn mismatch_penalty() -> Outcome {
    let cap = EnumerationCap::default();
    let p = Pmf::new(vec![0.5, 0.5]).unwrap();
    let q = Pmf::new(vec![0.9, 0.1]).unwrap();
    let h = renyi_rho(&p, 1.0).unwrap();
    let d = sundaresan_divergence(&p, &q, 0.5).unwrap().value;
    let ns: Vec<usize> = (1..=16).collect();

    let mut below_bound = true;
    let mut feasible = 0;
    let mut by_rate = Vec::new();
    for rate in [1.6, 1.2] {
        let rate = Rate::new(rate).unwrap();
        let rows: Vec<MomentReport> = mismatched_sweep(&p, &q, &ns, &rate, 1.0, cap)
            .into_iter()
            .filter_map(Result::ok)
            .collect();
        feasible += rows.len();
        below_bound &= rows.iter().all(|r| r.moment < r.upper_bound);
        by_rate.push(rows);
    }
    let at = |rows: &[MomentReport], n: usize| rows.iter().find(|r| r.n == n).map(|r| r.moment);
    let high: Vec<f64> = [8, 12, 16]
        .iter()
        .filter_map(|&n| at(&by_rate[0], n))
        .collect();
    let high_ok = high.len() == 3 && strictly_decreasing(&high) && high[2] < 2.0;

    let matched = match reports(block_sweep(
        &Source::Iid(p.clone()),
        &[8, 12, 16],
        &Rate::new(1.2).unwrap(),
        1.0,
        cap,
    )) {
        Ok(r) => r,
        Err(e) => return outcome(false, e),
    };
    let matched_moments: Vec<f64> = matched.iter().map(|r| r.moment).collect();
    let matched_ok = non_increasing(&matched_moments) && matched_moments[2] < 1.1;
    let rate_bounds: Vec<f64> = by_rate[1]
        .iter()
        .filter(|r| r.n >= 8)
        .filter_map(rate_form_bound)
        .collect();
    let gap_ok = rate_bounds.len() == 9 && rate_bounds.iter().all(|&b| b > 2.0);
    outcome(
        below_bound && high_ok && matched_ok && gap_ok && feasible > 0,
        format!(
            "H + Delta = {:.5}; {feasible} feasible rows all below bound: {below_bound}; \
             R = 1.6 mismatched moments (8, 12, 16) = {high:.4?}; R = 1.2 matched = {matched_moments:.4?}, \
             mismatched rate-form bound min over n >= 8 = {:.3}",
            h + d,
            rate_bounds.iter().copied().fold(f64::INFINITY, f64::min)
        ),
    )
}

fn markov_machinery() -> Outcome {
    let mut worst = 0.0f64;
    let mut compared = 0;
    for states in 2..=4usize {
        for i in 0..2 {
            let mut rng = instance_rng(SEED + 5, (states * 10 + i) as u64);
            let initial = random_sparse_pmf(&mut rng, states, 0.2);
            let rows = (0..states)
                .map(|_| random_sparse_pmf(&mut rng, states, 0.2).masses().to_vec())
                .collect();
            let src = MarkovSource::new(initial, rows).unwrap();
            let max_n = if states == 4 && i == 1 { 12 } else { 10 };
            for n in 1..=max_n {
                let cap = EnumerationCap(1 << 24);
                let joint = markov_joint(&src, n, cap).unwrap();
                for &a in &[0.5, 2.0] {
                    let dp = markov_renyi_sum(&src, a, n).unwrap();
                    let en = renyi_entropy(&joint, a).unwrap();
                    worst = worst.max((dp - en).abs());
                    compared += 1;
                }
            }
        }
    }
    let dp_ok = worst <= 1e-9;

    let sticky = MarkovSource::binary_symmetric(0.9).unwrap();
    let h24 = markov_renyi_sum(&sticky, 0.5, 24).unwrap() / 24.0;
    let round6 = |x: f64| (x * 1e6).round() / 1e6;
    let r_hi = Rate::new(round6(h24 + 0.15)).unwrap();
    let r_lo = Rate::new(round6(h24 - 0.15)).unwrap();
    let source = Source::Markov(sticky.clone());
    let cap = EnumerationCap::default();
    let ns = [8, 12, 16];
    let (hi, lo) = match (
        reports(block_sweep(&source, &ns, &r_hi, 1.0, cap)),
        reports(block_sweep(&source, &ns, &r_lo, 1.0, cap)),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return outcome(false, e),
    };
    let hi_moments: Vec<f64> = hi.iter().map(|r| r.moment).collect();
    let lo_bounds: Vec<f64> = lo.iter().map(|r| r.lower_bound).collect();
    let h16 = markov_renyi_sum(&sticky, 0.5, 16).unwrap();
    let predicted = (h16 - 16.0 * r_lo.bits()).exp2();
    let hi_ok = strictly_decreasing(&hi_moments) && hi_moments[2] < 1.5;
    let lo_ok = lo_bounds.windows(2).all(|w| w[1] > w[0])
        && lo_bounds[2] >= predicted / 2.0
        && lo_bounds[2] <= predicted * 2.0
        && lo_bounds[2] > (16.0f64 * 0.1).exp2();
    outcome(
        dp_ok && hi_ok && lo_ok,
        format!(
            "{compared} DP/enumeration pairs, worst gap {worst:.2e}; H_24/24 = {h24:.5}; \
             R = {} moments (8, 12, 16) = {hi_moments:.4?}; R = {} lower bounds = {lo_bounds:.3?}",
            r_hi.bits(),
            r_lo.bits()
        ),
    )
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check, Duration); 10] = [
        (
            "C1 Kraft-analog identity",
            kraft_identity,
            Duration::from_secs(1),
        ),
        (
            "C2 counterexample regression",
            counterexample,
            Duration::from_secs(1),
        ),
        (
            "C3 constructor guarantee",
            constructor_guarantee,
            Duration::from_secs(5),
        ),
        ("C4 one-shot sandwich", sandwich, Duration::from_secs(30)),
        (
            "C5 Hoelder tightness",
            hoelder_tightness,
            Duration::from_secs(30),
        ),
        (
            "C6 IID phase transition",
            iid_phase_transition,
            Duration::from_secs(60),
        ),
        (
            "C7 divergence properties",
            divergence_properties,
            Duration::from_secs(10),
        ),
        ("C8 product additivity", additivity, Duration::from_secs(10)),
        (
            "C9 mismatch penalty",
            mismatch_penalty,
            Duration::from_secs(60),
        ),
        (
            "C10 Markov rate machinery",
            markov_machinery,
            Duration::from_secs(60),
        ),
    ];
    let mut all = true;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let passed = result.passed && in_time;
        all &= passed;
        println!(
            "[{}] {name} ({:.2}s / {}s): {}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            result.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
