use std::io::{self, Write};
use std::path::Path;

use rand::Rng;
use taskcodes::random::{instance_rng, random_sparse_pmf};
use taskcodes::task_code::description_threshold;
use taskcodes::{
    block_sweep, brute_force_optimum, build_encoder, build_partition, kl_divergence, lower_bound,
    mismatched_sweep, moment, one_shot_report, renyi_divergence, subset_count_bound,
    sundaresan_divergence, tilde_rho, upper_bound, EnumerationCap, Error, MomentReport, Partition,
    Pmf, Rate, Source, TaskEncoder,
};

use crate::input::{read_budgets, read_markov, read_partition, read_pmf};
use crate::output::{num, report_cells, Table};
use crate::{Cli, CliError, Command};

const MIN_CAP: usize = 1 << 10;
const DEFAULT_ALPHAS: [f64; 10] = [0.1, 0.25, 0.5, 0.75, 0.9, 1.1, 1.5, 2.0, 4.0, 8.0];
const ORACLE_MAX_SIZE: usize = 8;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.cap < MIN_CAP {
        return Err(CliError::Usage(format!("--cap must be at least {MIN_CAP}")));
    }
    match cli.command {
        Command::Entropy => entropy(cli),
        Command::Construct => construct(cli),
        Command::Moment => evaluate(cli),
        Command::Oracle => oracle(cli),
        Command::Sweep => sweep(cli, cli.q.as_deref()),
        Command::Mismatch => mismatch(cli),
    }
}

fn required<'a, T>(value: &'a Option<T>, flag: &str, command: &str) -> Result<&'a T, CliError> {
    value
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("`{command}` needs {flag}")))
}

fn source(cli: &Cli) -> Result<Source, CliError> {
    match (&cli.pmf, &cli.markov) {
        (Some(p), None) => Ok(Source::Iid(read_pmf(p)?)),
        (None, Some(m)) => Ok(Source::Markov(read_markov(m)?)),
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either --pmf or --markov, not both".into(),
        )),
        (None, None) => Err(CliError::Usage(
            "a law is needed: --pmf FILE or --markov FILE".into(),
        )),
    }
}

/// Partition text on stdout; a blank line separates it from a CSV that follows on stdout.
fn print_partition(part: &Partition, csv_follows: bool) -> Result<(), CliError> {
    let mut stdout = io::stdout().lock();
    let separator = if csv_follows { "\n" } else { "" };
    write!(stdout, "{part}{separator}")
        .and_then(|()| stdout.flush())
        .map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        })
}

/// `H_α` per order, or `H_α(X^n)` and `H_α(X^n)/n` per block length when `--n` is given.
fn entropy(cli: &Cli) -> Result<(), CliError> {
    let source = source(cli)?;
    let (label, orders): (&str, Vec<(f64, f64)>) = if cli.alpha.is_empty() {
        ("rho", vec![(cli.rho, tilde_rho(cli.rho))])
    } else {
        ("alpha", cli.alpha.iter().map(|&a| (a, a)).collect())
    };
    match &cli.n {
        None => {
            let mut table = Table::new(cli.out.as_deref(), &[label, "entropy"])?;
            for &(shown, alpha) in &orders {
                let h = source.block_entropy(alpha, 1)?;
                table.row([num(shown), num(h)])?;
            }
            table.finish()
        }
        Some(range) => {
            let mut table =
                Table::new(cli.out.as_deref(), &["n", label, "entropy", "entropy_rate"])?;
            for n in range.lengths() {
                for &(shown, alpha) in &orders {
                    let h = source.block_entropy(alpha, n)?;
                    table.row([n.to_string(), num(shown), num(h), num(h / n as f64)])?;
                }
            }
            table.finish()
        }
    }
}

fn construct(cli: &Cli) -> Result<(), CliError> {
    if let Some(path) = &cli.lambda {
        let lambda = read_budgets(path)?;
        let part = build_partition(&lambda);
        let mu = lambda.mu();
        let bound = subset_count_bound(&mu, lambda.len());
        print_partition(&part, cli.out.is_none())?;
        let mut table = Table::new(
            cli.out.as_deref(),
            &["elements", "mu", "blocks", "bound", "bound_alpha"],
        )?;
        table.row([
            lambda.len().to_string(),
            mu.to_string(),
            part.block_count().to_string(),
            bound.value.to_string(),
            num(bound.argmin_alpha),
        ])?;
        return table.finish();
    }
    let p = read_pmf(required(
        &cli.pmf,
        "--pmf FILE or --lambda FILE",
        "construct",
    )?)?;
    let m = *required(&cli.m, "--M K", "construct")?;
    let enc = build_encoder(&p, cli.rho, m)?;
    let report = one_shot_report(&p, &enc, cli.rho)?;
    print_partition(enc.partition(), cli.out.is_none())?;
    write_reports(cli.out.as_deref(), &[report])
}

fn evaluate(cli: &Cli) -> Result<(), CliError> {
    let p = read_pmf(required(&cli.pmf, "--pmf FILE", "moment")?)?;
    let part = read_partition(required(&cli.partition, "--partition FILE", "moment")?)?;
    if part.ground_size() != p.len() {
        return Err(CliError::Invalid(format!(
            "partition covers {} elements but the law has {}",
            part.ground_size(),
            p.len()
        )));
    }
    let m = cli.m.unwrap_or(part.block_count() as u64);
    let enc = TaskEncoder::from_partition(part, m)?;
    write_reports(cli.out.as_deref(), &[one_shot_report(&p, &enc, cli.rho)?])
}

/// Cells for the encoder construction, left empty when `M` is below its threshold.
fn constructed_cells(p: &Pmf, m: u64, rho: f64) -> Result<[String; 2], CliError> {
    match build_encoder(p, rho, m) {
        Ok(enc) => Ok([num(moment(p, &enc, rho)?), num(upper_bound(p, m, rho)?)]),
        Err(Error::MTooSmall { .. }) => Ok([String::new(), String::new()]),
        Err(e) => Err(e.into()),
    }
}

fn oracle(cli: &Cli) -> Result<(), CliError> {
    let rho = cli.rho;
    if let Some(path) = &cli.pmf {
        let p = read_pmf(path)?;
        let m = *required(&cli.m, "--M K", "oracle")?;
        let (best, part) = brute_force_optimum(&p, m, rho)?;
        print_partition(&part, cli.out.is_none())?;
        let mut table = Table::new(
            cli.out.as_deref(),
            &["M", "rho", "optimum", "lower", "constructed", "upper"],
        )?;
        let [constructed, upper] = constructed_cells(&p, m, rho)?;
        table.row([
            m.to_string(),
            num(rho),
            num(best),
            num(lower_bound(&p, m, rho)?),
            constructed,
            upper,
        ])?;
        return table.finish();
    }

    let mut table = Table::new(
        cli.out.as_deref(),
        &[
            "instance",
            "size",
            "M",
            "rho",
            "optimum",
            "lower",
            "constructed",
            "upper",
        ],
    )?;
    for i in 0..cli.count {
        let mut rng = instance_rng(cli.seed, i);
        let size = rng.random_range(1..=ORACLE_MAX_SIZE);
        let lo = description_threshold(size).floor() as u64 + 1;
        let m = rng.random_range(lo..=size as u64 + 2);
        let p = random_sparse_pmf(&mut rng, size, 0.15);
        let (best, _) = brute_force_optimum(&p, m, rho)?;
        let [constructed, upper] = constructed_cells(&p, m, rho)?;
        table.row([
            i.to_string(),
            size.to_string(),
            m.to_string(),
            num(rho),
            num(best),
            num(lower_bound(&p, m, rho)?),
            constructed,
            upper,
        ])?;
    }
    table.finish()
}

fn write_reports(out: Option<&Path>, reports: &[MomentReport]) -> Result<(), CliError> {
    let mut table = Table::new(out, &MomentReport::CSV_HEADER)?;
    for r in reports {
        table.row(report_cells(r))?;
    }
    table.finish()
}

/// Block-length sweep. With `q`, the encoder is designed for `q^n` and evaluated under
/// the law from `--pmf`. Block lengths whose `⌊2^(nR)⌋` is too small for the construction
/// are skipped with a note; rows for lengths within the cap are written before a cap
/// error is reported.
fn sweep(cli: &Cli, q: Option<&Path>) -> Result<(), CliError> {
    let rate: &Rate = required(&cli.rate, "--rate R", "sweep")?;
    let ns = required(&cli.n, "--n A..B", "sweep")?.lengths();
    let cap = EnumerationCap(cli.cap);
    let (results, q_id) = match q {
        Some(q_path) => {
            let p = read_pmf(required(&cli.pmf, "--pmf FILE", "a mismatched sweep")?)?;
            if cli.markov.is_some() {
                return Err(CliError::Usage("--q pairs with --pmf only".into()));
            }
            let q = read_pmf(q_path)?;
            let id = q_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            (mismatched_sweep(&p, &q, &ns, rate, cli.rho, cap), Some(id))
        }
        None => (block_sweep(&source(cli)?, &ns, rate, cli.rho, cap), None),
    };

    let mut header: Vec<&str> = MomentReport::CSV_HEADER.to_vec();
    if q_id.is_some() {
        header.extend(["q_id", "delta_bits"]);
    }
    let mut table = Table::new(cli.out.as_deref(), &header)?;
    let mut deferred = None;
    for (n, result) in ns.iter().zip(results) {
        match result {
            Ok(report) => {
                let mut cells = report_cells(&report);
                if let Some(id) = &q_id {
                    cells.push(id.clone());
                    cells.push(num(report.mismatch.map_or(f64::NAN, |t| t.divergence)));
                }
                table.row(cells)?;
            }
            Err(e @ Error::RateTooSmallForN { .. }) => eprintln!("note: skipping n = {n}: {e}"),
            Err(e @ Error::CapExceeded { .. }) => {
                deferred = Some(e);
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    table.finish()?;
    match deferred {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

/// `Δ_α`, the Rényi divergence and KL per order; with `--rate`, a mismatched sweep.
fn mismatch(cli: &Cli) -> Result<(), CliError> {
    let q_path = required(&cli.q, "--q FILE", "mismatch")?;
    if cli.rate.is_some() {
        return sweep(cli, Some(q_path));
    }
    let p = read_pmf(required(&cli.pmf, "--pmf FILE", "mismatch")?)?;
    let q = read_pmf(q_path)?;
    let kl = kl_divergence(&p, &q)?;
    let alphas = if cli.alpha.is_empty() {
        DEFAULT_ALPHAS.to_vec()
    } else {
        cli.alpha.clone()
    };
    let mut table = Table::new(cli.out.as_deref(), &["alpha", "delta", "renyi_div", "kl"])?;
    for a in alphas {
        let delta = sundaresan_divergence(&p, &q, a)?.value;
        let renyi = renyi_divergence(&p, &q, a)?;
        table.row([num(a), num(delta), num(renyi), num(kl)])?;
    }
    table.finish()
}
