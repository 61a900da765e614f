//! Plain-text readers for laws, budgets and partitions.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use taskcodes::{Budget, LambdaBudget, MarkovSource, Partition, Pmf};

use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_row(path: &Path, line: usize, text: &str) -> Result<Vec<f64>, CliError> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| parse_error(path, line, format!("`{tok}` is not a number")))
        })
        .collect()
}

/// `a/b` or a plain decimal, converted without rounding.
fn parse_ratio(tok: &str) -> Option<BigRational> {
    if tok.contains('/') {
        return tok
            .parse()
            .ok()
            .filter(|r: &BigRational| r.denom() != &BigInt::ZERO);
    }
    let (whole, frac) = tok.split_once('.').unwrap_or((tok, ""));
    if !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{whole}{frac}").parse().ok()?;
    Some(BigRational::new(
        digits,
        BigInt::from(10u8).pow(frac.len() as u32),
    ))
}

/// One probability per line. If any line is a fraction `a/b`, the whole file is read
/// exactly and must sum to exactly 1.
pub fn read_pmf(path: &Path) -> Result<Pmf, CliError> {
    let text = read(path)?;
    let rows: Vec<(usize, &str)> = content_lines(&text).collect();
    for &(line, row) in &rows {
        if row.split_whitespace().count() != 1 {
            return Err(parse_error(path, line, "expected one probability per line"));
        }
    }
    let last = rows.last().map_or(1, |&(line, _)| line);
    if rows.iter().any(|(_, row)| row.contains('/')) {
        let ratios = rows
            .iter()
            .map(|&(line, tok)| {
                parse_ratio(tok)
                    .ok_or_else(|| parse_error(path, line, format!("`{tok}` is not a ratio")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Pmf::from_ratios(&ratios).map_err(|e| parse_error(path, last, e.to_string()));
    }
    let masses = rows
        .iter()
        .map(|&(line, tok)| parse_row(path, line, tok).map(|v| v[0]))
        .collect::<Result<Vec<_>, _>>()?;
    Pmf::new(masses).map_err(|e| parse_error(path, last, e.to_string()))
}

/// State count, then the initial row, then one transition row per state.
pub fn read_markov(path: &Path) -> Result<MarkovSource, CliError> {
    let text = read(path)?;
    let mut lines = content_lines(&text);
    let (line, head) = lines
        .next()
        .ok_or_else(|| parse_error(path, 1, "empty file"))?;
    let states: usize = head
        .parse()
        .map_err(|_| parse_error(path, line, format!("`{head}` is not a state count")))?;

    let mut rows = Vec::with_capacity(states + 1);
    let mut initial_line = line;
    let mut last = line;
    for (line, row) in lines {
        let values = parse_row(path, line, row)?;
        if values.len() != states {
            return Err(parse_error(
                path,
                line,
                format!("expected {states} entries, found {}", values.len()),
            ));
        }
        if rows.is_empty() {
            initial_line = line;
        }
        rows.push(values);
        last = line;
    }
    if rows.len() != states + 1 {
        return Err(parse_error(
            path,
            last,
            format!(
                "expected {} rows after the state count, found {}",
                states + 1,
                rows.len()
            ),
        ));
    }
    let initial =
        Pmf::new(rows.remove(0)).map_err(|e| parse_error(path, initial_line, e.to_string()))?;
    MarkovSource::new(initial, rows).map_err(|e| parse_error(path, last, e.to_string()))
}

/// One budget per line: a positive integer or `inf`.
pub fn read_budgets(path: &Path) -> Result<LambdaBudget, CliError> {
    let text = read(path)?;
    let budgets = content_lines(&text)
        .map(|(line, row)| {
            row.parse::<Budget>()
                .map_err(|e| parse_error(path, line, e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    LambdaBudget::new(budgets).map_err(|e| parse_error(path, 1, e.to_string()))
}

pub fn read_partition(path: &Path) -> Result<Partition, CliError> {
    let text = read(path)?;
    text.parse::<Partition>()
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}
