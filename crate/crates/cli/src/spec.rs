//! Parsing for `--beta` and `--m` values.

use quantal_persuasion::error::{Error, Result};
use quantal_persuasion::model::RationalityLevel;
use quantal_persuasion::numeric::{lin_space, log_space};

/// Expands a level spec into levels, in the order written.
///
/// Comma-separated tokens, each one of: a number, `inf`, `lo:hi:Nlog`
/// (log-spaced) or `lo:hi:N` (evenly spaced).
pub fn parse_levels(spec: &str) -> Result<Vec<RationalityLevel>> {
    let mut out = Vec::new();
    for token in spec.split(',').map(str::trim) {
        if token.is_empty() {
            return Err(Error::InvalidArgument(format!("empty entry in level spec '{spec}'")));
        }
        if token.contains(':') {
            out.extend(parse_range(token)?);
        } else {
            out.push(token.parse()?);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("level spec is empty".into()));
    }
    Ok(out)
}

fn parse_range(token: &str) -> Result<Vec<RationalityLevel>> {
    let bad = || Error::InvalidArgument(format!("bad level range '{token}', expected lo:hi:N or lo:hi:Nlog"));
    let parts: Vec<&str> = token.split(':').collect();
    let [lo, hi, count] = parts[..] else { return Err(bad()) };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let (count, log) = match count.trim().strip_suffix("log") {
        Some(c) => (c, true),
        None => (count.trim(), false),
    };
    let n: usize = count.parse().map_err(|_| bad())?;
    if n == 0 || !lo.is_finite() || !hi.is_finite() || lo > hi || lo < 0.0 || (log && lo <= 0.0) {
        return Err(bad());
    }
    let points = if log { log_space(lo, hi, n) } else { lin_space(lo, hi, n) };
    points.into_iter().map(RationalityLevel::finite).collect()
}

/// Parses `A..B` or `A..=B` (both inclusive) or a single `A`. An inverted
/// range is empty.
pub fn parse_m_range(spec: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidArgument(format!("bad state-count range '{spec}', expected A..B"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    match spec.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok((num(a)?..=num(b)?).collect())
        }
        None => Ok(vec![num(spec)?]),
    }
}
