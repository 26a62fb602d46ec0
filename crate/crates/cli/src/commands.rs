//! Command implementations. Each returns the text to print on success.

use std::fmt::Write as _;

use quantal_persuasion::error::{Error, Result};
use quantal_persuasion::model::{
    log_payoff, validate_scheme, CensorshipParams, Instance, RationalityLevel, Scheme, Signal,
};
use quantal_persuasion::oracle::{default_grid, grid_lp_optimal, gumbel_simulate};
use quantal_persuasion::robust::{binary_robust_scheme, robust_ratio, sisu_robust_scheme};
use quantal_persuasion::sdsu::{
    best_censorship, binary_optimal, censorship_m_approx, direct_m_approx, four_approx, lowerbound_instance,
    optimal_pairwise, witness_scheme,
};
use quantal_persuasion::sisu::{
    best_direct, direct_lowerbound_instance, normalize_instance, quantal_optimal, rational_optimal,
};
use serde_json::{json, Value};

use crate::spec::{parse_levels, parse_m_range};

/// Largest state count for the bench families with exponential priors.
pub const MAX_BENCH_STATES: usize = 8;

/// CSV cell: 17 significant digits, `inf`/`-inf`/`nan` spelled out.
pub fn cell(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// JSON number, or a string for values JSON cannot hold.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(cell(x))
    }
}

fn level_json(level: RationalityLevel) -> Value {
    match level {
        RationalityLevel::Finite(b) => json!(b),
        RationalityLevel::FullyRational => json!("inf"),
    }
}

fn level_cell(level: RationalityLevel) -> String {
    match level {
        RationalityLevel::Finite(b) => cell(b),
        RationalityLevel::FullyRational => "inf".into(),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

/// Solver modes accepted by `solve` and `simulate`.
pub const MODES: [&str; 7] =
    ["sisu", "sdsu-binary", "pairwise", "four-approx", "censorship-approx", "direct-approx", "rational"];

/// A solved scheme plus solver-specific details.
pub struct Solved {
    pub scheme: Scheme,
    pub details: Value,
}

/// Default solver for an instance: exact when one exists.
pub fn auto_mode(instance: &Instance) -> &'static str {
    if instance.is_state_independent() {
        "sisu"
    } else if instance.len() == 2 {
        "sdsu-binary"
    } else {
        "four-approx"
    }
}

pub fn solve_mode(instance: &Instance, mode: &str, level: RationalityLevel, grid_points: usize) -> Result<Solved> {
    let grid = || default_grid(instance, level, grid_points, &[]);
    let solved = match mode {
        "sisu" => {
            let normalized = normalize_instance(instance)?;
            let sol = quantal_optimal(&normalized, level)?;
            let front = normalized.len() > instance.len() && instance.v(0) >= 0.0;
            let params = restore_params(instance, &sol.params, front)?;
            Solved {
                scheme: restore_scheme(instance, &sol.scheme, front),
                details: json!({
                    "params": params.to_json_value(),
                    "residuals": sol.residuals,
                    "note": sol.note,
                }),
            }
        }
        "rational" => {
            let opt = rational_optimal(instance)?;
            Solved { details: json!({ "params": opt.params.to_json_value() }), scheme: opt.censorship }
        }
        "sdsu-binary" => {
            let sol = binary_optimal(instance, level)?;
            Solved {
                details: json!({
                    "params": sol.params.to_json_value(),
                    "regime": sol.regime,
                    "delta_hat": sol.delta_hat,
                    "note": sol.note,
                }),
                scheme: sol.scheme,
            }
        }
        "pairwise" => Solved { scheme: optimal_pairwise(instance, level, &grid())?, details: json!({}) },
        "four-approx" => {
            let fa = four_approx(instance, level, &grid())?;
            Solved {
                details: json!({
                    "assignment_value": num(fa.assignment.value),
                    "fractional_value": num(fa.fractional_value),
                }),
                scheme: fa.scheme,
            }
        }
        "censorship-approx" | "direct-approx" => {
            let a = if mode == "censorship-approx" {
                censorship_m_approx(instance, level, &grid())?
            } else {
                direct_m_approx(instance, level, &grid())?
            };
            Solved { details: json!({ "pair": a.pair.map(|(i, j)| [i + 1, j + 1]) }), scheme: a.scheme }
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown mode '{other}'; expected one of {}",
                MODES.join(", ")
            )))
        }
    };
    validate_scheme(instance, &solved.scheme).into_result()?;
    Ok(solved)
}

/// Maps a scheme on the normalized instance back to the original states.
/// Added states have zero prior, so dropping them keeps every posterior.
fn restore_scheme(instance: &Instance, scheme: &Scheme, front: bool) -> Scheme {
    let shift = usize::from(front);
    let m = instance.len();
    let signals = scheme
        .signals()
        .iter()
        .filter_map(|s| {
            let mass: Vec<(usize, f64)> = s
                .support()
                .filter(|&i| i >= shift && i - shift < m)
                .map(|i| (i - shift, s.mass(i)))
                .filter(|&(_, p)| p > 0.0)
                .collect();
            (!mass.is_empty()).then(|| Signal::new(s.delta, mass))
        })
        .collect();
    Scheme::new(signals)
}

fn restore_params(instance: &Instance, params: &CensorshipParams, front: bool) -> Result<CensorshipParams> {
    let shift = usize::from(front);
    let m = instance.len();
    let (threshold, p) = match params.threshold_state.checked_sub(shift) {
        None => (0, 0.0),
        Some(t) if t >= m => (m - 1, 1.0),
        Some(t) => (t, params.threshold_prob),
    };
    CensorshipParams::new(instance, (0..threshold).collect(), threshold, p)
}

pub struct SolveArgs<'a> {
    pub instance: &'a Instance,
    pub mode: &'a str,
    pub levels: &'a [RationalityLevel],
    pub grid_points: usize,
    pub csv: bool,
}

pub fn cmd_solve(a: SolveArgs<'_>) -> Result<String> {
    let mut results = Vec::new();
    let mut csv = String::from("beta,payoff,log_payoff,signals\n");
    // The rational optimum does not depend on the level: solve once.
    let fixed = if a.mode == "rational" { Some(solve_mode(a.instance, a.mode, RationalityLevel::FullyRational, a.grid_points)?) } else { None };
    for &level in a.levels {
        let solved = match &fixed {
            Some(s) => Solved { scheme: s.scheme.clone(), details: s.details.clone() },
            None => solve_mode(a.instance, a.mode, level, a.grid_points)?,
        };
        let lp = log_payoff(a.instance, level, &solved.scheme)?;
        let _ = writeln!(csv, "{},{},{},{}", level_cell(level), cell(lp.exp()), cell(lp), solved.scheme.len());
        let mut row = json!({
            "beta": level_json(level),
            "payoff": num(lp.exp()),
            "log_payoff": num(lp),
            "scheme": solved.scheme.to_json_value(),
        });
        if let (Value::Object(row), Value::Object(extra)) = (&mut row, solved.details) {
            row.extend(extra);
        }
        results.push(row);
    }
    if a.csv {
        return Ok(csv);
    }
    Ok(pretty(&json!({ "mode": a.mode, "grid_points": a.grid_points, "results": results })))
}

/// Loads a scheme from a file holding either a bare scheme or `solve`
/// output with a single result.
pub fn load_scheme_file(path: &str) -> Result<Scheme> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read scheme file '{path}': {e}")))?;
    let value: Value = serde_json::from_str(&text)?;
    let inner = if value.get("signals").is_some() {
        value
    } else if let Some(s) = value.get("scheme") {
        s.clone()
    } else {
        match value.get("results").and_then(Value::as_array).map(Vec::as_slice) {
            Some([only]) => only.get("scheme").cloned().unwrap_or(Value::Null),
            _ => {
                return Err(Error::InvalidScheme(
                    "expected a scheme object or solve output with exactly one result".into(),
                ))
            }
        }
    };
    Scheme::from_json(&inner.to_string())
}

/// Resolves `--scheme`: a built-in name or a file path.
pub fn resolve_scheme(instance: &Instance, spec: &str, levels: &[RationalityLevel]) -> Result<Scheme> {
    let scheme = if spec == "rational-censorship" {
        sisu_robust_scheme(instance)?
    } else if let Some(rest) = spec.strip_prefix("binary-robust:") {
        let (k, beta0) = parse_binary_robust(rest, levels)?;
        binary_robust_scheme(instance, beta0, k)?.scheme
    } else {
        load_scheme_file(spec)?
    };
    validate_scheme(instance, &scheme).into_result()?;
    Ok(scheme)
}

/// `K=4` or `K=4,beta0=1`; `beta0` defaults to the smallest finite level.
fn parse_binary_robust(rest: &str, levels: &[RationalityLevel]) -> Result<(f64, f64)> {
    let bad = |what: &str| Error::InvalidArgument(format!("bad binary-robust spec '{rest}': {what}"));
    let (mut k, mut beta0) = (None, None);
    for part in rest.split(',') {
        let (key, val) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        let val: f64 = val.trim().parse().map_err(|_| bad("value is not a number"))?;
        match key.trim() {
            "K" | "k" => k = Some(val),
            "beta0" => beta0 = Some(val),
            other => return Err(bad(&format!("unknown key '{other}'"))),
        }
    }
    let k = k.ok_or_else(|| bad("missing K"))?;
    let beta0 = match beta0 {
        Some(b) => b,
        None => levels
            .iter()
            .filter_map(RationalityLevel::beta)
            .reduce(f64::min)
            .ok_or_else(|| bad("no finite level to take beta0 from"))?,
    };
    Ok((k, beta0))
}

pub fn cmd_robust(instance: &Instance, scheme_spec: &str, levels: &[RationalityLevel], csv: bool) -> Result<String> {
    let scheme = resolve_scheme(instance, scheme_spec, levels)?;
    let report = robust_ratio(instance, &scheme, levels)?;
    Ok(if csv { report.to_csv() } else { pretty(&report.to_json_value()) })
}

struct BenchRow {
    m: usize,
    level: RationalityLevel,
    reference: &'static str,
    log_reference: f64,
    log_censorship: f64,
    log_direct: f64,
    direct_floor: Option<f64>,
}

pub fn cmd_bench(family: &str, m_spec: Option<&str>, levels: Option<&[RationalityLevel]>, csv: bool) -> Result<String> {
    let ms = || -> Result<Vec<usize>> {
        let ms = parse_m_range(m_spec.ok_or_else(|| Error::InvalidArgument(format!("family '{family}' needs --m")))?)?;
        if let Some(&m) = ms.iter().find(|&&m| m > MAX_BENCH_STATES) {
            return Err(Error::SizeLimit(format!(
                "family '{family}' is limited to m <= {MAX_BENCH_STATES}, got {m}"
            )));
        }
        Ok(ms)
    };
    let mut rows = Vec::new();
    match family {
        "sisu-direct" => {
            for m in ms()? {
                let (raw, level) = direct_lowerbound_instance(m)?;
                let inst = normalize_instance(&raw)?;
                let opt = quantal_optimal(&inst, level)?.log_payoff;
                rows.push(BenchRow {
                    m,
                    level,
                    reference: "opt",
                    log_reference: opt,
                    log_censorship: opt,
                    log_direct: best_direct(&inst, level)?.log_payoff,
                    direct_floor: Some(m as f64 / (4.0 * std::f64::consts::E + 1.0)),
                });
            }
        }
        "sdsu-lower" => {
            for m in ms()? {
                let (inst, level) = lowerbound_instance(m)?;
                rows.push(BenchRow {
                    m,
                    level,
                    reference: "witness",
                    log_reference: log_payoff(&inst, level, &witness_scheme(&inst, level)?)?,
                    log_censorship: best_censorship(&inst, level)?.log_payoff,
                    log_direct: best_direct(&inst, level)?.log_payoff,
                    direct_floor: None,
                });
            }
        }
        "impossibility" => {
            let inst = quantal_persuasion::robust::impossibility_instance();
            let default = parse_levels("1,2,4,16")?;
            for &level in levels.unwrap_or(&default) {
                let opt = binary_optimal(&inst, level)?;
                let log_opt = log_payoff(&inst, level, &opt.scheme)?;
                rows.push(BenchRow {
                    m: 2,
                    level,
                    reference: "opt",
                    log_reference: log_opt,
                    log_censorship: log_opt,
                    log_direct: best_direct(&inst, level)?.log_payoff,
                    direct_floor: None,
                });
            }
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown family '{other}'; expected sisu-direct, sdsu-lower or impossibility"
            )))
        }
    }
    if csv {
        let mut out = String::from(
            "family,m,beta,reference,log_reference,log_best_censorship,log_best_direct,censorship_ratio,direct_ratio,direct_floor\n",
        );
        for r in &rows {
            let _ = writeln!(
                out,
                "{family},{},{},{},{},{},{},{},{},{}",
                r.m,
                level_cell(r.level),
                r.reference,
                cell(r.log_reference),
                cell(r.log_censorship),
                cell(r.log_direct),
                cell((r.log_reference - r.log_censorship).exp()),
                cell((r.log_reference - r.log_direct).exp()),
                r.direct_floor.map(cell).unwrap_or_default(),
            );
        }
        return Ok(out);
    }
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "m": r.m,
                "beta": level_json(r.level),
                "reference": r.reference,
                "log_reference": num(r.log_reference),
                "log_best_censorship": num(r.log_censorship),
                "log_best_direct": num(r.log_direct),
                "censorship_ratio": num((r.log_reference - r.log_censorship).exp()),
                "direct_ratio": num((r.log_reference - r.log_direct).exp()),
                "direct_floor": r.direct_floor,
            })
        })
        .collect();
    Ok(pretty(&json!({ "family": family, "rows": rows })))
}

/// Exact solver payoff and pooling signal, when one applies.
fn analytic(instance: &Instance, level: RationalityLevel) -> Option<(&'static str, f64, f64)> {
    if instance.is_state_independent() {
        let sol = quantal_optimal(&normalize_instance(instance).ok()?, level).ok()?;
        Some(("sisu", sol.payoff(), sol.params.pooling_signal))
    } else if instance.len() == 2 {
        let sol = binary_optimal(instance, level).ok()?;
        Some(("sdsu-binary", sol.payoff, sol.params.pooling_signal))
    } else {
        None
    }
}

pub fn cmd_oracle(
    instance: &Instance,
    levels: &[RationalityLevel],
    grid_points: usize,
    augment: bool,
    csv: bool,
) -> Result<String> {
    let mut out = String::from("beta,lp_value,dual_value,duality_gap,max_dual_violation,analytic_payoff,gap\n");
    let mut results = Vec::new();
    for &level in levels {
        let exact = analytic(instance, level);
        let extra: Vec<f64> = exact.iter().filter(|_| augment).map(|e| e.2).filter(|d| d.is_finite()).collect();
        let grid = default_grid(instance, level, grid_points, &extra);
        let lp = grid_lp_optimal(instance, level, &grid)?;
        let gap = exact.map(|e| (e.1 - lp.value).abs());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            level_cell(level),
            cell(lp.value),
            cell(lp.dual_value),
            cell(lp.duality_gap),
            cell(lp.max_dual_violation),
            exact.map(|e| cell(e.1)).unwrap_or_default(),
            gap.map(cell).unwrap_or_default(),
        );
        results.push(json!({
            "beta": level_json(level),
            "grid_size": grid.len(),
            "lp_value": num(lp.value),
            "dual_value": num(lp.dual_value),
            "duality_gap": num(lp.duality_gap),
            "max_dual_violation": num(lp.max_dual_violation),
            "iterations": lp.iterations,
            "analytic_solver": exact.map(|e| e.0),
            "analytic_payoff": exact.map(|e| num(e.1)),
            "gap": gap.map(num),
            "scheme": lp.scheme.to_json_value(),
        }));
    }
    if csv {
        return Ok(out);
    }
    Ok(pretty(&json!({ "grid_points": grid_points, "augment_analytic": augment, "results": results })))
}

pub struct SimulateArgs<'a> {
    pub instance: &'a Instance,
    pub level: RationalityLevel,
    pub scheme: Option<&'a str>,
    pub mode: Option<&'a str>,
    pub grid_points: usize,
    pub n: usize,
    pub seed: u64,
    pub csv: bool,
}

pub fn cmd_simulate(a: SimulateArgs<'_>) -> Result<String> {
    if a.n == 0 {
        return Err(Error::InvalidArgument("--n must be at least 1".into()));
    }
    let scheme = match a.scheme {
        Some(spec) => resolve_scheme(a.instance, spec, &[a.level])?,
        None => solve_mode(a.instance, a.mode.unwrap_or(auto_mode(a.instance)), a.level, a.grid_points)?.scheme,
    };
    let report = gumbel_simulate(a.instance, a.level, &scheme, a.n, a.seed)?;
    if a.csv {
        let mut out = String::from("delta,rate,expected,tolerance,within\n");
        for s in &report.signals {
            let _ = writeln!(out, "{},{},{},{},{}", cell(s.delta), cell(s.rate), cell(s.expected), cell(s.tolerance), s.within);
        }
        return Ok(out);
    }
    let mut v = serde_json::to_value(&report)?;
    v["all_within"] = json!(report.all_within());
    v["scheme"] = scheme.to_json_value();
    Ok(pretty(&v))
}
