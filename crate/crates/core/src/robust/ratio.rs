//! Worst-case ratio of the per-level optimum to a fixed scheme's payoff.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::model::{log_payoff_unchecked, Instance, RationalityLevel, Scheme};
use crate::oracle::{default_grid, DEFAULT_GRID_POINTS};
use crate::sdsu::{binary_optimal, optimal_pairwise};
use crate::sisu::{normalize_instance, quantal_optimal, rational_optimal};

/// Which solver produced the optimum for one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptSolver {
    Rational,
    SisuQuantal,
    Binary,
    Pairwise,
}

impl OptSolver {
    pub fn name(&self) -> &'static str {
        match self {
            OptSolver::Rational => "rational",
            OptSolver::SisuQuantal => "sisu-quantal",
            OptSolver::Binary => "binary",
            OptSolver::Pairwise => "pairwise-grid",
        }
    }
}

/// Log of the optimal payoff at `level`, with the solver used. Exact
/// solvers are used where they exist; other instances fall back to the
/// pairwise re-optimization of the grid LP on the default grid.
pub fn optimal_log_payoff(instance: &Instance, level: RationalityLevel) -> Result<(f64, OptSolver)> {
    if level.is_fully_rational() {
        let opt = rational_optimal(instance)?;
        return Ok((log_payoff_unchecked(instance, level, &opt.censorship), OptSolver::Rational));
    }
    if instance.is_state_independent() {
        let sol = quantal_optimal(&normalize_instance(instance)?, level)?;
        return Ok((sol.log_payoff, OptSolver::SisuQuantal));
    }
    if instance.len() == 2 {
        let sol = binary_optimal(instance, level)?;
        return Ok((log_payoff_unchecked(instance, level, &sol.scheme), OptSolver::Binary));
    }
    let grid = default_grid(instance, level, DEFAULT_GRID_POINTS, &[]);
    let scheme = optimal_pairwise(instance, level, &grid)?;
    Ok((log_payoff_unchecked(instance, level, &scheme), OptSolver::Pairwise))
}

/// One level of a [`RobustReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct RobustRow {
    pub level: RationalityLevel,
    pub log_opt_payoff: f64,
    pub log_scheme_payoff: f64,
    /// `OPT / V(scheme)`; `+inf` when the scheme earns nothing but the
    /// optimum does, and 1 when both are zero.
    pub ratio: f64,
    pub solver: OptSolver,
}

impl RobustRow {
    pub fn opt_payoff(&self) -> f64 {
        self.log_opt_payoff.exp()
    }

    pub fn scheme_payoff(&self) -> f64 {
        self.log_scheme_payoff.exp()
    }
}

/// Per-level payoffs and their worst ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustReport {
    pub rows: Vec<RobustRow>,
    pub gamma: f64,
}

fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else if x < 0.0 {
        json!("-inf")
    } else {
        json!("nan")
    }
}

fn cell(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x > 0.0 {
        "inf".into()
    } else if x < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

fn level_value(level: RationalityLevel) -> Value {
    match level {
        RationalityLevel::Finite(b) => json!(b),
        RationalityLevel::FullyRational => json!("inf"),
    }
}

impl RobustReport {
    pub fn levels(&self) -> Vec<RationalityLevel> {
        self.rows.iter().map(|r| r.level).collect()
    }

    /// Row with the largest ratio.
    pub fn worst(&self) -> Option<&RobustRow> {
        self.rows.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio))
    }

    /// Infinite values are written as the strings `"inf"` / `"-inf"`.
    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "beta": level_value(r.level),
                    "opt_payoff": number(r.opt_payoff()),
                    "scheme_payoff": number(r.scheme_payoff()),
                    "log_opt_payoff": number(r.log_opt_payoff),
                    "log_scheme_payoff": number(r.log_scheme_payoff),
                    "ratio": number(r.ratio),
                    "solver": r.solver.name(),
                })
            })
            .collect();
        json!({
            "beta_set": self.rows.iter().map(|r| level_value(r.level)).collect::<Vec<_>>(),
            "rows": rows,
            "gamma": number(self.gamma),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes")
    }

    /// One row per level, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta,opt_payoff,scheme_payoff,log_opt_payoff,log_scheme_payoff,ratio,solver\n");
        for r in &self.rows {
            let beta = match r.level {
                RationalityLevel::Finite(b) => cell(b),
                RationalityLevel::FullyRational => "inf".into(),
            };
            let _ = writeln!(
                out,
                "{beta},{},{},{},{},{},{}",
                cell(r.opt_payoff()),
                cell(r.scheme_payoff()),
                cell(r.log_opt_payoff),
                cell(r.log_scheme_payoff),
                cell(r.ratio),
                r.solver.name()
            );
        }
        out
    }
}

/// Evaluates `scheme` against the optimum at every level in `levels`.
/// The scheme is not validated here.
pub fn robust_ratio(instance: &Instance, scheme: &Scheme, levels: &[RationalityLevel]) -> Result<RobustReport> {
    let mut rows = Vec::with_capacity(levels.len());
    for &level in levels {
        let (log_opt, solver) = optimal_log_payoff(instance, level)?;
        let log_scheme = log_payoff_unchecked(instance, level, scheme);
        let ratio = if log_opt == f64::NEG_INFINITY {
            1.0
        } else if log_scheme == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            (log_opt - log_scheme).exp()
        };
        rows.push(RobustRow { level, log_opt_payoff: log_opt, log_scheme_payoff: log_scheme, ratio, solver });
    }
    let gamma = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(RobustReport { rows, gamma })
}
