//! Linear program bounding the best robust ratio any grid scheme can reach
//! on a fixed instance and set of levels.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{log_response, Instance, RationalityLevel};
use crate::numeric::{lin_space, log_sum_exp};
use crate::oracle::grid::pair_columns;
use crate::oracle::{normalize_grid, simplex_solve, LinearProgram};
use crate::robust::ratio::optimal_log_payoff;
use crate::sdsu::binary_optimal;

/// Per-level payoff floor that a scheme must reach up to the factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FloorKind {
    /// `1 / (beta e^beta)`, the closed-form estimate of the optimum.
    #[default]
    ClosedForm,
    /// The optimum itself.
    ExactOpt,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorRevealing {
    pub levels: Vec<f64>,
    pub floor: FloorKind,
    /// Natural log of each level's floor.
    pub log_floors: Vec<f64>,
    /// Largest factor `t` with `V_beta(pi) >= t * floor(beta)` at every level.
    pub gamma_prime: f64,
    /// `1 / gamma_prime`; `+inf` when no grid scheme reaches any floor.
    pub bound: f64,
    pub grid_points: usize,
    pub iterations: usize,
}

/// `points` uniform values on `[v_1, v_m]`, each level's full-pooling
/// probe `v_1 + (v_m - v_1) / (beta + 1)` and, for two states, each level's
/// optimal pooling signal.
pub fn factor_grid(instance: &Instance, levels: &[f64], points: usize) -> Vec<f64> {
    let (lo, hi) = (instance.v(0), instance.v(instance.len() - 1));
    let mut grid = lin_space(lo, hi, points.max(2));
    grid.extend(instance.values());
    for &b in levels {
        grid.push(lo + (hi - lo) / (b + 1.0));
        if instance.len() == 2 && b > 0.0 {
            if let Ok(sol) = binary_optimal(instance, RationalityLevel::Finite(b)) {
                grid.push(sol.params.pooling_signal);
            }
        }
    }
    normalize_grid(grid)
}

/// Solves `max t` over schemes on `grid` (Bayes rows as inequalities
/// `sum_i lambda_i pi_i(d) (d - v_i) >= 0`) subject to
/// `V_beta(pi) >= t * floor(beta)` for every level.
pub fn factor_revealing_bound(instance: &Instance, levels: &[f64], grid: &[f64], floor: FloorKind) -> Result<FactorRevealing> {
    if levels.is_empty() {
        return Err(Error::InvalidArgument("need at least one level".into()));
    }
    if let Some(b) = levels.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
        return Err(Error::InvalidArgument(format!("levels must be finite and positive, got {b}")));
    }
    let grid = normalize_grid(grid.to_vec());
    let m = instance.len();
    let n = grid.len();
    let log_floors = levels
        .iter()
        .map(|&b| match floor {
            FloorKind::ClosedForm => Ok(-b.ln() - b),
            FloorKind::ExactOpt => optimal_log_payoff(instance, RationalityLevel::Finite(b)).map(|r| r.0),
        })
        .collect::<Result<Vec<f64>>>()?;

    // A grid point with a strict Bayes surplus only moves value to larger
    // signals, where every response is lower, so the inequality rows can be
    // tightened to equalities. Those split into pair columns as in the grid
    // LP; the last column is t.
    let w: Vec<f64> = (0..m).map(|i| instance.scaled_lambda(i)).collect();
    let cols = pair_columns(instance, &grid, &w);
    let t = cols.len();
    let mut objective = vec![0.0; t + 1];
    objective[t] = 1.0;
    let mut lp = LinearProgram::new(objective);
    for i in 0..m {
        let mut row: Vec<f64> =
            cols.iter().map(|c| c.parts.iter().find(|p| p.0 == i).map_or(0.0, |p| p.1)).collect();
        row.push(0.0);
        lp.eq_row(row, 1.0);
    }
    for (&b, &log_floor) in levels.iter().zip(&log_floors) {
        let level = RationalityLevel::Finite(b);
        let mut row: Vec<f64> = cols
            .iter()
            .map(|c| {
                let log_mass = log_sum_exp(c.parts.iter().map(|&(k, a)| {
                    instance.log_lambda(k) + instance.u(k).ln() + a.ln()
                }));
                -(log_mass + log_response(level, c.delta) - log_floor).exp()
            })
            .collect();
        row.push(1.0);
        lp.le_row(row, 0.0);
    }
    let sol = simplex_solve(&lp)?;
    let gamma_prime = sol.x[t].max(0.0);
    Ok(FactorRevealing {
        levels: levels.to_vec(),
        floor,
        log_floors,
        gamma_prime,
        bound: if gamma_prime > 0.0 { 1.0 / gamma_prime } else { f64::INFINITY },
        grid_points: n,
        iterations: sol.iterations,
    })
}
