use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    make_censorship, payoff_unchecked, response, CensorshipParams, Instance, RationalityLevel, Scheme, Signal,
};
use crate::oracle::simplex::{simplex_solve, LinearProgram};

/// Number of uniform points in the default grid.
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Uniform grid over `[min v - margin, max v + margin]` with `margin = 2/beta`
/// (1 when `beta = 0`, none when fully rational), joined with `0`, every
/// `v_i` and the caller's extra points.
pub fn default_grid(instance: &Instance, level: RationalityLevel, points: usize, extra: &[f64]) -> Vec<f64> {
    let margin = match level {
        RationalityLevel::FullyRational => 0.0,
        RationalityLevel::Finite(b) if b > 0.0 => 2.0 / b,
        RationalityLevel::Finite(_) => 1.0,
    };
    let lo = instance.v(0) - margin;
    let hi = instance.v(instance.len() - 1) + margin;
    let mut grid = crate::numeric::lin_space(lo, hi, points.max(2));
    grid.push(0.0);
    grid.extend(instance.values());
    grid.extend(extra.iter().copied().filter(|x| x.is_finite()));
    normalize_grid(grid)
}

/// Sorts and removes exact duplicates.
pub fn normalize_grid(mut grid: Vec<f64>) -> Vec<f64> {
    grid.retain(|x| x.is_finite());
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Optimal scheme among those whose signals lie on a fixed grid, with the
/// LP duals.
#[derive(Debug, Clone, Serialize)]
pub struct GridLpSolution {
    #[serde(skip)]
    pub scheme: Scheme,
    pub value: f64,
    /// Dual objective, in the same units as `value`.
    pub dual_value: f64,
    pub duality_gap: f64,
    pub grid_points: usize,
    #[serde(skip)]
    pub grid: Vec<f64>,
    /// Plausibility multiplier per grid point.
    #[serde(skip)]
    pub alpha: Vec<f64>,
    /// Mass multiplier per state.
    pub eta: Vec<f64>,
    /// Largest violation of the dual constraints by `(alpha, eta)`.
    pub max_dual_violation: f64,
    pub iterations: usize,
}

/// A signal shape on the grid: states and their relative masses, with the
/// signal's value being the Bayes mean.
#[derive(Debug, Clone)]
pub(crate) struct Column {
    pub delta: f64,
    pub parts: Vec<(usize, f64)>,
}

/// One revealing column per state and one column per state pair and grid
/// point strictly between their values. Relative masses are scaled so the
/// larger one is 1; `w` are the prior weights used for the Bayes balance.
pub(crate) fn pair_columns(instance: &Instance, grid: &[f64], w: &[f64]) -> Vec<Column> {
    let m = instance.len();
    let mut cols: Vec<Column> = (0..m)
        .map(|i| Column { delta: instance.v(i), parts: vec![(i, 1.0)] })
        .collect();
    for i in 0..m {
        for j in i + 1..m {
            if w[i] == 0.0 || w[j] == 0.0 {
                continue;
            }
            let (vi, vj) = (instance.v(i), instance.v(j));
            for &d in grid.iter().filter(|&&d| d > vi && d < vj) {
                let (ai, aj) = (w[j] * (vj - d), w[i] * (d - vi));
                let s = ai.max(aj);
                cols.push(Column { delta: d, parts: vec![(i, ai / s), (j, aj / s)] });
            }
        }
    }
    cols
}

/// Solves the signaling LP restricted to signals on `grid`.
///
/// Every grid signal splits into signals with at most two states at the same
/// mean, so the LP is posed over pair columns (one per state pair and grid
/// point strictly between their values) plus one revealing column per state.
/// Each grid signal then costs only the per-state mass rows.
pub fn grid_lp_optimal(instance: &Instance, level: RationalityLevel, grid: &[f64]) -> Result<GridLpSolution> {
    let m = instance.len();
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("grid contains non-finite points".into()));
    }
    let grid = normalize_grid(grid.to_vec());
    let w: Vec<f64> = (0..m).map(|i| instance.scaled_lambda(i)).collect();
    let cols = pair_columns(instance, &grid, &w);
    let objective: Vec<f64> = cols
        .iter()
        .map(|c| {
            let wd = response(level, c.delta);
            c.parts.iter().map(|&(k, a)| w[k] * instance.u(k) * a).sum::<f64>() * wd
        })
        .collect();
    let mut lp = LinearProgram::new(objective);
    for i in 0..m {
        let row = cols
            .iter()
            .map(|c| c.parts.iter().find(|p| p.0 == i).map_or(0.0, |p| p.1))
            .collect();
        lp.eq_row(row, 1.0);
    }
    let sol = simplex_solve(&lp)?;

    let signals = cols
        .iter()
        .zip(&sol.x)
        .filter(|(_, &x)| x > 0.0)
        .map(|(c, &x)| Signal::new(c.delta, c.parts.iter().map(|&(k, a)| (k, (a * x).min(1.0)))))
        .collect();
    let scheme = Scheme::new(signals);

    let eta = sol.duals.clone();
    let (alpha, max_dual_violation) = recover_alpha(instance, level, &grid, &w, &eta);
    let unit = instance.weight_ref().exp();
    Ok(GridLpSolution {
        value: payoff_unchecked(instance, level, &scheme),
        dual_value: sol.dual_objective * unit,
        duality_gap: sol.duality_gap() * unit,
        grid_points: grid.len(),
        scheme,
        grid,
        alpha,
        eta: eta.iter().map(|e| e * unit).collect(),
        max_dual_violation: max_dual_violation * unit,
        iterations: sol.iterations,
    })
}

/// Picks `alpha(delta)` inside the interval allowed by
/// `w_i (v_i - delta) alpha + eta_i >= w_i u_i W(delta)` for every state.
fn recover_alpha(instance: &Instance, level: RationalityLevel, grid: &[f64], w: &[f64], eta: &[f64]) -> (Vec<f64>, f64) {
    let m = instance.len();
    let mut worst: f64 = 0.0;
    let alpha = grid
        .iter()
        .map(|&d| {
            let wd = response(level, d);
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for i in 0..m {
                let gap = w[i] * instance.u(i) * wd - eta[i];
                let slope = w[i] * (instance.v(i) - d);
                if slope > 0.0 {
                    lo = lo.max(gap / slope);
                } else if slope < 0.0 {
                    hi = hi.min(gap / slope);
                }
            }
            let a = match (lo.is_finite(), hi.is_finite()) {
                (true, true) if lo <= hi => 0.5 * (lo + hi),
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo,
                (false, true) => hi,
                (false, false) => 0.0,
            };
            for i in 0..m {
                let lhs = w[i] * (instance.v(i) - d) * a + eta[i];
                worst = worst.max(w[i] * instance.u(i) * wd - lhs);
            }
            a
        })
        .collect();
    (alpha, worst)
}

/// Best two-state censorship whose pooling signal lies on `grid`: state 1
/// is fully pooled and state 2 joins with the probability that makes the
/// (clamped) grid point the pooled mean.
pub fn exhaustive_binary_search(
    instance: &Instance,
    level: RationalityLevel,
    grid: &[f64],
) -> Result<(CensorshipParams, Scheme, f64)> {
    if instance.len() != 2 {
        return Err(Error::InvalidArgument("exhaustive binary search needs two states".into()));
    }
    let mut best: Option<(CensorshipParams, Scheme, f64)> = None;
    for &d in grid {
        let params = binary_params_at(instance, d)?;
        let scheme = make_censorship(instance, &params)?;
        let value = payoff_unchecked(instance, level, &scheme);
        if best.as_ref().is_none_or(|b| value > b.2) {
            best = Some((params, scheme, value));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("empty grid".into()))
}

/// Censorship parameters pooling state 1 with a share of state 2 at `delta`,
/// after clamping `delta` into `[v_1, prior mean]`.
pub fn binary_params_at(instance: &Instance, delta: f64) -> Result<CensorshipParams> {
    let (v1, v2) = (instance.v(0), instance.v(1));
    let (l1, l2) = (instance.scaled_lambda(0), instance.scaled_lambda(1));
    let mean = instance.prior_mean();
    let d = delta.max(v1).min(mean);
    let p = if l2 == 0.0 { 0.0 } else { (l1 * (d - v1) / (l2 * (v2 - d))).clamp(0.0, 1.0) };
    CensorshipParams::new(instance, vec![0], 1, p)
}
