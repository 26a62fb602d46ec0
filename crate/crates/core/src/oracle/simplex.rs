//! Dense two-phase tableau simplex. Pivots follow the most negative reduced
//! cost and fall back to Bland's rule during degenerate stretches, which
//! rules out cycling.
//!
//! Solves `max c.x` subject to linear rows and `x >= 0`, and reports the
//! row duals.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots after which entering columns are chosen
/// by Bland's rule; the steepest reduced cost is used otherwise.
const BLAND_AFTER: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub kind: RowKind,
    pub rhs: f64,
}

/// `max objective . x` subject to `rows` and `x >= 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram { objective, rows: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, kind: RowKind, rhs: f64) -> &mut Self {
        self.rows.push(Row { coeffs, kind, rhs });
        self
    }

    pub fn le_row(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add_row(coeffs, RowKind::Le, rhs)
    }

    pub fn eq_row(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add_row(coeffs, RowKind::Eq, rhs)
    }

    pub fn ge_row(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.add_row(coeffs, RowKind::Ge, rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// One dual per row, signed for the original row orientation: `<=` rows
    /// get `y >= 0`, `>=` rows get `y <= 0`.
    pub duals: Vec<f64>,
    pub dual_objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn duality_gap(&self) -> f64 {
        (self.objective - self.dual_objective).abs()
    }
}

struct Tableau {
    a: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
    blocked: Vec<bool>,
    iterations: usize,
    cap: usize,
    degenerate_streak: usize,
}

impl Tableau {
    fn reduced_costs(&self) -> Vec<f64> {
        let n = self.cost.len();
        let mut red: Vec<f64> = self.cost.iter().map(|c| -c).collect();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = self.cost[b];
            if cb != 0.0 {
                for j in 0..n {
                    red[j] += cb * self.a[r][j];
                }
            }
        }
        red
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.a[row][col];
        for v in self.a[row].iter_mut() {
            *v /= p;
        }
        self.rhs[row] /= p;
        self.a[row][col] = 1.0;
        let pivot_row = self.a[row].clone();
        let pivot_rhs = self.rhs[row];
        for r in 0..self.a.len() {
            if r == row {
                continue;
            }
            let f = self.a[r][col];
            if f != 0.0 {
                for (v, &pv) in self.a[r].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.a[r][col] = 0.0;
                self.rhs[r] -= f * pivot_rhs;
                if self.rhs[r] < 0.0 && self.rhs[r] > -FEAS_TOL {
                    self.rhs[r] = 0.0;
                }
            }
        }
        self.basis[row] = col;
        self.iterations += 1;
    }

    /// Runs primal simplex iterations until no reduced cost is negative.
    fn optimize(&mut self) -> Result<()> {
        loop {
            if self.iterations >= self.cap {
                return Err(Error::Numeric(format!(
                    "simplex exceeded {} iterations",
                    self.cap
                )));
            }
            let red = self.reduced_costs();
            let entering = if self.degenerate_streak >= BLAND_AFTER {
                (0..red.len()).find(|&j| !self.blocked[j] && red[j] < -COST_TOL)
            } else {
                (0..red.len())
                    .filter(|&j| !self.blocked[j] && red[j] < -COST_TOL)
                    .min_by(|&a, &b| red[a].total_cmp(&red[b]).then(a.cmp(&b)))
            };
            let Some(col) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.a.len() {
                let coef = self.a[r][col];
                if coef > PIVOT_TOL {
                    let ratio = self.rhs[r] / coef;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - 1e-14 * bratio.abs().max(1.0)
                                || (ratio <= bratio + 1e-14 * bratio.abs().max(1.0)
                                    && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            match best {
                Some((row, ratio)) => {
                    if ratio <= 1e-13 {
                        self.degenerate_streak += 1;
                    } else {
                        self.degenerate_streak = 0;
                    }
                    self.pivot(row, col)
                }
                None => return Err(Error::Unbounded),
            }
        }
    }
}

/// Solves the program; distinguishes infeasible and unbounded outcomes.
pub fn simplex_solve(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.num_vars();
    let m = lp.rows.len();
    for (k, row) in lp.rows.iter().enumerate() {
        if row.coeffs.len() != n {
            return Err(Error::InvalidArgument(format!(
                "row {k} has {} coefficients, expected {n}",
                row.coeffs.len()
            )));
        }
        if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("row {k} has non-finite entries")));
        }
    }
    if lp.objective.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("objective has non-finite entries".into()));
    }

    // Column layout: originals, then one slack/surplus per inequality row,
    // then one artificial per row whose identity column is not a slack.
    let mut flipped = vec![false; m];
    let mut kinds = Vec::with_capacity(m);
    for (r, row) in lp.rows.iter().enumerate() {
        let mut kind = row.kind;
        if row.rhs < 0.0 {
            flipped[r] = true;
            kind = match kind {
                RowKind::Le => RowKind::Ge,
                RowKind::Ge => RowKind::Le,
                RowKind::Eq => RowKind::Eq,
            };
        }
        kinds.push(kind);
    }
    let n_slack = kinds.iter().filter(|k| **k != RowKind::Eq).count();
    let n_art = kinds.iter().filter(|k| **k != RowKind::Le).count();
    let total = n + n_slack + n_art;
    let mut a = vec![vec![0.0; total]; m];
    let mut rhs = vec![0.0; m];
    let mut basis = vec![0; m];
    let mut identity_col = vec![0; m];
    let mut is_art = vec![false; total];
    let (mut s, mut t) = (n, n + n_slack);
    for r in 0..m {
        let sign = if flipped[r] { -1.0 } else { 1.0 };
        for j in 0..n {
            a[r][j] = sign * lp.rows[r].coeffs[j];
        }
        rhs[r] = sign * lp.rows[r].rhs;
        match kinds[r] {
            RowKind::Le => {
                a[r][s] = 1.0;
                basis[r] = s;
                identity_col[r] = s;
                s += 1;
            }
            RowKind::Ge => {
                a[r][s] = -1.0;
                s += 1;
                a[r][t] = 1.0;
                basis[r] = t;
                identity_col[r] = t;
                is_art[t] = true;
                t += 1;
            }
            RowKind::Eq => {
                a[r][t] = 1.0;
                basis[r] = t;
                identity_col[r] = t;
                is_art[t] = true;
                t += 1;
            }
        }
    }

    let cap = 50_000 + 20 * (m + total);
    let phase1_cost: Vec<f64> = is_art.iter().map(|&x| if x { -1.0 } else { 0.0 }).collect();
    let mut tab = Tableau {
        a,
        rhs,
        basis,
        cost: phase1_cost,
        blocked: vec![false; total],
        iterations: 0,
        cap,
        degenerate_streak: 0,
    };
    if n_art > 0 {
        tab.optimize()?;
        let infeas: f64 = tab
            .basis
            .iter()
            .zip(&tab.rhs)
            .filter(|(b, _)| is_art[**b])
            .map(|(_, v)| *v)
            .sum();
        let scale = lp.rows.iter().map(|r| r.rhs.abs()).fold(1.0, f64::max);
        if infeas > FEAS_TOL * scale {
            return Err(Error::Infeasible);
        }
        // Drive zero-valued artificials out of the basis where possible.
        for r in 0..m {
            if is_art[tab.basis[r]] {
                if let Some(col) = (0..n + n_slack).find(|&j| tab.a[r][j].abs() > 1e-9) {
                    tab.pivot(r, col);
                }
            }
        }
        tab.blocked[..total].copy_from_slice(&is_art[..total]);
    }
    let mut cost = vec![0.0; total];
    cost[..n].copy_from_slice(&lp.objective);
    tab.cost = cost;
    tab.optimize()?;

    let mut x = vec![0.0; n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs[r].max(0.0);
        }
    }
    let objective: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    let red = tab.reduced_costs();
    let duals: Vec<f64> = (0..m)
        .map(|r| {
            let y = red[identity_col[r]];
            if flipped[r] {
                -y
            } else {
                y
            }
        })
        .collect();
    let dual_objective = lp.rows.iter().zip(&duals).map(|(row, y)| row.rhs * y).sum();
    Ok(LpSolution { x, objective, duals, dual_objective, iterations: tab.iterations })
}
