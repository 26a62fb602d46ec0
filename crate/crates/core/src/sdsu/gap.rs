//! Assignment LP over state pairs, its integral optimum, and the
//! approximation schemes built from it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    full_reveal, make_censorship, payoff_unchecked, response, CensorshipParams, Instance, RationalityLevel, Scheme,
    Signal,
};
use crate::oracle::simplex::{simplex_solve, LinearProgram};
use crate::sdsu::binary::binary_optimal;
use crate::sdsu::pairwise::optimal_pairwise;

/// Largest state count for the exact integral solver.
pub const MAX_INTEGRAL_STATES: usize = 10;

/// One pooled signal of a pairwise scheme. `major` emits it with the larger
/// mass; `ratio` is the minor state's mass relative to the major's.
/// Single-state signals appear as edges with `major == minor`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairEdge {
    pub major: usize,
    pub minor: usize,
    pub sigma: f64,
    pub ratio: f64,
    pub reward: f64,
}

impl PairEdge {
    pub fn is_reveal(&self) -> bool {
        self.major == self.minor
    }
}

/// `max sum reward_e x_e` over `0 <= x_e <= 1` with two budgets per state:
/// `sum_{e: major = k} x_e <= 1` and `sum_{e: minor = k} ratio_e x_e <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairLp {
    pub num_states: usize,
    pub edges: Vec<PairEdge>,
    /// The source scheme's solution: `x_e` = major's mass on the edge.
    pub embedding: Vec<f64>,
}

impl PairLp {
    /// Major and minor budget use of every state under `x`.
    pub fn usage(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut major = vec![0.0; self.num_states];
        let mut minor = vec![0.0; self.num_states];
        for (e, &xe) in self.edges.iter().zip(x) {
            major[e.major] += xe;
            if !e.is_reveal() {
                minor[e.minor] += e.ratio * xe;
            }
        }
        (major, minor)
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.edges.iter().zip(x).map(|(e, xe)| e.reward * xe).sum()
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        let (major, minor) = self.usage(x);
        x.iter().all(|&v| (-tol..=1.0 + tol).contains(&v)) && major.iter().chain(&minor).all(|&u| u <= 1.0 + tol)
    }
}

/// Builds the assignment LP of a scheme whose signals involve at most two
/// states, with at most one shared signal per pair.
pub fn build_gap_lp(instance: &Instance, level: RationalityLevel, scheme: &Scheme) -> Result<PairLp> {
    let m = instance.len();
    let mut seen = std::collections::BTreeSet::new();
    let mut edges = Vec::new();
    let mut embedding = Vec::new();
    let weight = |i: usize| instance.lambda(i) * instance.u(i);
    for s in scheme.signals() {
        let support: Vec<usize> = s.support().collect();
        let w = response(level, s.delta);
        match support.as_slice() {
            [k] => {
                edges.push(PairEdge { major: *k, minor: *k, sigma: s.delta, ratio: 1.0, reward: weight(*k) * w });
                embedding.push(s.mass(*k));
            }
            [a, b] => {
                if !seen.insert((*a, *b)) {
                    return Err(Error::InvalidScheme(format!(
                        "states {} and {} share more than one signal",
                        a + 1,
                        b + 1
                    )));
                }
                let (i, j) = if s.mass(*a) >= s.mass(*b) { (*a, *b) } else { (*b, *a) };
                let ratio = s.mass(j) / s.mass(i);
                edges.push(PairEdge { major: i, minor: j, sigma: s.delta, ratio, reward: (weight(i) + weight(j) * ratio) * w });
                embedding.push(s.mass(i));
            }
            _ => {
                return Err(Error::InvalidScheme("signals must involve at most two states".into()));
            }
        }
    }
    Ok(PairLp { num_states: m, edges, embedding })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapAssignment {
    pub selected: Vec<bool>,
    pub value: f64,
}

/// Exact 0/1 optimum by depth-first branch and bound. A selected edge uses
/// its major state's whole major budget, so the search bounds the remaining
/// value by the best open edge per free major state.
pub fn solve_gap_integral(lp: &PairLp) -> Result<GapAssignment> {
    if lp.num_states > MAX_INTEGRAL_STATES {
        return Err(Error::SizeLimit(format!(
            "exact assignment search is limited to {MAX_INTEGRAL_STATES} states; use the fractional LP"
        )));
    }
    let mut order: Vec<usize> = (0..lp.edges.len()).filter(|&e| lp.edges[e].reward > 0.0).collect();
    order.sort_by(|&a, &b| lp.edges[b].reward.total_cmp(&lp.edges[a].reward).then(a.cmp(&b)));

    struct Search<'a> {
        lp: &'a PairLp,
        order: Vec<usize>,
        taken: Vec<bool>,
        minor: Vec<f64>,
        chosen: Vec<bool>,
        best_value: f64,
        best: Vec<bool>,
    }

    impl Search<'_> {
        fn bound(&self, from: usize) -> f64 {
            let mut per_major = vec![0.0f64; self.lp.num_states];
            for &e in &self.order[from..] {
                let edge = &self.lp.edges[e];
                if !self.taken[edge.major] {
                    per_major[edge.major] = per_major[edge.major].max(edge.reward);
                }
            }
            per_major.iter().sum()
        }

        fn run(&mut self, from: usize, value: f64) {
            if value > self.best_value {
                self.best_value = value;
                self.best = self.chosen.clone();
            }
            if from == self.order.len() || value + self.bound(from) <= self.best_value {
                return;
            }
            let e = self.order[from];
            let edge = self.lp.edges[e].clone();
            let fits = !self.taken[edge.major]
                && (edge.is_reveal() || self.minor[edge.minor] + edge.ratio <= 1.0 + 1e-12);
            if fits {
                let saved = self.minor[edge.minor];
                self.taken[edge.major] = true;
                if !edge.is_reveal() {
                    self.minor[edge.minor] += edge.ratio;
                }
                self.chosen[e] = true;
                self.run(from + 1, value + edge.reward);
                self.chosen[e] = false;
                self.taken[edge.major] = false;
                self.minor[edge.minor] = saved;
            }
            self.run(from + 1, value);
        }
    }

    let mut search = Search {
        lp,
        order,
        taken: vec![false; lp.num_states],
        minor: vec![0.0; lp.num_states],
        chosen: vec![false; lp.edges.len()],
        best_value: 0.0,
        best: vec![false; lp.edges.len()],
    };
    search.run(0, 0.0);
    Ok(GapAssignment { value: lp.objective(&bool_vec(&search.best)), selected: search.best })
}

fn bool_vec(b: &[bool]) -> Vec<f64> {
    b.iter().map(|&x| if x { 1.0 } else { 0.0 }).collect()
}

/// LP relaxation solved by the simplex; returns `(x, value)`.
pub fn solve_gap_fractional(lp: &PairLp) -> Result<(Vec<f64>, f64)> {
    let n = lp.edges.len();
    let mut prog = LinearProgram::new(lp.edges.iter().map(|e| e.reward).collect());
    for k in 0..lp.num_states {
        prog.le_row(lp.edges.iter().map(|e| if e.major == k { 1.0 } else { 0.0 }).collect(), 1.0);
        let minor: Vec<f64> =
            lp.edges.iter().map(|e| if e.minor == k && !e.is_reveal() { e.ratio } else { 0.0 }).collect();
        if minor.iter().any(|&c| c > 0.0) {
            prog.le_row(minor, 1.0);
        }
    }
    for e in 0..n {
        let mut row = vec![0.0; n];
        row[e] = 1.0;
        prog.le_row(row, 1.0);
    }
    let sol = simplex_solve(&prog)?;
    Ok((sol.x, sol.objective))
}

/// Output of [`four_approx`] with its intermediate objects.
#[derive(Debug, Clone)]
pub struct FourApprox {
    pub scheme: Scheme,
    pub pairwise: Scheme,
    pub lp: PairLp,
    pub assignment: GapAssignment,
    pub fractional_value: f64,
}

/// Scheme with at most `2m` signals earning at least a quarter of the
/// pairwise optimum: every selected edge sends half of its major state's
/// mass (and the matching share of the minor state) to its signal, and
/// every state reveals whatever mass is left.
pub fn four_approx(instance: &Instance, level: RationalityLevel, grid: &[f64]) -> Result<FourApprox> {
    let pairwise = optimal_pairwise(instance, level, grid)?;
    let lp = build_gap_lp(instance, level, &pairwise)?;
    let assignment = solve_gap_integral(&lp)?;
    let (_, fractional_value) = solve_gap_fractional(&lp)?;
    if assignment.value < 0.5 * fractional_value - 1e-12 * fractional_value.abs().max(1.0) {
        return Err(Error::Numeric(format!(
            "integral assignment {} is below half the relaxation {fractional_value}",
            assignment.value
        )));
    }
    let m = instance.len();
    let mut used = vec![0.0; m];
    let mut signals = Vec::new();
    for (e, _) in lp.edges.iter().zip(&assignment.selected).filter(|(_, &s)| s) {
        if e.is_reveal() {
            signals.push(Signal::new(e.sigma, [(e.major, 0.5)]));
            used[e.major] += 0.5;
        } else {
            let minor = 0.5 * e.ratio;
            signals.push(Signal::new(e.sigma, [(e.major, 0.5), (e.minor, minor)]));
            used[e.major] += 0.5;
            used[e.minor] += minor;
        }
    }
    for (k, &u) in used.iter().enumerate() {
        if u < 1.0 {
            signals.push(Signal::new(instance.v(k), [(k, 1.0 - u)]));
        }
    }
    Ok(FourApprox { scheme: Scheme::labeled(signals), pairwise, lp, assignment, fractional_value })
}

/// Result of the censorship and direct approximations.
#[derive(Debug, Clone)]
pub struct ApproxScheme {
    pub scheme: Scheme,
    pub payoff: f64,
    /// The two states sharing the kept signal, or `None` for full reveal.
    pub pair: Option<(usize, usize)>,
}

/// Censorship scheme that pools one pair of states optimally and reveals
/// every other state. All pairs are tried, which includes the pair carrying
/// the most value in the four-approximation.
pub fn censorship_m_approx(instance: &Instance, level: RationalityLevel, _grid: &[f64]) -> Result<ApproxScheme> {
    let reveal = full_reveal(instance);
    let mut best = ApproxScheme { payoff: payoff_unchecked(instance, level, &reveal), scheme: reveal, pair: None };
    let m = instance.len();
    for i in 0..m {
        for j in i + 1..m {
            if instance.lambda(i) + instance.lambda(j) == 0.0 {
                continue;
            }
            let binary = instance.induced_pair(i, j, 1.0, 1.0)?;
            let sol = binary_optimal(&binary, level)?;
            let params = if sol.params.high_states == vec![0] {
                CensorshipParams::new(instance, vec![i], j, sol.params.threshold_prob)?
            } else {
                let high = sol.params.high_states.iter().map(|&h| [i, j][h]).collect();
                CensorshipParams::new(instance, high, [i, j][sol.params.threshold_state], sol.params.threshold_prob)?
            };
            let scheme = make_censorship(instance, &params)?;
            let payoff = payoff_unchecked(instance, level, &scheme);
            if payoff > best.payoff {
                best = ApproxScheme { scheme, payoff, pair: Some((i, j)) };
            }
        }
    }
    Ok(best)
}

/// Two-signal scheme that keeps one signal of the four-approximation as is
/// and pools all remaining mass at its Bayes mean; the best kept signal is
/// chosen by payoff.
pub fn direct_m_approx(instance: &Instance, level: RationalityLevel, grid: &[f64]) -> Result<ApproxScheme> {
    let base = four_approx(instance, level, grid)?;
    let mut best: Option<ApproxScheme> = None;
    for s in base.scheme.signals() {
        let rest: Vec<(usize, f64)> = (0..instance.len())
            .map(|k| (k, (1.0 - s.mass(k)).max(0.0)))
            .filter(|&(_, f)| f > 0.0)
            .collect();
        let mut signals = vec![s.clone()];
        if !rest.is_empty() {
            let delta = crate::model::direct_low_mean(instance, &rest);
            signals.push(Signal::new(delta, rest));
        }
        let scheme = Scheme::labeled(signals);
        let payoff = payoff_unchecked(instance, level, &scheme);
        if best.as_ref().is_none_or(|b| payoff > b.payoff) {
            let support: Vec<usize> = s.support().collect();
            let pair = match support.as_slice() {
                [a, b] => Some((*a, *b)),
                [a] => Some((*a, *a)),
                _ => None,
            };
            best = Some(ApproxScheme { scheme, payoff, pair });
        }
    }
    best.ok_or_else(|| Error::Numeric("four-approximation produced no signals".into()))
}
