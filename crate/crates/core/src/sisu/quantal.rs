use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::response::{finite_derivative, logistic_tail};
use crate::model::{
    log_payoff_unchecked, make_censorship, no_info, CensorshipParams, Instance, RationalityLevel, Scheme,
};
use crate::numeric::{bisect, MAX_BISECTION_ITERS};
use crate::sisu::rational::rational_optimal;

/// Largest tolerated residual of the optimality conditions.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Tangency residual on the unit-`beta` curve, `W'(s) (t - s) + W(s) - W(t)`
/// divided by `|W'(s)|`; positive left of the tangent point. Written with
/// `W(s) - W(t) = W(-t) - W(-s)` so it keeps its precision for very
/// negative `s`.
fn tangency_gap(s: f64, t: f64) -> f64 {
    let slope = logistic_tail(s) * logistic_tail(-s);
    (logistic_tail(-t) - logistic_tail(-s)) / slope - (t - s)
}

/// The nonpositive point whose tangent line to the response curve passes
/// through `(delta_dd, W(delta_dd))`.
pub fn kappa(level: RationalityLevel, delta_dd: f64) -> Result<f64> {
    let beta = level.positive_beta("the tangent map")?;
    if !(delta_dd >= 0.0) || !delta_dd.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "tangent map needs a finite delta >= 0, got {delta_dd}"
        )));
    }
    let t = beta * delta_dd;
    if t == 0.0 {
        return Ok(0.0);
    }
    // The curve depends on beta * x only, so solve at beta = 1 and rescale.
    let mut lo = -1.0;
    let mut expansions = 0;
    while tangency_gap(lo, t) <= 0.0 {
        lo *= 2.0;
        expansions += 1;
        if expansions > MAX_BISECTION_ITERS {
            return Err(Error::Numeric(format!("no tangent point found for delta {delta_dd}")));
        }
    }
    let s = bisect(|s| tangency_gap(s, t), lo, 0.0, 0.0)?;
    Ok(s / beta)
}

/// Share of state `i` that joins states `1..i` in a pool whose mean is
/// `kappa(v_i)`. May fall outside `[0, 1]`; the caller decides.
pub fn pool_probability(instance: &Instance, level: RationalityLevel, i: usize) -> Result<f64> {
    if i >= instance.len() {
        return Err(Error::InvalidArgument(format!("state {} out of range", i + 1)));
    }
    let vi = instance.v(i);
    if vi < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "pool probability needs v >= 0, state {} has {vi}",
            i + 1
        )));
    }
    let k = kappa(level, vi)?;
    if i == 0 {
        return Ok(0.0);
    }
    let parts: Vec<(usize, f64)> = (0..=i).map(|j| (j, 1.0)).collect();
    let w = instance.local_weights(&parts);
    let num: f64 = -(0..i).map(|j| w[j] * (instance.v(j) - k)).sum::<f64>();
    let den = w[i] * (vi - k);
    if num == 0.0 {
        return Ok(0.0);
    }
    if den == 0.0 {
        return Ok(num.signum() * f64::INFINITY);
    }
    Ok(num / den)
}

/// Adds zero-prior states so that the smallest value is negative and the
/// largest positive. Payoffs of every scheme are unchanged.
pub fn normalize_instance(instance: &Instance) -> Result<Instance> {
    let u = if instance.is_state_independent() { instance.u(0) } else { 0.0 };
    let mut extra = Vec::new();
    let (first, last) = (instance.v(0), instance.v(instance.len() - 1));
    if first >= 0.0 {
        extra.push((first.min(0.0) - 1.0, u));
    }
    if last <= 0.0 {
        extra.push((1.0, u));
    }
    if extra.is_empty() {
        return Ok(instance.clone());
    }
    instance.with_extra_states(&extra)
}

pub fn is_normalized(instance: &Instance) -> bool {
    instance.v(0) < 0.0 && instance.v(instance.len() - 1) > 0.0
}

/// Solution of the optimality conditions for censorship.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentSolution {
    pub delta_dd: f64,
    pub delta_d: f64,
    pub threshold_state: usize,
    pub threshold_prob: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SisuResiduals {
    pub complementary_slackness: f64,
    pub dual_feasibility_1: f64,
    pub dual_feasibility_2: f64,
    pub dual_feasibility_3: f64,
    pub primal_feasibility: f64,
}

impl SisuResiduals {
    pub fn max(&self) -> f64 {
        [
            self.complementary_slackness,
            self.dual_feasibility_1,
            self.dual_feasibility_2,
            self.dual_feasibility_3,
            self.primal_feasibility,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl TangentSolution {
    /// Residuals of the five optimality conditions.
    pub fn residuals(&self, instance: &Instance, level: RationalityLevel) -> Result<SisuResiduals> {
        let beta = level.positive_beta("optimality residuals")?;
        let (dd, d, i, p) = (self.delta_dd, self.delta_d, self.threshold_state, self.threshold_prob);
        let w = |x: f64| logistic_tail(beta * x);
        let below = instance.values().into_iter().filter(|v| *v <= dd).fold(f64::NEG_INFINITY, f64::max);
        Ok(SisuResiduals {
            complementary_slackness: ((1.0 - p) * (dd - instance.v(i))).abs(),
            dual_feasibility_1: ((w(dd) - w(d)) - finite_derivative(beta, d) * (dd - d)).abs(),
            dual_feasibility_2: (below - instance.v(i)).abs(),
            dual_feasibility_3: d.max(0.0) + (-dd).max(0.0),
            primal_feasibility: (-p).max(0.0) + (p - 1.0).max(0.0),
        })
    }
}

/// Result of [`quantal_optimal`].
#[derive(Debug, Clone)]
pub struct QuantalSolution {
    pub params: CensorshipParams,
    pub scheme: Scheme,
    /// Present for finite `beta > 0`.
    pub tangent: Option<TangentSolution>,
    pub residuals: Option<SisuResiduals>,
    /// Natural log of the payoff.
    pub log_payoff: f64,
    pub note: Option<String>,
}

impl QuantalSolution {
    pub fn payoff(&self) -> f64 {
        self.log_payoff.exp()
    }
}

fn check_sisu(instance: &Instance) -> Result<()> {
    if !instance.is_state_independent() {
        return Err(Error::NotStateIndependent(
            "sender utility varies across states; use the sdsu solvers".into(),
        ));
    }
    Ok(())
}

/// Optimal scheme for state-independent sender utility: a censorship scheme
/// whose pooling signal is the tangent point of the response curve.
///
/// Candidates come in two kinds. Either the threshold state is split, and
/// then the tangent passes through its own value; or it is fully pooled and
/// the tangent passes through some point between its value and the next
/// one, found by bisection. Every candidate satisfying the optimality
/// conditions is scored and the best is returned.
pub fn quantal_optimal(instance: &Instance, level: RationalityLevel) -> Result<QuantalSolution> {
    check_sisu(instance)?;
    if !is_normalized(instance) {
        return Err(Error::InvalidInstance(
            "values must include a negative and a positive state; normalize the instance first".into(),
        ));
    }
    let beta = match level {
        RationalityLevel::FullyRational => {
            let opt = rational_optimal(instance)?;
            return Ok(QuantalSolution {
                log_payoff: log_payoff_unchecked(instance, level, &opt.censorship),
                params: opt.params,
                scheme: opt.censorship,
                tangent: None,
                residuals: None,
                note: None,
            });
        }
        RationalityLevel::Finite(b) if b == 0.0 => {
            let scheme = no_info(instance);
            let last = instance.len() - 1;
            let params = CensorshipParams::new(instance, (0..last).collect(), last, 1.0)?;
            return Ok(QuantalSolution {
                log_payoff: log_payoff_unchecked(instance, level, &scheme),
                params,
                scheme,
                tangent: None,
                residuals: None,
                note: Some("beta = 0: every scheme has the same payoff; returning no information".into()),
            });
        }
        RationalityLevel::Finite(b) => b,
    };

    let m = instance.len();
    let mut candidates = Vec::new();
    for i in 0..m {
        let vi = instance.v(i);
        if vi >= 0.0 && instance.log_lambda(i) > f64::NEG_INFINITY {
            let p = pool_probability(instance, level, i)?;
            if (0.0..=1.0).contains(&p) {
                let k = kappa(level, vi)?;
                candidates.push(TangentSolution { delta_dd: vi, delta_d: k, threshold_state: i, threshold_prob: p });
            }
        }
        let prefix: Vec<(usize, f64)> = (0..=i).map(|j| (j, 1.0)).collect();
        let Some(mean) = instance.weighted_mean(prefix) else { continue };
        if mean > 0.0 {
            continue;
        }
        let lo = vi.max(0.0);
        if i + 1 < m && lo >= instance.v(i + 1) {
            continue;
        }
        if kappa(level, lo)? < mean {
            continue;
        }
        let dd = if i + 1 < m {
            let hi = instance.v(i + 1);
            if kappa(level, hi)? >= mean {
                continue;
            }
            bisect(|x| kappa(level, x).unwrap_or(f64::NAN) - mean, lo, hi, 0.0)?
        } else {
            // On the unit curve the tangent from s touches below
            // s + 1 + exp(-s); doubling that keeps the bracket strict even
            // when exp(-s) swamps the other terms.
            let s = beta * mean;
            let hi = (lo * beta).max(2.0 * (s.abs() + 2.0 + (-s).exp())) / beta;
            if !hi.is_finite() || kappa(level, hi)? >= mean {
                return Err(Error::Numeric("could not bracket the tangent point".into()));
            }
            bisect(|x| kappa(level, x).unwrap_or(f64::NAN) - mean, lo, hi, 0.0)?
        };
        candidates.push(TangentSolution { delta_dd: dd, delta_d: mean, threshold_state: i, threshold_prob: 1.0 });
    }

    let mut best: Option<QuantalSolution> = None;
    for cand in candidates {
        let residuals = cand.residuals(instance, level)?;
        if residuals.max() > RESIDUAL_TOL {
            continue;
        }
        let high: Vec<usize> = (0..cand.threshold_state).collect();
        let (i, p) = (cand.threshold_state, cand.threshold_prob);
        let params = CensorshipParams::with_pooling_signal(instance, high.clone(), i, p, cand.delta_d)
            .or_else(|_| CensorshipParams::new(instance, high, i, p))?;
        let scheme = make_censorship(instance, &params)?;
        let log_payoff = log_payoff_unchecked(instance, level, &scheme);
        let tangent = TangentSolution { delta_d: params.pooling_signal, ..cand };
        let residuals = tangent.residuals(instance, level)?;
        if best.as_ref().is_none_or(|b| log_payoff > b.log_payoff) {
            best = Some(QuantalSolution {
                params,
                scheme,
                tangent: Some(tangent),
                residuals: Some(residuals),
                log_payoff,
                note: None,
            });
        }
    }
    best.ok_or_else(|| Error::Numeric("no censorship scheme satisfies the optimality conditions".into()))
}

/// Threshold and split probability per level, and whether they move the
/// right way as `beta` grows.
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub levels: Vec<RationalityLevel>,
    pub thresholds: Vec<usize>,
    pub probabilities: Vec<f64>,
    pub violations: Vec<String>,
}

impl MonotonicityReport {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that the threshold state, and the split probability at equal
/// thresholds, are nondecreasing along a sorted grid of levels.
///
/// `(i, 1)` and `(i + 1, 0)` describe the same scheme, so positions are
/// compared as `i + p`.
pub fn threshold_monotonicity_check(instance: &Instance, levels: &[RationalityLevel]) -> Result<MonotonicityReport> {
    if levels.windows(2).any(|w| w[0].beta_or_inf() > w[1].beta_or_inf()) {
        return Err(Error::InvalidArgument("levels must be sorted by beta".into()));
    }
    let mut report = MonotonicityReport {
        levels: levels.to_vec(),
        thresholds: Vec::new(),
        probabilities: Vec::new(),
        violations: Vec::new(),
    };
    let mut prev: Option<f64> = None;
    for &level in levels {
        let sol = quantal_optimal(instance, level)?;
        let (i, p) = (sol.params.threshold_state, sol.params.threshold_prob);
        let pos = i as f64 + p;
        if let Some(q) = prev {
            if pos < q - 1e-9 {
                report.violations.push(format!(
                    "at beta {level} the threshold moves back to state {} with probability {p}",
                    i + 1
                ));
            }
        }
        prev = Some(pos);
        report.thresholds.push(i);
        report.probabilities.push(p);
    }
    Ok(report)
}
