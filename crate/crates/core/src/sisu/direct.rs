use crate::error::{Error, Result};
use crate::model::{log_pool_value, make_direct, CensorshipParams, Instance, RationalityLevel, Scheme};
use crate::numeric::{golden_section_max, log_add_exp, softplus};

/// Number of uniform split probabilities tried per threshold state.
pub const DIRECT_GRID: usize = 10_000;

/// Instance whose priors grow like `exp(beta * i)` with `beta = e^m`:
/// `u_i = 1`, `v_i = i`, `lambda_i` proportional to `exp(beta * i) + 1`.
/// Revealing everything earns `m / (m + sum_j exp(beta * j))`, while every
/// direct scheme earns at most a constant multiple of that normalizer.
pub fn direct_lowerbound_instance(m: usize) -> Result<(Instance, RationalityLevel)> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 states, got {m}")));
    }
    let beta = (m as f64).exp();
    let v: Vec<f64> = (1..=m).map(|i| i as f64).collect();
    let log_w: Vec<f64> = v.iter().map(|&i| softplus(beta * i)).collect();
    let instance = Instance::from_log_weights(&log_w, &v, &vec![1.0; m])?;
    Ok((instance, RationalityLevel::Finite(beta)))
}

/// `log K` for [`direct_lowerbound_instance`]: `-log(m + sum_j exp(beta j))`.
pub fn direct_lowerbound_log_k(m: usize) -> f64 {
    let beta = (m as f64).exp();
    let terms = std::iter::once((m as f64).ln()).chain((1..=m).map(|j| beta * j as f64));
    -crate::numeric::log_sum_exp(terms)
}

/// Best direct scheme found by the search.
#[derive(Debug, Clone)]
pub struct DirectSearch {
    pub params: CensorshipParams,
    pub scheme: Scheme,
    pub log_payoff: f64,
}

impl DirectSearch {
    pub fn payoff(&self) -> f64 {
        self.log_payoff.exp()
    }
}

/// Log payoff of the direct scheme with threshold `i` and split `p`, where
/// the states below `i` form the first pool.
pub fn direct_log_payoff(instance: &Instance, level: RationalityLevel, i: usize, p: f64) -> f64 {
    let m = instance.len();
    let first: Vec<(usize, f64)> = (0..i).map(|j| (j, 1.0)).chain([(i, p)]).collect();
    let second: Vec<(usize, f64)> = std::iter::once((i, 1.0 - p)).chain((i + 1..m).map(|j| (j, 1.0))).collect();
    log_add_exp(
        log_pool_value(instance, level, &first),
        log_pool_value(instance, level, &second),
    )
}

/// Searches direct schemes over every threshold state and a fine grid of
/// split probabilities, refining the best grid point by golden section.
pub fn best_direct(instance: &Instance, level: RationalityLevel) -> Result<DirectSearch> {
    let m = instance.len();
    let mut best = (f64::NEG_INFINITY, 0usize, 0.0f64);
    let step = 1.0 / (DIRECT_GRID - 1) as f64;
    for i in 0..m {
        let mut local = (f64::NEG_INFINITY, 0usize);
        for k in 0..DIRECT_GRID {
            let value = direct_log_payoff(instance, level, i, k as f64 * step);
            if value > local.0 {
                local = (value, k);
            }
        }
        let (mut value, mut p) = (local.0, local.1 as f64 * step);
        let lo = (p - step).max(0.0);
        let hi = (p + step).min(1.0);
        let (q, fq) = golden_section_max(|q| direct_log_payoff(instance, level, i, q), lo, hi, 100);
        if fq > value {
            value = fq;
            p = q;
        }
        if value > best.0 {
            best = (value, i, p);
        }
    }
    let (_, i, p) = best;
    let params = CensorshipParams::new(instance, (0..i).collect(), i, p)?;
    let scheme = make_direct(instance, &params)?;
    let log_payoff = crate::model::log_payoff_unchecked(instance, level, &scheme);
    Ok(DirectSearch { params, scheme, log_payoff })
}
