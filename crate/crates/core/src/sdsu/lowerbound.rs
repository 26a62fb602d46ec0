//! The instance on which censorship schemes lose a factor growing with the
//! number of states, and the schemes used to measure that loss.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    log_pool_value, log_response, make_censorship, CensorshipParams, Instance, RationalityLevel, Scheme, Signal,
};
use crate::numeric::{bisect, golden_section_max, log_add_exp, log_sum_exp};

/// Split probabilities tried per (threshold, pool) pair in [`best_censorship`].
pub const CENSORSHIP_GRID: usize = 2001;

/// Largest instance for the exhaustive censorship search.
pub const MAX_CENSORSHIP_STATES: usize = 12;

/// Smallest `beta > e` with `beta / ln(beta) >= 2m`.
pub fn lowerbound_beta(m: usize) -> Result<f64> {
    if m < 1 {
        return Err(Error::InvalidArgument("need at least one state".into()));
    }
    let target = 2.0 * m as f64;
    let f = |b: f64| b / b.ln() - target;
    let mut hi = 2.0 * target;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    bisect(f, std::f64::consts::E, hi, 0.0)
}

/// `ln K_1 = -ln sum_{j<m} exp(beta j)` for the lower-bound instance.
pub fn lowerbound_log_k1(m: usize, beta: f64) -> f64 {
    -log_sum_exp((1..m).map(|j| beta * j as f64))
}

/// Instance with `v_i = i`, sender utility only in the top state, and
/// priors `lambda_i = K_1 K_2 (m - i - 1/beta) beta e^{beta i}` for `i < m`,
/// `lambda_m = K_2`. Stored in log-weight form.
pub fn lowerbound_instance(m: usize) -> Result<(Instance, RationalityLevel)> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 states, got {m}")));
    }
    let beta = lowerbound_beta(m)?;
    let log_k1 = lowerbound_log_k1(m, beta);
    let mf = m as f64;
    let mut log_w: Vec<f64> = (1..m)
        .map(|i| {
            let i = i as f64;
            log_k1 + (mf - i - 1.0 / beta).ln() + beta.ln() + beta * i
        })
        .collect();
    log_w.push(0.0);
    let v: Vec<f64> = (1..=m).map(|i| i as f64).collect();
    let mut u = vec![0.0; m];
    u[m - 1] = 1.0;
    Ok((Instance::from_log_weights(&log_w, &v, &u)?, RationalityLevel::Finite(beta)))
}

/// `ln(K_1 K_2)`, the unit in which payoffs on the lower-bound instance are
/// measured.
pub fn lowerbound_log_unit(instance: &Instance, level: RationalityLevel) -> Result<f64> {
    let beta = level.positive_beta("lower-bound unit")?;
    let m = instance.len();
    Ok(lowerbound_log_k1(m, beta) + instance.log_lambda(m - 1))
}

/// Scheme in which each lower state `i` sends its own signal `i + 1/beta`
/// together with a `K_1 e^{beta i}` share of the top state.
pub fn witness_scheme(instance: &Instance, level: RationalityLevel) -> Result<Scheme> {
    let beta = level.positive_beta("witness scheme")?;
    let m = instance.len();
    let log_k1 = lowerbound_log_k1(m, beta);
    let signals = (1..m)
        .map(|i| {
            let top = (log_k1 + beta * i as f64).exp();
            Signal::new(i as f64 + 1.0 / beta, [(i - 1, 1.0), (m - 1, top)])
        })
        .collect();
    Ok(Scheme::labeled(signals))
}

/// Censorship scheme pooling state `i` with the top state at `delta` and
/// revealing every other state. Up to the full-pooling mean, all of `i`
/// and part of the top state are pooled; beyond it, all of the top state
/// and part of `i`.
pub fn pair_pool_scheme(instance: &Instance, i: usize, delta: f64) -> Result<Scheme> {
    let m = instance.len();
    if m < 2 || i >= m - 1 {
        return Err(Error::InvalidArgument(format!("state {} is not below the top state", i + 1)));
    }
    let top = m - 1;
    let (vi, vm) = (instance.v(i), instance.v(top));
    if !(vi..=vm).contains(&delta) {
        return Err(Error::InvalidArgument(format!("delta {delta} outside [{vi}, {vm}]")));
    }
    let w = instance.local_weights(&[(i, 1.0), (top, 1.0)]);
    let avg = (w[0] * vi + w[1] * vm) / (w[0] + w[1]);
    let mut signals: Vec<Signal> =
        (0..m).filter(|&k| k != i && k != top).map(|k| Signal::new(instance.v(k), [(k, 1.0)])).collect();
    if delta <= avg {
        let share = if delta == vi { 0.0 } else { w[0] / w[1] * (delta - vi) / (vm - delta) };
        let share = share.clamp(0.0, 1.0);
        signals.push(Signal::new(delta, [(i, 1.0), (top, share)]));
        signals.push(Signal::new(vm, [(top, 1.0 - share)]));
    } else {
        let share = if delta == vm { 0.0 } else { w[1] / w[0] * (vm - delta) / (delta - vi) };
        let share = share.clamp(0.0, 1.0);
        signals.push(Signal::new(delta, [(i, share), (top, 1.0)]));
        signals.push(Signal::new(vi, [(i, 1.0 - share)]));
    }
    Ok(Scheme::labeled(signals))
}

/// Best censorship scheme over every threshold state, every pooled subset
/// of the others, and the threshold split.
#[derive(Debug, Clone, Serialize)]
pub struct CensorshipSearch {
    #[serde(skip)]
    pub params: CensorshipParams,
    #[serde(skip)]
    pub scheme: Scheme,
    pub log_payoff: f64,
}

fn censorship_log_payoff(instance: &Instance, level: RationalityLevel, high: &[usize], t: usize, p: f64) -> f64 {
    let pool: Vec<(usize, f64)> = high.iter().map(|&h| (h, 1.0)).chain([(t, p)]).filter(|&(_, f)| f > 0.0).collect();
    let mut total = log_pool_value(instance, level, &pool);
    for k in 0..instance.len() {
        let f = if k == t {
            1.0 - p
        } else if high.contains(&k) {
            0.0
        } else {
            1.0
        };
        if f > 0.0 && instance.u(k) > 0.0 {
            let term = instance.log_lambda(k) + f.ln() + instance.u(k).ln() + log_response(level, instance.v(k));
            total = log_add_exp(total, term);
        }
    }
    total
}

/// Exhaustive search over censorship schemes, in log space.
pub fn best_censorship(instance: &Instance, level: RationalityLevel) -> Result<CensorshipSearch> {
    let m = instance.len();
    if m > MAX_CENSORSHIP_STATES {
        return Err(Error::SizeLimit(format!("censorship search is limited to {MAX_CENSORSHIP_STATES} states")));
    }
    let step = 1.0 / (CENSORSHIP_GRID - 1) as f64;
    let mut best = (f64::NEG_INFINITY, Vec::new(), 0usize, 0.0f64);
    for t in 0..m {
        let others: Vec<usize> = (0..m).filter(|&k| k != t).collect();
        for mask in 0u32..(1 << others.len()) {
            let high: Vec<usize> =
                others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &k)| k).collect();
            if high.iter().any(|&h| instance.log_lambda(h) == f64::NEG_INFINITY) && !high.is_empty() {
                continue;
            }
            let eval = |p: f64| censorship_log_payoff(instance, level, &high, t, p);
            let (mut value, mut k_best) = (f64::NEG_INFINITY, 0);
            for k in 0..CENSORSHIP_GRID {
                let v = eval(k as f64 * step);
                if v > value {
                    value = v;
                    k_best = k;
                }
            }
            let mut p = k_best as f64 * step;
            let (q, fq) = golden_section_max(eval, (p - step).max(0.0), (p + step).min(1.0), 100);
            if fq > value {
                value = fq;
                p = q;
            }
            if value > best.0 {
                best = (value, high, t, p);
            }
        }
    }
    let (log_payoff, high, t, p) = best;
    let params = CensorshipParams::new(instance, high, t, p)?;
    let scheme = make_censorship(instance, &params)?;
    Ok(CensorshipSearch { params, scheme, log_payoff })
}
