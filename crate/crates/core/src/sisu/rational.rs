use std::cmp::Ordering;

use crate::error::Result;
use crate::model::{make_censorship, make_direct, CensorshipParams, Instance, Scheme};

/// Optimal censorship against a fully rational receiver, with the direct
/// scheme sharing its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalOptimum {
    pub params: CensorshipParams,
    pub censorship: Scheme,
    pub direct: Scheme,
}

/// `v_i / u_i`, with `u_i = 0` mapped to `+inf` (for `v_i > 0`) or `-inf`.
pub fn utility_ratio(v: f64, u: f64) -> f64 {
    if u > 0.0 {
        v / u
    } else if v > 0.0 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    }
}

/// States sorted by `v_i / u_i`, ties by index.
pub fn ratio_order(instance: &Instance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = utility_ratio(instance.v(a), instance.u(a));
        let rb = utility_ratio(instance.v(b), instance.u(b));
        ra.partial_cmp(&rb).unwrap_or(Ordering::Equal).then(a.cmp(&b))
    });
    order
}

/// Pools states in increasing `v/u` order while the pooled mean stays at or
/// below zero; the last state admitted is split to make the pool exactly
/// indifferent.
pub fn rational_optimal(instance: &Instance) -> Result<RationalOptimum> {
    let order = ratio_order(instance);
    let parts: Vec<(usize, f64)> = order.iter().map(|&i| (i, 1.0)).collect();
    let w = instance.local_weights(&parts);
    let terms: Vec<f64> = order.iter().zip(&w).map(|(&i, w)| w * instance.v(i)).collect();
    let scale: f64 = terms.iter().map(|t| t.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;

    let mut prefix = 0.0;
    let mut pos = 0;
    for (k, t) in terms.iter().enumerate() {
        if prefix > tol {
            break;
        }
        pos = k;
        prefix += t;
    }
    let before: f64 = terms[..pos].iter().sum();
    let threshold = order[pos];
    let own = terms[pos];
    let p = if own <= 0.0 || before + own <= tol {
        1.0
    } else {
        // Adding 0.0 turns a -0.0 quotient into 0.0.
        (-before / own).clamp(0.0, 1.0) + 0.0
    };
    let p = if p * own + before <= tol { p } else { 0.0 };
    let high = order[..pos].to_vec();
    let params = CensorshipParams::new(instance, high, threshold, p)?;
    Ok(RationalOptimum {
        censorship: make_censorship(instance, &params)?,
        direct: make_direct(instance, &params)?,
        params,
    })
}
