//! Mixture of a near-threshold censorship scheme and full revelation that
//! stays within a bounded factor of optimal over `[beta0, K beta0]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{full_reveal, make_censorship, mix, CensorshipParams, Instance, Scheme};

#[derive(Debug, Clone)]
pub struct BinaryRobust {
    pub scheme: Scheme,
    pub censorship: CensorshipParams,
    /// Weight on the censorship part.
    pub q: f64,
    /// `(4 sqrt(e K) + 1)^2`.
    pub certified_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryRobustSummary {
    pub q: f64,
    pub pooling_signal: f64,
    pub threshold_prob: f64,
    pub certified_bound: f64,
}

impl BinaryRobust {
    pub fn summary(&self) -> BinaryRobustSummary {
        BinaryRobustSummary {
            q: self.q,
            pooling_signal: self.censorship.pooling_signal,
            threshold_prob: self.censorship.threshold_prob,
            certified_bound: self.certified_bound,
        }
    }
}

/// Mixture weight minimizing `16 e K / q + 1 / (1 - q)`.
pub fn robust_mixture_weight(k: f64) -> f64 {
    let s = (16.0 * std::f64::consts::E * k).sqrt();
    s / (1.0 + s)
}

/// `(4 sqrt(e K) + 1)^2`, the minimum of `16 e K / q + 1 / (1 - q)`.
pub fn robust_certified_bound(k: f64) -> f64 {
    (4.0 * (std::f64::consts::E * k).sqrt() + 1.0).powi(2)
}

/// Smallest `beta0` for which the certificate applies.
pub fn min_robust_beta(instance: &Instance) -> f64 {
    let (v1, v2) = (instance.v(0), instance.v(1));
    if v2 <= 0.0 {
        return 0.0;
    }
    let w = instance.local_weights(&[(0, 1.0), (1, 1.0)]);
    w[1] / w[0] / (v2 - v1.max(0.0))
}

/// Pools state 1 with a share of state 2 just above `max(v_1, 0)` (by
/// `1 / (K beta0)`, capped at the prior mean) and mixes that scheme with
/// full revelation.
pub fn binary_robust_scheme(instance: &Instance, beta0: f64, k: f64) -> Result<BinaryRobust> {
    if instance.len() != 2 {
        return Err(Error::InvalidArgument(format!("expected two states, got {}", instance.len())));
    }
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!("K must be a finite value >= 1, got {k}")));
    }
    if !(beta0 > 0.0 && beta0.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta0 must be finite and positive, got {beta0}")));
    }
    let floor = min_robust_beta(instance);
    if beta0 < floor {
        return Err(Error::InvalidArgument(format!(
            "beta0 = {beta0} is below the instance threshold {floor}"
        )));
    }
    let (v1, v2) = (instance.v(0), instance.v(1));
    let delta = instance.prior_mean().min(v1.max(0.0) + 1.0 / (k * beta0));
    let w = instance.local_weights(&[(0, 1.0), (1, 1.0)]);
    let p = if delta >= v2 { 1.0 } else { (w[0] * (delta - v1) / (w[1] * (v2 - delta))).clamp(0.0, 1.0) };
    let censorship = CensorshipParams::new(instance, vec![0], 1, p)?;
    let q = robust_mixture_weight(k);
    let scheme = mix(&[make_censorship(instance, &censorship)?, full_reveal(instance)], &[q, 1.0 - q])?;
    Ok(BinaryRobust { scheme, censorship, q, certified_bound: robust_certified_bound(k) })
}
