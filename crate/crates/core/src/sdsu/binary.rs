use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::response::logistic_tail;
use crate::model::{
    make_censorship, no_info, payoff_unchecked, CensorshipParams, Instance, RationalityLevel, Scheme,
};
use crate::numeric::{bisect, softplus};
use crate::sisu::rational_optimal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinaryRegime {
    FullReveal,
    Partial,
    NoInfo,
}

/// Optimal censorship for a two-state instance.
#[derive(Debug, Clone)]
pub struct BinarySolution {
    pub params: CensorshipParams,
    pub scheme: Scheme,
    pub regime: BinaryRegime,
    /// Root of `gamma(delta) = u_1 / u_2` when it lies inside
    /// `(v_1, prior mean)`.
    pub delta_hat: Option<f64>,
    pub payoff: f64,
    pub note: Option<String>,
}

fn check_binary(instance: &Instance) -> Result<()> {
    if instance.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "expected a two-state instance, got {} states",
            instance.len()
        )));
    }
    Ok(())
}

/// `gamma` without domain checks; finite at both `v_1` and `v_2-`.
pub(crate) fn gamma_raw(v1: f64, v2: f64, beta: f64, delta: f64) -> f64 {
    let a = (v1 - delta) / (v2 - delta);
    // (W(v2) - W(delta)) / W'(delta) = (1 - W(v2)/W(delta)) / (beta W(-delta))
    let log_ratio = softplus(beta * delta) - softplus(beta * v2);
    let r = -log_ratio.exp_m1() / (beta * logistic_tail(-beta * delta));
    a + r * (1.0 - a) / (v2 - delta)
}

/// The decreasing function whose level `u_1 / u_2` locates the optimal
/// pooling signal of a two-state instance.
pub fn binary_gamma(instance: &Instance, level: RationalityLevel, delta: f64) -> Result<f64> {
    check_binary(instance)?;
    let beta = level.positive_beta("gamma")?;
    let (v1, v2) = (instance.v(0), instance.v(1));
    if !(delta > v1 && delta < v2) {
        return Err(Error::InvalidArgument(format!("delta {delta} outside ({v1}, {v2})")));
    }
    Ok(gamma_raw(v1, v2, beta, delta))
}

fn classify(scheme: &Scheme) -> BinaryRegime {
    if scheme.len() == 1 {
        BinaryRegime::NoInfo
    } else if scheme.pooled_signal_count() == 0 {
        BinaryRegime::FullReveal
    } else {
        BinaryRegime::Partial
    }
}

fn solution(instance: &Instance, level: RationalityLevel, params: CensorshipParams, regime: BinaryRegime, delta_hat: Option<f64>, note: Option<String>) -> Result<BinarySolution> {
    let scheme = make_censorship(instance, &params)?;
    Ok(BinarySolution { payoff: payoff_unchecked(instance, level, &scheme), params, scheme, regime, delta_hat, note })
}

/// Optimal scheme for two states: state 1 is pooled with a share of state 2
/// at the signal where `gamma` crosses `u_1 / u_2`, clamped to
/// `[v_1, prior mean]`.
pub fn binary_optimal(instance: &Instance, level: RationalityLevel) -> Result<BinarySolution> {
    check_binary(instance)?;
    let reveal = || CensorshipParams::new(instance, vec![0], 1, 0.0);
    let (u1, u2) = (instance.u(0), instance.u(1));
    if u1 == 0.0 && u2 == 0.0 {
        return solution(instance, level, reveal()?, BinaryRegime::FullReveal, None,
            Some("sender utility is zero in both states; every scheme earns 0".into()));
    }
    if instance.lambda(0) == 0.0 || instance.lambda(1) == 0.0 {
        return solution(instance, level, reveal()?, BinaryRegime::FullReveal, None,
            Some("one state has zero prior; every scheme reveals the state".into()));
    }
    let beta = match level {
        RationalityLevel::FullyRational => {
            let opt = rational_optimal(instance)?;
            let regime = classify(&opt.censorship);
            return Ok(BinarySolution {
                payoff: payoff_unchecked(instance, level, &opt.censorship),
                params: opt.params,
                scheme: opt.censorship,
                regime,
                delta_hat: None,
                note: None,
            });
        }
        RationalityLevel::Finite(b) if b == 0.0 => {
            let params = CensorshipParams::new(instance, vec![0], 1, 1.0)?;
            let sol = solution(instance, level, params, BinaryRegime::NoInfo, None,
                Some("beta = 0: every scheme has the same payoff; returning no information".into()))?;
            debug_assert_eq!(sol.scheme, no_info(instance));
            return Ok(sol);
        }
        RationalityLevel::Finite(b) => b,
    };
    let (v1, v2) = (instance.v(0), instance.v(1));
    let target = if u2 == 0.0 { f64::INFINITY } else { u1 / u2 };
    let mean = instance.prior_mean();
    if gamma_raw(v1, v2, beta, v1) <= target {
        return solution(instance, level, reveal()?, BinaryRegime::FullReveal, None, None);
    }
    if gamma_raw(v1, v2, beta, mean) >= target {
        let params = CensorshipParams::new(instance, vec![0], 1, 1.0)?;
        return solution(instance, level, params, BinaryRegime::NoInfo, None, None);
    }
    let d = bisect(|d| gamma_raw(v1, v2, beta, d) - target, v1, mean, 0.0)?;
    let w = instance.local_weights(&[(0, 1.0), (1, 1.0)]);
    let p = (w[0] * (d - v1) / (w[1] * (v2 - d))).clamp(0.0, 1.0);
    let params = CensorshipParams::new(instance, vec![0], 1, p)?;
    solution(instance, level, params, BinaryRegime::Partial, Some(d), None)
}
