use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::instance::Instance;
use crate::model::response::{log_response, RationalityLevel};
use crate::model::scheme::{Scheme, Signal};

/// Tolerance between a stored pooling signal and the pooled mean.
pub const POOL_TOL: f64 = 1e-10;

/// A censorship partition: the states in `high_states` and a
/// `threshold_prob` share of `threshold_state` are pooled at
/// `pooling_signal`; everything else is revealed. Indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct CensorshipParams {
    pub threshold_state: usize,
    pub threshold_prob: f64,
    pub pooling_signal: f64,
    pub high_states: Vec<usize>,
}

impl CensorshipParams {
    /// Builds the parameters and computes the pooled mean.
    pub fn new(instance: &Instance, high_states: Vec<usize>, threshold_state: usize, threshold_prob: f64) -> Result<Self> {
        let mut params = CensorshipParams {
            threshold_state,
            threshold_prob,
            pooling_signal: 0.0,
            high_states,
        };
        params.check_partition(instance)?;
        params.high_states.sort_unstable();
        params.pooling_signal = params.pooled_mean(instance)?;
        Ok(params)
    }

    /// Like [`CensorshipParams::new`] but with a caller-chosen pooling
    /// signal; accepted only when it matches the pooled mean, or when the
    /// pool carries no prior weight (then any value is Bayes plausible).
    pub fn with_pooling_signal(
        instance: &Instance,
        high_states: Vec<usize>,
        threshold_state: usize,
        threshold_prob: f64,
        pooling_signal: f64,
    ) -> Result<Self> {
        let mut params = CensorshipParams::new(instance, high_states, threshold_state, threshold_prob)?;
        params.pooling_signal = pooling_signal;
        if params.pool_has_weight(instance) {
            params.validate(instance)?;
        }
        Ok(params)
    }

    fn check_partition(&self, instance: &Instance) -> Result<()> {
        let m = instance.len();
        if self.threshold_state >= m {
            return Err(Error::InvalidArgument(format!(
                "threshold state {} out of range 1..={m}",
                self.threshold_state + 1
            )));
        }
        if !(0.0..=1.0).contains(&self.threshold_prob) {
            return Err(Error::InvalidArgument(format!(
                "threshold probability {} outside [0, 1]",
                self.threshold_prob
            )));
        }
        let mut seen = vec![false; m];
        seen[self.threshold_state] = true;
        for &h in &self.high_states {
            if h >= m || seen[h] {
                return Err(Error::InvalidArgument(format!(
                    "pooled state {} is out of range or repeated",
                    h + 1
                )));
            }
            seen[h] = true;
        }
        Ok(())
    }

    /// Revealed states: neither pooled nor the threshold state.
    pub fn low_states(&self, instance: &Instance) -> Vec<usize> {
        (0..instance.len())
            .filter(|i| *i != self.threshold_state && !self.high_states.contains(i))
            .collect()
    }

    fn pool_parts(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.high_states
            .iter()
            .map(|&h| (h, 1.0))
            .chain(std::iter::once((self.threshold_state, self.threshold_prob)))
            .filter(|&(_, f)| f > 0.0)
    }

    fn pool_has_weight(&self, instance: &Instance) -> bool {
        self.pool_parts().any(|(i, _)| instance.log_lambda(i) > f64::NEG_INFINITY)
    }

    /// The Bayes-plausible mean of the pool. An empty pool yields the
    /// threshold state's own value.
    pub fn pooled_mean(&self, instance: &Instance) -> Result<f64> {
        let parts: Vec<(usize, f64)> = self.pool_parts().collect();
        if parts.is_empty() {
            return Ok(instance.v(self.threshold_state));
        }
        if let Some(mean) = instance.weighted_mean(parts.iter().copied()) {
            return Ok(mean);
        }
        if self.threshold_prob > 0.0 && !self.high_states.is_empty() {
            return Err(Error::InvalidArgument(
                "pooled states carry no prior weight; the pooling signal is undefined".into(),
            ));
        }
        let n = parts.len() as f64;
        Ok(parts.iter().map(|&(i, _)| instance.v(i)).sum::<f64>() / n)
    }

    /// Checks the stored pooling signal against the pooled mean.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        self.check_partition(instance)?;
        if !self.pool_has_weight(instance) {
            return Ok(());
        }
        let mean = self.pooled_mean(instance)?;
        if (mean - self.pooling_signal).abs() > POOL_TOL * mean.abs().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "pooling signal {} differs from the pooled mean {mean}",
                self.pooling_signal
            )));
        }
        Ok(())
    }
}

/// Pools the high states and a share of the threshold state at the pooling
/// signal and reveals everything else.
pub fn make_censorship(instance: &Instance, params: &CensorshipParams) -> Result<Scheme> {
    params.validate(instance)?;
    let i = params.threshold_state;
    let p = params.threshold_prob;
    let mut signals = vec![Signal::new(params.pooling_signal, params.pool_parts())];
    signals.push(Signal::new(instance.v(i), [(i, 1.0 - p)]));
    for j in params.low_states(instance) {
        signals.push(Signal::new(instance.v(j), [(j, 1.0)]));
    }
    Ok(Scheme::new(signals))
}

/// Pools the high states and a share of the threshold state at the pooling
/// signal, and pools everything else at a second signal.
pub fn make_direct(instance: &Instance, params: &CensorshipParams) -> Result<Scheme> {
    params.validate(instance)?;
    let i = params.threshold_state;
    let p = params.threshold_prob;
    let low: Vec<(usize, f64)> = params
        .low_states(instance)
        .into_iter()
        .map(|j| (j, 1.0))
        .chain(std::iter::once((i, 1.0 - p)))
        .filter(|&(_, f)| f > 0.0)
        .collect();
    let mut signals = vec![Signal::new(params.pooling_signal, params.pool_parts())];
    if !low.is_empty() {
        let delta = direct_low_mean(instance, &low);
        signals.push(Signal::new(delta, low));
    }
    Ok(Scheme::new(signals))
}

/// Mean of the second pool of a direct scheme.
pub fn direct_low_mean(instance: &Instance, parts: &[(usize, f64)]) -> f64 {
    instance.weighted_mean(parts.iter().copied()).unwrap_or_else(|| {
        parts.iter().map(|&(i, _)| instance.v(i)).sum::<f64>() / parts.len() as f64
    })
}

/// Log payoff of one pooled signal carrying share `f_k` of each listed
/// state: `log(sum_k lambda_k f_k u_k) + log W(mean)`; `-inf` for an empty
/// or weightless pool.
pub fn log_pool_value(instance: &Instance, level: RationalityLevel, parts: &[(usize, f64)]) -> f64 {
    let logs: Vec<f64> = parts
        .iter()
        .map(|&(i, f)| if f > 0.0 { instance.log_lambda(i) + f.ln() } else { f64::NEG_INFINITY })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let (mut den, mut num, mut util) = (0.0, 0.0, 0.0);
    for (&(i, _), l) in parts.iter().zip(&logs) {
        let w = (l - top).exp();
        den += w;
        num += w * instance.v(i);
        util += w * instance.u(i);
    }
    top + util.ln() + log_response(level, num / den)
}

/// Every state emits its own value.
pub fn full_reveal(instance: &Instance) -> Scheme {
    Scheme::new(
        (0..instance.len())
            .map(|i| Signal::new(instance.v(i), [(i, 1.0)]))
            .collect(),
    )
}

/// Every state emits the prior mean.
pub fn no_info(instance: &Instance) -> Scheme {
    Scheme::new(vec![Signal::new(
        instance.prior_mean(),
        (0..instance.len()).map(|i| (i, 1.0)),
    )])
}

/// Convex combination of schemes.
pub fn mix(schemes: &[Scheme], weights: &[f64]) -> Result<Scheme> {
    if schemes.is_empty() {
        return Err(Error::InvalidArgument("cannot mix an empty list of schemes".into()));
    }
    if schemes.len() != weights.len() {
        return Err(Error::InvalidArgument(format!(
            "{} schemes but {} weights",
            schemes.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
        return Err(Error::InvalidArgument("mixture weights must lie in [0, 1]".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("mixture weights sum to {total}")));
    }
    let signals = schemes
        .iter()
        .zip(weights)
        .flat_map(|(s, &w)| {
            s.signals()
                .iter()
                .map(move |sig| Signal::new(sig.delta, sig.mass.iter().map(|(&i, &p)| (i, w * p))))
        })
        .collect();
    Ok(Scheme::new(signals))
}

#[derive(Serialize, Deserialize)]
struct ParamsJson {
    i_dagger: usize,
    p_dagger: f64,
    delta_dagger: f64,
    high_states: Vec<usize>,
}

impl CensorshipParams {
    /// JSON with 1-based state indices.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ParamsJson {
            i_dagger: self.threshold_state + 1,
            p_dagger: self.threshold_prob,
            delta_dagger: self.pooling_signal,
            high_states: self.high_states.iter().map(|h| h + 1).collect(),
        })
        .expect("params serialize")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ParamsJson = serde_json::from_str(text)?;
        if raw.i_dagger == 0 || raw.high_states.contains(&0) {
            return Err(Error::InvalidArgument("state indices are 1-based".into()));
        }
        Ok(CensorshipParams {
            threshold_state: raw.i_dagger - 1,
            threshold_prob: raw.p_dagger,
            pooling_signal: raw.delta_dagger,
            high_states: raw.high_states.iter().map(|h| h - 1).collect(),
        })
    }
}
