use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::log_sum_exp;

/// Tolerance on the prior summing to one.
pub const PRIOR_SUM_TOL: f64 = 1e-12;

/// One state of the world: prior weight, receiver utility difference
/// `v = v(0) - v(1)`, and sender utility `u` for action 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub lambda: f64,
    pub log_lambda: f64,
    pub v: f64,
    pub u: f64,
}

/// A persuasion instance with states ordered by strictly increasing `v`.
///
/// Priors are kept both linearly and in log form. Instances built from log
/// weights (priors like `exp(beta * i)`) may have `lambda` underflow to zero;
/// every weighted computation then goes through [`Instance::scaled_lambda`].
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    states: Vec<State>,
    /// Raw unnormalized log weights when the instance was given in log form.
    log_weights: Option<Vec<f64>>,
    weight_ref: f64,
}

impl Instance {
    /// Builds an instance from linear priors that sum to one.
    pub fn new(lambda: &[f64], v: &[f64], u: &[f64]) -> Result<Self> {
        check_lengths(lambda.len(), v.len(), u.len())?;
        for (i, &l) in lambda.iter().enumerate() {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "prior of state {} must be a finite nonnegative number, got {l}",
                    i + 1
                )));
            }
        }
        let total: f64 = lambda.iter().sum();
        if (total - 1.0).abs() > PRIOR_SUM_TOL {
            return Err(Error::InvalidInstance(format!(
                "prior sums to {total}, expected 1"
            )));
        }
        let states = lambda
            .iter()
            .zip(v)
            .zip(u)
            .map(|((&l, &v), &u)| State { lambda: l, log_lambda: l.ln(), v, u })
            .collect();
        Self::finish(states, None)
    }

    /// Builds an instance from unnormalized log weights `log w_i`; the prior
    /// is `w_i / sum_j w_j`.
    pub fn from_log_weights(log_weights: &[f64], v: &[f64], u: &[f64]) -> Result<Self> {
        check_lengths(log_weights.len(), v.len(), u.len())?;
        if log_weights.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
            return Err(Error::InvalidInstance("log weights must be < +inf".into()));
        }
        let norm = log_sum_exp(log_weights.iter().copied());
        if !norm.is_finite() {
            return Err(Error::InvalidInstance("all log weights are -inf".into()));
        }
        let states = log_weights
            .iter()
            .zip(v)
            .zip(u)
            .map(|((&w, &v), &u)| {
                let log_lambda = w - norm;
                State { lambda: log_lambda.exp(), log_lambda, v, u }
            })
            .collect();
        Self::finish(states, Some(log_weights.to_vec()))
    }

    fn finish(states: Vec<State>, log_weights: Option<Vec<f64>>) -> Result<Self> {
        for (i, s) in states.iter().enumerate() {
            if !s.v.is_finite() {
                return Err(Error::InvalidInstance(format!("v of state {} is not finite", i + 1)));
            }
            if !(s.u.is_finite() && s.u >= 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "sender utility of state {} must be finite and >= 0, got {}",
                    i + 1,
                    s.u
                )));
            }
        }
        for (i, w) in states.windows(2).enumerate() {
            if w[1].v <= w[0].v {
                return Err(Error::InvalidInstance(format!(
                    "v must be strictly increasing (states {} and {})",
                    i + 1,
                    i + 2
                )));
            }
        }
        let weight_ref = if log_weights.is_some() {
            states
                .iter()
                .map(|s| s.log_lambda)
                .fold(f64::NEG_INFINITY, f64::max)
        } else {
            0.0
        };
        Ok(Instance { states, log_weights, weight_ref })
    }

    /// Two-state convenience constructor.
    pub fn binary(lambda1: f64, v: [f64; 2], u: [f64; 2]) -> Result<Self> {
        Self::new(&[lambda1, 1.0 - lambda1], &v, &u)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &State {
        &self.states[i]
    }

    pub fn lambda(&self, i: usize) -> f64 {
        self.states[i].lambda
    }

    pub fn log_lambda(&self, i: usize) -> f64 {
        self.states[i].log_lambda
    }

    pub fn v(&self, i: usize) -> f64 {
        self.states[i].v
    }

    pub fn u(&self, i: usize) -> f64 {
        self.states[i].u
    }

    pub fn is_log_form(&self) -> bool {
        self.log_weights.is_some()
    }

    /// Raw log weights for log-form instances.
    pub fn log_weights(&self) -> Option<&[f64]> {
        self.log_weights.as_deref()
    }

    /// Log of the common factor divided out by [`Instance::scaled_lambda`]:
    /// zero for linear instances, the largest log prior for log-form ones.
    pub fn weight_ref(&self) -> f64 {
        self.weight_ref
    }

    /// `lambda_i / exp(weight_ref)`; never underflows for the heaviest state.
    pub fn scaled_lambda(&self, i: usize) -> f64 {
        if self.is_log_form() {
            (self.states[i].log_lambda - self.weight_ref).exp()
        } else {
            self.states[i].lambda
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.v).collect()
    }

    /// Prior mean of `v`.
    pub fn prior_mean(&self) -> f64 {
        self.weighted_mean((0..self.len()).map(|i| (i, 1.0)))
            .unwrap_or(f64::NAN)
    }

    /// Mean of `v` under weights `lambda_i * frac_i`; `None` when the total
    /// weight is zero.
    pub fn weighted_mean<I: IntoIterator<Item = (usize, f64)>>(&self, parts: I) -> Option<f64> {
        let parts: Vec<(usize, f64)> = parts.into_iter().collect();
        let w = self.local_weights(&parts);
        let den: f64 = w.iter().sum();
        if den > 0.0 {
            let num: f64 = parts.iter().zip(&w).map(|(&(i, _), w)| w * self.states[i].v).sum();
            Some(num / den)
        } else {
            None
        }
    }

    /// Weights `lambda_i * frac_i` divided by the largest of them, computed
    /// from log priors so that no weight in the group underflows needlessly.
    pub fn local_weights(&self, parts: &[(usize, f64)]) -> Vec<f64> {
        let logs: Vec<f64> = parts
            .iter()
            .map(|&(i, f)| if f > 0.0 { self.states[i].log_lambda + f.ln() } else { f64::NEG_INFINITY })
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return vec![0.0; parts.len()];
        }
        logs.iter().map(|l| (l - top).exp()).collect()
    }

    /// True when every state carries the same sender utility.
    pub fn is_state_independent(&self) -> bool {
        let u0 = match self.states.first() {
            Some(s) => s.u,
            None => return true,
        };
        self.states
            .iter()
            .all(|s| (s.u - u0).abs() <= 1e-12 * u0.abs().max(1.0))
    }

    /// Two-state instance on states `i < j` with prior proportional to
    /// `lambda_i * frac_i` and `lambda_j * frac_j`.
    pub fn induced_pair(&self, i: usize, j: usize, frac_i: f64, frac_j: f64) -> Result<Instance> {
        if i >= j || j >= self.len() {
            return Err(Error::InvalidArgument(format!("bad state pair ({i}, {j})")));
        }
        let (si, sj) = (&self.states[i], &self.states[j]);
        let lw = [si.log_lambda + frac_i.ln(), sj.log_lambda + frac_j.ln()];
        let norm = log_sum_exp(lw);
        if !norm.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "pair ({}, {}) carries no prior weight",
                i + 1,
                j + 1
            )));
        }
        let l1 = (lw[0] - norm).exp();
        let l2 = (lw[1] - norm).exp();
        let states = vec![
            State { lambda: l1, log_lambda: lw[0] - norm, v: si.v, u: si.u },
            State { lambda: l2, log_lambda: lw[1] - norm, v: sj.v, u: sj.u },
        ];
        Instance::finish(states, None)
    }

    /// Inserts zero-prior states (used by normalization).
    pub(crate) fn with_extra_states(&self, extra: &[(f64, f64)]) -> Result<Instance> {
        let mut states = self.states.clone();
        let mut log_weights = self.log_weights.clone();
        for &(v, u) in extra {
            let pos = states.iter().position(|s| s.v > v).unwrap_or(states.len());
            states.insert(pos, State { lambda: 0.0, log_lambda: f64::NEG_INFINITY, v, u });
            if let Some(w) = log_weights.as_mut() {
                w.insert(pos, f64::NEG_INFINITY);
            }
        }
        Instance::finish(states, log_weights)
    }
}

fn check_lengths(a: usize, b: usize, c: usize) -> Result<()> {
    if a == 0 {
        return Err(Error::InvalidInstance("instance has no states".into()));
    }
    if a != b || a != c {
        return Err(Error::InvalidInstance(format!(
            "mismatched field lengths: {a} priors, {b} values, {c} utilities"
        )));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    states: Vec<StateJson>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    log_lambda: Option<f64>,
    v: f64,
    u: f64,
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: InstanceJson = serde_json::from_str(text)?;
        let v: Vec<f64> = raw.states.iter().map(|s| s.v).collect();
        let u: Vec<f64> = raw.states.iter().map(|s| s.u).collect();
        let all_log = raw.states.iter().all(|s| s.log_lambda.is_some());
        let all_lin = raw.states.iter().all(|s| s.lambda.is_some());
        if all_log && !raw.states.iter().any(|s| s.lambda.is_some()) {
            let w: Vec<f64> = raw.states.iter().map(|s| s.log_lambda.unwrap()).collect();
            Instance::from_log_weights(&w, &v, &u)
        } else if all_lin && !raw.states.iter().any(|s| s.log_lambda.is_some()) {
            let l: Vec<f64> = raw.states.iter().map(|s| s.lambda.unwrap()).collect();
            Instance::new(&l, &v, &u)
        } else {
            Err(Error::InvalidInstance(
                "every state needs exactly one of 'lambda' or 'log_lambda', used consistently".into(),
            ))
        }
    }

    pub fn to_json(&self) -> String {
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| match &self.log_weights {
                Some(w) => StateJson { lambda: None, log_lambda: Some(w[i]), v: s.v, u: s.u },
                None => StateJson { lambda: Some(s.lambda), log_lambda: None, v: s.v, u: s.u },
            })
            .collect();
        serde_json::to_string(&InstanceJson { states }).expect("instance serializes")
    }
}
