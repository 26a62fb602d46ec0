use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::instance::Instance;
use crate::model::response::{log_response, response, RationalityLevel};
use crate::numeric::log_sum_exp;

/// Signals whose `delta` agree within this relative tolerance are merged.
pub const MERGE_TOL: f64 = 1e-12;
/// Tolerance on each state's total emission mass.
pub const MASS_TOL: f64 = 1e-12;
/// Tolerance on the per-signal Bayes residual, relative to the signal's scale.
pub const BAYES_TOL: f64 = 1e-9;

/// A signal identified by the posterior-mean utility difference it induces.
/// `mass[i]` is the probability that state `i` (0-based) emits it.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub delta: f64,
    pub mass: BTreeMap<usize, f64>,
}

impl Signal {
    /// Builds a signal, dropping zero masses.
    pub fn new<I: IntoIterator<Item = (usize, f64)>>(delta: f64, mass: I) -> Self {
        let mut map = BTreeMap::new();
        for (i, p) in mass {
            if p != 0.0 {
                *map.entry(i).or_insert(0.0) += p;
            }
        }
        Signal { delta, mass: map }
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.mass.get(&i).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.mass.keys().copied()
    }

    pub fn support_size(&self) -> usize {
        self.mass.len()
    }

    fn same_support(&self, other: &Signal) -> bool {
        self.mass.keys().eq(other.mass.keys())
    }

    fn absorb(&mut self, other: &Signal) {
        for (&i, &p) in &other.mass {
            *self.mass.entry(i).or_insert(0.0) += p;
        }
    }
}

fn same_delta(a: f64, b: f64) -> bool {
    (a - b).abs() <= MERGE_TOL * a.abs().max(b.abs()).max(1.0)
}

/// A finite signaling scheme, with signals sorted by `delta`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scheme {
    signals: Vec<Signal>,
}

impl Scheme {
    /// Builds a scheme, merging signals with equal `delta` and dropping
    /// empty ones.
    pub fn new(signals: Vec<Signal>) -> Self {
        Self::merged(signals, false)
    }

    /// Like [`Scheme::new`], but keeps equal-`delta` signals apart unless
    /// their supports coincide. Used where the pairing structure of a scheme
    /// matters (binary-support decompositions, per-pair schemes).
    pub fn labeled(signals: Vec<Signal>) -> Self {
        Self::merged(signals, true)
    }

    fn merged(mut signals: Vec<Signal>, by_support: bool) -> Self {
        signals.retain(|s| !s.mass.is_empty());
        signals.sort_by(|a, b| a.delta.total_cmp(&b.delta));
        let mut out: Vec<Signal> = Vec::with_capacity(signals.len());
        for s in signals {
            let target = out
                .iter_mut()
                .rev()
                .take_while(|t| same_delta(t.delta, s.delta))
                .find(|t| !by_support || t.same_support(&s));
            match target {
                Some(t) => t.absorb(&s),
                None => out.push(s),
            }
        }
        Scheme { signals: out }
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    /// Total emission mass of state `i`.
    pub fn total_mass(&self, i: usize) -> f64 {
        self.signals.iter().map(|s| s.mass(i)).sum()
    }

    /// Number of signals emitted by two or more states.
    pub fn pooled_signal_count(&self) -> usize {
        self.signals.iter().filter(|s| s.support_size() >= 2).count()
    }

    pub fn max_support(&self) -> usize {
        self.signals.iter().map(Signal::support_size).max().unwrap_or(0)
    }
}

/// Outcome of [`validate_scheme`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// `sum_i lambda_i (v_i - delta) pi_i(delta)` per signal. For log-form
    /// instances the weights of each signal are divided by their largest.
    pub bayes_residuals: Vec<f64>,
    /// `sum_delta pi_i(delta)` per state.
    pub mass_totals: Vec<f64>,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidScheme(self.violations.join("; ")))
        }
    }
}

/// Checks per-state mass totals and per-signal Bayes plausibility.
pub fn validate_scheme(instance: &Instance, scheme: &Scheme) -> ValidationReport {
    let m = instance.len();
    let mut violations = Vec::new();
    let mut mass_totals = vec![0.0; m];
    let mut bayes_residuals = Vec::with_capacity(scheme.len());
    if scheme.is_empty() {
        violations.push("scheme has no signals".to_string());
    }
    for (k, s) in scheme.signals().iter().enumerate() {
        if !s.delta.is_finite() {
            violations.push(format!("signal {} has non-finite delta", k + 1));
        }
        if s.mass.is_empty() {
            violations.push(format!("signal {} has empty support", k + 1));
        }
        let mut residual = 0.0;
        let mut scale = 0.0;
        let mut parts = Vec::with_capacity(s.mass.len());
        for (&i, &p) in &s.mass {
            if i >= m {
                violations.push(format!("signal {} references state {} of {m}", k + 1, i + 1));
                continue;
            }
            if !(-MASS_TOL..=1.0 + MASS_TOL).contains(&p) {
                violations.push(format!("signal {} has mass {p} for state {}", k + 1, i + 1));
            }
            mass_totals[i] += p;
            parts.push((i, p));
        }
        let weights: Vec<f64> = if instance.is_log_form() {
            instance.local_weights(&parts)
        } else {
            parts.iter().map(|&(i, p)| instance.lambda(i) * p).collect()
        };
        for (&(i, _), w) in parts.iter().zip(&weights) {
            let term = w * (instance.v(i) - s.delta);
            residual += term;
            scale += term.abs();
        }
        if !(residual.abs() <= BAYES_TOL * scale.max(1.0)) {
            violations.push(format!(
                "signal {} at delta {} violates Bayes plausibility by {residual:e}",
                k + 1,
                s.delta
            ));
        }
        bayes_residuals.push(residual);
    }
    for (i, &t) in mass_totals.iter().enumerate() {
        if !((t - 1.0).abs() <= MASS_TOL) {
            violations.push(format!("state {} emits total mass {t}", i + 1));
        }
    }
    ValidationReport { bayes_residuals, mass_totals, violations }
}

/// Sender payoff `sum_i lambda_i u_i sum_delta pi_i(delta) W(delta)`.
pub fn evaluate_payoff(instance: &Instance, level: RationalityLevel, scheme: &Scheme) -> Result<f64> {
    validate_scheme(instance, scheme).into_result()?;
    Ok(payoff_unchecked(instance, level, scheme))
}

/// [`evaluate_payoff`] without validation.
pub fn payoff_unchecked(instance: &Instance, level: RationalityLevel, scheme: &Scheme) -> f64 {
    scheme
        .signals()
        .iter()
        .map(|s| {
            let w = response(level, s.delta);
            s.mass
                .iter()
                .map(|(&i, &p)| instance.lambda(i) * instance.u(i) * p)
                .sum::<f64>()
                * w
        })
        .sum()
}

/// Natural log of the sender payoff, accumulated with log-sum-exp so that
/// exponentially skewed priors neither overflow nor underflow.
pub fn log_payoff(instance: &Instance, level: RationalityLevel, scheme: &Scheme) -> Result<f64> {
    validate_scheme(instance, scheme).into_result()?;
    Ok(log_payoff_unchecked(instance, level, scheme))
}

pub fn log_payoff_unchecked(instance: &Instance, level: RationalityLevel, scheme: &Scheme) -> f64 {
    let terms = scheme.signals().iter().flat_map(|s| {
        let lw = log_response(level, s.delta);
        s.mass.iter().filter(|(_, &p)| p > 0.0).map(move |(&i, &p)| {
            instance.log_lambda(i) + instance.u(i).ln() + p.ln() + lw
        })
    });
    log_sum_exp(terms)
}

#[derive(Serialize, Deserialize)]
struct SchemeJson {
    signals: Vec<SignalJson>,
}

#[derive(Serialize, Deserialize)]
struct SignalJson {
    delta: f64,
    mass: BTreeMap<String, f64>,
}

impl Scheme {
    /// Parses scheme JSON with 1-based state keys. Signals are kept as
    /// written apart from merging exact duplicates of `delta` and support.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SchemeJson = serde_json::from_str(text)?;
        let mut signals = Vec::with_capacity(raw.signals.len());
        for s in raw.signals {
            let mut mass = Vec::with_capacity(s.mass.len());
            for (k, p) in s.mass {
                let idx: usize = k
                    .trim()
                    .parse()
                    .ok()
                    .filter(|&i| i >= 1)
                    .ok_or_else(|| Error::InvalidScheme(format!("bad state key '{k}'")))?;
                mass.push((idx - 1, p));
            }
            signals.push(Signal::new(s.delta, mass));
        }
        Ok(Scheme::labeled(signals))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("scheme serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let signals = self
            .signals
            .iter()
            .map(|s| SignalJson {
                delta: s.delta,
                mass: s.mass.iter().map(|(&i, &p)| ((i + 1).to_string(), p)).collect(),
            })
            .collect();
        serde_json::to_value(SchemeJson { signals }).expect("scheme serializes")
    }
}
