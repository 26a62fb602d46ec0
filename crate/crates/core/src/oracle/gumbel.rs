use rand::distributions::Open01;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{response, Instance, RationalityLevel, Scheme};

#[derive(Debug, Clone, Serialize)]
pub struct SignalRate {
    pub delta: f64,
    pub rate: f64,
    pub expected: f64,
    /// Four binomial standard deviations around `expected`.
    pub tolerance: f64,
    pub within: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub beta: f64,
    pub n: usize,
    pub seed: u64,
    pub signals: Vec<SignalRate>,
}

impl SimulationReport {
    pub fn all_within(&self) -> bool {
        self.signals.iter().all(|s| s.within)
    }
}

/// Standard Gumbel draw by inversion.
pub fn gumbel<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    -(-u.ln()).ln()
}

/// Fraction of `n` receivers with Gumbel utility shocks that take action 1
/// at the given posterior-mean difference.
pub fn action_rate<R: Rng + ?Sized>(rng: &mut R, beta: f64, delta: f64, n: usize) -> f64 {
    let threshold = beta * delta;
    let hits = (0..n)
        .filter(|_| {
            let e0 = gumbel(rng);
            let e1 = gumbel(rng);
            e1 - e0 > threshold
        })
        .count();
    hits as f64 / n as f64
}

/// Simulates `n` shocked receivers for every signal of the scheme, using one
/// seeded stream in signal order.
pub fn gumbel_simulate(
    instance: &Instance,
    level: RationalityLevel,
    scheme: &Scheme,
    n: usize,
    seed: u64,
) -> Result<SimulationReport> {
    let beta = level
        .beta()
        .ok_or_else(|| Error::UnsupportedLevel("simulation needs a finite beta".into()))?;
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    crate::model::validate_scheme(instance, scheme).into_result()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signals = scheme
        .signals()
        .iter()
        .map(|s| {
            let rate = action_rate(&mut rng, beta, s.delta, n);
            let expected = response(level, s.delta);
            let tolerance = 4.0 * (expected * (1.0 - expected) / n as f64).sqrt();
            SignalRate {
                delta: s.delta,
                rate,
                expected,
                tolerance,
                within: (rate - expected).abs() <= tolerance,
            }
        })
        .collect();
    Ok(SimulationReport { beta, n, seed, signals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_curve_is_a_coin() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = action_rate(&mut rng, 0.0, 123.0, 100_000);
        assert!((r - 0.5).abs() < 0.01);
    }

    #[test]
    fn matches_logit_at_seed_7() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = action_rate(&mut rng, 1.0, 0.7, 1_000_000);
        assert!((r - 0.33181).abs() < 0.002, "{r}");
    }

    #[test]
    fn strong_preference() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(action_rate(&mut rng, 2.0, -10.0, 100_000) > 0.999);
    }

    #[test]
    fn rejects_bad_input() {
        let inst = Instance::binary(0.5, [1.0, 2.0], [0.0, 1.0]).unwrap();
        let s = crate::model::full_reveal(&inst);
        assert!(gumbel_simulate(&inst, RationalityLevel::FullyRational, &s, 10, 1).is_err());
        assert!(gumbel_simulate(&inst, RationalityLevel::Finite(1.0), &s, 0, 1).is_err());
        let a = gumbel_simulate(&inst, RationalityLevel::Finite(1.0), &s, 1000, 9).unwrap();
        let b = gumbel_simulate(&inst, RationalityLevel::Finite(1.0), &s, 1000, 9).unwrap();
        assert_eq!(a.signals[0].rate, b.signals[0].rate);
    }
}
