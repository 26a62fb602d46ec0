//! The logit quantal-response curve `W(x) = 1 / (1 + exp(beta * x))` and its
//! fully rational limit `W(x) = 1{x <= 0}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::softplus;

/// Slack on the fully rational step: `W(x) = 1` for `x <= RATIONAL_TIE_TOL`.
///
/// Fully rational optima put the pooled posterior exactly on the indifference
/// point `x = 0`; the slack keeps round-off in the pooled mean from flipping
/// the receiver's tie-broken action.
pub const RATIONAL_TIE_TOL: f64 = 1e-12;

/// Receiver rationality: a finite logit precision `beta >= 0`, or the fully
/// rational best-responder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "LevelRepr", try_from = "LevelRepr")]
pub enum RationalityLevel {
    Finite(f64),
    FullyRational,
}

impl RationalityLevel {
    pub fn finite(beta: f64) -> Result<Self> {
        if beta.is_nan() || beta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "rationality level must be >= 0, got {beta}"
            )));
        }
        if beta.is_infinite() {
            return Ok(RationalityLevel::FullyRational);
        }
        Ok(RationalityLevel::Finite(beta))
    }

    /// `beta` for finite levels.
    pub fn beta(&self) -> Option<f64> {
        match *self {
            RationalityLevel::Finite(b) => Some(b),
            RationalityLevel::FullyRational => None,
        }
    }

    /// `beta` as a float, `+inf` for the fully rational level.
    pub fn beta_or_inf(&self) -> f64 {
        self.beta().unwrap_or(f64::INFINITY)
    }

    pub fn is_fully_rational(&self) -> bool {
        matches!(self, RationalityLevel::FullyRational)
    }

    /// Returns `beta` when it is finite and strictly positive.
    pub fn positive_beta(&self, what: &str) -> Result<f64> {
        match *self {
            RationalityLevel::Finite(b) if b > 0.0 => Ok(b),
            RationalityLevel::Finite(_) => Err(Error::UnsupportedLevel(format!(
                "{what} needs beta > 0 (the curve is flat at beta = 0)"
            ))),
            RationalityLevel::FullyRational => Err(Error::UnsupportedLevel(format!(
                "{what} needs a finite beta"
            ))),
        }
    }
}

impl fmt::Display for RationalityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalityLevel::Finite(b) => write!(f, "{b}"),
            RationalityLevel::FullyRational => write!(f, "inf"),
        }
    }
}

impl FromStr for RationalityLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(RationalityLevel::FullyRational);
        }
        let beta: f64 = t
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad rationality level '{s}'")))?;
        RationalityLevel::finite(beta)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LevelRepr {
    Number(f64),
    Text(String),
}

impl From<RationalityLevel> for LevelRepr {
    fn from(level: RationalityLevel) -> Self {
        match level {
            RationalityLevel::Finite(b) => LevelRepr::Number(b),
            RationalityLevel::FullyRational => LevelRepr::Text("inf".into()),
        }
    }
}

impl TryFrom<LevelRepr> for RationalityLevel {
    type Error = Error;

    fn try_from(r: LevelRepr) -> Result<Self> {
        match r {
            LevelRepr::Number(b) => RationalityLevel::finite(b),
            LevelRepr::Text(s) => s.parse(),
        }
    }
}

/// Probability that the receiver takes action 1 at posterior-mean
/// difference `delta`.
pub fn response(level: RationalityLevel, delta: f64) -> f64 {
    match level {
        RationalityLevel::FullyRational => {
            if delta <= RATIONAL_TIE_TOL {
                1.0
            } else {
                0.0
            }
        }
        RationalityLevel::Finite(beta) => logistic_tail(beta * delta),
    }
}

/// `log W(delta)`; `-inf` where the fully rational receiver never acts.
pub fn log_response(level: RationalityLevel, delta: f64) -> f64 {
    match level {
        RationalityLevel::FullyRational => {
            if delta <= RATIONAL_TIE_TOL {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        }
        RationalityLevel::Finite(beta) => -softplus(beta * delta),
    }
}

/// `W'(delta) = -beta * exp(beta*delta) / (1 + exp(beta*delta))^2`.
pub fn response_derivative(level: RationalityLevel, delta: f64) -> Result<f64> {
    match level {
        RationalityLevel::FullyRational => Err(Error::UnsupportedLevel(
            "the fully rational response is a step; its derivative is undefined".into(),
        )),
        RationalityLevel::Finite(beta) => Ok(finite_derivative(beta, delta)),
    }
}

/// `1 / (1 + e^x)`, exponentiating only nonpositive arguments.
pub(crate) fn logistic_tail(x: f64) -> f64 {
    if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

pub(crate) fn finite_derivative(beta: f64, delta: f64) -> f64 {
    let x = beta * delta;
    let e = (-x.abs()).exp();
    -beta * e / ((1.0 + e) * (1.0 + e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(b: f64) -> RationalityLevel {
        RationalityLevel::finite(b).unwrap()
    }

    #[test]
    fn symmetry_point_and_flat_curve() {
        assert_eq!(response(fin(1.0), 0.0), 0.5);
        assert_eq!(response(fin(0.0), 37.2), 0.5);
    }

    #[test]
    fn fully_rational_step() {
        assert_eq!(response(RationalityLevel::FullyRational, 0.0), 1.0);
        assert_eq!(response(RationalityLevel::FullyRational, 0.1), 0.0);
        assert_eq!(response(RationalityLevel::FullyRational, -3.0), 1.0);
    }

    #[test]
    fn direct_evaluation() {
        let w = response(fin(1.0), 0.7);
        assert!((w - 1.0 / (1.0 + 0.7f64.exp())).abs() < 1e-15);
        assert!((w - 0.33181).abs() < 1e-5);
    }

    #[test]
    fn derivative_values() {
        assert!((response_derivative(fin(1.0), 0.0).unwrap() + 0.25).abs() < 1e-15);
        assert!((response_derivative(fin(2.0), 0.0).unwrap() + 0.5).abs() < 1e-15);
        let e3 = 3f64.exp();
        let expect = -e3 / ((1.0 + e3) * (1.0 + e3));
        let d = response_derivative(fin(1.0), 3.0).unwrap();
        assert!((d - expect).abs() < 1e-15);
        assert!((d + 0.045177).abs() < 1e-6);
        assert!(response_derivative(RationalityLevel::FullyRational, 0.0).is_err());
    }

    #[test]
    fn no_overflow_at_extremes() {
        for &x in &[1e6, -1e6] {
            let w = response(fin(1.0), x);
            assert!(w.is_finite() && (0.0..=1.0).contains(&w));
            let d = response_derivative(fin(1.0), x).unwrap();
            assert!(d.is_finite() && d <= 0.0);
            assert!(log_response(fin(1.0), x).is_finite());
        }
        assert!((log_response(fin(1.0), 1e6) + 1e6).abs() < 1e-6);
    }

    #[test]
    fn parse_levels() {
        assert_eq!("inf".parse::<RationalityLevel>().unwrap(), RationalityLevel::FullyRational);
        assert_eq!("2.5".parse::<RationalityLevel>().unwrap(), RationalityLevel::Finite(2.5));
        assert!("-1".parse::<RationalityLevel>().is_err());
        assert!("abc".parse::<RationalityLevel>().is_err());
    }
}
