//! Property tests for the response curve and scheme algebra.

use proptest::prelude::*;
use quantal_persuasion::model::{
    evaluate_payoff, full_reveal, log_payoff, make_censorship, mix, no_info, response, response_derivative,
    CensorshipParams, Instance, RationalityLevel, Scheme,
};

fn fin(b: f64) -> RationalityLevel {
    RationalityLevel::Finite(b)
}

/// Central difference of `W`, taken on the side where `W` is small so the
/// difference keeps its relative precision (`W(d) = 1 - W(-d)`).
fn numeric_derivative(beta: f64, delta: f64) -> f64 {
    let h = 1e-5 / beta;
    if delta >= 0.0 {
        (response(fin(beta), delta + h) - response(fin(beta), delta - h)) / (2.0 * h)
    } else {
        (response(fin(beta), -delta + h) - response(fin(beta), -delta - h)) / (2.0 * h)
    }
}

fn instance_strategy() -> impl Strategy<Value = Instance> {
    (2usize..=5)
        .prop_flat_map(|m| {
            (
                proptest::collection::vec(0.05f64..1.0, m),
                proptest::collection::vec(0.1f64..1.0, m),
                proptest::collection::vec(0.0f64..2.0, m),
                -3.0f64..0.0,
            )
        })
        .prop_map(|(raw, gaps, u, start)| {
            let total: f64 = raw.iter().sum();
            let mut lambda: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let head: f64 = lambda[..lambda.len() - 1].iter().sum();
            *lambda.last_mut().unwrap() = 1.0 - head;
            let v: Vec<f64> = gaps.iter().scan(start, |acc, g| {
                *acc += g;
                Some(*acc)
            }).collect();
            Instance::new(&lambda, &v, &u).unwrap()
        })
}

fn censorship_strategy(inst: &Instance) -> impl Strategy<Value = Scheme> {
    let inst = inst.clone();
    let m = inst.len();
    (0..m, 0.0f64..=1.0, proptest::collection::vec(any::<bool>(), m)).prop_map(move |(t, p, pick)| {
        let high: Vec<usize> = (0..m).filter(|&k| k != t && pick[k]).collect();
        let params = CensorshipParams::new(&inst, high, t, p).unwrap();
        make_censorship(&inst, &params).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn symmetric_about_zero(beta in 0.0f64..50.0, delta in -20.0f64..20.0) {
        let s = response(fin(beta), delta) + response(fin(beta), -delta);
        prop_assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decreasing(beta in 0.01f64..50.0, a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(response(fin(beta), lo) >= response(fin(beta), hi));
    }

    #[test]
    fn concave_then_convex(beta in 0.1f64..20.0, x in 0.05f64..15.0) {
        // W'' has the sign of delta: concave on the left, convex on the right.
        let delta = x / beta;
        let h = 1e-4 / beta;
        let d = |t: f64| response_derivative(fin(beta), t).unwrap();
        prop_assert!(d(delta + h) - d(delta - h) > 0.0);
        prop_assert!(d(-delta + h) - d(-delta - h) < 0.0);
    }

    #[test]
    fn derivative_matches_difference(beta in 0.01f64..50.0, x in -30.0f64..30.0) {
        let delta = x / beta;
        let exact = response_derivative(fin(beta), delta).unwrap();
        let approx = numeric_derivative(beta, delta);
        prop_assert!(((exact - approx) / exact).abs() <= 1e-6, "{} vs {}", exact, approx);
    }

    #[test]
    fn rational_limit_is_a_step(delta in -5.0f64..5.0) {
        prop_assume!(delta.abs() > 0.01);
        let w = response(fin(1e4), delta);
        let step = response(RationalityLevel::FullyRational, delta);
        prop_assert!((w - step).abs() < 1e-40f64.max((-1e4 * delta.abs()).exp() * 2.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn payoff_is_linear_in_mixtures(
        (inst, a, b) in instance_strategy().prop_flat_map(|i| {
            let sa = censorship_strategy(&i);
            let sb = censorship_strategy(&i);
            (Just(i), sa, sb)
        }),
        q in 0.0f64..=1.0,
        beta in 0.1f64..10.0,
    ) {
        let level = fin(beta);
        let mixed = mix(&[a.clone(), b.clone(), no_info(&inst)], &[q * 0.5, (1.0 - q) * 0.5, 0.5]).unwrap();
        let lhs = evaluate_payoff(&inst, level, &mixed).unwrap();
        let rhs = 0.5 * q * evaluate_payoff(&inst, level, &a).unwrap()
            + 0.5 * (1.0 - q) * evaluate_payoff(&inst, level, &b).unwrap()
            + 0.5 * evaluate_payoff(&inst, level, &no_info(&inst)).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_and_log_payoff(
        (inst, s) in instance_strategy().prop_flat_map(|i| { let s = censorship_strategy(&i); (Just(i), s) }),
        beta in 0.1f64..10.0,
    ) {
        let back = Scheme::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(&back, &s);
        let back = Instance::from_json(&inst.to_json()).unwrap();
        prop_assert_eq!(&back, &inst);
        let v = evaluate_payoff(&inst, fin(beta), &s).unwrap();
        if v > 0.0 {
            prop_assert!((log_payoff(&inst, fin(beta), &s).unwrap() - v.ln()).abs() < 1e-12);
        }
        let fr = full_reveal(&inst);
        prop_assert!(evaluate_payoff(&inst, fin(beta), &fr).is_ok());
    }
}
