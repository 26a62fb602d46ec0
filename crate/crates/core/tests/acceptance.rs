//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on
//! any failure. Run with `cargo test -p quantal-persuasion --test acceptance`.

mod common;

use std::time::Instant;

use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use quantal_persuasion::model::{
    evaluate_payoff, log_payoff, response, response_derivative, Instance, RationalityLevel,
};
use quantal_persuasion::numeric::{lin_space, log_space};
use quantal_persuasion::oracle::{
    default_grid, exhaustive_binary_search, grid_lp_optimal, gumbel_simulate, normalize_grid, DEFAULT_GRID_POINTS,
};
use quantal_persuasion::robust::{
    binary_robust_scheme, factor_grid, factor_revealing_bound, impossibility_instance, robust_certified_bound,
    robust_gap_instance, robust_ratio, sisu_robust_scheme, FloorKind,
};
use quantal_persuasion::sdsu::{
    best_censorship, binary_optimal, censorship_m_approx, direct_m_approx, four_approx, lowerbound_instance,
    witness_scheme, BinaryRegime,
};
use quantal_persuasion::sisu::{
    best_direct, direct_lowerbound_instance, normalize_instance, quantal_optimal, threshold_monotonicity_check,
    RESIDUAL_TOL,
};
use rand::Rng;

// Tolerances and frozen thresholds.
const CURVE_CASES: u32 = 10_000;
const DERIVATIVE_REL_TOL: f64 = 1e-6;
const SISU_GAP_TOL: f64 = 1e-8;
const BINARY_SLACK: f64 = 1e-6;
const ROBUST_SISU_SLACK: f64 = 1e-9;
const GAP_INSTANCE_FLOOR: f64 = 1.8;
/// The gap instance sits on the floor up to rounding: full revelation earns
/// exactly `1 - eps/2` and pooling at zero earns one half.
const GAP_INSTANCE_SLACK: f64 = 1e-12;
const CROSS_LEVEL_CAP: f64 = 0.1;
/// Frozen value of `V_16(OPT(2)) / V_16(OPT(16))` on the two-state instance.
const CROSS_LEVEL_PIN: f64 = 0.013_646_234_624_751;
const CROSS_LEVEL_PIN_TOL: f64 = 1e-6;
/// Frozen lower bounds on witness / best censorship for m = 3, 4, 5.
const SEPARATION_FLOORS: [f64; 3] = [1.99, 2.99, 3.99];
const MONOTONE_TOL: f64 = 1e-9;

type Outcome = (bool, String);

fn fin(b: f64) -> RationalityLevel {
    RationalityLevel::Finite(b)
}

fn curve_suite() -> Outcome {
    let config = Config { cases: CURVE_CASES, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let mut worst_rel: f64 = 0.0;
    let result = runner.run(&(0.01f64..50.0, -30.0f64..30.0, -5.0f64..5.0), |(beta, x, other)| {
        let level = fin(beta);
        let delta = x / beta;
        let w = response(level, delta);
        if (w + response(level, -delta) - 1.0).abs() > 1e-15 {
            return Err(proptest::test_runner::TestCaseError::fail(format!("symmetry at {beta}, {delta}")));
        }
        let (lo, hi) = if delta < other { (delta, other) } else { (other, delta) };
        if response(level, lo) < response(level, hi) {
            return Err(proptest::test_runner::TestCaseError::fail(format!("monotonicity at {beta}, {lo}, {hi}")));
        }
        let d = |t: f64| response_derivative(level, t).unwrap();
        if x.abs() > 0.05 && x.abs() < 15.0 {
            let h = 1e-4 / beta;
            let curvature = d(delta + h) - d(delta - h);
            if curvature.signum() != delta.signum() {
                return Err(proptest::test_runner::TestCaseError::fail(format!("curvature sign at {beta}, {delta}")));
            }
        }
        // Difference on the small side of the curve, using W(d) = 1 - W(-d).
        let h = 1e-5 / beta;
        let a = delta.abs();
        let numeric = (response(level, a + h) - response(level, a - h)) / (2.0 * h);
        let rel = ((d(delta) - numeric) / d(delta)).abs();
        if rel > DERIVATIVE_REL_TOL {
            return Err(proptest::test_runner::TestCaseError::fail(format!("derivative at {beta}, {delta}: {rel}")));
        }
        Ok(())
    });
    // Worst relative error over a fixed sweep, for the report line.
    for k in 0..=600 {
        let x = -30.0 + 0.1 * k as f64;
        let a = x.abs();
        let h = 1e-5;
        let numeric = (response(fin(1.0), a + h) - response(fin(1.0), a - h)) / (2.0 * h);
        let exact = response_derivative(fin(1.0), x).unwrap();
        worst_rel = worst_rel.max(((exact - numeric) / exact).abs());
    }
    match result {
        Ok(()) => (true, format!("{CURVE_CASES} cases; worst derivative rel. error on sweep {worst_rel:.1e}")),
        Err(e) => (false, e.to_string()),
    }
}

fn sisu_exactness() -> Outcome {
    let mut rng = common::rng(101);
    let (mut worst_gap, mut worst_res): (f64, f64) = (0.0, 0.0);
    for k in 0..30 {
        let m = 2 + k % 4;
        let inst = common::random_sisu(&mut rng, m);
        for beta in [0.5, 1.0, 2.0, 5.0] {
            let level = fin(beta);
            let sol = match quantal_optimal(&inst, level) {
                Ok(s) => s,
                Err(e) => return (false, format!("instance {k}, beta {beta}: {e}")),
            };
            let grid = default_grid(&inst, level, DEFAULT_GRID_POINTS, &[sol.params.pooling_signal]);
            let lp = match grid_lp_optimal(&inst, level, &grid) {
                Ok(lp) => lp,
                Err(e) => return (false, format!("grid LP failed: {e}")),
            };
            worst_gap = worst_gap.max((sol.payoff() - lp.value).abs());
            worst_res = worst_res.max(sol.residuals.map_or(f64::INFINITY, |r| r.max()));
        }
    }
    (
        worst_gap <= SISU_GAP_TOL && worst_res <= RESIDUAL_TOL,
        format!("120 solves; max |solver - LP| {worst_gap:.1e}, max residual {worst_res:.1e}"),
    )
}

fn monotonicity() -> Outcome {
    let mut rng = common::rng(102);
    let levels: Vec<RationalityLevel> = log_space(0.1, 100.0, 20).into_iter().map(fin).collect();
    let mut violations = 0;
    for k in 0..50 {
        let m = 2 + k % 4;
        let inst = common::random_sisu(&mut rng, m);
        match threshold_monotonicity_check(&inst, &levels) {
            Ok(r) => violations += r.violations.len(),
            Err(e) => return (false, format!("instance {k}: {e}")),
        }
    }
    (violations == 0, format!("50 instances x 20 levels; {violations} violations"))
}

fn sisu_direct_separation() -> Outcome {
    let mut ratios = Vec::new();
    let mut ok = true;
    for m in 3..=6 {
        let (raw, level) = direct_lowerbound_instance(m).unwrap();
        let inst = normalize_instance(&raw).unwrap();
        let opt = match quantal_optimal(&inst, level) {
            Ok(s) => s.log_payoff,
            Err(e) => return (false, format!("m={m}: {e}")),
        };
        let direct = best_direct(&inst, level).unwrap().log_payoff;
        let ratio = (opt - direct).exp();
        let floor = m as f64 / (4.0 * std::f64::consts::E + 1.0);
        ok &= ratio > floor;
        ratios.push(format!("m={m}: {ratio:.3} > {floor:.3}"));
    }
    (ok, ratios.join(", "))
}

/// Regime predicted by the clamp, from a literal transcription of gamma.
fn clamp_regime(inst: &Instance, beta: f64) -> BinaryRegime {
    let (v1, v2) = (inst.v(0), inst.v(1));
    let gamma = |d: f64| {
        let w = |x: f64| 1.0 / (1.0 + (beta * x).exp());
        let dw = -beta * w(d) * (1.0 - w(d));
        let a = (v1 - d) / (v2 - d);
        a + (w(v2) - w(d)) / (v2 - d) / dw * (1.0 - a)
    };
    let r = if inst.u(1) == 0.0 { f64::INFINITY } else { inst.u(0) / inst.u(1) };
    if gamma(v1 + 1e-12 * (v2 - v1)) <= r {
        BinaryRegime::FullReveal
    } else if gamma(inst.prior_mean()) >= r {
        BinaryRegime::NoInfo
    } else {
        BinaryRegime::Partial
    }
}

fn binary_exactness() -> Outcome {
    let mut rng = common::rng(103);
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut mismatches = 0;
    let mut counts = [0; 3];
    for case in 0..50 {
        let l1 = rng.gen_range(0.1..0.9);
        let v = common::random_values(&mut rng, 2);
        let u1 = if case % 3 == 0 { 0.0 } else { rng.gen_range(0.0..2.0) };
        let inst = Instance::binary(l1, [v[0], v[1]], [u1, rng.gen_range(0.1..2.0)]).unwrap();
        let beta = rng.gen_range(0.3..6.0);
        let sol = binary_optimal(&inst, fin(beta)).unwrap();
        let grid = normalize_grid(lin_space(inst.v(0), inst.prior_mean(), 10_000));
        let (_, _, best) = exhaustive_binary_search(&inst, fin(beta), &grid).unwrap();
        worst = worst.max(best - sol.payoff);
        if clamp_regime(&inst, beta) != sol.regime {
            mismatches += 1;
        }
        counts[sol.regime as usize] += 1;
    }
    (
        worst <= BINARY_SLACK && mismatches == 0,
        format!(
            "50 instances (full/partial/none = {}/{}/{}); max(search - solver) {worst:.1e}; {mismatches} regime mismatches",
            counts[0], counts[1], counts[2]
        ),
    )
}

struct ApproxRun {
    m: usize,
    opt: f64,
    four: f64,
    four_signals: usize,
    censor: f64,
    direct: f64,
}

fn approx_suite() -> Result<Vec<ApproxRun>, String> {
    let mut rng = common::rng(104);
    let mut runs = Vec::new();
    for k in 0..30 {
        let m = 3 + k % 3;
        let inst = common::random_sdsu(&mut rng, m);
        let level = fin(rng.gen_range(0.5..5.0));
        let grid = default_grid(&inst, level, DEFAULT_GRID_POINTS, &[]);
        let opt = grid_lp_optimal(&inst, level, &grid).map_err(|e| e.to_string())?.value;
        let four = four_approx(&inst, level, &grid).map_err(|e| e.to_string())?;
        let censor = censorship_m_approx(&inst, level, &grid).map_err(|e| e.to_string())?;
        let direct = direct_m_approx(&inst, level, &grid).map_err(|e| e.to_string())?;
        runs.push(ApproxRun {
            m,
            opt,
            four: evaluate_payoff(&inst, level, &four.scheme).map_err(|e| e.to_string())?,
            four_signals: four.scheme.len(),
            censor: evaluate_payoff(&inst, level, &censor.scheme).map_err(|e| e.to_string())?,
            direct: evaluate_payoff(&inst, level, &direct.scheme).map_err(|e| e.to_string())?,
        });
    }
    Ok(runs)
}

fn four_approx_check(runs: &Result<Vec<ApproxRun>, String>) -> Outcome {
    let runs = match runs {
        Ok(r) => r,
        Err(e) => return (false, e.clone()),
    };
    let bad = runs.iter().filter(|r| r.four < r.opt / 4.0 || r.four_signals > 2 * r.m).count();
    let worst = runs.iter().map(|r| r.four / r.opt).fold(f64::INFINITY, f64::min);
    (bad == 0, format!("30 instances; min payoff/LP {worst:.3}; {bad} violations"))
}

fn m_approx_check(runs: &Result<Vec<ApproxRun>, String>) -> Outcome {
    let runs = match runs {
        Ok(r) => r,
        Err(e) => return (false, e.clone()),
    };
    let bad = runs
        .iter()
        .filter(|r| r.censor < r.opt / (4.0 * r.m as f64) || r.direct < r.opt / (8.0 * r.m as f64))
        .count();
    let wc = runs.iter().map(|r| r.censor / r.opt * r.m as f64).fold(f64::INFINITY, f64::min);
    let wd = runs.iter().map(|r| r.direct / r.opt * r.m as f64).fold(f64::INFINITY, f64::min);
    (bad == 0, format!("min m*censor/LP {wc:.3} (need 1/4), min m*direct/LP {wd:.3} (need 1/8); {bad} violations"))
}

fn sdsu_separation() -> Outcome {
    let mut ratios = Vec::new();
    for m in 3..=5 {
        let (inst, level) = lowerbound_instance(m).unwrap();
        let witness = log_payoff(&inst, level, &witness_scheme(&inst, level).unwrap()).unwrap();
        let best = best_censorship(&inst, level).unwrap().log_payoff;
        ratios.push((witness - best).exp());
    }
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let above = ratios.iter().zip(SEPARATION_FLOORS).all(|(r, f)| *r >= f);
    (
        increasing && above,
        format!("witness/best censorship for m=3,4,5: {:.4}, {:.4}, {:.4}", ratios[0], ratios[1], ratios[2]),
    )
}

fn robust_sisu() -> Outcome {
    let mut rng = common::rng(105);
    let mut levels: Vec<RationalityLevel> = log_space(0.1, 100.0, 20).into_iter().map(fin).collect();
    levels.push(RationalityLevel::FullyRational);
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let inst = common::random_sisu(&mut rng, 2 + k % 4);
        let scheme = sisu_robust_scheme(&inst).unwrap();
        match robust_ratio(&inst, &scheme, &levels) {
            Ok(r) => worst = worst.max(r.gamma),
            Err(e) => return (false, format!("instance {k}: {e}")),
        }
    }
    let inst = robust_gap_instance(0.2).unwrap();
    let gap = robust_ratio(&inst, &sisu_robust_scheme(&inst).unwrap(), &[fin(1.0)]).unwrap().gamma;
    (
        worst <= 2.0 + ROBUST_SISU_SLACK && gap >= GAP_INSTANCE_FLOOR - GAP_INSTANCE_SLACK,
        format!("max Gamma over 50 instances {worst:.6}; gap instance (eps 0.2) Gamma at beta 1 = {gap:.12}"),
    )
}

fn robust_sdsu_impossibility() -> Outcome {
    let inst = impossibility_instance();
    let opt2 = binary_optimal(&inst, fin(2.0)).unwrap();
    let opt16 = binary_optimal(&inst, fin(16.0)).unwrap();
    let cross = (log_payoff(&inst, fin(16.0), &opt2.scheme).unwrap()
        - log_payoff(&inst, fin(16.0), &opt16.scheme).unwrap())
    .exp();
    let sets: [&[f64]; 3] = [&[1.0], &[1.0, 4.0], &[1.0, 4.0, 16.0]];
    let grid = factor_grid(&inst, sets[2], DEFAULT_GRID_POINTS);
    let bounds: Vec<f64> = sets
        .iter()
        .map(|l| factor_revealing_bound(&inst, l, &grid, FloorKind::ClosedForm).map_or(f64::NAN, |r| r.bound))
        .collect();
    let monotone = bounds.windows(2).all(|w| w[1] >= w[0] - MONOTONE_TOL);
    (
        cross <= CROSS_LEVEL_CAP && (cross - CROSS_LEVEL_PIN).abs() <= CROSS_LEVEL_PIN_TOL && monotone,
        format!(
            "V16(OPT(2))/V16(OPT(16)) = {cross:.6}; factor bounds {:.4} <= {:.4} <= {:.4}",
            bounds[0], bounds[1], bounds[2]
        ),
    )
}

fn binary_robust() -> Outcome {
    let inst = impossibility_instance();
    let rob = binary_robust_scheme(&inst, 1.0, 4.0).unwrap();
    let levels: Vec<RationalityLevel> = lin_space(1.0, 4.0, 30).into_iter().map(fin).collect();
    let gamma = robust_ratio(&inst, &rob.scheme, &levels).unwrap().gamma;
    let bound = robust_certified_bound(4.0);
    (gamma <= bound, format!("Gamma over 30 levels in [1, 4] = {gamma:.4} <= {bound:.2}"))
}

fn monte_carlo() -> Outcome {
    let inst = Instance::new(&[0.2; 5], &[-1.5, 0.5, 1.0, 1.5, 2.0], &[1.0; 5]).unwrap();
    let level = fin(1.0);
    let scheme = quantal_optimal(&inst, level).unwrap().scheme;
    let report = gumbel_simulate(&inst, level, &scheme, 1_000_000, 7).unwrap();
    let worst = report
        .signals
        .iter()
        .map(|s| (s.rate - s.expected).abs() / s.tolerance)
        .fold(0.0, f64::max);
    (
        report.all_within(),
        format!("{} signals, n = 10^6, seed 7; worst |rate - W| / 4 sigma = {worst:.3}", report.signals.len()),
    )
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("response curve", Box::new(curve_suite)),
        ("SISU exactness", Box::new(sisu_exactness)),
        ("threshold monotonicity", Box::new(monotonicity)),
        ("SISU direct separation", Box::new(sisu_direct_separation)),
        ("SDSU binary exactness", Box::new(binary_exactness)),
    ];
    let mut failed = 0;
    let mut report = |idx: usize, name: &str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let (ok, detail) = f();
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} {idx:>2} {name}: {detail} [{:.1}s]", start.elapsed().as_secs_f64());
        if !ok {
            failed += 1;
        }
    };
    for (k, (name, f)) in criteria.iter().enumerate() {
        report(k + 1, name, f.as_ref());
    }
    let runs = approx_suite();
    report(6, "four-approximation", &|| four_approx_check(&runs));
    report(7, "O(m) approximations", &|| m_approx_check(&runs));
    report(8, "SDSU censorship separation", &sdsu_separation);
    report(9, "robust SISU", &robust_sisu);
    report(10, "robust SDSU impossibility", &robust_sdsu_impossibility);
    report(11, "binary robust bound", &binary_robust);
    report(12, "Monte-Carlo validity", &monte_carlo);
    if failed > 0 {
        println!("{failed} of 12 criteria failed");
        std::process::exit(1);
    }
    println!("all 12 criteria passed");
}
