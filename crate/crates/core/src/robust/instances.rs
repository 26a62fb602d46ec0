//! Instances on which robustness fails or degrades.

use crate::error::{Error, Result};
use crate::model::Instance;

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon {eps} outside (0, 1)")));
    }
    Ok(())
}

/// Two states with prior mean exactly zero, so the rational optimum pools
/// everything at 0 while revealing earns nearly `1 - eps/2` at `beta = 1`.
pub fn robust_gap_instance(eps: f64) -> Result<Instance> {
    check_eps(eps)?;
    let l2 = eps / (4.0 - eps);
    let l1 = 1.0 - l2;
    let v1 = l2.ln();
    let v2 = -l1 * v1 / l2;
    Instance::new(&[l1, l2], &[v1, v2], &[1.0, 1.0])
}

/// Three states where the rational optimal direct scheme degrades without
/// bound as `eps` shrinks and `beta` grows.
pub fn direct_fragile_instance(eps: f64) -> Result<Instance> {
    check_eps(eps)?;
    let half = (1.0 - eps) / 2.0;
    Instance::new(&[eps, half, half], &[-0.01, 0.01, 3.0], &[1.0; 3])
}

/// Two states where only the upper one pays the sender.
pub fn impossibility_instance() -> Instance {
    Instance::new(&[0.5, 0.5], &[1.0, 2.0], &[0.0, 1.0]).expect("constant instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{evaluate_payoff, no_info, RationalityLevel};
    use crate::robust::{robust_ratio, sisu_robust_scheme};
    use crate::sisu::rational_optimal;

    #[test]
    fn gap_instance_pools_everything() {
        for &eps in &[0.05, 0.2, 0.5] {
            let inst = robust_gap_instance(eps).unwrap();
            assert!((inst.lambda(0) + inst.lambda(1) - 1.0).abs() < 1e-15);
            assert!(inst.prior_mean().abs() < 1e-12);
            let scheme = sisu_robust_scheme(&inst).unwrap();
            assert_eq!(scheme, no_info(&inst));
            let v = evaluate_payoff(&inst, RationalityLevel::Finite(1.0), &scheme).unwrap();
            assert!((v - 0.5).abs() < 1e-12);
            let report = robust_ratio(&inst, &scheme, &[RationalityLevel::Finite(1.0)]).unwrap();
            assert!(report.gamma >= 2.0 - eps, "eps {eps}: {}", report.gamma);
        }
    }

    #[test]
    fn fragile_direct_shape() {
        let eps = 0.01;
        let inst = direct_fragile_instance(eps).unwrap();
        let opt = rational_optimal(&inst).unwrap();
        let low = opt.direct.signals().iter().find(|s| s.delta.abs() < 1e-12).unwrap();
        assert!((low.mass(0) - 1.0).abs() < 1e-12);
        assert!((low.mass(1) - 2.0 * eps / (1.0 - eps)).abs() < 1e-12);
        let high = opt.direct.signals().iter().find(|s| s.delta > 0.5).unwrap();
        let expect = (0.01 * (1.0 - 3.0 * eps) / 2.0 + 3.0 * (1.0 - eps) / 2.0) / (1.0 - 2.0 * eps);
        assert!((high.delta - expect).abs() < 1e-12);
        assert!((high.mass(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fragile_direct_diverges() {
        // Ratios over 20 log-spaced levels in [0.1, 100] plus the rational
        // limit, frozen from the first run.
        let mut levels: Vec<RationalityLevel> =
            crate::numeric::log_space(0.1, 100.0, 20).into_iter().map(RationalityLevel::Finite).collect();
        levels.push(RationalityLevel::FullyRational);
        let mut last = 1.0;
        for (eps, floor) in [(0.1, 2.5), (0.01, 20.0), (0.001, 200.0), (1e-4, 2000.0)] {
            let inst = direct_fragile_instance(eps).unwrap();
            let direct = rational_optimal(&inst).unwrap().direct;
            let gamma = robust_ratio(&inst, &direct, &levels).unwrap().gamma;
            assert!(gamma > floor && gamma > last, "eps {eps}: {gamma}");
            last = gamma;
        }
    }

    #[test]
    fn impossibility_fields() {
        let inst = impossibility_instance();
        assert_eq!(inst.values(), vec![1.0, 2.0]);
        assert_eq!((inst.u(0), inst.u(1)), (0.0, 1.0));
        assert!(robust_gap_instance(0.0).is_err());
        assert!(direct_fragile_instance(1.0).is_err());
    }
}
