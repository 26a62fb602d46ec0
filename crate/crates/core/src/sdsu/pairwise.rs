use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{validate_scheme, Instance, RationalityLevel, Scheme, Signal};
use crate::oracle::grid_lp_optimal;
use crate::sdsu::binary::binary_optimal;

/// Splits every signal into signals emitted by at most two states, each at
/// the parent's mean, so that per-state masses and the payoff are unchanged.
///
/// States below the mean are matched greedily with states above it, moving
/// equal amounts of "excess" `lambda_i pi_i |v_i - delta|` on both sides.
pub fn decompose_binary_support(instance: &Instance, scheme: &Scheme) -> Result<Scheme> {
    validate_scheme(instance, scheme).into_result()?;
    let mut out = Vec::new();
    for s in scheme.signals() {
        if s.support_size() <= 2 {
            out.push(s.clone());
            continue;
        }
        let parts: Vec<(usize, f64)> = s.mass.iter().map(|(&i, &p)| (i, p)).collect();
        let unit: Vec<(usize, f64)> = parts.iter().map(|&(i, _)| (i, 1.0)).collect();
        let w = instance.local_weights(&unit);
        let mut below = Vec::new();
        let mut above = Vec::new();
        let mut total = 0.0;
        for (&(i, p), &wi) in parts.iter().zip(&w) {
            let gap = instance.v(i) - s.delta;
            let excess = wi * p * gap.abs();
            total += excess;
            // (state, mass, per-unit-mass excess, excess left, mass used)
            let entry = (i, p, wi * gap.abs(), excess, 0.0);
            if wi == 0.0 || gap == 0.0 {
                out.push(Signal::new(s.delta, [(i, p)]));
            } else if gap < 0.0 {
                below.push(entry);
            } else {
                above.push(entry);
            }
        }
        let eps = 1e-14 * total;
        let (mut b, mut a) = (0, 0);
        while b < below.len() && a < above.len() {
            let t = below[b].3.min(above[a].3);
            let done_b = below[b].3 - t <= eps;
            let done_a = above[a].3 - t <= eps;
            let mb = if done_b { below[b].1 - below[b].4 } else { t / below[b].2 };
            let ma = if done_a { above[a].1 - above[a].4 } else { t / above[a].2 };
            out.push(Signal::new(s.delta, [(below[b].0, mb), (above[a].0, ma)]));
            below[b].3 -= t;
            below[b].4 += mb;
            above[a].3 -= t;
            above[a].4 += ma;
            if done_b {
                b += 1;
            }
            if done_a {
                a += 1;
            }
        }
        // Round-off leftovers carry negligible excess; emit them alone.
        for e in below[b..].iter().chain(&above[a..]) {
            let rest = e.1 - e.4;
            if rest > 0.0 {
                out.push(Signal::new(s.delta, [(e.0, rest)]));
            }
        }
    }
    Ok(Scheme::labeled(out))
}

/// Replaces the signals of every state pair by the optimal two-state scheme
/// on the masses that pair carries, keeping single-state signals.
pub fn pairwise_reoptimize(instance: &Instance, level: RationalityLevel, scheme: &Scheme) -> Result<Scheme> {
    if scheme.max_support() > 2 {
        return Err(Error::InvalidScheme(
            "pairwise re-optimization needs signals with at most two states".into(),
        ));
    }
    let mut out = Vec::new();
    let mut pairs: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
    for s in scheme.signals() {
        let support: Vec<usize> = s.support().collect();
        if support.len() == 1 {
            out.push(s.clone());
            continue;
        }
        let (i, j) = (support[0], support[1]);
        let e = pairs.entry((i, j)).or_insert((0.0, 0.0));
        e.0 += s.mass(i);
        e.1 += s.mass(j);
    }
    for (&(i, j), &(ti, tj)) in &pairs {
        let binary = instance.induced_pair(i, j, ti, tj)?;
        let sol = binary_optimal(&binary, level)?;
        for s in sol.scheme.signals() {
            out.push(Signal::new(s.delta, [(i, ti * s.mass(0)), (j, tj * s.mass(1))]));
        }
    }
    Ok(Scheme::labeled(out))
}

/// Optimal scheme in which every signal involves at most two states and
/// each pair shares at most one signal: the grid-LP optimum, decomposed and
/// re-optimized pair by pair.
pub fn optimal_pairwise(instance: &Instance, level: RationalityLevel, grid: &[f64]) -> Result<Scheme> {
    if instance.len() == 2 {
        return Ok(Scheme::labeled(binary_optimal(instance, level)?.scheme.signals().to_vec()));
    }
    let seed = grid_lp_optimal(instance, level, grid)?.scheme;
    let split = decompose_binary_support(instance, &seed)?;
    pairwise_reoptimize(instance, level, &split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{evaluate_payoff, full_reveal, no_info};

    fn three() -> Instance {
        Instance::new(&[0.3, 0.3, 0.4], &[-1.0, 0.5, 2.0], &[1.0, 0.2, 1.5]).unwrap()
    }

    #[test]
    fn binary_support_is_identity() {
        let inst = three();
        let s = full_reveal(&inst);
        assert_eq!(decompose_binary_support(&inst, &s).unwrap(), Scheme::labeled(s.signals().to_vec()));
    }

    #[test]
    fn splits_no_information() {
        let inst = three();
        let s = decompose_binary_support(&inst, &no_info(&inst)).unwrap();
        assert!(s.len() <= 2);
        assert!(s.max_support() <= 2);
        let mean = inst.prior_mean();
        assert!(s.signals().iter().all(|sig| sig.delta == mean));
        assert!(validate_scheme(&inst, &s).is_valid());
        for i in 0..3 {
            assert!((s.total_mass(i) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn figure_pool_split() {
        // Pool of states 1-3 at zero on the five-state figure instance:
        // state 1 is split 1/3 with state 2 and 2/3 with state 3.
        let inst = Instance::new(&[0.2; 5], &[-1.5, 0.5, 1.0, 1.5, 2.0], &[1.0; 5]).unwrap();
        let pooled = Scheme::new(vec![
            Signal::new(0.0, [(0, 1.0), (1, 1.0), (2, 1.0)]),
            Signal::new(1.5, [(3, 1.0)]),
            Signal::new(2.0, [(4, 1.0)]),
        ]);
        let s = decompose_binary_support(&inst, &pooled).unwrap();
        let with_2 = s.signals().iter().find(|g| g.mass(1) > 0.0).unwrap();
        assert!((with_2.mass(0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(with_2.mass(1), 1.0);
    }

    #[test]
    fn reoptimizing_never_hurts() {
        let inst = three();
        let level = RationalityLevel::Finite(1.5);
        let split = decompose_binary_support(&inst, &no_info(&inst)).unwrap();
        let before = evaluate_payoff(&inst, level, &split).unwrap();
        let after_scheme = pairwise_reoptimize(&inst, level, &split).unwrap();
        let after = evaluate_payoff(&inst, level, &after_scheme).unwrap();
        assert!(after >= before - 1e-12);
        let again = pairwise_reoptimize(&inst, level, &after_scheme).unwrap();
        assert!((evaluate_payoff(&inst, level, &again).unwrap() - after).abs() < 1e-10);
        assert!(pairwise_reoptimize(&inst, level, &no_info(&inst)).is_err());
    }
}
