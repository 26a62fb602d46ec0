//! Robustness to an unknown rationality level: the worst-case ratio of a
//! scheme, constructions with bounded ratio, and instances where none exist.

pub mod binary;
pub mod factor;
pub mod instances;
pub mod ratio;

pub use binary::{
    binary_robust_scheme, min_robust_beta, robust_certified_bound, robust_mixture_weight, BinaryRobust,
    BinaryRobustSummary,
};
pub use factor::{factor_grid, factor_revealing_bound, FactorRevealing, FloorKind};
pub use instances::{direct_fragile_instance, impossibility_instance, robust_gap_instance};
pub use ratio::{optimal_log_payoff, robust_ratio, OptSolver, RobustReport, RobustRow};

use crate::error::{Error, Result};
use crate::model::{Instance, Scheme};
use crate::sisu::rational_optimal;

/// The optimal censorship scheme for a fully rational receiver. For
/// state-independent utility it is within a factor 2 of optimal at every
/// rationality level.
pub fn sisu_robust_scheme(instance: &Instance) -> Result<Scheme> {
    if !instance.is_state_independent() {
        return Err(Error::NotStateIndependent("the factor-2 guarantee needs equal sender utilities".into()));
    }
    Ok(rational_optimal(instance)?.censorship)
}
