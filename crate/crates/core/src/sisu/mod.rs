//! State-independent sender utility: the fully rational optimum, the exact
//! optimal censorship for a logit receiver, and the direct-scheme benchmark.

pub mod direct;
pub mod quantal;
pub mod rational;

pub use direct::{best_direct, direct_lowerbound_instance, DirectSearch};
pub use quantal::{
    is_normalized, kappa, normalize_instance, pool_probability, quantal_optimal, threshold_monotonicity_check,
    MonotonicityReport, QuantalSolution, SisuResiduals, TangentSolution, RESIDUAL_TOL,
};
pub use rational::{rational_optimal, ratio_order, utility_ratio, RationalOptimum};
