//! Solvers for state-dependent sender utility: the two-state optimum,
//! pairwise structure of optimal schemes, and approximations built on it.

pub mod binary;
pub mod gap;
pub mod lowerbound;
pub mod pairwise;

pub use binary::{binary_gamma, binary_optimal, BinaryRegime, BinarySolution};
pub use gap::{
    build_gap_lp, censorship_m_approx, direct_m_approx, four_approx, solve_gap_fractional, solve_gap_integral,
    ApproxScheme, FourApprox, GapAssignment, PairEdge, PairLp, MAX_INTEGRAL_STATES,
};
pub use pairwise::{decompose_binary_support, optimal_pairwise, pairwise_reoptimize};
pub use lowerbound::{
    best_censorship, lowerbound_beta, lowerbound_instance, lowerbound_log_k1, lowerbound_log_unit, pair_pool_scheme,
    witness_scheme, CensorshipSearch, CENSORSHIP_GRID, MAX_CENSORSHIP_STATES,
};
