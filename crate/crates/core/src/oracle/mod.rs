//! Independent checks: a dense simplex, the signaling LP on a grid of
//! posterior means, brute-force binary censorship search, and a Monte-Carlo
//! receiver with Gumbel utility shocks.

pub mod grid;
pub mod gumbel;
pub mod simplex;

pub use grid::{
    binary_params_at, default_grid, exhaustive_binary_search, grid_lp_optimal, normalize_grid, GridLpSolution,
    DEFAULT_GRID_POINTS,
};
pub use gumbel::{gumbel_simulate, SignalRate, SimulationReport};
pub use simplex::{simplex_solve, LinearProgram, LpSolution, Row, RowKind};
