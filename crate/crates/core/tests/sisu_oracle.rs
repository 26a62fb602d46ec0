mod common;

use quantal_persuasion::model::RationalityLevel;
use quantal_persuasion::oracle::{default_grid, grid_lp_optimal, DEFAULT_GRID_POINTS};
use quantal_persuasion::sisu::quantal_optimal;

#[test]
fn quantal_optimum_matches_grid_lp() {
    let mut rng = common::rng(11);
    for k in 0..12 {
        let m = 2 + k % 4;
        let inst = common::random_sisu(&mut rng, m);
        for &beta in &[0.5, 1.0, 2.0, 5.0] {
            let level = RationalityLevel::Finite(beta);
            let sol = quantal_optimal(&inst, level).unwrap();
            let grid = default_grid(&inst, level, DEFAULT_GRID_POINTS, &[sol.params.pooling_signal]);
            let lp = grid_lp_optimal(&inst, level, &grid).unwrap();
            let gap = (sol.payoff() - lp.value).abs();
            assert!(gap < 1e-8, "instance {k} beta {beta}: solver {} lp {} gap {gap}", sol.payoff(), lp.value);
        }
    }
}
