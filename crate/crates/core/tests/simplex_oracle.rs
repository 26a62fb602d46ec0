//! The simplex against vertex enumeration and optimality certificates.

mod common;

use nalgebra::{DMatrix, DVector};
use quantal_persuasion::oracle::{simplex_solve, LinearProgram};
use rand::Rng;

/// Random `max c x, A x <= b, x >= 0` with positive `b` and a positive row
/// bounding every variable, so it is feasible and bounded.
fn random_lp(rng: &mut impl Rng, rows: usize, cols: usize) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let mut a: Vec<Vec<f64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-1.0..2.0)).collect()).collect();
    a[0] = (0..cols).map(|_| rng.gen_range(0.1..1.0)).collect();
    let b = (0..rows).map(|_| rng.gen_range(0.5..3.0)).collect();
    let c = (0..cols).map(|_| rng.gen_range(-1.0..2.0)).collect();
    (a, b, c)
}

fn build(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LinearProgram {
    let mut lp = LinearProgram::new(c.to_vec());
    for (row, &rhs) in a.iter().zip(b) {
        lp.le_row(row.clone(), rhs);
    }
    lp
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Best objective over all vertices: every choice of `cols` tight
/// constraints among the rows and the sign bounds.
fn vertex_optimum(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> f64 {
    let (rows, cols) = (a.len(), c.len());
    let mut best = f64::NEG_INFINITY;
    for tight in combinations(rows + cols, cols) {
        let m = DMatrix::from_fn(cols, cols, |r, j| {
            let k = tight[r];
            if k < rows {
                a[k][j]
            } else if k - rows == j {
                1.0
            } else {
                0.0
            }
        });
        let rhs = DVector::from_fn(cols, |r, _| if tight[r] < rows { b[tight[r]] } else { 0.0 });
        let Some(x) = m.lu().solve(&rhs) else { continue };
        let feasible = x.iter().all(|&v| v >= -1e-9)
            && a.iter().zip(b).all(|(row, &rhs)| row.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() <= rhs + 1e-9);
        if feasible {
            best = best.max(c.iter().zip(x.iter()).map(|(p, q)| p * q).sum());
        }
    }
    best
}

#[test]
fn small_programs_match_vertex_enumeration() {
    let mut rng = common::rng(11);
    for _ in 0..40 {
        let (a, b, c) = random_lp(&mut rng, 4, 6);
        let sol = simplex_solve(&build(&a, &b, &c)).unwrap();
        let best = vertex_optimum(&a, &b, &c);
        assert!((sol.objective - best).abs() < 1e-9, "{} vs {best}", sol.objective);
    }
}

#[test]
fn twenty_by_forty_has_a_certificate() {
    // Too many vertices to enumerate; check primal feasibility, dual
    // feasibility and equal objectives instead.
    let mut rng = common::rng(12);
    for _ in 0..10 {
        let (a, b, c) = random_lp(&mut rng, 20, 40);
        let sol = simplex_solve(&build(&a, &b, &c)).unwrap();
        assert!(sol.x.iter().all(|&v| v >= -1e-12));
        for (row, &rhs) in a.iter().zip(&b) {
            let lhs: f64 = row.iter().zip(&sol.x).map(|(p, q)| p * q).sum();
            assert!(lhs <= rhs + 1e-9);
        }
        assert!(sol.duals.iter().all(|&y| y >= -1e-12));
        for j in 0..40 {
            let reduced: f64 = a.iter().zip(&sol.duals).map(|(row, y)| row[j] * y).sum::<f64>() - c[j];
            assert!(reduced >= -1e-9, "column {j}: {reduced}");
        }
        let primal: f64 = c.iter().zip(&sol.x).map(|(p, q)| p * q).sum();
        let dual: f64 = b.iter().zip(&sol.duals).map(|(p, q)| p * q).sum();
        assert!((primal - dual).abs() < 1e-9 && (primal - sol.objective).abs() < 1e-9);
    }
}
