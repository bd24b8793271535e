//! Sparse walk and spectral results against dense linear algebra.

mod support;

use linkveil::spectral::{adjacency_top_eigenvalue, slem};
use linkveil::walk::{stationary_distribution, walk_distribution, Transition};
use nalgebra::SymmetricEigen;
use support::*;

#[test]
fn walk_distributions_match_dense_powers() {
    for seed in 0..50u64 {
        let n = 5 + (seed as usize * 7) % 46;
        let g = random_connected(n, n / 2 + seed as usize % 9, seed);
        let p = dense_transition(&g);
        for l in [0, 1, 2, 3, 7, 12] {
            let pl = dense_power(&p, l);
            for v in 0..n {
                let w = walk_distribution(&g, v, l).unwrap();
                assert!(row_gap(w.probs(), &pl, v) < 1e-10, "seed {seed} l {l} v {v}");
            }
        }
    }
}

#[test]
fn slem_matches_dense_eigensolve() {
    for seed in 0..50u64 {
        let n = 5 + (seed as usize * 7) % 46;
        let g = random_connected(n, n / 2 + 1 + seed as usize % 9, seed ^ 0xabc);
        let r = slem(&g).unwrap();
        let want = if g.is_bipartite() { 1.0 } else { dense_slem(&g) };
        assert!((r.mu - want).abs() < 1e-6, "seed {seed}: {} vs {want}", r.mu);
    }
}

#[test]
fn perron_root_matches_dense_eigensolve() {
    for seed in 0..20u64 {
        let g = random_connected(30, 25, seed);
        let mut a = nalgebra::DMatrix::zeros(30, 30);
        for i in 0..30 {
            for &j in g.neighbors(i) {
                a[(i, j as usize)] = 1.0;
            }
        }
        let top = SymmetricEigen::new(a).eigenvalues.iter().copied().fold(f64::MIN, f64::max);
        assert!((adjacency_top_eigenvalue(&g).unwrap() - top).abs() < 1e-6);
    }
}

#[test]
fn stationary_law_is_a_fixed_point() {
    for seed in 0..20u64 {
        let g = random_connected(40, 30, seed);
        let pi = stationary_distribution(&g).unwrap();
        let next = Transition::new(&g).step(pi.probs());
        let gap = next.iter().zip(pi.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-12);
    }
}

#[test]
fn walks_are_time_reversible() {
    for seed in 0..20u64 {
        let g = random_connected(35, 20, seed);
        let op = Transition::new(&g);
        for t in [1, 3, 6] {
            let rows: Vec<Vec<f64>> = (0..35).map(|v| op.row_power(v, t)).collect();
            for i in 0..35 {
                for j in 0..35 {
                    let lhs = g.degree(i) as f64 * rows[i][j];
                    let rhs = g.degree(j) as f64 * rows[j][i];
                    assert!((lhs - rhs).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn chapman_kolmogorov() {
    for seed in 0..20u64 {
        let g = random_connected(25, 15, seed);
        let op = Transition::new(&g);
        for v in 0..25 {
            let whole = walk_distribution(&g, v, 7).unwrap();
            let mut part = walk_distribution(&g, v, 3).unwrap().into_vec();
            op.advance(&mut part, 4);
            let gap = whole.probs().iter().zip(&part).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(gap < 1e-12);
        }
    }
}
