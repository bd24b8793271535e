//! Shared fixtures and dense reference computations.
#![allow(dead_code)]

use linkveil::rng::derived_rng;
use linkveil::Graph;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

/// Connected graph on `n` vertices: a random spanning tree plus `extra`
/// random chords.
pub fn random_connected(n: usize, extra: usize, seed: u64) -> Graph {
    let mut rng = derived_rng(seed, 0);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        edges.push((a, b));
    }
    Graph::from_edges(n, edges)
}

pub fn dense_transition(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let mut p = DMatrix::zeros(n, n);
    for i in 0..n {
        let d = g.degree(i);
        if d == 0 {
            p[(i, i)] = 1.0;
        }
        for &j in g.neighbors(i) {
            p[(i, j as usize)] = 1.0 / d as f64;
        }
    }
    p
}

pub fn dense_power(p: &DMatrix<f64>, l: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(p.nrows(), p.ncols());
    for _ in 0..l {
        out = &out * p;
    }
    out
}

/// SLEM from a dense eigensolve of `D^-1/2 A D^-1/2`.
pub fn dense_slem(g: &Graph) -> f64 {
    let n = g.n();
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for &j in g.neighbors(i) {
            let j = j as usize;
            s[(i, j)] = 1.0 / ((g.degree(i) * g.degree(j)) as f64).sqrt();
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev[1].abs().max(ev[n - 1].abs())
}

/// `sup_i |p_i - q_i|` over a dense row.
pub fn row_gap(a: &[f64], b: &DMatrix<f64>, row: usize) -> f64 {
    a.iter().enumerate().map(|(j, x)| (x - b[(row, j)]).abs()).fold(0.0, f64::max)
}

/// Small-scale argument lists, one per CSV-producing subcommand.
pub fn small_runs(graph: &Path) -> Vec<(&'static str, Vec<String>)> {
    let g = graph.to_str().unwrap().to_string();
    let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    vec![
        ("fig3_utility_js.csv", v(&["utility", "--in", &g, "--t", "2,5", "--l", "5,10"])),
        ("fig5_mixing.csv", v(&["mixing", "--in", &g, "--trials", "2", "--eps", "0.05"])),
        ("fig6_slem.csv", v(&["slem", "--in", &g, "--trials", "2"])),
        ("wc_prior_fig.csv", v(&["bayes-worstcase", "--in", &g, "--links", "3", "--t", "2"])),
        ("fig12_bayes.csv", v(&["bayes-feature", "--in", &g, "--trials", "2", "--t", "2", "--nonlink-pairs", "500"])),
        ("fig13_si.csv", v(&["si", "--in", &g, "--links", "20"])),
        ("fig14_se.csv", v(&["se", "--in", &g, "--links", "3", "--cap", "40", "--t", "3"])),
        (
            "fig7_sybillimit.csv",
            v(&["sybillimit", "--in", &g, "--w-max", "5", "--trials", "2", "--growth-trials", "2", "--verifiers", "10", "--sybil-n", "10"]),
        ),
        ("table1_sprout.csv", v(&["sprout", "--in", &g, "--lookups", "100", "--trials", "2"])),
        ("theorems.csv", v(&["verify-theorems", "--in", &g, "--trials", "4"])),
    ]
}

