//! Second largest eigenvalue modulus of the walk, and the top adjacency
//! eigenvalue.
//!
//! `P = D^{-1} A` is similar to `S = D^{-1/2} A D^{-1/2}`, which is symmetric
//! and has the same spectrum. Its top eigenvector `sqrt(deg / 2m)` is known,
//! so we deflate it and run shifted power iteration on the remainder: on
//! `S + I` for `nu_2` and on `I - S` for `nu_n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::rng_from_seed;
use rand::Rng;

pub const SLEM_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITERATIONS: usize = 200_000;

#[derive(Debug, Clone, Serialize)]
pub struct SlemReport {
    /// `max(|nu_2|, |nu_n|)`.
    pub mu: f64,
    pub nu2: f64,
    pub nu_min: f64,
    /// The walk is periodic; `mu` is reported as 1.
    pub bipartite: bool,
    pub iterations: usize,
}

struct NormalizedAdjacency<'g> {
    graph: &'g Graph,
    inv_sqrt_deg: Vec<f64>,
    top: Vec<f64>,
}

impl<'g> NormalizedAdjacency<'g> {
    fn new(g: &'g Graph) -> Self {
        let two_m = 2.0 * g.m() as f64;
        let inv_sqrt_deg = g.degrees().iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
        let top = g.degrees().iter().map(|&d| (d as f64 / two_m).sqrt()).collect();
        NormalizedAdjacency { graph: g, inv_sqrt_deg, top }
    }

    /// `out = S x`.
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &j in self.graph.neighbors(i) {
                let j = j as usize;
                acc += x[j] * self.inv_sqrt_deg[j];
            }
            *o = acc * self.inv_sqrt_deg[i];
        }
    }

    fn deflate(&self, x: &mut [f64]) {
        let c: f64 = x.iter().zip(&self.top).map(|(a, b)| a * b).sum();
        x.iter_mut().zip(&self.top).for_each(|(a, b)| *a -= c * b);
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// Extreme eigenvalue of `S` on the complement of the top eigenvector.
/// `sign = 1` finds the largest, `sign = -1` the smallest.
fn deflated_extreme(
    op: &NormalizedAdjacency<'_>,
    sign: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<(f64, usize)> {
    let n = op.graph.n();
    let mut rng = rng_from_seed(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    op.deflate(&mut x);
    if normalize(&mut x) == 0.0 {
        return Ok((0.0, 0));
    }
    let mut sx = vec![0.0; n];
    let mut history: Vec<f64> = Vec::new();
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iter {
        op.apply(&x, &mut sx);
        let rho: f64 = x.iter().zip(&sx).map(|(a, b)| a * b).sum();
        residual = x.iter().zip(&sx).map(|(a, b)| (b - rho * a).powi(2)).sum::<f64>().sqrt();
        if residual < tol {
            return Ok((rho, iter));
        }
        history.push(rho);
        // near-degenerate pairs: the quotient settles long before the vector
        if iter > 2000 && (rho - history[iter - 1001]).abs() < 1e-14 {
            return Ok((rho, iter));
        }
        // y = (I + sign * S) x
        for (xi, si) in x.iter_mut().zip(&sx) {
            *xi += sign * si;
        }
        op.deflate(&mut x);
        if normalize(&mut x) == 0.0 {
            return Ok((rho, iter));
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual })
}

pub fn slem(g: &Graph) -> Result<SlemReport> {
    slem_with(g, SLEM_TOLERANCE, DEFAULT_MAX_ITERATIONS)
}

pub fn slem_with(g: &Graph, tol: f64, max_iter: usize) -> Result<SlemReport> {
    g.require_connected()?;
    if g.n() == 2 {
        // single edge: spectrum {1, -1}
        return Ok(SlemReport { mu: 1.0, nu2: -1.0, nu_min: -1.0, bipartite: true, iterations: 0 });
    }
    let op = NormalizedAdjacency::new(g);
    let (nu2, it2) = deflated_extreme(&op, 1.0, tol, max_iter, 0x51e3)?;
    let bipartite = g.is_bipartite();
    let (nu_min, it_min) = if bipartite {
        (-1.0, 0)
    } else {
        deflated_extreme(&op, -1.0, tol, max_iter, 0x51e4)?
    };
    let mu = if bipartite { 1.0 } else { nu2.abs().max(nu_min.abs()) };
    Ok(SlemReport { mu, nu2, nu_min, bipartite, iterations: it2 + it_min })
}

/// Largest adjacency eigenvalue of a connected graph (Perron root), by
/// power iteration on `A + I`.
pub fn adjacency_top_eigenvalue(g: &Graph) -> Result<f64> {
    g.require_connected()?;
    let n = g.n();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut ax = vec![0.0; n];
    let mut prev = f64::NAN;
    for iter in 1..=DEFAULT_MAX_ITERATIONS {
        for (i, o) in ax.iter_mut().enumerate() {
            *o = g.neighbors(i).iter().map(|&j| x[j as usize]).sum();
        }
        let rho: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        let residual = x.iter().zip(&ax).map(|(a, b)| (b - rho * a).powi(2)).sum::<f64>().sqrt();
        if residual < SLEM_TOLERANCE * rho.max(1.0) || (iter > 2000 && (rho - prev).abs() < 1e-14) {
            return Ok(rho);
        }
        prev = rho;
        for (xi, ai) in x.iter_mut().zip(&ax) {
            *xi += ai;
        }
        normalize(&mut x);
        if iter == DEFAULT_MAX_ITERATIONS {
            return Err(Error::NoConvergence { iterations: iter, residual });
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_slem_is_half() {
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]);
        let r = slem(&tri).unwrap();
        assert!((r.mu - 0.5).abs() < 1e-8, "{r:?}");
        assert!(!r.bipartite);
    }

    #[test]
    fn bipartite_reports_unit_modulus() {
        let k22 = Graph::from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)]);
        let r = slem(&k22).unwrap();
        assert!(r.bipartite);
        assert_eq!(r.mu, 1.0);
        assert_eq!(r.nu_min, -1.0);
    }

    #[test]
    fn disconnected_is_rejected() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]);
        assert!(matches!(slem(&g), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn perron_root_of_regular_graph_is_degree() {
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert!((adjacency_top_eigenvalue(&k4).unwrap() - 3.0).abs() < 1e-7);
        let star = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert!((adjacency_top_eigenvalue(&star).unwrap() - 2.0).abs() < 1e-7);
    }
}
