//! Exact and sampled random walks: transition rows, l-hop distributions,
//! the stationary distribution, and mixing time.
//!
//! Exact distributions are computed by repeated sparse row-vector steps
//! `x <- x P` from an indicator, so nothing of size `n^2` is ever
//! materialized unless a caller asks for it.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distance::DistanceKind;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{derived_rng, sample_indices, SimRng};

/// Vertex count at or below which [`VertexSample::auto`] evaluates every
/// vertex exactly.
pub const EXACT_VERTEX_LIMIT: usize = 5000;

/// Probability vector over the vertices of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkDistribution(Vec<f64>);

impl WalkDistribution {
    pub fn indicator(n: usize, v: usize) -> WalkDistribution {
        let mut p = vec![0.0; n];
        p[v] = 1.0;
        WalkDistribution(p)
    }

    pub fn from_vec(probs: Vec<f64>) -> WalkDistribution {
        WalkDistribution(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }
}

impl std::ops::Index<usize> for WalkDistribution {
    type Output = f64;

    fn index(&self, v: usize) -> &f64 {
        &self.0[v]
    }
}

/// Sparse view of the transition matrix `P = D^{-1} A`. An isolated vertex
/// keeps its mass, so every row sums to one.
#[derive(Debug, Clone)]
pub struct Transition<'g> {
    graph: &'g Graph,
    inv_deg: Vec<f64>,
}

impl<'g> Transition<'g> {
    pub fn new(graph: &'g Graph) -> Transition<'g> {
        let inv_deg = (0..graph.n())
            .map(|v| match graph.degree(v) {
                0 => 0.0,
                d => 1.0 / d as f64,
            })
            .collect();
        Transition { graph, inv_deg }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// `out = x P`.
    pub fn step_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|y| *y = 0.0);
        for (i, &w) in x.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            if self.inv_deg[i] == 0.0 {
                out[i] += w;
                continue;
            }
            let share = w * self.inv_deg[i];
            for &j in self.graph.neighbors(i) {
                out[j as usize] += share;
            }
        }
    }

    pub fn step(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.step_into(x, &mut out);
        out
    }

    /// `x P^steps`, in place.
    pub fn advance(&self, x: &mut Vec<f64>, steps: usize) {
        let mut buf = vec![0.0; x.len()];
        for _ in 0..steps {
            self.step_into(x, &mut buf);
            std::mem::swap(x, &mut buf);
        }
    }

    /// Row `v` of `P^l`.
    pub fn row_power(&self, v: usize, l: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.graph.n()];
        x[v] = 1.0;
        self.advance(&mut x, l);
        x
    }

    /// Rows `v` of `P^0 ..= P^max_l`.
    pub fn row_powers(&self, v: usize, max_l: usize) -> Vec<Vec<f64>> {
        let mut rows = Vec::with_capacity(max_l + 1);
        let mut x = vec![0.0; self.graph.n()];
        x[v] = 1.0;
        rows.push(x.clone());
        for _ in 0..max_l {
            x = self.step(&x);
            rows.push(x.clone());
        }
        rows
    }
}

fn check_vertex(g: &Graph, v: usize) -> Result<()> {
    if v >= g.n() {
        return Err(Error::VertexOutOfRange(v));
    }
    Ok(())
}

/// Row `v` of the one-step transition matrix.
pub fn transition_row(g: &Graph, v: usize) -> Result<WalkDistribution> {
    check_vertex(g, v)?;
    let d = g.degree(v);
    if d == 0 {
        return Err(Error::IsolatedVertex(v));
    }
    let mut p = vec![0.0; g.n()];
    for &j in g.neighbors(v) {
        p[j as usize] = 1.0 / d as f64;
    }
    Ok(WalkDistribution(p))
}

/// Distribution of an `l`-hop walk from `v` (row `v` of `P^l`).
pub fn walk_distribution(g: &Graph, v: usize, l: usize) -> Result<WalkDistribution> {
    check_vertex(g, v)?;
    if l > 0 && g.degree(v) == 0 {
        return Err(Error::IsolatedVertex(v));
    }
    Ok(WalkDistribution(Transition::new(g).row_power(v, l)))
}

/// `pi_i = deg(i) / 2m`.
pub fn stationary_distribution(g: &Graph) -> Result<WalkDistribution> {
    g.require_connected()?;
    Ok(WalkDistribution(stationary_unchecked(g)))
}

pub(crate) fn stationary_unchecked(g: &Graph) -> Vec<f64> {
    let two_m = 2.0 * g.m() as f64;
    (0..g.n()).map(|v| g.degree(v) as f64 / two_m).collect()
}

/// Terminal vertex of a uniform random walk of `len` hops from `v`.
pub fn sample_walk(g: &Graph, v: usize, len: usize, rng: &mut SimRng) -> Result<usize> {
    check_vertex(g, v)?;
    let mut x = v;
    for _ in 0..len {
        let nbrs = g.neighbors(x);
        if nbrs.is_empty() {
            return Err(Error::IsolatedVertex(x));
        }
        x = nbrs[rng.gen_range(0..nbrs.len())] as usize;
    }
    Ok(x)
}

/// Which start vertices enter an outer maximum or mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexSample {
    All,
    Sample { k: usize, seed: u64 },
}

impl VertexSample {
    /// Every vertex up to [`EXACT_VERTEX_LIMIT`], a seeded `k`-sample above.
    pub fn auto(n: usize, k: usize, seed: u64) -> VertexSample {
        if n <= EXACT_VERTEX_LIMIT {
            VertexSample::All
        } else {
            VertexSample::Sample { k, seed }
        }
    }

    /// Resolved vertex list and whether it is a strict subset.
    pub fn resolve(&self, n: usize) -> (Vec<usize>, bool) {
        match *self {
            VertexSample::All => ((0..n).collect(), false),
            VertexSample::Sample { k, seed } => {
                if k >= n {
                    ((0..n).collect(), false)
                } else {
                    let mut rng = derived_rng(seed, 0x5a4d_504c);
                    let mut picked = sample_indices(n, k, &mut rng);
                    picked.sort_unstable();
                    (picked, true)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingEstimate {
    pub epsilon: f64,
    pub kind: DistanceKind,
    /// Smallest step whose max-over-vertices distance is below `epsilon`.
    pub tau: Option<usize>,
    /// `max_v min{t : d(P_v^t, pi) < epsilon}`; differs from `tau` only when
    /// some per-vertex curve recrosses the threshold.
    pub tau_per_vertex: Option<usize>,
    /// Max-over-vertices distance to `pi` at steps `0..curve.len()`.
    pub curve: Vec<f64>,
    pub sampled: bool,
    pub vertices_evaluated: usize,
    /// Set when no step up to the cap reached the threshold.
    pub cap_exceeded: bool,
}

impl MixingEstimate {
    pub fn tau_or_err(&self) -> Result<usize> {
        self.tau.ok_or_else(|| {
            Error::Guard(format!(
                "mixing did not reach epsilon {} within {} steps",
                self.epsilon,
                self.curve.len().saturating_sub(1)
            ))
        })
    }
}

const BLOCK: usize = 64;

/// Per-step max distance over `starts` for steps `0..=horizon`, plus each
/// start's first step under `epsilon` (if any).
fn curve_over(
    g: &Graph,
    starts: &[usize],
    horizon: usize,
    kind: DistanceKind,
    epsilon: f64,
) -> (Vec<f64>, Vec<Option<usize>>) {
    let pi = stationary_unchecked(g);
    let op = Transition::new(g);
    let n = g.n();
    let parts: Vec<(Vec<f64>, Vec<Option<usize>>)> = starts
        .par_chunks(BLOCK)
        .map(|chunk| {
            let mut curve = vec![0.0f64; horizon + 1];
            let mut first = vec![None; chunk.len()];
            let mut buf = vec![0.0; n];
            for (slot, &v) in chunk.iter().enumerate() {
                let mut x = vec![0.0; n];
                x[v] = 1.0;
                for (t, c) in curve.iter_mut().enumerate() {
                    if t > 0 {
                        op.step_into(&x, &mut buf);
                        std::mem::swap(&mut x, &mut buf);
                    }
                    let d = kind.eval(&x, &pi);
                    if d > *c {
                        *c = d;
                    }
                    if first[slot].is_none() && d < epsilon {
                        first[slot] = Some(t);
                    }
                }
            }
            (curve, first)
        })
        .collect();
    let mut curve = vec![0.0f64; horizon + 1];
    let mut first = Vec::with_capacity(starts.len());
    for (c, f) in parts {
        for (acc, x) in curve.iter_mut().zip(c) {
            *acc = acc.max(x);
        }
        first.extend(f);
    }
    (curve, first)
}

/// Mixing time under `kind` (the sup-form variation distance by default in
/// callers). The horizon doubles until the curve drops below `epsilon` or
/// `step_cap` is reached.
pub fn mixing_time_with(
    g: &Graph,
    epsilon: f64,
    sample: VertexSample,
    kind: DistanceKind,
    step_cap: usize,
) -> Result<MixingEstimate> {
    g.require_connected()?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let (starts, sampled) = sample.resolve(g.n());
    let mut horizon = 16.min(step_cap).max(1);
    loop {
        let (curve, first) = curve_over(g, &starts, horizon, kind, epsilon);
        if let Some(tau) = curve.iter().position(|&d| d < epsilon) {
            let tau_per_vertex = first.iter().map(|f| f.unwrap_or(tau)).max();
            let mut curve = curve;
            curve.truncate(tau + 1);
            return Ok(MixingEstimate {
                epsilon,
                kind,
                tau: Some(tau),
                tau_per_vertex,
                curve,
                sampled,
                vertices_evaluated: starts.len(),
                cap_exceeded: false,
            });
        }
        if horizon >= step_cap {
            return Ok(MixingEstimate {
                epsilon,
                kind,
                tau: None,
                tau_per_vertex: None,
                curve,
                sampled,
                vertices_evaluated: starts.len(),
                cap_exceeded: true,
            });
        }
        horizon = (horizon * 2).min(step_cap);
    }
}

/// Mixing time with the sup-form variation distance and a `10 n` step cap.
pub fn mixing_time(g: &Graph, epsilon: f64, sample: VertexSample) -> Result<MixingEstimate> {
    mixing_time_with(g, epsilon, sample, DistanceKind::VariationSup, 10 * g.n().max(1))
}

/// Max-over-vertices distance to `pi` for steps `0..=steps`.
pub fn mixing_curve(g: &Graph, steps: usize, sample: VertexSample, kind: DistanceKind) -> Result<Vec<f64>> {
    g.require_connected()?;
    let (starts, _) = sample.resolve(g.n());
    Ok(curve_over(g, &starts, steps, kind, 0.0).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)])
    }

    fn star() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)])
    }

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)])
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn transition_rows() {
        assert_eq!(transition_row(&triangle(), 0).unwrap().probs(), &[0.0, 0.5, 0.5]);
        let third = 1.0 / 3.0;
        assert_eq!(transition_row(&star(), 0).unwrap().probs(), &[0.0, third, third, third]);
        assert_eq!(transition_row(&star(), 2).unwrap().probs(), &[1.0, 0.0, 0.0, 0.0]);
        let g = Graph::from_edges(3, [(0, 1)]);
        assert!(matches!(transition_row(&g, 2), Err(Error::IsolatedVertex(2))));
    }

    #[test]
    fn walk_distributions_match_hand_powers() {
        assert_eq!(walk_distribution(&star(), 1, 0).unwrap().probs(), &[0.0, 1.0, 0.0, 0.0]);
        assert!(close(walk_distribution(&path3(), 0, 2).unwrap().probs(), &[0.5, 0.0, 0.5], 1e-15));
        assert!(close(walk_distribution(&triangle(), 0, 2).unwrap().probs(), &[0.5, 0.25, 0.25], 1e-15));
    }

    #[test]
    fn stationary_examples() {
        assert!(close(stationary_distribution(&triangle()).unwrap().probs(), &[1.0 / 3.0; 3], 1e-15));
        let s = stationary_distribution(&star()).unwrap();
        assert!(close(s.probs(), &[0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0], 1e-15));
        assert!(close(stationary_distribution(&path3()).unwrap().probs(), &[0.25, 0.5, 0.25], 1e-15));
        let two = Graph::from_edges(4, [(0, 1), (2, 3)]);
        assert!(matches!(stationary_distribution(&two), Err(Error::Disconnected { components: 2 })));
    }

    #[test]
    fn sampled_walks() {
        let mut rng = rng_from_seed(11);
        assert_eq!(sample_walk(&triangle(), 2, 0, &mut rng).unwrap(), 2);
        for _ in 0..20 {
            assert_eq!(sample_walk(&star(), 3, 1, &mut rng).unwrap(), 0);
        }
        let trials = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..trials {
            counts[sample_walk(&triangle(), 0, 2, &mut rng).unwrap()] += 1;
        }
        let emp: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
        assert!(close(&emp, &[0.5, 0.25, 0.25], 0.01), "{emp:?}");
    }

    #[test]
    fn sampled_walk_is_deterministic() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]);
        let a: Vec<usize> =
            (0..50).scan(rng_from_seed(5), |r, _| Some(sample_walk(&g, 0, 7, r).unwrap())).collect();
        let b: Vec<usize> =
            (0..50).scan(rng_from_seed(5), |r, _| Some(sample_walk(&g, 0, 7, r).unwrap())).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn complete_graph_mixes_in_two_steps() {
        // one step leaves zero mass on the start vertex, 1/4 away from pi;
        // two steps give rows [1/3, 2/9, 2/9, 2/9], at most 1/12 away
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let est = mixing_time(&k4, 0.2, VertexSample::All).unwrap();
        assert_eq!(est.tau, Some(2));
        assert!((est.curve[0] - 0.75).abs() < 1e-15);
        assert!((est.curve[1] - 0.25).abs() < 1e-15);
        assert!((est.curve[2] - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(mixing_time(&k4, 0.3, VertexSample::All).unwrap().tau, Some(1));
    }

    #[test]
    fn mixing_rejects_disconnected_graphs() {
        let two = Graph::from_edges(4, [(0, 1), (2, 3)]);
        assert!(matches!(mixing_time(&two, 0.1, VertexSample::All), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn bipartite_graph_hits_step_cap() {
        let c4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        let est = mixing_time_with(&c4, 0.1, VertexSample::All, DistanceKind::VariationSup, 40).unwrap();
        assert!(est.cap_exceeded);
        assert!(est.tau.is_none());
        assert_eq!(est.curve.len(), 41);
    }

    #[test]
    fn sampled_mode_is_flagged() {
        let g = Graph::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6)).chain([(0, 2)]));
        let est = mixing_time(&g, 0.05, VertexSample::Sample { k: 3, seed: 1 }).unwrap();
        assert!(est.sampled);
        assert_eq!(est.vertices_evaluated, 3);
        let full = mixing_time(&g, 0.05, VertexSample::All).unwrap();
        assert!(!full.sampled);
        assert!(est.tau.unwrap() <= full.tau.unwrap());
    }
}
