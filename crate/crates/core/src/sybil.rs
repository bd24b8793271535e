//! SybilLimit-style admission over a social graph with an attached Sybil
//! region.
//!
//! Every node keeps, per protocol instance, a random permutation of its
//! incident edges as a routing table: a route entering through edge `k`
//! leaves through `perm[k]`. Each node sends one route of length `w` per
//! instance; the last edge is its tail. A verifier accepts a suspect when
//! some suspect tail equals some verifier tail and the least-loaded such
//! verifier tail still has room under the balance cap.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gen::{ba_generate, GenSpec};
use crate::graph::Graph;
use crate::perturb::{transform, PerturbParams};
use crate::rng::{derive_seed, derived_rng, rng_from_seed, sample_indices};

#[derive(Debug, Clone)]
pub struct AttackGraph {
    pub graph: Graph,
    /// Vertices `0..honest_n` are honest, the rest Sybil.
    pub honest_n: usize,
    pub attack_edges: usize,
}

impl AttackGraph {
    pub fn is_sybil(&self, v: usize) -> bool {
        v >= self.honest_n
    }

    pub fn sybil_n(&self) -> usize {
        self.graph.n() - self.honest_n
    }

    /// Honest/Sybil cut size of `g` under this partition.
    pub fn cut_size(&self, g: &Graph) -> usize {
        g.links().iter().filter(|l| self.is_sybil(l.u()) != self.is_sybil(l.v())).count()
    }

    /// The attack graph with its edges replaced by `g`'s.
    pub fn with_graph(&self, g: Graph) -> AttackGraph {
        let attack_edges = self.cut_size(&g);
        AttackGraph { graph: g, honest_n: self.honest_n, attack_edges }
    }

    pub fn honest_only(g: Graph) -> AttackGraph {
        AttackGraph { honest_n: g.n(), graph: g, attack_edges: 0 }
    }
}

/// Topology of the Sybil region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SybilModel {
    PreferentialAttachment { attach: usize },
    Clique,
}

impl Default for SybilModel {
    fn default() -> Self {
        SybilModel::PreferentialAttachment { attach: 4 }
    }
}

fn sybil_region(n: usize, model: SybilModel, seed: u64) -> Result<Graph> {
    Ok(match model {
        _ if n == 1 => Graph::empty(1),
        SybilModel::Clique => Graph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))),
        SybilModel::PreferentialAttachment { attach } => ba_generate(&GenSpec::new(n, attach.min(n - 1), seed))?,
    })
}

/// Joins a generated Sybil region to `honest` by `g` distinct attack edges
/// with uniform endpoints on each side.
pub fn attach_sybil_region(honest: &Graph, sybil_n: usize, model: SybilModel, g: usize, seed: u64) -> Result<AttackGraph> {
    if g < 1 || sybil_n < 1 {
        return Err(Error::InvalidParameter("need at least one Sybil and one attack edge".into()));
    }
    let h = honest.n();
    if g > h * sybil_n {
        return Err(Error::InvalidParameter(format!("{g} attack edges exceed the {h} x {sybil_n} cut")));
    }
    let region = sybil_region(sybil_n, model, derive_seed(seed, 1))?;
    let mut edges: Vec<(usize, usize)> = honest.links().iter().map(|l| l.endpoints()).collect();
    edges.extend(region.links().iter().map(|l| (h + l.u(), h + l.v())));
    let mut rng = derived_rng(seed, 2);
    let mut cut = std::collections::HashSet::with_capacity(g);
    while cut.len() < g {
        let pair = (rng.gen_range(0..h), h + rng.gen_range(0..sybil_n));
        if cut.insert(pair) {
            edges.push(pair);
        }
    }
    Ok(AttackGraph { graph: Graph::from_edges(h + sybil_n, edges), honest_n: h, attack_edges: g })
}

#[derive(Debug, Clone, Serialize)]
pub struct SybilLimitConfig {
    /// `r = ceil(r0 * sqrt(m))` instances.
    pub r0: f64,
    pub verifiers: usize,
    /// Balance cap `b = (1 + sum of loads) / r + balance_a * ln r`.
    pub balance_a: f64,
    pub seed: u64,
}

impl Default for SybilLimitConfig {
    fn default() -> Self {
        SybilLimitConfig { r0: 4.0, verifiers: 100, balance_a: 1.0, seed: 0 }
    }
}

impl SybilLimitConfig {
    pub fn instances(&self, m: usize) -> usize {
        ((self.r0 * (m as f64).sqrt()).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AcceptRates {
    pub w: usize,
    pub honest_accept_fraction: f64,
    pub sybils_accepted_per_attack_edge: f64,
    /// Attack edges times route length.
    pub sybil_capacity: usize,
}

/// Per-instance routing tables and per-node starting edges.
pub struct RouteTables<'g> {
    graph: &'g Graph,
    offset: Vec<usize>,
    two_m: usize,
    /// `perm[i * 2m + offset[x] + k]`: exit edge of `x` for entry edge `k`.
    perm: Vec<u32>,
    /// `start[i * n + x]`: first edge of `x`'s route in instance `i`.
    start: Vec<u32>,
    pub instances: usize,
}

impl<'g> RouteTables<'g> {
    pub fn new(graph: &'g Graph, instances: usize, seed: u64) -> RouteTables<'g> {
        let n = graph.n();
        let mut offset = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for v in 0..n {
            offset.push(acc);
            acc += graph.degree(v);
        }
        offset.push(acc);
        let two_m = acc;
        let per_instance: Vec<(Vec<u32>, Vec<u32>)> = (0..instances)
            .into_par_iter()
            .map(|i| {
                let mut rng = derived_rng(seed, i as u64);
                let mut perm = vec![0u32; two_m];
                let mut start = vec![0u32; n];
                for v in 0..n {
                    let d = graph.degree(v);
                    let slot = &mut perm[offset[v]..offset[v] + d];
                    slot.iter_mut().enumerate().for_each(|(k, p)| *p = k as u32);
                    slot.shuffle(&mut rng);
                    if d > 0 {
                        start[v] = rng.gen_range(0..d) as u32;
                    }
                }
                (perm, start)
            })
            .collect();
        let mut perm = Vec::with_capacity(instances * two_m);
        let mut start = Vec::with_capacity(instances * n);
        for (p, s) in per_instance {
            perm.extend(p);
            start.extend(s);
        }
        RouteTables { graph, offset, two_m, perm, start, instances }
    }

    /// Exit edge index at `x` for a route of instance `i` entering via `k`.
    pub fn next_edge(&self, i: usize, x: usize, k: usize) -> usize {
        self.perm[i * self.two_m + self.offset[x] + k] as usize
    }

    fn entry_index(&self, y: usize, from: usize) -> usize {
        self.graph.neighbors(y).binary_search(&(from as u32)).expect("symmetric adjacency")
    }

    /// Vertex sequence of `v`'s route in instance `i`.
    pub fn route(&self, i: usize, v: usize, w: usize) -> Vec<usize> {
        let mut path = vec![v];
        if self.graph.degree(v) == 0 || w == 0 {
            return path;
        }
        let mut x = v;
        let mut k_out = self.start[i * self.graph.n() + v] as usize;
        for hop in 0..w {
            let y = self.graph.neighbors(x)[k_out] as usize;
            path.push(y);
            if hop + 1 < w {
                let k_in = self.entry_index(y, x);
                k_out = self.next_edge(i, y, k_in);
            }
            x = y;
        }
        path
    }

    /// Tail keys for every node and instance at each route length in `ws`
    /// (ascending). `out[wi][v * r + i]`; `u64::MAX` marks "no tail".
    fn tails(&self, ws: &[usize]) -> Vec<Vec<u64>> {
        let n = self.graph.n();
        let r = self.instances;
        let w_max = *ws.last().unwrap_or(&0);
        let per_node: Vec<Vec<Vec<u64>>> = (0..n)
            .into_par_iter()
            .map(|v| {
                let mut out = vec![vec![u64::MAX; r]; ws.len()];
                if self.graph.degree(v) == 0 {
                    return out;
                }
                for i in 0..r {
                    let mut x = v;
                    let mut k_out = self.start[i * n + v] as usize;
                    let mut wi = 0;
                    for hop in 1..=w_max {
                        let y = self.graph.neighbors(x)[k_out] as usize;
                        while wi < ws.len() && ws[wi] == hop {
                            out[wi][i] = edge_key(x, y);
                            wi += 1;
                        }
                        if hop < w_max {
                            let k_in = self.entry_index(y, x);
                            k_out = self.next_edge(i, y, k_in);
                        }
                        x = y;
                    }
                }
                out
            })
            .collect();
        (0..ws.len())
            .map(|wi| {
                let mut flat = Vec::with_capacity(n * r);
                for node in &per_node {
                    flat.extend_from_slice(&node[wi]);
                }
                flat
            })
            .collect()
    }
}

fn edge_key(a: usize, b: usize) -> u64 {
    let (x, y) = if a < b { (a, b) } else { (b, a) };
    ((x as u64) << 32) | y as u64
}

/// Acceptance rates at each route length in `ws`.
pub fn sybillimit_accept_rates(ag: &AttackGraph, ws: &[usize], cfg: &SybilLimitConfig) -> Result<Vec<AcceptRates>> {
    if ws.is_empty() || ws.contains(&0) {
        return Err(Error::InvalidParameter("route lengths must be at least 1".into()));
    }
    let mut sorted_ws = ws.to_vec();
    sorted_ws.sort_unstable();
    sorted_ws.dedup();
    let g = &ag.graph;
    let n = g.n();
    let r = cfg.instances(g.m());
    let tables = RouteTables::new(g, r, derive_seed(cfg.seed, 1));
    let tails = tables.tails(&sorted_ws);
    let verifiers = {
        let mut v = sample_indices(ag.honest_n, cfg.verifiers, &mut derived_rng(cfg.seed, 2));
        v.sort_unstable();
        v
    };
    let cap_log = cfg.balance_a * (r as f64).ln();

    let mut out = Vec::with_capacity(sorted_ws.len());
    for (wi, &w) in sorted_ws.iter().enumerate() {
        let tail = &tails[wi];
        // edge -> (verifier slot, instance) for every verifier tail
        let mut index: HashMap<u64, Vec<(u32, u32)>> = HashMap::new();
        for (vi, &v) in verifiers.iter().enumerate() {
            for i in 0..r {
                let key = tail[v * r + i];
                if key != u64::MAX {
                    index.entry(key).or_default().push((vi as u32, i as u32));
                }
            }
        }
        // per verifier, per suspect: intersecting verifier instances
        let mut hits: Vec<HashMap<u32, Vec<u32>>> = vec![HashMap::new(); verifiers.len()];
        for s in 0..n {
            let own = &tail[s * r..(s + 1) * r];
            for &key in own {
                if let Some(list) = index.get(&key) {
                    for &(vi, i) in list {
                        hits[vi as usize].entry(s as u32).or_default().push(i);
                    }
                }
            }
        }
        let results: Vec<(usize, usize, usize)> = verifiers
            .par_iter()
            .enumerate()
            .map(|(vi, &v)| {
                let mut order: Vec<usize> = (0..n).filter(|&s| s != v).collect();
                order.shuffle(&mut rng_from_seed(derive_seed(cfg.seed, 1000 + (wi * verifiers.len() + vi) as u64)));
                let mut load = vec![0usize; r];
                let mut total = 0usize;
                let (mut honest_ok, mut sybil_ok, mut honest_seen) = (0, 0, 0);
                for s in order {
                    let is_sybil = ag.is_sybil(s);
                    if !is_sybil {
                        honest_seen += 1;
                    }
                    let Some(cands) = hits[vi].get(&(s as u32)) else { continue };
                    let best = cands.iter().copied().min_by_key(|&i| (load[i as usize], i)).unwrap() as usize;
                    let cap = (1 + total) as f64 / r as f64 + cap_log;
                    if (load[best] + 1) as f64 <= cap {
                        load[best] += 1;
                        total += 1;
                        if is_sybil {
                            sybil_ok += 1;
                        } else {
                            honest_ok += 1;
                        }
                    }
                }
                (honest_ok, honest_seen, sybil_ok)
            })
            .collect();
        let honest: f64 =
            results.iter().map(|&(ok, seen, _)| ok as f64 / seen.max(1) as f64).sum::<f64>() / results.len() as f64;
        let sybil: f64 = results.iter().map(|&(_, _, s)| s as f64).sum::<f64>() / results.len() as f64;
        out.push(AcceptRates {
            w,
            honest_accept_fraction: honest,
            sybils_accepted_per_attack_edge: if ag.attack_edges > 0 { sybil / ag.attack_edges as f64 } else { 0.0 },
            sybil_capacity: ag.attack_edges * w,
        });
    }
    Ok(out)
}

/// Smallest route length in the sweep whose honest acceptance reaches
/// `target`.
pub fn required_route_length(rates: &[AcceptRates], target: f64) -> Option<usize> {
    rates.iter().find(|r| r.honest_accept_fraction >= target).map(|r| r.w)
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackEdgeGrowth {
    pub g: usize,
    pub t: usize,
    pub trials: usize,
    pub mean_g_prime: f64,
    pub ratio: f64,
    pub per_trial: Vec<usize>,
}

/// Mean honest/Sybil cut size after perturbing the whole attack graph.
pub fn attack_edge_growth(ag: &AttackGraph, params: &PerturbParams, trials: usize) -> Result<AttackEdgeGrowth> {
    if trials < 1 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|k| {
            let p = params.with_seed(derive_seed(params.seed, k as u64));
            Ok(ag.cut_size(&transform(&ag.graph, &p)?.graph))
        })
        .collect::<Result<Vec<usize>>>()?;
    let mean = per_trial.iter().sum::<usize>() as f64 / trials as f64;
    Ok(AttackEdgeGrowth {
        g: ag.attack_edges,
        t: params.t,
        trials,
        mean_g_prime: mean,
        ratio: mean / ag.attack_edges.max(1) as f64,
        per_trial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn honest(n: usize, seed: u64) -> Graph {
        ba_generate(&GenSpec::new(n, 4, seed)).unwrap()
    }

    #[test]
    fn pendant_sybil() {
        let h = honest(50, 1);
        let ag = attach_sybil_region(&h, 1, SybilModel::default(), 1, 3).unwrap();
        assert_eq!(ag.graph.n(), 51);
        assert_eq!(ag.graph.degree(50), 1);
        assert_eq!(ag.cut_size(&ag.graph), 1);
    }

    #[test]
    fn attack_edge_accounting() {
        let h = honest(1000, 2);
        let a = attach_sybil_region(&h, 100, SybilModel::default(), 50, 9).unwrap();
        let b = attach_sybil_region(&h, 100, SybilModel::default(), 50, 9).unwrap();
        assert_eq!(a.attack_edges, 50);
        assert_eq!(a.cut_size(&a.graph), 50);
        assert_eq!(a.graph, b.graph);
        assert!(attach_sybil_region(&h, 2, SybilModel::Clique, 2001, 1).is_err());
    }

    #[test]
    fn routes_are_back_traceable() {
        let g = honest(200, 3);
        let tables = RouteTables::new(&g, 4, 7);
        for i in 0..4 {
            // two routes entering a node through the same edge leave alike
            let mut exit_of: HashMap<(usize, usize), usize> = HashMap::new();
            for v in 0..200 {
                let p = tables.route(i, v, 12);
                for win in p.windows(3) {
                    let prev = exit_of.insert((win[0], win[1]), win[2]);
                    assert!(prev.is_none() || prev == Some(win[2]));
                }
            }
        }
        assert_eq!(tables.route(1, 5, 9), RouteTables::new(&g, 4, 7).route(1, 5, 9));
    }

    #[test]
    fn acceptance_grows_with_route_length() {
        let ag = AttackGraph::honest_only(honest(300, 5));
        let cfg = SybilLimitConfig { verifiers: 20, seed: 4, ..Default::default() };
        let rates = sybillimit_accept_rates(&ag, &[1, 3, 6, 12, 25], &cfg).unwrap();
        for w in rates.windows(2) {
            assert!(w[1].honest_accept_fraction + 0.02 >= w[0].honest_accept_fraction, "{rates:?}");
        }
        assert!(rates[4].honest_accept_fraction >= 0.95, "{rates:?}");
        assert!(rates[0].honest_accept_fraction < rates[4].honest_accept_fraction);
    }

    #[test]
    fn one_hop_perturbation_never_adds_attack_edges() {
        let ag = attach_sybil_region(&honest(300, 6), 30, SybilModel::default(), 20, 1).unwrap();
        let growth = attack_edge_growth(&ag, &PerturbParams::new(1, 3), 10).unwrap();
        assert!(growth.per_trial.iter().all(|&c| c <= 20));
    }
}
