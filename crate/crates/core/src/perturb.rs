//! Random-walk link perturbation and the uniform delete/insert baseline.
//!
//! Every edge slot `(u, v)` is rewired to `(u, z)`, where `z` ends a
//! `t - 1` hop walk started at `v` on the original graph. A vertex keeps its
//! first rewired slot unconditionally and each later one with probability
//! `(deg(u)/2 - 1) / (deg(u) - 1)`, so that processing each undirected edge
//! from both endpoints leaves expected degrees unchanged.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Link};
use crate::rng::{rng_from_seed, SimRng};
use crate::walk::sample_walk;

pub const DEFAULT_MAX_TRIES: usize = 10;

/// Order in which a vertex visits its neighbor slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NeighborOrder {
    /// Seeded shuffle per vertex.
    #[default]
    Shuffled,
    /// Ascending neighbor id.
    Sorted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbParams {
    /// Perturbation parameter; walks have `t - 1` hops.
    pub t: usize,
    /// Walk attempts per slot before the slot is skipped.
    pub max_tries: usize,
    pub seed: u64,
    pub order: NeighborOrder,
}

impl PerturbParams {
    pub fn new(t: usize, seed: u64) -> PerturbParams {
        PerturbParams { t, max_tries: DEFAULT_MAX_TRIES, seed, order: NeighborOrder::default() }
    }

    pub fn with_max_tries(mut self, max_tries: usize) -> PerturbParams {
        self.max_tries = max_tries;
        self
    }

    pub fn with_order(mut self, order: NeighborOrder) -> PerturbParams {
        self.order = order;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> PerturbParams {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.t < 1 {
            return Err(Error::InvalidParameter("t must be at least 1".into()));
        }
        if self.max_tries < 1 {
            return Err(Error::InvalidParameter("M must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Perturbed {
    pub graph: Graph,
    /// Slots where no admissible endpoint turned up within `max_tries`.
    pub skipped_slots: usize,
    /// Slots with an admissible endpoint that lost the acceptance coin.
    pub rejected_slots: usize,
}

/// Acceptance probability for every slot after a vertex's first.
pub fn later_slot_probability(deg: usize) -> f64 {
    if deg < 2 {
        return 0.0;
    }
    ((0.5 * deg as f64 - 1.0) / (deg as f64 - 1.0)).max(0.0)
}

fn key(a: usize, b: usize) -> u64 {
    let (x, y) = if a < b { (a, b) } else { (b, a) };
    ((x as u64) << 32) | y as u64
}

pub fn transform(g: &Graph, params: &PerturbParams) -> Result<Perturbed> {
    params.validate()?;
    g.require_connected()?;
    let mut rng = rng_from_seed(params.seed);
    Ok(transform_with_rng(g, params, &mut rng))
}

pub(crate) fn transform_with_rng(g: &Graph, params: &PerturbParams, rng: &mut SimRng) -> Perturbed {
    let n = g.n();
    let hops = params.t - 1;
    let mut present: HashSet<u64> = HashSet::with_capacity(2 * g.m());
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(g.m() + n);
    let mut skipped = 0;
    let mut rejected = 0;
    let mut order: Vec<u32> = Vec::new();

    for u in 0..n {
        let deg = g.degree(u);
        let later_p = later_slot_probability(deg);
        order.clear();
        order.extend_from_slice(g.neighbors(u));
        if params.order == NeighborOrder::Shuffled {
            order.shuffle(rng);
        }
        let mut accepted_any = false;
        for &v in &order {
            let mut found = None;
            for _ in 0..params.max_tries {
                // connected input: no dead ends
                let z = sample_walk(g, v as usize, hops, rng).expect("walk on connected graph");
                if z != u && !present.contains(&key(u, z)) {
                    found = Some(z);
                    break;
                }
            }
            let Some(z) = found else {
                skipped += 1;
                continue;
            };
            let keep = !accepted_any || rng.gen::<f64>() < later_p;
            accepted_any = true;
            if keep {
                present.insert(key(u, z));
                edges.push((u, z));
            } else {
                rejected += 1;
            }
        }
    }

    Perturbed {
        graph: Graph::from_edges(n, edges).with_labels_of(g),
        skipped_slots: skipped,
        rejected_slots: rejected,
    }
}

/// Deletes `k` uniformly chosen edges, then inserts `k` uniformly chosen
/// non-edges of the remaining graph.
pub fn transform_baseline_hay(g: &Graph, k: usize, seed: u64) -> Result<Graph> {
    if k > g.m() {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds m = {}", g.m())));
    }
    let mut rng = rng_from_seed(seed);
    let mut links = g.links();
    links.shuffle(&mut rng);
    links.truncate(g.m() - k);
    let mut present: HashSet<Link> = links.iter().copied().collect();
    let n = g.n();
    let pairs = n * (n.saturating_sub(1)) / 2;
    let free = pairs - present.len();
    if free < k {
        return Err(Error::InvalidParameter(format!("only {free} non-edges available for {k} insertions")));
    }
    if free <= 4 * k || pairs <= 10_000 {
        let mut pool: Vec<Link> = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| Link::new(a, b).unwrap()))
            .filter(|l| !present.contains(l))
            .collect();
        pool.shuffle(&mut rng);
        links.extend(pool.into_iter().take(k));
    } else {
        let mut added = 0;
        while added < k {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if let Some(l) = Link::new(a, b) {
                if present.insert(l) {
                    links.push(l);
                    added += 1;
                }
            }
        }
    }
    Ok(Graph::from_links(n, &links).with_labels_of(g))
}
