//! Social-overlay routing over a Chord ring and its lookup reliability
//! under linear trust decay.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::perturb::{transform, PerturbParams};
use crate::rng::{derive_seed, derived_rng};

pub const ID_BITS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrustModel {
    pub f: f64,
    pub decrement: f64,
    pub floor: f64,
}

impl Default for TrustModel {
    fn default() -> Self {
        TrustModel { f: 0.95, decrement: 0.05, floor: 0.6 }
    }
}

impl TrustModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.floor <= self.f && self.f <= 1.0 && self.decrement > 0.0 && self.floor > 0.0) {
            return Err(Error::InvalidParameter(format!("invalid trust model {self:?}")));
        }
        Ok(())
    }

    /// Trust in a node at social distance `d` (`usize::MAX` = unreachable).
    pub fn trust(&self, d: usize) -> f64 {
        match d {
            0 => 1.0,
            usize::MAX => self.floor,
            d => (self.f - self.decrement * (d - 1) as f64).max(self.floor),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChordRing {
    ids: Vec<u32>,
    /// Vertices sorted by id.
    order: Vec<usize>,
    fingers: Vec<[u32; ID_BITS]>,
}

/// Clockwise distance from `a` to `b`.
fn cw(a: u32, b: u32) -> u32 {
    b.wrapping_sub(a)
}

/// Uniform distinct ids for `n` vertices and their finger tables.
pub fn build_ring(n: usize, seed: u64) -> Result<ChordRing> {
    if n < 2 {
        return Err(Error::InvalidParameter("a ring needs at least two nodes".into()));
    }
    let mut rng = derived_rng(seed, 0xc0d);
    let mut seen = std::collections::HashSet::with_capacity(n);
    let ids: Vec<u32> = (0..n)
        .map(|_| loop {
            let id: u32 = rng.gen();
            if seen.insert(id) {
                break id;
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&v| ids[v]);
    let mut ring = ChordRing { ids, order, fingers: Vec::new() };
    ring.fingers = (0..n)
        .map(|v| {
            let mut f = [0u32; ID_BITS];
            for (i, slot) in f.iter_mut().enumerate() {
                *slot = ring.successor(ring.ids[v].wrapping_add(1u32 << i)) as u32;
            }
            f
        })
        .collect();
    Ok(ring)
}

impl ChordRing {
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn id(&self, v: usize) -> u32 {
        self.ids[v]
    }

    /// First node clockwise from `key`, inclusive: the key's owner.
    pub fn successor(&self, key: u32) -> usize {
        let i = self.order.partition_point(|&v| self.ids[v] < key);
        self.order[i % self.order.len()]
    }

    pub fn finger(&self, v: usize, i: usize) -> usize {
        self.fingers[v][i] as usize
    }

    fn closest_preceding_finger(&self, x: usize, key: u32) -> usize {
        let to_key = cw(self.ids[x], key);
        for i in (0..ID_BITS).rev() {
            let f = self.finger(x, i);
            let d = cw(self.ids[x], self.ids[f]);
            if d > 0 && d < to_key {
                return f;
            }
        }
        self.finger(x, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    /// Nodes visited after the source; the last is the key's owner on
    /// success.
    pub path: Vec<usize>,
    pub success: bool,
}

pub fn max_hops(n: usize) -> usize {
    3 * (n.max(2) as f64).log2().ceil() as usize
}

/// Greedy lookup preferring social links that make namespace progress, with
/// finger-table fallback.
pub fn sprout_route(ring: &ChordRing, g: &Graph, src: usize, key: u32) -> Route {
    let owner = ring.successor(key);
    let limit = max_hops(ring.n());
    let mut path = Vec::new();
    let mut x = src;
    while x != owner {
        if path.len() >= limit {
            return Route { path, success: false };
        }
        let to_key = cw(ring.id(x), key);
        let succ = ring.finger(x, 0);
        let next = if g.neighbors(x).iter().any(|&y| y as usize == owner) || succ == owner {
            owner
        } else {
            g.neighbors(x)
                .iter()
                .map(|&y| y as usize)
                .filter(|&y| cw(ring.id(y), key) < to_key)
                .min_by_key(|&y| (cw(ring.id(y), key), y))
                .unwrap_or_else(|| ring.closest_preceding_finger(x, key))
        };
        path.push(next);
        x = next;
    }
    Route { path, success: true }
}

/// Product of trust over every node after the source; zero for a failed
/// lookup.
pub fn path_reliability(route: &Route, dist_from_src: &[usize], trust: &TrustModel) -> f64 {
    if !route.success {
        return 0.0;
    }
    route.path.iter().map(|&v| trust.trust(dist_from_src[v])).product()
}

#[derive(Debug, Clone, Serialize)]
pub struct ReliabilityRow {
    pub topology: String,
    pub mechanism: String,
    pub t: Option<usize>,
    pub reliability: f64,
    pub mean_hops: f64,
    pub failures: usize,
    pub lookups: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub trust: TrustModel,
    pub lookups: usize,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<ReliabilityRow>,
}

struct Tally {
    reliability: f64,
    hops: usize,
    failures: usize,
}

fn tally(ring: &ChordRing, routing: &Graph, queries: &[(usize, u32)], dists: &[&[usize]], trust: &TrustModel) -> Tally {
    let per: Vec<(f64, usize, bool)> = queries
        .par_iter()
        .zip(dists)
        .map(|(&(src, key), d)| {
            let r = sprout_route(ring, routing, src, key);
            (path_reliability(&r, d, trust), r.path.len(), r.success)
        })
        .collect();
    Tally {
        reliability: per.iter().map(|p| p.0).sum(),
        hops: per.iter().map(|p| p.1).sum(),
        failures: per.iter().filter(|p| !p.2).count(),
    }
}

/// Mean lookup reliability on the original graph, each perturbed graph, and
/// a ring without social links. Trust is always judged by distance in `g`.
pub fn reliability_experiment(
    g: &Graph,
    perturb: &[PerturbParams],
    trust: &TrustModel,
    lookups: usize,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    trust.validate()?;
    if lookups < 1 || trials < 1 {
        return Err(Error::InvalidParameter("lookups and trials must be at least 1".into()));
    }
    let n = g.n();
    let no_social = Graph::empty(n);
    let mut sums: Vec<Tally> = (0..perturb.len() + 2).map(|_| Tally { reliability: 0.0, hops: 0, failures: 0 }).collect();
    for trial in 0..trials {
        let ring = build_ring(n, derive_seed(seed, trial as u64))?;
        let mut rng = derived_rng(seed, 0x1000 + trial as u64);
        let mut queries: Vec<(usize, u32)> = (0..lookups).map(|_| (rng.gen_range(0..n), rng.gen())).collect();
        queries.sort_unstable();
        let mut srcs: Vec<usize> = queries.iter().map(|q| q.0).collect();
        srcs.dedup();
        let bfs: Vec<Vec<usize>> = srcs.par_iter().map(|&s| g.bfs_distances(s)).collect();
        let dists: Vec<&[usize]> = queries.iter().map(|q| &bfs[srcs.binary_search(&q.0).unwrap()][..]).collect();

        let mut graphs = vec![g.clone()];
        for p in perturb {
            let p = p.with_seed(derive_seed(p.seed, trial as u64));
            graphs.push(transform(g, &p)?.graph);
        }
        graphs.push(no_social.clone());
        for (sum, routing) in sums.iter_mut().zip(&graphs) {
            let t = tally(&ring, routing, &queries, &dists, trust);
            sum.reliability += t.reliability;
            sum.hops += t.hops;
            sum.failures += t.failures;
        }
    }
    let total = (lookups * trials) as f64;
    let rows = sums
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let (topology, mechanism, t) = if i == 0 {
                ("original".to_string(), "sprout", None)
            } else if i <= perturb.len() {
                (format!("t={}", perturb[i - 1].t), "sprout", Some(perturb[i - 1].t))
            } else {
                ("none".to_string(), "chord", None)
            };
            ReliabilityRow {
                topology,
                mechanism: mechanism.to_string(),
                t,
                reliability: s.reliability / total,
                mean_hops: s.hops as f64 / total,
                failures: s.failures,
                lookups: lookups * trials,
            }
        })
        .collect();
    Ok(ExperimentReport { trust: *trust, lookups, trials, seed, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{ba_generate, GenSpec};

    #[test]
    fn two_node_ring() {
        let ring = build_ring(2, 1).unwrap();
        for v in 0..2 {
            assert_eq!(ring.finger(v, 0), 1 - v);
            // a finger target past the other node wraps back to the owner
            for i in 0..ID_BITS {
                let past = cw(ring.id(v), ring.id(1 - v)) < 1 << i;
                assert_eq!(ring.finger(v, i), if past { v } else { 1 - v });
            }
        }
    }

    #[test]
    fn finger_invariant() {
        let ring = build_ring(100, 4).unwrap();
        for v in 0..100 {
            for i in 0..ID_BITS {
                let target = ring.id(v).wrapping_add(1 << i);
                let f = ring.finger(v, i);
                let gap = cw(target, ring.id(f));
                assert!((0..100).all(|u| cw(target, ring.id(u)) >= gap));
            }
        }
    }

    #[test]
    fn chord_paths_are_logarithmic() {
        let ring = build_ring(1000, 2).unwrap();
        let empty = Graph::empty(1000);
        let mut rng = derived_rng(5, 0);
        let mut hops = 0;
        for _ in 0..2000 {
            let r = sprout_route(&ring, &empty, rng.gen_range(0..1000), rng.gen());
            assert!(r.success);
            hops += r.path.len();
        }
        assert!(hops as f64 / 2000.0 <= 2.0 * 1000f64.log2());
    }

    #[test]
    fn trivial_routes() {
        let g = Graph::from_edges(50, (1..50).map(|v| (0, v)));
        let ring = build_ring(50, 3).unwrap();
        let key = ring.id(0);
        assert!(sprout_route(&ring, &g, 0, key).path.is_empty());
        let key = ring.id(17);
        assert_eq!(sprout_route(&ring, &g, 0, key).path, vec![17]);
        let d = g.bfs_distances(0);
        let r = sprout_route(&ring, &g, 0, key);
        assert!((path_reliability(&r, &d, &TrustModel::default()) - 0.95).abs() < 1e-15);
    }

    #[test]
    fn trust_arithmetic() {
        let t = TrustModel::default();
        assert_eq!(t.trust(1), 0.95);
        assert!((t.trust(8) - 0.6).abs() < 1e-12);
        assert_eq!(t.trust(50), 0.6);
        assert_eq!(t.trust(usize::MAX), 0.6);
    }

    #[test]
    fn original_beats_chord() {
        let g = ba_generate(&GenSpec::new(400, 4, 1)).unwrap();
        let rep = reliability_experiment(&g, &[PerturbParams::new(10, 2)], &TrustModel::default(), 400, 2, 9).unwrap();
        let r: Vec<f64> = rep.rows.iter().map(|r| r.reliability).collect();
        assert!(r[0] > r[2], "{r:?}");
        assert!(r.iter().all(|&x| x > 0.0 && x <= 1.0));
    }
}
