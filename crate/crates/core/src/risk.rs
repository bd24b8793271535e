//! Prior-free link privacy: structural impact (how much one link moves the
//! perturbation's output) and structural equivalence (how many alternate
//! links move it by less than a threshold).
//!
//! The distance between output distributions of the mechanism is not
//! tractable, so both are evaluated through the upper bound
//! `VU_max(G, G*, t)` under the sup-form variation distance, where `G*` is
//! the modified graph. Reported values are bounds, not exact epsilons.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EditMode, Graph, Link};
use crate::lowrank::PowerDiff;
use crate::rng::{derive_seed, derived_rng, sample_indices};

pub const DEFAULT_SE_CAP: usize = 1000;

#[derive(Debug, Clone, Serialize)]
pub struct SiResult {
    pub link: Link,
    pub t: usize,
    /// Upper bound on the structural impact; meaningless when `!defined`.
    pub epsilon_bound: f64,
    /// False when removing the link disconnects the graph.
    pub defined: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeResult {
    pub link: Link,
    pub t: usize,
    pub epsilon: f64,
    /// Alternates within `epsilon`, including `link` itself when sampled.
    pub k: usize,
    pub candidates_examined: usize,
    /// Fewer than `cap` alternates existed, so all were examined.
    pub exhausted: bool,
}

/// `VU_max(G, G - L, t)`, or undefined when `G - L` is disconnected.
pub fn si_epsilon(g: &Graph, link: Link, t: usize) -> Result<SiResult> {
    if !g.has_link(link) {
        return Err(Error::MissingLink(link));
    }
    let defined = g.without_link(link)?.is_connected();
    let epsilon_bound = if defined { PowerDiff::new(g, &[(link, EditMode::Remove)], t).sup_max() } else { f64::NAN };
    Ok(SiResult { link, t, epsilon_bound, defined })
}

/// [`si_epsilon`] for many links in parallel, in input order.
pub fn si_sweep(g: &Graph, links: &[Link], t: usize) -> Result<Vec<SiResult>> {
    links.par_iter().map(|&l| si_epsilon(g, l, t)).collect()
}

/// Non-edges of `G - L` (so including `L`), enumerated lexicographically.
fn alternates(g: &Graph, link: Link) -> Vec<Link> {
    let n = g.n();
    let mut out = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let l = Link::new(a, b).unwrap();
            if l == link || !g.has_edge(a, b) {
                out.push(l);
            }
        }
    }
    out
}

/// Counts alternates `L'` with `VU_max(G, G - L + L', t) < epsilon` among up
/// to `cap` drawn uniformly without replacement.
pub fn se_anonymity(g: &Graph, link: Link, t: usize, epsilon: f64, cap: usize, seed: u64) -> Result<SeResult> {
    if !g.has_link(link) {
        return Err(Error::MissingLink(link));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let pool = alternates(g, link);
    let exhausted = pool.len() <= cap;
    let mut idx = sample_indices(pool.len(), cap, &mut derived_rng(seed, link.u() as u64 * 0x1_0000_0000 + link.v() as u64));
    idx.sort_unstable();
    let k = idx
        .par_iter()
        .filter(|&&i| {
            let alt = pool[i];
            if alt == link {
                return true;
            }
            PowerDiff::new(g, &[(link, EditMode::Remove), (alt, EditMode::Add)], t).sup_below(epsilon)
        })
        .count();
    Ok(SeResult { link, t, epsilon, k, candidates_examined: idx.len(), exhausted })
}

/// [`se_anonymity`] for many links, each with its own derived seed.
pub fn se_sweep(g: &Graph, links: &[Link], t: usize, epsilon: f64, cap: usize, seed: u64) -> Result<Vec<SeResult>> {
    links
        .iter()
        .enumerate()
        .map(|(i, &l)| se_anonymity(g, l, t, epsilon, cap, derive_seed(seed, i as u64)))
        .collect()
}

/// Up to `count` links of `g` sampled uniformly, in lexicographic order.
pub fn sample_links(g: &Graph, count: usize, seed: u64) -> Vec<Link> {
    let all = g.links();
    let mut idx = sample_indices(all.len(), count, &mut derived_rng(seed, 0x11c5));
    idx.sort_unstable();
    idx.into_iter().map(|i| all[i]).collect()
}
