//! Preferential-attachment (Barabási–Albert) topologies.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    /// Edges added by each new vertex.
    pub attach: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(n: usize, attach: usize, seed: u64) -> GenSpec {
        GenSpec { n, attach, seed }
    }

    /// `C(attach + 1, 2) + attach * (n - attach - 1)`.
    pub fn expected_edges(&self) -> usize {
        self.attach * (self.attach + 1) / 2 + self.attach * (self.n - self.attach - 1)
    }
}

/// Starts from a clique on `attach + 1` vertices; every later vertex links to
/// `attach` distinct earlier vertices picked with probability proportional to
/// degree.
pub fn ba_generate(spec: &GenSpec) -> Result<Graph> {
    let GenSpec { n, attach, seed } = *spec;
    if attach < 1 || n <= attach {
        return Err(Error::InvalidParameter(format!("need attach >= 1 and n > attach (n={n}, attach={attach})")));
    }
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::with_capacity(spec.expected_edges());
    // one entry per edge endpoint, so a uniform pick is degree-proportional
    let mut endpoints: Vec<u32> = Vec::with_capacity(2 * spec.expected_edges());
    for a in 0..=attach {
        for b in (a + 1)..=attach {
            edges.push((a, b));
            endpoints.push(a as u32);
            endpoints.push(b as u32);
        }
    }
    let mut targets: Vec<u32> = Vec::with_capacity(attach);
    for v in (attach + 1)..n {
        targets.clear();
        while targets.len() < attach {
            let pick = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&pick) {
                targets.push(pick);
            }
        }
        for &w in &targets {
            edges.push((v, w as usize));
            endpoints.push(v as u32);
            endpoints.push(w);
        }
    }
    Ok(Graph::from_edges(n, edges))
}
