//! Bayesian link privacy.
//!
//! An adversary who knows the perturbation algorithm scores a candidate
//! original graph `Gp` by how likely it makes the observed `G'`: each edge
//! of `G'` is treated as an independent draw from the symmetrized `t`-hop
//! transition probabilities of `Gp`. Three views are provided:
//!
//! * [`worstcase_posterior`]: the adversary knows everything except one
//!   link and sums over every single-link completion.
//! * [`FeatureStudy`]: the adversary only sees `P_AB^k(G')` and uses
//!   Monte-Carlo class-conditional tails under a uniform friendship prior.
//! * [`privacy_floor`]: the lower bound on the posterior implied by a level
//!   of vertex utility.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::distance::DistanceKind;
use crate::error::{Error, Result};
use crate::graph::{Graph, Link};
use crate::perturb::{transform, NeighborOrder, PerturbParams};
use crate::rng::{derive_seed, derived_rng, sample_indices};
use crate::utility::vu_curves;
use crate::walk::{Transition, VertexSample};

/// Largest vertex count [`worstcase_posterior`] accepts without `force`.
pub const WORSTCASE_MAX_N: usize = 600;

/// Largest `t` the completion scorer supports.
pub const MAX_FAST_T: usize = 64;

fn check_pair(gp: &Graph, gprime: &Graph) -> Result<()> {
    if gp.n() != gprime.n() {
        return Err(Error::VertexSetMismatch { left: gp.n(), right: gprime.n() });
    }
    Ok(())
}

/// `-2m ln 2 + ln C(2m, m')`.
pub fn log_prefactor(m: usize, m_prime: usize) -> f64 {
    if m_prime > 2 * m {
        return f64::NEG_INFINITY;
    }
    -(2.0 * m as f64) * std::f64::consts::LN_2 + ln_binomial(2 * m as u64, m_prime as u64)
}

/// Log-probability that the perturbation of `gp` with parameter `t` yields
/// `gprime`. Returns `-inf` when some edge of `gprime` cannot be reached in
/// `t` hops from either endpoint.
pub fn log_likelihood(gp: &Graph, gprime: &Graph, t: usize) -> Result<f64> {
    check_pair(gp, gprime)?;
    gp.require_connected()?;
    let op = Transition::new(gp);
    let mut total = log_prefactor(gp.m(), gprime.m());
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; gp.n()];
    let mut row = |v: usize| -> Vec<f64> { rows[v].get_or_insert_with(|| op.row_power(v, t)).clone() };
    for l in gprime.links() {
        let (i, j) = l.endpoints();
        let f = 0.5 * (row(i)[j] + row(j)[i]);
        if f <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        total += f.ln();
    }
    Ok(total)
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, Serialize)]
pub struct LinkPosterior {
    pub link: Link,
    /// `None` when every candidate likelihood underflows to zero.
    pub posterior: Option<f64>,
    pub prior_model: &'static str,
    pub t: usize,
    pub candidates: usize,
    /// Candidates with nonzero likelihood.
    pub feasible_candidates: usize,
    /// `ln P(G' | G)`.
    pub log_likelihood: f64,
}

/// Dense `t`-hop tables of `H = G - L` and the bookkeeping needed to score
/// `H + l` for many `l` by low-rank updates.
struct CompletionScorer<'a> {
    gprime: &'a Graph,
    t: usize,
    n: usize,
    /// `table[s][i * n + j] = P_H^s[i][j]` for `s = 0..=t`.
    table: Vec<Vec<f64>>,
    deg: Vec<usize>,
    /// Vertices within `t - 1` hops of each vertex in `H`.
    balls: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
    incident: Vec<Vec<u32>>,
    /// `(P^t_uv, P^t_vu)` on `H` for each edge `(u, v)` of `G'`.
    base_p: Vec<(f64, f64)>,
    base_log: Vec<f64>,
    base_sum: f64,
    base_zeros: usize,
    snap: f64,
}

#[derive(Default)]
struct Scratch {
    r: Vec<Vec<Vec<f64>>>,
    rt: Vec<f64>,
    mark: Vec<u32>,
    stamp: u32,
    in_ball: Vec<u32>,
    affected: Vec<u32>,
}

impl<'a> CompletionScorer<'a> {
    fn new(h: &Graph, gprime: &'a Graph, t: usize) -> CompletionScorer<'a> {
        let n = h.n();
        let op = Transition::new(h);
        let mut table = vec![vec![0.0; n * n]; t + 1];
        for i in 0..n {
            let rows = op.row_powers(i, t);
            for (s, row) in rows.into_iter().enumerate() {
                table[s][i * n..(i + 1) * n].copy_from_slice(&row);
            }
        }
        let radius = t.saturating_sub(1);
        let balls = (0..n).map(|x| ball(h, x, radius)).collect();
        let edges: Vec<(u32, u32)> = gprime.links().iter().map(|l| (l.u() as u32, l.v() as u32)).collect();
        let mut incident = vec![Vec::new(); n];
        for (e, &(i, j)) in edges.iter().enumerate() {
            incident[i as usize].push(e as u32);
            incident[j as usize].push(e as u32);
        }
        let deg = h.degrees();
        let dmax = deg.iter().max().copied().unwrap_or(0);
        let snap = 0.5 * ((dmax + 1) as f64).powi(-(t as i32));
        let mut scorer = CompletionScorer {
            gprime,
            t,
            n,
            table,
            deg,
            balls,
            edges,
            incident,
            base_p: Vec::new(),
            base_log: Vec::new(),
            base_sum: 0.0,
            base_zeros: 0,
            snap,
        };
        scorer.base_p = scorer
            .edges
            .iter()
            .map(|&(u, v)| {
                let (u, v) = (u as usize, v as usize);
                (scorer.table[t][u * n + v], scorer.table[t][v * n + u])
            })
            .collect();
        let base: Vec<f64> = (0..scorer.edges.len())
            .map(|e| {
                let (i, j) = scorer.edges[e];
                let p = scorer.table[t][i as usize * n + j as usize];
                scorer.log_factor(p, i as usize, j as usize, scorer.deg[i as usize], scorer.deg[j as usize])
            })
            .collect();
        scorer.base_zeros = base.iter().filter(|x| x.is_infinite()).count();
        scorer.base_sum = base.iter().filter(|x| x.is_finite()).sum();
        scorer.base_log = base;
        scorer
    }

    /// `ln((P_ij + P_ji) / 2)` from `P_ij` by reversibility.
    fn log_factor(&self, p_ij: f64, i: usize, j: usize, di: usize, dj: usize) -> f64 {
        if di == 0 || dj == 0 || i == j {
            return f64::NEG_INFINITY;
        }
        if p_ij < self.snap {
            return f64::NEG_INFINITY;
        }
        (p_ij * (di + dj) as f64 / (2.0 * dj as f64)).ln()
    }

    /// `P_H^s[i][x]`, read from row `x` when both degrees are positive.
    #[inline]
    fn column_entry(&self, s: usize, i: usize, x: usize) -> f64 {
        let (di, dx) = (self.deg[i], self.deg[x]);
        if di == 0 || dx == 0 {
            return self.table[s][i * self.n + x];
        }
        self.table[s][x * self.n + i] * dx as f64 / di as f64
    }

    /// `ln P(G' | H + (a, b))` without the common prefactor.
    fn score(&self, a: usize, b: usize, sc: &mut Scratch) -> f64 {
        let (n, t) = (self.n, self.t);
        if sc.r.is_empty() || sc.mark.len() != self.edges.len() {
            sc.mark = vec![0; self.edges.len()];
            sc.in_ball = vec![0; n];
            sc.r = vec![vec![vec![0.0; n]; t]; 2];
            sc.stamp = 0;
        }
        sc.stamp = sc.stamp.wrapping_add(1);
        if sc.stamp == 0 {
            sc.mark.iter_mut().for_each(|m| *m = 0);
            sc.in_ball.iter_mut().for_each(|m| *m = 0);
            sc.stamp = 1;
        }
        let stamp = sc.stamp;
        let ends = [a, b];
        let da = 1.0 / (self.deg[a] + 1) as f64;
        let db = 1.0 / (self.deg[b] + 1) as f64;

        // R_k for rows a and b, k < t, built from rows of the P_H powers:
        // delta_a P^j = (P^j_b - P^{j+1}_a) / (d_a + 1), symmetrically for b
        let row = |s: usize, i: usize| &self.table[s][i * n..(i + 1) * n];
        for x in 0..2 {
            for k in 0..t {
                let (prev, cur) = sc.r[x].split_at_mut(k);
                let out = &mut cur[0];
                let (p, q, d) = if x == 0 { (row(k, b), row(k + 1, a), da) } else { (row(k, a), row(k + 1, b), db) };
                for ((o, &pv), &qv) in out.iter_mut().zip(p).zip(q) {
                    *o = (pv - qv) * d;
                }
                for (s, r) in prev.iter().enumerate() {
                    let j = k - 1 - s;
                    let (ca, cb) = (r[a], r[b]);
                    if ca != 0.0 {
                        for ((o, &pv), &qv) in out.iter_mut().zip(row(j, b)).zip(row(j + 1, a)) {
                            *o += ca * da * (pv - qv);
                        }
                    }
                    if cb != 0.0 {
                        for ((o, &pv), &qv) in out.iter_mut().zip(row(j, a)).zip(row(j + 1, b)) {
                            *o += cb * db * (pv - qv);
                        }
                    }
                }
            }
        }

        sc.affected.clear();
        for &x in &ends {
            for &v in &self.balls[x] {
                if sc.in_ball[v as usize] != stamp {
                    sc.in_ball[v as usize] = stamp;
                    sc.affected.push(v);
                }
            }
        }

        // R transposed so one edge reads 2t contiguous values:
        // rt[j * 2t + x * t + m] = R^x_{t-1-m}(j)
        let w = 2 * t;
        if sc.rt.len() != n * w {
            sc.rt = vec![0.0; n * w];
        }
        for x in 0..2 {
            for m in 0..t {
                for (j, &v) in sc.r[x][t - 1 - m].iter().enumerate() {
                    sc.rt[j * w + x * t + m] = v;
                }
            }
        }

        let mut sum = self.base_sum;
        let mut zeros = self.base_zeros;
        let mut acc = 1.0f64;
        let deg_new = |v: usize| self.deg[v] + usize::from(v == a || v == b);
        let mut coef = [0.0f64; 2 * MAX_FAST_T];
        for idx in 0..sc.affected.len() {
            let i = sc.affected[idx] as usize;
            // P^s_{ia} from row a by reversibility
            for s in 0..t {
                coef[s] = self.column_entry(s, i, a);
                coef[t + s] = self.column_entry(s, i, b);
            }
            for &e in &self.incident[i] {
                let e = e as usize;
                if sc.mark[e] == stamp {
                    continue;
                }
                sc.mark[e] = stamp;
                let (u, v) = self.edges[e];
                let (j, mut p) =
                    if u as usize == i { (v as usize, self.base_p[e].0) } else { (u as usize, self.base_p[e].1) };
                let old = self.base_log[e];
                if old.is_finite() {
                    sum -= old;
                } else {
                    zeros -= 1;
                }
                let rj = &sc.rt[j * w..(j + 1) * w];
                for (c, r) in coef[..w].iter().zip(rj) {
                    p += c * r;
                }
                let (di, dj) = (deg_new(i), deg_new(j));
                if p < self.snap || di == 0 || dj == 0 {
                    zeros += 1;
                    continue;
                }
                acc *= p * (di + dj) as f64 / (2.0 * dj as f64);
                if acc < 1e-200 {
                    sum += acc.ln();
                    acc = 1.0;
                }
            }
        }
        if zeros > 0 {
            return f64::NEG_INFINITY;
        }
        sum + acc.ln()
    }

    fn gprime_m(&self) -> usize {
        self.gprime.m()
    }
}

fn ball(g: &Graph, src: usize, radius: usize) -> Vec<u32> {
    let mut dist = vec![usize::MAX; g.n()];
    let mut out = vec![src as u32];
    let mut queue = VecDeque::from([src]);
    dist[src] = 0;
    while let Some(x) = queue.pop_front() {
        if dist[x] == radius {
            continue;
        }
        for &y in g.neighbors(x) {
            let y = y as usize;
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                out.push(y as u32);
                queue.push_back(y);
            }
        }
    }
    out
}

/// Single-link completions of `h` scored in the posterior's denominator:
/// every non-edge, or only reconnecting ones when `h` is disconnected.
pub fn completion_candidates(h: &Graph) -> Vec<Link> {
    let (comp, count) = h.components();
    let n = h.n();
    let mut out = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if h.has_edge(a, b) {
                continue;
            }
            if count > 1 && comp[a] == comp[b] {
                continue;
            }
            out.push(Link::new(a, b).unwrap());
        }
    }
    out
}

/// `P(L | G', G - L)` with a uniform prior over the single-link completions
/// of `G - L`.
pub fn worstcase_posterior(g: &Graph, gprime: &Graph, link: Link, t: usize, force: bool) -> Result<LinkPosterior> {
    check_pair(g, gprime)?;
    g.require_connected()?;
    if !g.has_link(link) {
        return Err(Error::MissingLink(link));
    }
    if !(1..=MAX_FAST_T).contains(&t) {
        return Err(Error::InvalidParameter(format!("t must lie in 1..={MAX_FAST_T}")));
    }
    if g.n() > WORSTCASE_MAX_N && !force {
        return Err(Error::Guard(format!(
            "worst-case posterior sums over O(n^2) completions; n = {} exceeds {WORSTCASE_MAX_N} (pass force to override)",
            g.n()
        )));
    }
    let h = g.without_link(link)?;
    let candidates = completion_candidates(&h);
    let scorer = CompletionScorer::new(&h, gprime, t);
    let scores: Vec<f64> = candidates
        .par_chunks(256)
        .map_init(Scratch::default, |sc, chunk| {
            chunk.iter().map(|l| scorer.score(l.u(), l.v(), sc)).collect::<Vec<f64>>()
        })
        .flatten_iter()
        .collect();
    let own = candidates.binary_search(&link).expect("removed link is a completion");
    let lse = log_sum_exp(&scores);
    let posterior = if lse == f64::NEG_INFINITY { None } else { Some((scores[own] - lse).exp().min(1.0)) };
    Ok(LinkPosterior {
        link,
        posterior,
        prior_model: "uniform_completion",
        t,
        candidates: candidates.len(),
        feasible_candidates: scores.iter().filter(|s| s.is_finite()).count(),
        log_likelihood: scores[own] + log_prefactor(g.m(), scorer.gprime_m()),
    })
}

/// Reference implementation that rebuilds every completion and evaluates
/// [`log_likelihood`] directly. Quadratically slower; meant for checking.
pub fn worstcase_posterior_naive(g: &Graph, gprime: &Graph, link: Link, t: usize) -> Result<LinkPosterior> {
    let h = g.without_link(link)?;
    let candidates = completion_candidates(&h);
    let scores: Vec<f64> = candidates
        .iter()
        .map(|&l| log_likelihood(&h.with_link(l).unwrap(), gprime, t))
        .collect::<Result<_>>()?;
    let own = candidates.binary_search(&link).unwrap();
    let lse = log_sum_exp(&scores);
    Ok(LinkPosterior {
        link,
        posterior: if lse == f64::NEG_INFINITY { None } else { Some((scores[own] - lse).exp()) },
        prior_model: "uniform_completion",
        t,
        candidates: candidates.len(),
        feasible_candidates: scores.iter().filter(|s| s.is_finite()).count(),
        log_likelihood: scores[own],
    })
}

/// Posteriors of every completion of `G - L`; they share one denominator
/// and sum to one.
pub fn completion_posteriors(g: &Graph, gprime: &Graph, link: Link, t: usize) -> Result<Vec<(Link, f64)>> {
    let h = g.without_link(link)?;
    let candidates = completion_candidates(&h);
    let scorer = CompletionScorer::new(&h, gprime, t);
    let mut sc = Scratch::default();
    let scores: Vec<f64> = candidates.iter().map(|l| scorer.score(l.u(), l.v(), &mut sc)).collect();
    let lse = log_sum_exp(&scores);
    Ok(candidates.into_iter().zip(scores).map(|(l, s)| (l, (s - lse).exp())).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct WorstCaseStudy {
    pub t: usize,
    pub seed: u64,
    pub posteriors: Vec<LinkPosterior>,
}

impl WorstCaseStudy {
    /// Posteriors that resolved, in link order.
    pub fn values(&self) -> Vec<f64> {
        self.posteriors.iter().filter_map(|p| p.posterior).collect()
    }

    pub fn fraction(&self, pred: impl Fn(f64) -> bool) -> f64 {
        let v = self.values();
        v.iter().filter(|&&p| pred(p)).count() as f64 / v.len().max(1) as f64
    }
}

/// Perturbs `g` once and evaluates the worst-case posterior of up to
/// `links` uniformly sampled links.
pub fn worstcase_study(g: &Graph, t: usize, links: usize, seed: u64, force: bool) -> Result<WorstCaseStudy> {
    let gprime = transform(g, &PerturbParams::new(t, derive_seed(seed, 1)))?.graph;
    let all = g.links();
    let mut idx = sample_indices(all.len(), links, &mut derived_rng(seed, 2));
    idx.sort_unstable();
    let posteriors = idx
        .into_iter()
        .map(|i| worstcase_posterior(g, &gprime, all[i], t, force))
        .collect::<Result<Vec<_>>>()?;
    Ok(WorstCaseStudy { t, seed, posteriors })
}

/// Which hop count the feature adversary uses for each link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureHop {
    Fixed(usize),
    /// The largest posterior over `k = 1..=k_max`.
    AdversaryBest(usize),
}

impl FeatureHop {
    fn ks(&self) -> Vec<usize> {
        match *self {
            FeatureHop::Fixed(k) => vec![k],
            FeatureHop::AdversaryBest(k) => (1..=k).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FeatureConfig {
    pub t: usize,
    /// Hop counts with tabulated curves.
    pub ks: Vec<usize>,
    pub hop: FeatureHop,
    pub trials: usize,
    /// Non-adjacent pairs sampled for the no-link class.
    pub nonlink_pairs: usize,
    pub seed: u64,
    pub order: NeighborOrder,
}

impl FeatureConfig {
    pub fn new(t: usize, seed: u64) -> FeatureConfig {
        FeatureConfig {
            t,
            ks: (1..=5).collect(),
            hop: FeatureHop::AdversaryBest(5),
            trials: 5,
            nonlink_pairs: 200_000,
            seed,
            order: NeighborOrder::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FeatureCurves {
    pub k: usize,
    pub t: usize,
    pub thresholds: Vec<f64>,
    /// `P(P_AB^k(G') >= x | L_AB)` at each threshold.
    pub ccdf_given_link: Vec<f64>,
    pub ccdf_given_nolink: Vec<f64>,
    pub median_link: f64,
    pub median_nolink: f64,
}

/// Monte-Carlo class-conditional distributions of `P_AB^k(G')`.
#[derive(Debug, Clone)]
pub struct FeatureStudy {
    pub config: FeatureConfig,
    /// `m / C(n, 2)`.
    pub prior: f64,
    ks: Vec<usize>,
    /// Sorted samples per k.
    link_values: Vec<Vec<f64>>,
    nolink_values: Vec<Vec<f64>>,
    /// Per trial, per link, per k.
    observed: Vec<Vec<Vec<f64>>>,
    pub nonlink_sampled: bool,
}

fn ccdf_ge(sorted: &[f64], x: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let below = sorted.partition_point(|&v| v < x);
    (sorted.len() - below) as f64 / sorted.len() as f64
}

fn median(sorted: &[f64]) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => sorted[n / 2],
        n => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    }
}

/// Default CCDF grid: zero, then 10^-6 .. 1 at quarter decades.
pub fn default_thresholds() -> Vec<f64> {
    std::iter::once(0.0).chain((0..=24).map(|i| 10f64.powf(-6.0 + 0.25 * i as f64))).collect()
}

impl FeatureStudy {
    pub fn run(g: &Graph, config: &FeatureConfig) -> Result<FeatureStudy> {
        g.require_connected()?;
        if config.trials < 1 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        let n = g.n();
        let mut ks: Vec<usize> = config.ks.iter().copied().chain(config.hop.ks()).collect();
        ks.sort_unstable();
        ks.dedup();
        if ks.first() == Some(&0) {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let k_max = *ks.last().unwrap();
        let links = g.links();
        let total_pairs = n * (n - 1) / 2;
        let nonlink_total = total_pairs - g.m();
        let nonlink_sampled = nonlink_total > config.nonlink_pairs;
        let nonlinks: Vec<(usize, usize)> = if nonlink_sampled {
            let mut rng = derived_rng(config.seed, 0xfea7);
            let mut picked = std::collections::HashSet::with_capacity(config.nonlink_pairs);
            let mut out = Vec::with_capacity(config.nonlink_pairs);
            while out.len() < config.nonlink_pairs {
                let a = rand::Rng::gen_range(&mut rng, 0..n);
                let b = rand::Rng::gen_range(&mut rng, 0..n);
                if let Some(l) = Link::new(a, b) {
                    if !g.has_link(l) && picked.insert(l) {
                        out.push(l.endpoints());
                    }
                }
            }
            out.sort_unstable();
            out
        } else {
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| !g.has_edge(a, b)).collect()
        };
        let mut by_src_link: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, l) in links.iter().enumerate() {
            by_src_link[l.u()].push((i, l.v()));
        }
        let mut by_src_nolink: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, &(a, b)) in nonlinks.iter().enumerate() {
            by_src_nolink[a].push((i, b));
        }

        let trials: Vec<(Vec<Vec<f64>>, Vec<Vec<f64>>)> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let params = PerturbParams::new(config.t, derive_seed(config.seed, trial as u64)).with_order(config.order);
                let gp = transform(g, &params).expect("connected input").graph;
                let op = Transition::new(&gp);
                let mut lv = vec![vec![0.0; ks.len()]; links.len()];
                let mut nv = vec![vec![0.0; ks.len()]; nonlinks.len()];
                for a in 0..n {
                    if by_src_link[a].is_empty() && by_src_nolink[a].is_empty() {
                        continue;
                    }
                    let rows = op.row_powers(a, k_max);
                    for (ki, &k) in ks.iter().enumerate() {
                        for &(i, b) in &by_src_link[a] {
                            lv[i][ki] = rows[k][b];
                        }
                        for &(i, b) in &by_src_nolink[a] {
                            nv[i][ki] = rows[k][b];
                        }
                    }
                }
                (lv, nv)
            })
            .collect();

        let mut link_values = vec![Vec::new(); ks.len()];
        let mut nolink_values = vec![Vec::new(); ks.len()];
        let mut observed = Vec::with_capacity(trials.len());
        for (lv, nv) in trials {
            for ki in 0..ks.len() {
                link_values[ki].extend(lv.iter().map(|r| r[ki]));
                nolink_values[ki].extend(nv.iter().map(|r| r[ki]));
            }
            observed.push(lv);
        }
        link_values.iter_mut().chain(nolink_values.iter_mut()).for_each(|v| v.sort_by(f64::total_cmp));
        Ok(FeatureStudy {
            config: config.clone(),
            prior: g.m() as f64 / total_pairs as f64,
            ks,
            link_values,
            nolink_values,
            observed,
            nonlink_sampled,
        })
    }

    fn k_index(&self, k: usize) -> Result<usize> {
        self.ks.iter().position(|&x| x == k).ok_or_else(|| Error::InvalidParameter(format!("k = {k} was not tabulated")))
    }

    /// `P(L_AB | P_AB^k(G') >= x)`; `None` when no sample reaches `x`.
    pub fn posterior_at(&self, k: usize, x: f64) -> Result<Option<f64>> {
        let ki = self.k_index(k)?;
        Ok(self.posterior_idx(ki, x))
    }

    fn posterior_idx(&self, ki: usize, x: f64) -> Option<f64> {
        let cl = ccdf_ge(&self.link_values[ki], x);
        let cn = ccdf_ge(&self.nolink_values[ki], x);
        let num = cl * self.prior;
        let den = num + cn * (1.0 - self.prior);
        if den > 0.0 {
            Some(num / den)
        } else {
            None
        }
    }

    pub fn curves(&self, k: usize, thresholds: &[f64]) -> Result<FeatureCurves> {
        let ki = self.k_index(k)?;
        Ok(FeatureCurves {
            k,
            t: self.config.t,
            thresholds: thresholds.to_vec(),
            ccdf_given_link: thresholds.iter().map(|&x| ccdf_ge(&self.link_values[ki], x)).collect(),
            ccdf_given_nolink: thresholds.iter().map(|&x| ccdf_ge(&self.nolink_values[ki], x)).collect(),
            median_link: median(&self.link_values[ki]),
            median_nolink: median(&self.nolink_values[ki]),
        })
    }

    /// Feature posterior of every original link in every trial, each
    /// evaluated at its own observed transition probability.
    pub fn link_posteriors(&self) -> Vec<f64> {
        let kis: Vec<usize> = self.config.hop.ks().iter().map(|&k| self.k_index(k).unwrap()).collect();
        let mut out = Vec::new();
        for trial in &self.observed {
            for vals in trial {
                let best = kis
                    .iter()
                    .filter_map(|&ki| self.posterior_idx(ki, vals[ki]))
                    .fold(f64::NEG_INFINITY, f64::max);
                out.push(best);
            }
        }
        out
    }
}

/// `P(L_AB | P_AB^k(G') >= x)` estimated over `trials` perturbations.
pub fn feature_posterior(g: &Graph, t: usize, k: usize, x: f64, trials: usize, seed: u64) -> Result<Option<f64>> {
    let mut cfg = FeatureConfig::new(t, seed);
    cfg.ks = vec![k];
    cfg.hop = FeatureHop::Fixed(k);
    cfg.trials = trials;
    FeatureStudy::run(g, &cfg)?.posterior_at(k, x)
}

#[derive(Debug, Clone, Serialize)]
pub struct PrivacyFloor {
    pub delta: Option<usize>,
    pub floor: f64,
}

/// Shared state for many [`privacy_floor`] queries on one `(G, G')`.
pub struct FloorContext<'a> {
    g: &'a Graph,
    gprime: &'a Graph,
    k_max: usize,
    vu_max: Vec<f64>,
    density: Vec<Option<f64>>,
}

impl<'a> FloorContext<'a> {
    pub fn new(g: &'a Graph, gprime: &'a Graph, k_max: usize) -> Result<FloorContext<'a>> {
        check_pair(g, gprime)?;
        g.require_connected()?;
        if k_max < 1 {
            return Err(Error::InvalidParameter("k_max must be at least 1".into()));
        }
        let ls: Vec<usize> = (1..=k_max).collect();
        let reports = vu_curves(g, gprime, &ls, &[DistanceKind::VariationSup], VertexSample::All)?;
        let mut vu_max = vec![0.0; k_max + 1];
        for r in reports {
            vu_max[r.l] = r.vu_max;
        }
        Ok(FloorContext { g, gprime, k_max, vu_max, density: vec![None; k_max + 1] })
    }

    pub fn vu_max(&self, k: usize) -> f64 {
        self.vu_max[k]
    }

    /// `m_d / C(n_d, 2)` with `n_d`, `m_d` averaged over `d`-hop balls of `G`.
    pub fn neighborhood_density(&mut self, d: usize) -> f64 {
        if let Some(v) = self.density.get(d).copied().flatten() {
            return v;
        }
        let g = self.g;
        let n = g.n();
        let (nodes, edges): (f64, f64) = (0..n)
            .into_par_iter()
            .map(|v| {
                let members = ball(g, v, d);
                let mut inside = vec![false; n];
                members.iter().for_each(|&x| inside[x as usize] = true);
                let m2: usize = members
                    .iter()
                    .map(|&x| g.neighbors(x as usize).iter().filter(|&&y| inside[y as usize]).count())
                    .sum();
                (members.len() as f64, (m2 / 2) as f64)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (n_bar, m_bar) = (nodes / n as f64, edges / n as f64);
        let pairs = n_bar * (n_bar - 1.0) / 2.0;
        let density = if pairs > 0.0 { (m_bar / pairs).min(1.0) } else { 0.0 };
        if d < self.density.len() {
            self.density[d] = Some(density);
        }
        density
    }

    pub fn floor(&mut self, a: usize, b: usize) -> Result<PrivacyFloor> {
        if a >= self.g.n() || b >= self.g.n() {
            return Err(Error::VertexOutOfRange(a.max(b)));
        }
        let rows = Transition::new(self.gprime).row_powers(a, self.k_max);
        let delta = (1..=self.k_max).find(|&k| rows[k][b] - self.vu_max[k] > 0.0);
        Ok(match delta {
            Some(d) => PrivacyFloor { delta: Some(d), floor: self.neighborhood_density(d) },
            None => PrivacyFloor { delta: None, floor: 0.0 },
        })
    }
}

/// Lower bound on `P(L_AB | G')` implied by the utility of `G'`.
pub fn privacy_floor(g: &Graph, gprime: &Graph, a: usize, b: usize, k_max: usize) -> Result<PrivacyFloor> {
    FloorContext::new(g, gprime, k_max)?.floor(a, b)
}
