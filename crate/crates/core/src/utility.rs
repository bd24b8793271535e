//! Vertex utility: how far the `l`-hop walk distributions of a perturbed
//! graph drift from the original's, plus executable checks of the bounds
//! that tie that drift to mixing time and the spectral gap.

use rayon::prelude::*;
use serde::Serialize;

use crate::distance::DistanceKind;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::perturb::{transform, PerturbParams};
use crate::rng::derive_seed;
use crate::spectral::{adjacency_top_eigenvalue, slem};
use crate::walk::{mixing_time, Transition, VertexSample};

#[derive(Debug, Clone, Serialize)]
pub struct UtilityReport {
    pub l: usize,
    pub kind: DistanceKind,
    pub vertices: Vec<usize>,
    /// Distances aligned with `vertices`.
    pub per_vertex: Vec<f64>,
    pub vu_mean: f64,
    pub vu_max: f64,
    pub sampled: bool,
}

fn check_pair(g: &Graph, gp: &Graph) -> Result<()> {
    if g.n() != gp.n() {
        return Err(Error::VertexSetMismatch { left: g.n(), right: gp.n() });
    }
    Ok(())
}

pub fn vertex_utility(g: &Graph, gp: &Graph, v: usize, l: usize, kind: DistanceKind) -> Result<f64> {
    check_pair(g, gp)?;
    if v >= g.n() {
        return Err(Error::VertexOutOfRange(v));
    }
    let p = Transition::new(g).row_power(v, l);
    let q = Transition::new(gp).row_power(v, l);
    Ok(kind.eval(&p, &q))
}

pub fn vu_aggregate(g: &Graph, gp: &Graph, l: usize, kind: DistanceKind, sample: VertexSample) -> Result<UtilityReport> {
    Ok(vu_curves(g, gp, &[l], &[kind], sample)?.remove(0))
}

/// Utility reports for every `(l, kind)` combination, walking each start
/// vertex once up to `max(ls)`. Reports are ordered by `l`, then `kind`.
pub fn vu_curves(
    g: &Graph,
    gp: &Graph,
    ls: &[usize],
    kinds: &[DistanceKind],
    sample: VertexSample,
) -> Result<Vec<UtilityReport>> {
    check_pair(g, gp)?;
    if ls.is_empty() || kinds.is_empty() {
        return Err(Error::InvalidParameter("need at least one l and one distance kind".into()));
    }
    let n = g.n();
    let (starts, sampled) = sample.resolve(n);
    let max_l = *ls.iter().max().unwrap();
    let a = Transition::new(g);
    let b = Transition::new(gp);
    let width = ls.len() * kinds.len();

    // per start: distances for each (l, kind)
    let per_start: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|&v| {
            let mut out = vec![0.0; width];
            let mut x = vec![0.0; n];
            let mut y = vec![0.0; n];
            let mut buf = vec![0.0; n];
            x[v] = 1.0;
            y[v] = 1.0;
            for step in 0..=max_l {
                if step > 0 {
                    a.step_into(&x, &mut buf);
                    std::mem::swap(&mut x, &mut buf);
                    b.step_into(&y, &mut buf);
                    std::mem::swap(&mut y, &mut buf);
                }
                for (li, &l) in ls.iter().enumerate() {
                    if l == step {
                        for (ki, kind) in kinds.iter().enumerate() {
                            out[li * kinds.len() + ki] = kind.eval(&x, &y);
                        }
                    }
                }
            }
            out
        })
        .collect();

    let mut reports = Vec::with_capacity(width);
    for (li, &l) in ls.iter().enumerate() {
        for (ki, &kind) in kinds.iter().enumerate() {
            let col = li * kinds.len() + ki;
            let per_vertex: Vec<f64> = per_start.iter().map(|r| r[col]).collect();
            let vu_max = per_vertex.iter().fold(0.0f64, |m, &d| m.max(d));
            let vu_mean = per_vertex.iter().sum::<f64>() / per_vertex.len().max(1) as f64;
            reports.push(UtilityReport {
                l,
                kind,
                vertices: starts.clone(),
                per_vertex,
                vu_mean,
                vu_max,
                sampled,
            });
        }
    }
    Ok(reports)
}

/// `VU_max` under the sup-form variation distance over every vertex.
pub fn vu_max_sup(g: &Graph, gp: &Graph, l: usize) -> Result<f64> {
    Ok(vu_aggregate(g, gp, l, DistanceKind::VariationSup, VertexSample::All)?.vu_max)
}

fn exact_or_sampled(n: usize) -> VertexSample {
    VertexSample::auto(n, 100, 0x7e57)
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingBoundCheck {
    pub epsilon: f64,
    pub tau_g: usize,
    pub vu_max: f64,
    /// `epsilon + vu_max`.
    pub epsilon_prime: f64,
    /// Mixing time of the perturbed graph at `epsilon_prime`.
    pub tau_gp: Option<usize>,
    /// `epsilon_prime >= 1`: every graph satisfies the bound.
    pub vacuous: bool,
    pub pass: bool,
    /// `sup_i |pi_i - pi'_i|`, the slack the argument ignores.
    pub stationary_gap: f64,
    pub sampled: bool,
}

/// `tau_{G'}(eps + VU_max(G, G', tau_G(eps))) <= tau_G(eps)`.
pub fn check_theorem_mixing(g: &Graph, gp: &Graph, epsilon: f64) -> Result<MixingBoundCheck> {
    check_pair(g, gp)?;
    gp.require_connected()?;
    let sample = exact_or_sampled(g.n());
    let mg = mixing_time(g, epsilon, sample)?;
    let tau_g = mg.tau_or_err()?;
    let vu_max = vu_aggregate(g, gp, tau_g, DistanceKind::VariationSup, sample)?.vu_max;
    let epsilon_prime = epsilon + vu_max;
    let pi = crate::walk::stationary_unchecked(g);
    let pi_p = crate::walk::stationary_unchecked(gp);
    let stationary_gap = crate::distance::variation_sup(&pi, &pi_p);
    if epsilon_prime >= 1.0 {
        return Ok(MixingBoundCheck {
            epsilon,
            tau_g,
            vu_max,
            epsilon_prime,
            tau_gp: None,
            vacuous: true,
            pass: true,
            stationary_gap,
            sampled: mg.sampled,
        });
    }
    let mgp = mixing_time(gp, epsilon_prime, sample)?;
    let pass = matches!(mgp.tau, Some(tau) if tau <= tau_g);
    Ok(MixingBoundCheck {
        epsilon,
        tau_g,
        vu_max,
        epsilon_prime,
        tau_gp: mgp.tau,
        vacuous: false,
        pass,
        stationary_gap,
        sampled: mg.sampled || mgp.sampled,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SlemBoundCheck {
    pub epsilon: f64,
    pub tau_g: usize,
    pub vu_max: f64,
    pub lower: f64,
    pub upper: f64,
    pub mu_gp: f64,
    pub bipartite: bool,
    /// `2 (epsilon + vu_max) >= 1`: the upper bound is undefined.
    pub vacuous: bool,
    pub within: bool,
}

/// Bracket on the perturbed SLEM from the original mixing time:
/// `1 - (ln n + ln 1/(eps+VU)) / tau <= mu' <= 2 tau / (2 tau + ln 1/(2 eps + 2 VU))`.
pub fn check_theorem_slem(g: &Graph, gp: &Graph, epsilon: f64) -> Result<SlemBoundCheck> {
    check_pair(g, gp)?;
    gp.require_connected()?;
    let sample = exact_or_sampled(g.n());
    let tau_g = mixing_time(g, epsilon, sample)?.tau_or_err()?;
    let vu_max = vu_aggregate(g, gp, tau_g, DistanceKind::VariationSup, sample)?.vu_max;
    let e = epsilon + vu_max;
    let (lower, upper) = slem_bracket(g.n(), tau_g, e);
    let report = slem(gp)?;
    let vacuous = 2.0 * e >= 1.0;
    let within = !report.bipartite && report.mu >= lower && (vacuous || report.mu <= upper);
    Ok(SlemBoundCheck {
        epsilon,
        tau_g,
        vu_max,
        lower,
        upper,
        mu_gp: report.mu,
        bipartite: report.bipartite,
        vacuous,
        within,
    })
}

/// Lower and upper SLEM bounds for mixing time `tau` at threshold `e`.
/// The upper bound is `NaN` when `2e >= 1`.
pub fn slem_bracket(n: usize, tau: usize, e: f64) -> (f64, f64) {
    let tau = tau.max(1) as f64;
    let lower = 1.0 - ((n as f64).ln() + (1.0 / e).ln()) / tau;
    let upper = if 2.0 * e < 1.0 { 2.0 * tau / (2.0 * tau + (1.0 / (2.0 * e)).ln()) } else { f64::NAN };
    (lower, upper)
}

fn perturbed_trials(g: &Graph, params: &PerturbParams, trials: usize) -> Result<Vec<Graph>> {
    if trials < 2 {
        return Err(Error::InvalidParameter("need at least two trials".into()));
    }
    (0..trials)
        .into_par_iter()
        .map(|k| Ok(transform(g, &params.with_seed(derive_seed(params.seed, k as u64)))?.graph))
        .collect()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeCheck {
    pub t: usize,
    pub trials: usize,
    /// Vertices with degree at least 2.
    pub checked: usize,
    /// Checked vertices whose mean perturbed degree lies more than three
    /// standard errors from the original.
    pub violations: Vec<usize>,
    pub mean_degree: Vec<f64>,
    pub std_error: Vec<f64>,
    pub pass: bool,
}

/// Expected degree preservation: per-vertex Monte-Carlo mean of the
/// perturbed degree against the original.
pub fn check_degree_preservation(g: &Graph, params: &PerturbParams, trials: usize) -> Result<DegreeCheck> {
    let graphs = perturbed_trials(g, params, trials)?;
    let n = g.n();
    let mut mean_degree = Vec::with_capacity(n);
    let mut std_error = Vec::with_capacity(n);
    let mut violations = Vec::new();
    let mut checked = 0;
    for v in 0..n {
        let ds: Vec<f64> = graphs.iter().map(|h| h.degree(v) as f64).collect();
        let (mean, se) = mean_and_se(&ds);
        let d = g.degree(v) as f64;
        if g.degree(v) >= 2 {
            checked += 1;
            if (mean - d).abs() > 3.0 * se + 1e-12 {
                violations.push(v);
            }
        }
        mean_degree.push(mean);
        std_error.push(se);
    }
    Ok(DegreeCheck { t: params.t, trials, checked, pass: violations.is_empty(), violations, mean_degree, std_error })
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingBracketCheck {
    pub epsilon: f64,
    pub t: usize,
    pub tau_g: usize,
    pub lower: f64,
    pub mean_tau_gp: f64,
    pub std_error: f64,
    /// Trials whose perturbed graph was connected.
    pub connected_trials: usize,
    pub per_trial: Vec<Option<usize>>,
    pub pass: bool,
}

/// `tau_G / t <= mean tau_{G'} <= tau_G` over connected perturbed graphs.
pub fn check_mixing_bracket(g: &Graph, params: &PerturbParams, epsilon: f64, trials: usize) -> Result<MixingBracketCheck> {
    let sample = exact_or_sampled(g.n());
    let tau_g = mixing_time(g, epsilon, sample)?.tau_or_err()?;
    let graphs = perturbed_trials(g, params, trials)?;
    let per_trial: Vec<Option<usize>> = graphs
        .par_iter()
        .map(|h| if h.is_connected() { mixing_time(h, epsilon, sample).ok().and_then(|m| m.tau) } else { None })
        .collect();
    let taus: Vec<f64> = per_trial.iter().flatten().map(|&x| x as f64).collect();
    let (mean, se) = if taus.len() >= 2 { mean_and_se(&taus) } else { (f64::NAN, f64::NAN) };
    let lower = tau_g as f64 / params.t as f64;
    Ok(MixingBracketCheck {
        epsilon,
        t: params.t,
        tau_g,
        lower,
        mean_tau_gp: mean,
        std_error: se,
        connected_trials: taus.len(),
        pass: mean >= lower && mean <= tau_g as f64,
        per_trial,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenBracketCheck {
    pub t: usize,
    pub lower: f64,
    pub upper: f64,
    pub mean_lambda: f64,
    pub std_error: f64,
    pub connected_trials: usize,
    pub pass: bool,
}

/// Mean top adjacency eigenvalue of `G'` against
/// `[max(d_avg, sqrt d_max), d_max]` computed on `G`.
pub fn check_eigenvalue_bracket(g: &Graph, params: &PerturbParams, trials: usize) -> Result<EigenBracketCheck> {
    let graphs = perturbed_trials(g, params, trials)?;
    let lambdas: Vec<f64> = graphs
        .par_iter()
        .filter(|h| h.is_connected())
        .map(adjacency_top_eigenvalue)
        .collect::<Result<_>>()?;
    let (mean, se) = if lambdas.len() >= 2 { mean_and_se(&lambdas) } else { (f64::NAN, f64::NAN) };
    let d_max = g.max_degree() as f64;
    let lower = g.average_degree().max(d_max.sqrt());
    Ok(EigenBracketCheck {
        t: params.t,
        lower,
        upper: d_max,
        mean_lambda: mean,
        std_error: se,
        connected_trials: lambdas.len(),
        pass: mean >= lower - 3.0 * se && mean <= d_max + 3.0 * se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{ba_generate, GenSpec};

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)])
    }

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)])
    }

    #[test]
    fn identical_graphs_have_zero_utility_loss() {
        let g = ba_generate(&GenSpec::new(60, 2, 1)).unwrap();
        for kind in DistanceKind::STANDARD_KINDS {
            let r = vu_aggregate(&g, &g, 4, kind, VertexSample::All).unwrap();
            assert_eq!(r.vu_max, 0.0);
            assert_eq!(r.vu_mean, 0.0);
        }
    }

    #[test]
    fn triangle_versus_path() {
        let k = DistanceKind::VariationSup;
        assert_eq!(vertex_utility(&triangle(), &path3(), 1, 1, k).unwrap(), 0.0);
        assert!((vertex_utility(&triangle(), &path3(), 0, 1, k).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn vertex_set_mismatch() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        assert!(matches!(
            vertex_utility(&triangle(), &g, 0, 1, DistanceKind::Hellinger),
            Err(Error::VertexSetMismatch { .. })
        ));
    }

    #[test]
    fn curves_agree_with_single_evaluations() {
        let g = ba_generate(&GenSpec::new(80, 3, 2)).unwrap();
        let gp = transform(&g, &PerturbParams::new(3, 5)).unwrap().graph;
        let ls = [1, 4, 7];
        let reports = vu_curves(&g, &gp, &ls, &DistanceKind::STANDARD_KINDS, VertexSample::All).unwrap();
        assert_eq!(reports.len(), 9);
        for r in &reports {
            for (&v, &d) in r.vertices.iter().zip(&r.per_vertex) {
                assert_eq!(d, vertex_utility(&g, &gp, v, r.l, r.kind).unwrap());
            }
            assert!(r.vu_mean <= r.vu_max);
        }
    }

    #[test]
    fn full_max_dominates_sampled_max() {
        let g = ba_generate(&GenSpec::new(120, 3, 4)).unwrap();
        let gp = transform(&g, &PerturbParams::new(4, 1)).unwrap().graph;
        let full = vu_aggregate(&g, &gp, 3, DistanceKind::Hellinger, VertexSample::All).unwrap();
        let part = vu_aggregate(&g, &gp, 3, DistanceKind::Hellinger, VertexSample::Sample { k: 20, seed: 3 }).unwrap();
        assert!(part.sampled);
        assert!(part.vu_max <= full.vu_max);
    }

    #[test]
    fn mixing_bound_on_identical_graphs() {
        let g = ba_generate(&GenSpec::new(50, 2, 9)).unwrap();
        let c = check_theorem_mixing(&g, &g, 0.01).unwrap();
        assert_eq!(c.vu_max, 0.0);
        assert_eq!(c.tau_gp, Some(c.tau_g));
        assert!(c.pass && !c.vacuous);
    }

    #[test]
    fn slem_bracket_is_ordered() {
        for n in [10, 500, 5000] {
            for tau in [1, 3, 10, 100] {
                for e in [0.001, 0.01, 0.1, 0.3] {
                    let (lo, hi) = slem_bracket(n, tau, e);
                    assert!(lo <= hi, "n={n} tau={tau} e={e}");
                }
            }
        }
        assert!(slem_bracket(10, 5, 0.6).1.is_nan());
    }

    #[test]
    fn slem_self_consistency() {
        let g = ba_generate(&GenSpec::new(40, 3, 2)).unwrap();
        let c = check_theorem_slem(&g, &g, 0.01).unwrap();
        assert!(c.within, "{c:?}");
    }
}
