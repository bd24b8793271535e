//! Command-line front end. Every subcommand writes its artifacts plus a JSON
//! sidecar holding the full run configuration.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::bayes::{default_thresholds, worstcase_study, FeatureConfig, FeatureHop, FeatureStudy};
use crate::chord::{reliability_experiment, TrustModel};
use crate::distance::DistanceKind;
use crate::error::{Error, Result};
use crate::gen::{ba_generate, GenSpec};
use crate::graph::{load_edge_list, Graph};
use crate::perturb::{transform, NeighborOrder, PerturbParams, DEFAULT_MAX_TRIES};
use crate::report::{write_artifact, Table};
use crate::risk::{sample_links, se_sweep, si_sweep};
use crate::rng::derive_seed;
use crate::row;
use crate::spectral::slem;
use crate::sybil::{
    attach_sybil_region, attack_edge_growth, required_route_length, sybillimit_accept_rates, AcceptRates, AttackGraph,
    SybilLimitConfig, SybilModel,
};
use crate::utility::{
    check_degree_preservation, check_eigenvalue_bracket, check_mixing_bracket, check_theorem_mixing, check_theorem_slem,
    vu_curves,
};
use crate::walk::{mixing_time, VertexSample};

#[derive(Debug, Parser, Serialize)]
#[command(name = "linkveil", version, about = "Random-walk link perturbation experiments")]
pub struct Cli {
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, env = "LINKVEIL_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Directory for artifacts.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dataset {
    FacebookLinks,
    FacebookInteractions,
}

impl Dataset {
    fn file_stems(self) -> &'static [&'static str] {
        match self {
            Dataset::FacebookLinks => &["facebook-links.txt.anon", "facebook-links.txt", "facebook-links.el"],
            Dataset::FacebookInteractions => &["facebook-wall.txt.anon", "facebook-wall.txt", "facebook-interactions.el"],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Dataset::FacebookLinks => "facebook-links",
            Dataset::FacebookInteractions => "facebook-interactions",
        }
    }
}

/// Where the input graph comes from: a file, a named dataset, or a
/// synthetic preferential-attachment graph.
#[derive(Debug, Clone, Args, Serialize)]
pub struct GraphInput {
    /// Edge-list file.
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Named dataset looked up under --data-dir; missing files fall back to a
    /// synthetic graph.
    #[arg(long, value_enum, conflicts_with = "input")]
    pub dataset: Option<Dataset>,
    #[arg(long, env = "LINKVEIL_DATA_DIR", default_value = "data")]
    pub data_dir: PathBuf,
    /// Vertices of the synthetic graph (subcommand default when omitted).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub attach: usize,
    /// Seed of the synthetic graph.
    #[arg(long, default_value_t = 7)]
    pub graph_seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PerturbFlags {
    /// Walk attempts per slot before skipping it.
    #[arg(long = "M", alias = "max-tries", default_value_t = DEFAULT_MAX_TRIES)]
    pub max_tries: usize,
    #[arg(long, value_enum, default_value = "shuffled")]
    pub neighbor_order: OrderArg,
    /// Same as --neighbor-order shuffled.
    #[arg(long, conflicts_with = "neighbor_order")]
    pub shuffle_neighbors: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderArg {
    Shuffled,
    Sorted,
}

impl PerturbFlags {
    fn params(&self, t: usize, seed: u64) -> PerturbParams {
        let order = match (self.shuffle_neighbors, self.neighbor_order) {
            (true, _) | (false, OrderArg::Shuffled) => NeighborOrder::Shuffled,
            (false, OrderArg::Sorted) => NeighborOrder::Sorted,
        };
        PerturbParams::new(t, seed).with_max_tries(self.max_tries).with_order(order)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KindArg {
    VariationSup,
    Hellinger,
    JensenShannonPaper,
    HalfL1,
    JensenShannonMidpoint,
}

impl From<KindArg> for DistanceKind {
    fn from(k: KindArg) -> DistanceKind {
        match k {
            KindArg::VariationSup => DistanceKind::VariationSup,
            KindArg::Hellinger => DistanceKind::Hellinger,
            KindArg::JensenShannonPaper => DistanceKind::JensenShannonPaper,
            KindArg::HalfL1 => DistanceKind::HalfL1,
            KindArg::JensenShannonMidpoint => DistanceKind::JensenShannonMidpoint,
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Generate a preferential-attachment graph.
    Gen {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        attach: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Perturb a graph and write the result as an edge list.
    Perturb {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value_t = 5)]
        t: usize,
        #[command(flatten)]
        perturb: PerturbFlags,
        /// Write vertex labels from the input file instead of dense ids.
        #[arg(long)]
        original_labels: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vertex utility of perturbed graphs over t and walk length l.
    Utility {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 5, 10])]
        t: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![5, 10, 15, 20])]
        l: Vec<usize>,
        #[arg(long, value_delimiter = ',', value_enum, default_values = ["jensen-shannon-paper", "hellinger", "variation-sup"])]
        distance: Vec<KindArg>,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Start vertices averaged over; all when omitted and n <= 5000.
        #[arg(long)]
        sample: Option<usize>,
        #[command(flatten)]
        perturb: PerturbFlags,
    },
    /// Mixing time of original and perturbed graphs.
    Mixing {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 5, 10])]
        t: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.01, 0.05, 0.1, 0.25])]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long)]
        sample: Option<usize>,
        #[command(flatten)]
        perturb: PerturbFlags,
    },
    /// Second largest eigenvalue modulus of original and perturbed graphs.
    Slem {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 5, 10])]
        t: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[command(flatten)]
        perturb: PerturbFlags,
    },
    /// Posterior of sampled links for an adversary who knows everything but
    /// the link.
    BayesWorstcase {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 5])]
        t: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        links: usize,
        /// Run above the vertex-count guard.
        #[arg(long)]
        force: bool,
    },
    /// Posterior from the k-hop transition-probability feature.
    BayesFeature {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 5])]
        t: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2, 3, 4, 5])]
        k: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 200_000)]
        nonlink_pairs: usize,
        /// Fix the adversary's hop count instead of taking the best k.
        #[arg(long)]
        fixed_k: Option<usize>,
    },
    /// Structural-impact bound of sampled links.
    Si {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 5, 10])]
        t: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        links: usize,
    },
    /// Structural-equivalence anonymity of sampled links.
    Se {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 5, 10])]
        t: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1])]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        links: usize,
        #[arg(long, default_value_t = crate::risk::DEFAULT_SE_CAP)]
        cap: usize,
    },
    /// Honest acceptance against route length, and attack-edge growth.
    Sybillimit {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value_t = 10)]
        t: usize,
        #[arg(long, default_value_t = 40)]
        w_max: usize,
        /// Perturbed topologies averaged in the acceptance sweep.
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 100)]
        sybil_n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![10, 50, 100])]
        g: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        growth_trials: usize,
        #[arg(long, default_value_t = 4.0)]
        r0: f64,
        #[arg(long, default_value_t = 100)]
        verifiers: usize,
        #[arg(long, default_value_t = 1.0)]
        balance_a: f64,
        #[arg(long, default_value_t = 0.98)]
        target: f64,
        #[command(flatten)]
        perturb: PerturbFlags,
    },
    /// Lookup reliability of social routing over a Chord ring.
    Sprout {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_delimiter = ',', default_values_t = vec![3, 5, 10])]
        t: Vec<usize>,
        #[arg(long, default_value_t = 2000)]
        lookups: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0.95)]
        f: f64,
        #[arg(long, default_value_t = 0.05)]
        decrement: f64,
        #[arg(long, default_value_t = 0.6)]
        floor: f64,
        #[command(flatten)]
        perturb: PerturbFlags,
    },
    /// Executable checks of the mixing, spectral, degree and eigenvalue bounds.
    VerifyTheorems {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value_t = 5)]
        t: usize,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[command(flatten)]
        perturb: PerturbFlags,
    },
}

/// Exit code for an error: 1 for bad input, 2 for internal failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. } | Error::NotNormalized { .. } | Error::LengthMismatch { .. } | Error::Json(_) => 2,
        _ => 1,
    }
}

/// Parses `argv` and runs one subcommand, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    notices: Vec<String>,
    written: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn notice(&mut self, msg: String) {
        eprintln!("NOTICE: {msg}");
        self.notices.push(msg);
    }

    fn write<S: Serialize>(&mut self, name: &str, body: &str, summary: &S) -> Result<()> {
        let p = write_artifact(&self.cli.out_dir, name, body, self.cli, summary, &self.notices)?;
        self.written.push(p);
        Ok(())
    }

    fn table<S: Serialize>(&mut self, name: &str, table: &Table, summary: &S) -> Result<()> {
        self.write(name, &table.to_csv(), summary)
    }

    /// Loads the input graph, restricted to its largest component when the
    /// subcommand needs an ergodic walk.
    fn graph(&mut self, input: &GraphInput, default_n: usize, connected: bool) -> Result<Graph> {
        let synthetic = |n: usize| ba_generate(&GenSpec::new(n, input.attach, input.graph_seed));
        let n = input.n.unwrap_or(default_n);
        let path = match (&input.input, input.dataset) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(ds)) => {
                let found = ds.file_stems().iter().map(|s| input.data_dir.join(s)).find(|p| p.is_file());
                if found.is_none() {
                    self.notice(format!(
                        "dataset {} not found under {}; using a synthetic preferential-attachment substitute (n={n}, attach={}, seed={})",
                        ds.name(),
                        input.data_dir.display(),
                        input.attach,
                        input.graph_seed
                    ));
                }
                found
            }
            (None, None) => None,
        };
        let Some(path) = path else { return synthetic(n) };
        let text = fs::read_to_string(&path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        let loaded = load_edge_list(&text)?;
        if loaded.warnings.total() > 0 {
            self.notice(format!(
                "{}: dropped {} duplicate edges and {} self-loops",
                path.display(),
                loaded.warnings.duplicate_edges,
                loaded.warnings.self_loops
            ));
        }
        let g = loaded.graph;
        if connected && !g.is_connected() {
            let (lcc, _) = g.largest_component();
            self.notice(format!("{}: using the largest component ({} of {} vertices)", path.display(), lcc.n(), g.n()));
            return Ok(lcc);
        }
        Ok(g)
    }
}

fn sample_arg(n: usize, sample: Option<usize>, seed: u64) -> VertexSample {
    match sample {
        Some(k) => VertexSample::Sample { k, seed: derive_seed(seed, 0x5a) },
        None => VertexSample::auto(n, 100, derive_seed(seed, 0x5a)),
    }
}

fn stem_of(path: Option<&Path>) -> String {
    path.and_then(|p| p.file_stem()).map_or_else(|| "graph".to_string(), |s| s.to_string_lossy().into_owned())
}

fn perturbed_batch(g: &Graph, t: usize, flags: &PerturbFlags, trials: usize, seed: u64) -> Result<Vec<Graph>> {
    (0..trials)
        .into_par_iter()
        .map(|k| Ok(transform(g, &flags.params(t, derive_seed(seed, (t as u64) << 32 | k as u64)))?.graph))
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    let mut ctx = Ctx { cli, notices: Vec::new(), written: Vec::new() };
    let seed = cli.seed;
    match &cli.command {
        Command::Gen { n, attach, out } => {
            let g = ba_generate(&GenSpec::new(*n, *attach, seed))?;
            let name = out
                .as_ref()
                .map_or_else(|| format!("ba_n{n}_a{attach}_s{seed}.el"), |p| p.to_string_lossy().into_owned());
            ctx.write(&name, &g.to_edge_list(false), &json!({"n": g.n(), "m": g.m(), "attach": attach}))?;
        }

        Command::Perturb { input, t, perturb, original_labels, out } => {
            let g = ctx.graph(input, 500, true)?;
            let params = perturb.params(*t, seed);
            let res = transform(&g, &params)?;
            let gp = res.graph.with_labels_of(&g);
            let name = out.as_ref().map_or_else(
                || format!("{}_t{t}.el", stem_of(input.input.as_deref())),
                |p| p.to_string_lossy().into_owned(),
            );
            let summary = json!({
                "t": t,
                "M": params.max_tries,
                "seed": seed,
                "skipped_slots": res.skipped_slots,
                "m_prime": gp.m(),
                "m": g.m(),
                "n": g.n(),
            });
            ctx.write(&name, &gp.to_edge_list(*original_labels), &summary)?;
        }

        Command::Utility { input, t, l, distance, trials, sample, perturb } => {
            let g = ctx.graph(input, 2000, true)?;
            let kinds: Vec<DistanceKind> = distance.iter().map(|&k| k.into()).collect();
            let vs = sample_arg(g.n(), *sample, seed);
            let mut table = Table::new(&["t", "l", "distance", "vu_mean", "vu_max", "trials"]);
            for &tt in t {
                let graphs = perturbed_batch(&g, tt, perturb, *trials, seed)?;
                let reports: Vec<_> =
                    graphs.iter().map(|gp| vu_curves(&g, gp, l, &kinds, vs)).collect::<Result<Vec<_>>>()?;
                for idx in 0..reports[0].len() {
                    let r0 = &reports[0][idx];
                    let means: Vec<f64> = reports.iter().map(|r| r[idx].vu_mean).collect();
                    let maxes: Vec<f64> = reports.iter().map(|r| r[idx].vu_max).collect();
                    table.push(row![tt, r0.l, r0.kind.name(), mean(&means), mean(&maxes), *trials]);
                }
            }
            ctx.table("fig3_utility_js.csv", &table, &json!({"n": g.n(), "m": g.m()}))?;
        }

        Command::Mixing { input, t, eps, trials, sample, perturb } => {
            let g = ctx.graph(input, 1000, true)?;
            let vs = sample_arg(g.n(), *sample, seed);
            let mut table = Table::new(&["topology", "t", "epsilon", "tau_mean", "tau_min", "tau_max", "trials_used"]);
            for &e in eps {
                let tau = mixing_time(&g, e, vs)?.tau;
                let v: Vec<f64> = tau.iter().map(|&x| x as f64).collect();
                table.push(row!["original", Option::<usize>::None, e, mean(&v), tau, tau, v.len()]);
            }
            for &tt in t {
                let graphs = perturbed_batch(&g, tt, perturb, *trials, seed)?;
                for &e in eps {
                    let taus: Vec<usize> = graphs
                        .par_iter()
                        .filter(|h| h.is_connected())
                        .map(|h| mixing_time(h, e, vs).map(|m| m.tau))
                        .collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .flatten()
                        .collect();
                    let v: Vec<f64> = taus.iter().map(|&x| x as f64).collect();
                    table.push(row![
                        format!("t={tt}"),
                        tt,
                        e,
                        mean(&v),
                        taus.iter().min().copied(),
                        taus.iter().max().copied(),
                        taus.len()
                    ]);
                }
            }
            ctx.table("fig5_mixing.csv", &table, &json!({"n": g.n(), "m": g.m()}))?;
        }

        Command::Slem { input, t, trials, perturb } => {
            let g = ctx.graph(input, 1000, true)?;
            let mut table = Table::new(&["topology", "t", "mu_mean", "mu_min", "mu_max", "trials_used"]);
            let mu = slem(&g)?.mu;
            table.push(row!["original", Option::<usize>::None, mu, mu, mu, 1usize]);
            for &tt in t {
                let graphs = perturbed_batch(&g, tt, perturb, *trials, seed)?;
                let mus: Vec<f64> = graphs
                    .par_iter()
                    .filter(|h| h.is_connected())
                    .map(|h| slem(h).map(|r| r.mu))
                    .collect::<Result<_>>()?;
                let lo = mus.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = mus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                table.push(row![format!("t={tt}"), tt, mean(&mus), lo, hi, mus.len()]);
            }
            ctx.table("fig6_slem.csv", &table, &json!({"n": g.n(), "m": g.m()}))?;
        }

        Command::BayesWorstcase { input, t, links, force } => {
            let g = ctx.graph(input, 500, true)?;
            let mut table = Table::new(&["t", "u", "v", "posterior", "candidates", "feasible_candidates"]);
            let mut summary = Vec::new();
            for &tt in t {
                let study = worstcase_study(&g, tt, *links, derive_seed(seed, tt as u64), *force)?;
                for p in &study.posteriors {
                    table.push(row![tt, p.link.u(), p.link.v(), p.posterior, p.candidates, p.feasible_candidates]);
                }
                summary.push(json!({
                    "t": tt,
                    "fraction_le_0.1": study.fraction(|p| p <= 0.1),
                    "fraction_ge_0.9": study.fraction(|p| p >= 0.9),
                    "fraction_lt_0.01": study.fraction(|p| p < 0.01),
                }));
            }
            ctx.table("wc_prior_fig.csv", &table, &summary)?;
        }

        Command::BayesFeature { input, t, k, trials, nonlink_pairs, fixed_k } => {
            let g = ctx.graph(input, 500, true)?;
            let thresholds = default_thresholds();
            let mut table = Table::new(&["t", "k", "threshold", "ccdf_given_link", "ccdf_given_nolink", "posterior"]);
            let mut summary = Vec::new();
            for &tt in t {
                let mut cfg = FeatureConfig::new(tt, derive_seed(seed, tt as u64));
                cfg.ks = k.clone();
                cfg.trials = *trials;
                cfg.nonlink_pairs = *nonlink_pairs;
                if let Some(fk) = fixed_k {
                    cfg.hop = FeatureHop::Fixed(*fk);
                }
                let study = FeatureStudy::run(&g, &cfg)?;
                let mut medians = Vec::new();
                for &kk in k {
                    let c = study.curves(kk, &thresholds)?;
                    for (i, &x) in thresholds.iter().enumerate() {
                        table.push(row![
                            tt,
                            kk,
                            x,
                            c.ccdf_given_link[i],
                            c.ccdf_given_nolink[i],
                            study.posterior_at(kk, x)?
                        ]);
                    }
                    medians.push(json!({"k": kk, "median_link": c.median_link, "median_nolink": c.median_nolink}));
                }
                let post = study.link_posteriors();
                let low = post.iter().filter(|&&p| p <= 0.1).count() as f64 / post.len().max(1) as f64;
                summary.push(json!({"t": tt, "prior": study.prior, "fraction_links_le_0.1": low, "medians": medians}));
            }
            ctx.table("fig12_bayes.csv", &table, &summary)?;
        }

        Command::Si { input, t, links } => {
            let g = ctx.graph(input, 1000, true)?;
            let sample = sample_links(&g, *links, seed);
            let mut table = Table::new(&["t", "u", "v", "epsilon_bound", "defined"]);
            for &tt in t {
                for r in si_sweep(&g, &sample, tt)? {
                    table.push(row![tt, r.link.u(), r.link.v(), if r.defined { Some(r.epsilon_bound) } else { None }, r.defined]);
                }
            }
            ctx.table("fig13_si.csv", &table, &json!({"n": g.n(), "m": g.m(), "links": sample.len()}))?;
        }

        Command::Se { input, t, eps, links, cap } => {
            let g = ctx.graph(input, 1000, true)?;
            let sample = sample_links(&g, *links, seed);
            let mut table = Table::new(&["t", "epsilon", "u", "v", "k", "examined", "exhausted"]);
            for &tt in t {
                for &e in eps {
                    for r in se_sweep(&g, &sample, tt, e, *cap, derive_seed(seed, tt as u64))? {
                        table.push(row![tt, e, r.link.u(), r.link.v(), r.k, r.candidates_examined, r.exhausted]);
                    }
                }
            }
            ctx.table("fig14_se.csv", &table, &json!({"n": g.n(), "m": g.m(), "cap": cap}))?;
        }

        Command::Sybillimit {
            input,
            t,
            w_max,
            trials,
            sybil_n,
            g: gs,
            growth_trials,
            r0,
            verifiers,
            balance_a,
            target,
            perturb,
        } => {
            let g = ctx.graph(input, 1000, true)?;
            let ws: Vec<usize> = (1..=*w_max).collect();
            let cfg = SybilLimitConfig { r0: *r0, verifiers: *verifiers, balance_a: *balance_a, seed };
            let original = sybillimit_accept_rates(&AttackGraph::honest_only(g.clone()), &ws, &cfg)?;
            let perturbed: Vec<Vec<AcceptRates>> = perturbed_batch(&g, *t, perturb, *trials, seed)?
                .into_iter()
                .map(|h| sybillimit_accept_rates(&AttackGraph::honest_only(h), &ws, &cfg))
                .collect::<Result<_>>()?;
            let averaged: Vec<AcceptRates> = (0..ws.len())
                .map(|i| {
                    let mut r = perturbed[0][i].clone();
                    r.honest_accept_fraction = mean(&perturbed.iter().map(|p| p[i].honest_accept_fraction).collect::<Vec<_>>());
                    r
                })
                .collect();
            let mut fig7 = Table::new(&["w", "honest_accept_fraction", "topology"]);
            for r in &original {
                fig7.push(row![r.w, r.honest_accept_fraction, "original"]);
            }
            for r in &averaged {
                fig7.push(row![r.w, r.honest_accept_fraction, format!("t={t}")]);
            }
            let w_g = required_route_length(&original, *target);
            let w_gp = required_route_length(&averaged, *target);
            ctx.table("fig7_sybillimit.csv", &fig7, &json!({"target": target, "w_original": w_g, "w_perturbed": w_gp}))?;

            let mut fig8 = Table::new(&["g", "mean_g_prime", "t", "ratio", "w_prime", "sybil_capacity"]);
            for &gg in gs {
                let ag = attach_sybil_region(&g, *sybil_n, SybilModel::default(), gg, derive_seed(seed, gg as u64))?;
                let growth = attack_edge_growth(&ag, &perturb.params(*t, derive_seed(seed, 0x8000 + gg as u64)), *growth_trials)?;
                let capacity = w_gp.map(|w| growth.mean_g_prime * w as f64);
                fig8.push(row![gg, growth.mean_g_prime, *t, growth.ratio, w_gp, capacity]);
            }
            ctx.table("fig8_attack_edges.csv", &fig8, &json!({"sybil_n": sybil_n}))?;
        }

        Command::Sprout { input, t, lookups, trials, f, decrement, floor, perturb } => {
            let g = ctx.graph(input, 2000, true)?;
            let trust = TrustModel { f: *f, decrement: *decrement, floor: *floor };
            let params: Vec<PerturbParams> = t.iter().map(|&tt| perturb.params(tt, derive_seed(seed, tt as u64))).collect();
            let rep = reliability_experiment(&g, &params, &trust, *lookups, *trials, seed)?;
            let mut table = Table::new(&["topology", "mechanism", "reliability", "mean_hops", "failures"]);
            for r in &rep.rows {
                table.push(row![r.topology.as_str(), r.mechanism.as_str(), r.reliability, r.mean_hops, r.failures]);
            }
            ctx.table("table1_sprout.csv", &table, &json!({"n": g.n(), "m": g.m()}))?;
        }

        Command::VerifyTheorems { input, t, eps, trials, perturb } => {
            let g = ctx.graph(input, 500, true)?;
            let params = perturb.params(*t, seed);
            let mut gp = transform(&g, &params)?.graph;
            let mut tries = 1;
            while !gp.is_connected() && tries < 100 {
                gp = transform(&g, &params.with_seed(derive_seed(seed, tries)))?.graph;
                tries += 1;
            }
            let mixing = check_theorem_mixing(&g, &gp, *eps)?;
            let spectral = check_theorem_slem(&g, &gp, *eps)?;
            let degree = check_degree_preservation(&g, &params, *trials)?;
            let bracket = check_mixing_bracket(&g, &params, *eps, *trials)?;
            let eigen = check_eigenvalue_bracket(&g, &params, *trials)?;
            let mut table = Table::new(&["check", "pass", "vacuous", "measured", "lower", "upper"]);
            table.push(row!["mixing_bound", mixing.pass, mixing.vacuous, mixing.tau_gp, Option::<f64>::None, mixing.tau_g]);
            table.push(row![
                "slem_bracket",
                spectral.within,
                spectral.vacuous,
                spectral.mu_gp,
                spectral.lower,
                spectral.upper
            ]);
            table.push(row![
                "degree_preservation",
                degree.pass,
                false,
                degree.violations.len(),
                Option::<f64>::None,
                0usize
            ]);
            table.push(row!["mixing_bracket", bracket.pass, false, bracket.mean_tau_gp, bracket.lower, bracket.tau_g]);
            table.push(row!["eigenvalue_bracket", eigen.pass, false, eigen.mean_lambda, eigen.lower, eigen.upper]);
            let summary = json!({
                "mixing_bound": mixing,
                "slem_bracket": spectral,
                "degree_preservation": {
                    "pass": degree.pass, "checked": degree.checked, "violations": degree.violations, "trials": degree.trials
                },
                "mixing_bracket": bracket,
                "eigenvalue_bracket": eigen,
            });
            ctx.table("theorems.csv", &table, &summary)?;
        }
    }
    Ok(ctx.written)
}
