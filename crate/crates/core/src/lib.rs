//! Random-walk link perturbation for undirected social graphs.
//!
//! The crate perturbs a graph by rewiring every edge to the end of a short
//! random walk, then measures what that costs (walk-distribution utility,
//! mixing time, spectral gap) and what it buys (Bayesian link posteriors,
//! structural impact and equivalence). Simulators for Sybil defense and
//! social DHT routing replay the downstream applications.

pub mod bayes;
pub mod chord;
pub mod cli;
pub mod distance;
pub mod error;
pub mod gen;
pub mod graph;
mod lowrank;
pub mod perturb;
pub mod report;
pub mod risk;
pub mod rng;
pub mod spectral;
pub mod sybil;
pub mod utility;
pub mod walk;

pub use distance::DistanceKind;
pub use error::{Error, Result};
pub use gen::{ba_generate, GenSpec};
pub use graph::{load_edge_list, Graph, Link};
pub use perturb::{transform, transform_baseline_hay, PerturbParams};
pub use walk::{VertexSample, WalkDistribution};
