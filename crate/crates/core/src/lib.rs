//! PageRank with statistical reliability and path-diversity random walks.
//!
//! The [`solver`] computes analytic scores, [`reliability`] derives the
//! contribution ratios and `F` from them, and [`walker`] estimates both by
//! Monte-Carlo with optional path-diversity weighting and dynamic damping.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod reliability;
pub mod rng;
pub mod solver;
pub mod synthgen;
pub mod walker;

pub use error::{Error, Result};
pub use experiment::{fixtures, rank, Method, MethodOutput, RankParams};
pub use graph::{DampingConfig, Graph, NodeId};
pub use metrics::{average_deviation, incoming_baseline, node_deviation, NativeOrder};
pub use reliability::{
    apply_reliability, contribution_ratios, reliability, ContributionRatios, ReliabilityParams,
    ReliabilityVector,
};
pub use solver::{dense_oracle, pagerank, RankVector, SolverConfig};
pub use synthgen::{generate, Scenario, ScenarioConfig};
pub use walker::{run_walk, DiversityKind, DiversityModel, PrdRule, WalkConfig, WalkCounters};

/// Crate version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
