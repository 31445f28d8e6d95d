//! Synthetic scenarios S1, S2 and S2b.
//!
//! Destinations are drawn from a power law over the native order (node `k`
//! has weight `1/(k+1)^alpha`), so node 0 is the most popular destination.
//! Sources are uniform (S1) or follow the same power law after a number of
//! random pair swaps (S2). S2b rewires nodes 1 and 100 of an S2 graph into
//! a self-loop trap.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::{Stream, RNG_ALGORITHM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    S1,
    S2,
    S2b,
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Ok(Scenario::S1),
            "s2" => Ok(Scenario::S2),
            "s2b" => Ok(Scenario::S2b),
            other => Err(format!(
                "unknown scenario {other:?} (expected s1, s2 or s2b)"
            )),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::S1 => "s1",
            Scenario::S2 => "s2",
            Scenario::S2b => "s2b",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub link_attempts: usize,
    pub alpha: f64,
    /// Pair swaps applied to the S2 source weights; `None` means `n`.
    pub permutations: Option<usize>,
    pub seed: u64,
}

impl ScenarioConfig {
    /// Default density: `L = 100 N` link attempts.
    pub fn new(scenario: Scenario, n: usize, alpha: f64, seed: u64) -> Self {
        Self {
            scenario,
            n,
            link_attempts: 100 * n,
            alpha,
            permutations: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return input(format!("scenario needs n >= 2, got {}", self.n));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return input(format!(
                "power-law exponent must be positive, got {}",
                self.alpha
            ));
        }
        if self.scenario == Scenario::S2b && self.n < S2B_TRAP + 1 {
            return input(format!("s2b needs at least {} nodes", S2B_TRAP + 1));
        }
        Ok(())
    }

    pub fn swap_count(&self) -> usize {
        self.permutations.unwrap_or(self.n)
    }
}

/// Normalized power-law weights `(1/k^alpha) / sum_m 1/m^alpha`, `k = 1..=n`.
pub fn powerlaw_weights(n: usize, alpha: f64) -> Vec<f64> {
    let raw: Vec<f64> = (1..=n).map(|k| (k as f64).powf(-alpha)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Inverse-transform sampler over a fixed discrete distribution.
#[derive(Clone, Debug)]
pub struct PowerLawSampler {
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl PowerLawSampler {
    pub fn new(n: usize, alpha: f64) -> Self {
        Self::from_weights(powerlaw_weights(n, alpha))
    }

    /// Weights must be non-negative with a positive sum.
    pub fn from_weights(weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Self {
            weights,
            cumulative,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn sample(&self, rng: &mut Stream) -> usize {
        let u = rng.unit();
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

/// 0-based index of the S2b trap node (position 100).
pub const S2B_TRAP: usize = 99;

/// Draws a scenario graph. S2b is S2 followed by [`apply_s2b`].
pub fn generate(config: &ScenarioConfig) -> Result<Graph> {
    config.validate()?;
    let n = config.n;
    let mut rng = Stream::new(config.seed, 0);
    let destinations = PowerLawSampler::new(n, config.alpha);

    let sources = match config.scenario {
        Scenario::S1 => None,
        Scenario::S2 | Scenario::S2b => {
            let mut w = powerlaw_weights(n, config.alpha);
            for _ in 0..config.swap_count() {
                let i = rng.index(n);
                let j = rng.index(n);
                w.swap(i, j);
            }
            Some(PowerLawSampler::from_weights(w))
        }
    };

    let mut edges = Vec::with_capacity(config.link_attempts);
    for _ in 0..config.link_attempts {
        let src = match &sources {
            None => rng.index(n),
            Some(s) => s.sample(&mut rng),
        };
        let dst = destinations.sample(&mut rng);
        edges.push((NodeId::from(src), NodeId::from(dst)));
    }
    let g = Graph::build(n, edges)?;

    match config.scenario {
        Scenario::S2b => apply_s2b(&g),
        _ => Ok(g),
    }
}

/// Node 1 gets the single out-link 1 -> 100 and node 100 the single
/// self-loop 100 -> 100 (1-based positions). Incoming links stay.
pub fn apply_s2b(g: &Graph) -> Result<Graph> {
    if g.node_count() <= S2B_TRAP {
        return input(format!(
            "s2b rewiring needs at least {} nodes, graph has {}",
            S2B_TRAP + 1,
            g.node_count()
        ));
    }
    let trap = NodeId::from(S2B_TRAP);
    g.with_replaced_out_edges(&[(NodeId(0), vec![trap]), (trap, vec![trap])])
}

/// Sidecar record written next to a generated edge list.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenerationMetadata {
    pub tool: String,
    pub version: String,
    pub rng_algorithm: String,
    pub config: ScenarioConfig,
    pub nodes: usize,
    pub edges: usize,
}

impl GenerationMetadata {
    pub fn new(config: &ScenarioConfig, g: &Graph) -> Self {
        Self {
            tool: "ranklab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            rng_algorithm: RNG_ALGORITHM.into(),
            config: config.clone(),
            nodes: g.node_count(),
            edges: g.edge_count(),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}
