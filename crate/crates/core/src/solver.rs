//! Analytic PageRank by Jacobi power iteration, plus a dense direct solve
//! used as an independent oracle.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{input, Error, Result};
use crate::graph::{DampingConfig, Graph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// Entries sum to one.
    Probability,
    /// Arbitrary non-negative scale (e.g. after multiplying by F).
    Raw,
}

/// Per-node relevancy scores.
#[derive(Clone, Debug, PartialEq)]
pub struct RankVector {
    scores: Vec<f64>,
    normalization: Normalization,
}

impl RankVector {
    /// Normalizes `scores` to sum to one. Entries must be non-negative with
    /// a positive total.
    pub fn probability(scores: Vec<f64>) -> Result<Self> {
        Self::raw(scores)?.normalized()
    }

    pub fn raw(scores: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = scores
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return input(format!(
                "score of node {} is {v}; scores must be finite and >= 0",
                i + 1
            ));
        }
        Ok(Self {
            scores,
            normalization: Normalization::Raw,
        })
    }

    pub fn normalized(&self) -> Result<Self> {
        let total: f64 = self.scores.iter().sum();
        if total <= 0.0 {
            return input("cannot normalize an all-zero score vector");
        }
        Ok(Self {
            scores: self.scores.iter().map(|v| v / total).collect(),
            normalization: Normalization::Probability,
        })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn into_scores(self) -> Vec<f64> {
        self.scores
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn get(&self, v: NodeId) -> f64 {
        self.scores[v.index()]
    }

    /// `node,score` with 1-based nodes.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "node,score")?;
        for (i, s) in self.scores.iter().enumerate() {
            writeln!(w, "{},{}", i + 1, fmt_f64(*s))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip repr is at most 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub damping: DampingConfig,
    /// L-infinity threshold on `|T(x) - x|`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            damping: DampingConfig::default(),
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

impl SolverConfig {
    pub fn with_epsilon(epsilon: f64) -> Result<Self> {
        Ok(Self {
            damping: DampingConfig::new(epsilon)?,
            ..Self::default()
        })
    }

    fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return input(format!("tolerance must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return input("max_iter must be at least 1");
        }
        Ok(())
    }
}

// Below this size the per-iteration rayon fork costs more than the sweep.
const PARALLEL_MIN_NODES: usize = 1 << 14;

/// One application of the PageRank map, dangling mass spread uniformly.
fn apply_map(g: &Graph, inv_out: &[f64], eps: f64, x: &[f64], y: &mut [f64]) {
    let n = g.node_count();
    let dangling: f64 = g
        .nodes()
        .filter(|&v| g.out_degree(v) == 0)
        .map(|v| x[v.index()])
        .sum();
    let base = eps / n as f64 + (1.0 - eps) * dangling / n as f64;
    let pull = |(i, yi): (usize, &mut f64)| {
        let inflow: f64 = g
            .in_neighbors(NodeId::from(i))
            .iter()
            .map(|j| x[j.index()] * inv_out[j.index()])
            .sum();
        *yi = base + (1.0 - eps) * inflow;
    };
    if n >= PARALLEL_MIN_NODES {
        y.par_iter_mut().enumerate().for_each(pull);
    } else {
        y.iter_mut().enumerate().for_each(pull);
    }
}

/// Stationary scores of the random surfer.
///
/// Starts from the uniform vector and stops at the first iterate `x` with
/// `|x - T(x)|_inf <= tol`. On hitting `max_iter` the error carries the last
/// iterate.
pub fn pagerank(g: &Graph, cfg: &SolverConfig) -> Result<RankVector> {
    cfg.validate()?;
    let n = g.node_count();
    if n == 0 {
        return input("graph has no nodes");
    }
    let eps = cfg.damping.epsilon();
    let inv_out: Vec<f64> = g
        .nodes()
        .map(|v| match g.out_degree(v) {
            0 => 0.0,
            d => 1.0 / d as f64,
        })
        .collect();

    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_iter {
        apply_map(g, &inv_out, eps, &x, &mut y);
        residual = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual <= cfg.tol {
            return RankVector::probability(x);
        }
        std::mem::swap(&mut x, &mut y);
    }
    let total: f64 = x.iter().sum();
    Err(Error::Convergence {
        iterations: cfg.max_iter,
        residual,
        last: x.into_iter().map(|v| v / total).collect(),
    })
}

/// Largest graph accepted by [`dense_oracle`].
pub const DENSE_ORACLE_MAX_NODES: usize = 2000;

/// Solves `(I - (1-eps) P) x = eps/N` by LU with partial pivoting, where
/// dangling columns of `P` are uniform.
pub fn dense_oracle(g: &Graph, epsilon: f64) -> Result<RankVector> {
    let n = g.node_count();
    if n == 0 {
        return input("graph has no nodes");
    }
    if n > DENSE_ORACLE_MAX_NODES {
        return input(format!(
            "dense oracle limited to {DENSE_ORACLE_MAX_NODES} nodes, graph has {n}"
        ));
    }
    let damping = DampingConfig::new(epsilon)?;
    if epsilon == 0.0 {
        return Err(Error::Numeric("system is singular for epsilon = 0".into()));
    }
    let keep = damping.damping_factor();
    let mut a = DMatrix::<f64>::identity(n, n);
    for j in g.nodes() {
        let col = j.index();
        match g.out_degree(j) {
            0 => {
                for i in 0..n {
                    a[(i, col)] -= keep / n as f64;
                }
            }
            d => {
                for &i in g.out_neighbors(j) {
                    a[(i.index(), col)] -= keep / d as f64;
                }
            }
        }
    }
    let b = DVector::<f64>::from_element(n, epsilon / n as f64);
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numeric("singular system".into()))?;
    if x.iter().any(|v| !v.is_finite() || *v < -1e-12) {
        return Err(Error::Numeric(
            "direct solve produced an invalid vector".into(),
        ));
    }
    RankVector::probability(x.iter().map(|v| v.max(0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, e: &[(u32, u32)]) -> Graph {
        Graph::build(n, e.iter().map(|&(a, b)| (NodeId(a), NodeId(b)))).unwrap()
    }

    #[test]
    fn two_cycle_is_uniform() {
        let g = graph(2, &[(0, 1), (1, 0)]);
        for eps in [0.0, 0.15, 0.9] {
            let x = pagerank(&g, &SolverConfig::with_epsilon(eps).unwrap()).unwrap();
            assert!((x.scores()[0] - 0.5).abs() < 1e-12);
        }
        let d = dense_oracle(&g, 0.15).unwrap();
        assert!((d.scores()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pure_teleport_is_uniform() {
        let g = graph(5, &[(0, 1), (0, 2), (3, 1), (4, 4)]);
        let x = pagerank(&g, &SolverConfig::with_epsilon(1.0).unwrap()).unwrap();
        assert!(x.scores().iter().all(|v| (v - 0.2).abs() < 1e-15));
    }

    #[test]
    fn single_self_loop() {
        let g = graph(1, &[(0, 0)]);
        assert_eq!(dense_oracle(&g, 0.15).unwrap().scores(), &[1.0]);
        assert_eq!(
            pagerank(&g, &SolverConfig::default()).unwrap().scores(),
            &[1.0]
        );
    }

    #[test]
    fn star_hub_dominates() {
        let g = graph(5, &[(1, 0), (2, 0), (3, 0), (4, 0)]);
        let x = dense_oracle(&g, 0.15).unwrap();
        for leaf in 1..5 {
            assert!(x.scores()[0] > x.scores()[leaf]);
        }
    }

    #[test]
    fn non_convergence_reports_last_iterate() {
        // an iteration cap far too small for the tolerance
        let g = graph(3, &[(0, 1), (1, 2), (2, 0), (0, 2)]);
        let cfg = SolverConfig {
            damping: DampingConfig::new(0.15).unwrap(),
            tol: 1e-14,
            max_iter: 2,
        };
        match pagerank(&g, &cfg) {
            Err(Error::Convergence { last, residual, .. }) => {
                assert_eq!(last.len(), 3);
                assert!(residual > 1e-14);
                assert!((last.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn config_and_oracle_errors() {
        let g = graph(2, &[(0, 1)]);
        let bad = SolverConfig {
            tol: 0.0,
            ..SolverConfig::default()
        };
        assert!(pagerank(&g, &bad).is_err());
        assert!(matches!(dense_oracle(&g, 0.0), Err(Error::Numeric(_))));
        let big = Graph::build(DENSE_ORACLE_MAX_NODES + 1, []).unwrap();
        assert!(dense_oracle(&big, 0.15).is_err());
    }

    #[test]
    fn rank_vector_csv() {
        let x = RankVector::probability(vec![1.0, 3.0]).unwrap();
        let mut out = Vec::new();
        x.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "node,score\n1,0.25\n2,0.75\n"
        );
        assert!(RankVector::raw(vec![-1.0]).is_err());
        assert!(RankVector::probability(vec![0.0, 0.0]).is_err());
    }
}
