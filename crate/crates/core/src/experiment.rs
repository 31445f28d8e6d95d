//! Ranking methods and the experiment harness behind the command line.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::{Graph, NodeId};
use crate::metrics::{average_deviation, incoming_baseline, NativeOrder};
use crate::reliability::{
    apply_reliability, contribution_ratios, reliability, ReliabilityParams, ReliabilityVector,
};
use crate::solver::{fmt_f64, pagerank, RankVector, SolverConfig};
use crate::synthgen::{generate, Scenario, ScenarioConfig};
use crate::walker::{
    ratios_from_counters, run_walk, scores_from_counters, PrdRule, WalkConfig, WalkCounters,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Analytic PageRank.
    Pr,
    /// PageRank times reliability.
    PrF,
    /// Random walk with dynamic damping.
    PrD,
    /// Dynamic-damping walk times walk-estimated reliability.
    PrDF,
    /// Plain random-surfer estimate.
    WalkPr,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Pr,
        Method::PrF,
        Method::PrD,
        Method::PrDF,
        Method::WalkPr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Pr => "PR",
            Method::PrF => "PRxF",
            Method::PrD => "PR+D",
            Method::PrDF => "PR+DxF",
            Method::WalkPr => "walkPR",
        }
    }

    pub fn uses_walker(self) -> bool {
        matches!(self, Method::PrD | Method::PrDF | Method::WalkPr)
    }

    pub fn applies_reliability(self) -> bool {
        matches!(self, Method::PrF | Method::PrDF)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace(['(', ')', '×', '*'], "x");
        let key = key.replace("xx", "x");
        match key.as_str() {
            "pr" => Ok(Method::Pr),
            "prxf" | "pr-f" => Ok(Method::PrF),
            "pr+d" | "prd" => Ok(Method::PrD),
            "pr+dxf" | "xpr+dxf" | "prdxf" | "prd-f" => Ok(Method::PrDF),
            "walkpr" | "walk" => Ok(Method::WalkPr),
            _ => Err(format!(
                "unknown method {s:?} (expected PR, PRxF, PR+D, PR+DxF or walkPR)"
            )),
        }
    }
}

/// Everything a ranking method may need.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankParams {
    pub epsilon: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub reliability: ReliabilityParams,
    /// Walk settings; `epsilon` is overridden by the field above and `prd`
    /// by the method (PR+D methods default to the revisit rule).
    pub walk: WalkConfig,
}

impl Default for RankParams {
    fn default() -> Self {
        Self {
            epsilon: 0.15,
            tol: 1e-10,
            max_iter: 100_000,
            reliability: ReliabilityParams::default(),
            walk: WalkConfig::default(),
        }
    }
}

impl RankParams {
    pub fn solver(&self) -> Result<SolverConfig> {
        Ok(SolverConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            ..SolverConfig::with_epsilon(self.epsilon)?
        })
    }

    /// Walk configuration as used by `method`.
    pub fn walk_for(&self, method: Method) -> WalkConfig {
        let mut w = self.walk.clone();
        w.epsilon = self.epsilon;
        w.prd = match (method, w.prd) {
            (Method::PrD | Method::PrDF, PrdRule::Off) => PrdRule::Revisit,
            (_, rule) => rule,
        };
        w
    }
}

/// Output of one ranking method.
#[derive(Clone, Debug)]
pub struct MethodOutput {
    pub method: Method,
    /// Probability-normalized for PR/PR+D/walkPR, raw `X F` otherwise.
    pub scores: RankVector,
    pub reliability: Option<ReliabilityVector>,
    pub counters: Option<WalkCounters>,
}

impl MethodOutput {
    /// `node,score[,F]`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        match &self.reliability {
            None => self.scores.write_csv(w),
            Some(rel) => {
                writeln!(w, "node,score,F")?;
                for (i, s) in self.scores.scores().iter().enumerate() {
                    writeln!(
                        w,
                        "{},{},{}",
                        i + 1,
                        fmt_f64(*s),
                        fmt_f64(rel.reliability[i])
                    )?;
                }
                w.flush()?;
                Ok(())
            }
        }
    }
}

pub fn rank(g: &Graph, method: Method, params: &RankParams) -> Result<MethodOutput> {
    params.reliability.validate()?;
    if method.uses_walker() {
        let counters = run_walk(g, &params.walk_for(method))?;
        return rank_from_counters(g, method, params, counters);
    }

    let x = pagerank(g, &params.solver()?)?;
    if !method.applies_reliability() {
        return Ok(MethodOutput {
            method,
            scores: x,
            reliability: None,
            counters: None,
        });
    }
    let r = contribution_ratios(g, &x, params.epsilon, &params.reliability)?;
    let f = reliability(&r, &params.reliability)?;
    Ok(MethodOutput {
        method,
        scores: apply_reliability(&x, &f)?,
        reliability: Some(f),
        counters: None,
    })
}

/// Finishes a walker method from counters gathered elsewhere, e.g. by a
/// traced walk.
pub fn rank_from_counters(
    g: &Graph,
    method: Method,
    params: &RankParams,
    counters: WalkCounters,
) -> Result<MethodOutput> {
    if !method.uses_walker() {
        return input(format!("{method} does not use walk counters"));
    }
    let x = scores_from_counters(&counters)?;
    let (scores, rel) = if method.applies_reliability() {
        let r = ratios_from_counters(g, &counters)?;
        let f = reliability(&r, &params.reliability)?;
        (apply_reliability(&x, &f)?, Some(f))
    } else {
        (x, None)
    };
    Ok(MethodOutput {
        method,
        scores,
        reliability: rel,
        counters: Some(counters),
    })
}

/// The four methods compared in the average-deviation table.
pub const TABLE1_METHODS: [Method; 4] = [Method::Pr, Method::PrF, Method::PrD, Method::PrDF];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Config {
    pub n: usize,
    /// Link attempts per node (`L = links_per_node * N`).
    pub links_per_node: usize,
    pub alphas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub params: RankParams,
}

impl Default for Table1Config {
    fn default() -> Self {
        let mut params = RankParams::default();
        // maximum reliability penalty, as in the reference simulations
        params.reliability.beta = 1.0;
        params.walk.steps = 10_000_000;
        Self {
            n: 1000,
            links_per_node: 100,
            alphas: vec![1.5, 2.0, 2.5],
            seeds: (1..=10).collect(),
            params,
        }
    }
}

/// Average deviation from the in-degree baseline for one graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Run {
    pub alpha: f64,
    pub seed: u64,
    pub edges: usize,
    /// In [`TABLE1_METHODS`] order.
    pub deviation: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub alpha: f64,
    /// Medians across seeds, in [`TABLE1_METHODS`] order.
    pub deviation: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1 {
    pub rows: Vec<Table1Row>,
    pub runs: Vec<Table1Run>,
}

pub fn table1_run(cfg: &Table1Config, alpha: f64, seed: u64) -> Result<Table1Run> {
    let scenario = ScenarioConfig {
        link_attempts: cfg.links_per_node * cfg.n,
        ..ScenarioConfig::new(Scenario::S1, cfg.n, alpha, seed)
    };
    let g = generate(&scenario)?;
    let baseline = incoming_baseline(&g)?;
    let order = NativeOrder::identity(g.node_count());
    let mut params = cfg.params.clone();
    params.walk.seed = seed;

    let pr = rank(&g, Method::Pr, &params)?;
    let prf = rank(&g, Method::PrF, &params)?;
    // one walk feeds both PR+D and (PR+D)xF
    let prd = rank(&g, Method::PrD, &params)?;
    let counters = prd.counters.as_ref().expect("walker methods keep counters");
    let ratios = ratios_from_counters(&g, counters)?;
    let f = reliability(&ratios, &params.reliability)?;
    let prdf = apply_reliability(&prd.scores, &f)?;

    let dev = |x: &RankVector| average_deviation(x, &baseline, &order);
    Ok(Table1Run {
        alpha,
        seed,
        edges: g.edge_count(),
        deviation: [
            dev(&pr.scores)?,
            dev(&prf.scores)?,
            dev(&prd.scores)?,
            dev(&prdf)?,
        ],
    })
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => values[n / 2],
        _ => 0.5 * (values[n / 2 - 1] + values[n / 2]),
    }
}

/// Runs the alpha x seed grid in parallel and reports per-alpha medians.
pub fn table1(cfg: &Table1Config) -> Result<Table1> {
    if cfg.alphas.is_empty() || cfg.seeds.is_empty() {
        return input("table needs at least one alpha and one seed");
    }
    let grid: Vec<(f64, u64)> = cfg
        .alphas
        .iter()
        .flat_map(|&a| cfg.seeds.iter().map(move |&s| (a, s)))
        .collect();
    let runs = grid
        .par_iter()
        .map(|&(a, s)| table1_run(cfg, a, s))
        .collect::<Result<Vec<_>>>()?;
    let rows = cfg
        .alphas
        .iter()
        .map(|&alpha| {
            let mut deviation = [0.0; 4];
            for (m, slot) in deviation.iter_mut().enumerate() {
                let mut v: Vec<f64> = runs
                    .iter()
                    .filter(|r| r.alpha == alpha)
                    .map(|r| r.deviation[m])
                    .collect();
                *slot = median(&mut v);
            }
            Table1Row { alpha, deviation }
        })
        .collect();
    Ok(Table1 { rows, runs })
}

impl Table1 {
    /// `alpha,PR,PRxF,PR+D,(PR+D)xF`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "alpha,PR,PRxF,PR+D,(PR+D)xF")?;
        for row in &self.rows {
            let cells: Vec<String> = row.deviation.iter().map(|v| fmt_f64(*v)).collect();
            writeln!(w, "{},{}", fmt_f64(row.alpha), cells.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Same columns with a `seed` and `edges` column per run.
    pub fn write_runs_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "alpha,seed,edges,PR,PRxF,PR+D,(PR+D)xF")?;
        for run in &self.runs {
            let cells: Vec<String> = run.deviation.iter().map(|v| fmt_f64(*v)).collect();
            writeln!(
                w,
                "{},{},{},{}",
                fmt_f64(run.alpha),
                run.seed,
                run.edges,
                cells.join(",")
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Hand-built example graphs shipped with the crate.
pub mod fixtures {
    use super::*;

    const C1: &str = include_str!("../fixtures/c1.edges");
    const C2: &str = include_str!("../fixtures/c2.edges");

    /// Node `a` of case C1 (four equal feeders).
    pub const C1_A: NodeId = NodeId(4);
    /// Node `b` of case C1 (single feeder `a`).
    pub const C1_B: NodeId = NodeId(5);
    /// Node `c` of case C1 (three equal feeders).
    pub const C1_C: NodeId = NodeId(9);

    pub const C2_A: NodeId = NodeId(6);
    pub const C2_B: NodeId = NodeId(7);
    pub const C2_C: NodeId = NodeId(8);
    pub const C2_D: NodeId = NodeId(9);

    pub fn c1() -> Graph {
        Graph::read_edge_list(C1.as_bytes(), Path::new("fixtures/c1.edges"))
            .expect("bundled fixture parses")
    }

    pub fn c2() -> Graph {
        Graph::read_edge_list(C2.as_bytes(), Path::new("fixtures/c2.edges"))
            .expect("bundled fixture parses")
    }

    /// Raw text of a bundled fixture by name (`c1` or `c2`).
    pub fn text(name: &str) -> Option<&'static str> {
        match name {
            "c1" => Some(C1),
            "c2" => Some(C2),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_parse() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("(PR+D)xF".parse::<Method>().unwrap(), Method::PrDF);
        assert_eq!("PR×F".parse::<Method>().unwrap(), Method::PrF);
        assert!("HITS".parse::<Method>().is_err());
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn fixtures_shape() {
        let c1 = fixtures::c1();
        assert_eq!(c1.node_count(), 20);
        assert_eq!(c1.in_degree(fixtures::C1_A), 4);
        assert_eq!(c1.in_neighbors(fixtures::C1_B), &[fixtures::C1_A]);
        assert_eq!(c1.in_degree(fixtures::C1_C), 3);
        let c2 = fixtures::c2();
        assert_eq!(c2.in_degree(fixtures::C2_A), 6);
        assert_eq!(c2.out_neighbors(fixtures::C2_D), &[fixtures::C2_B]);
    }

    #[test]
    fn prd_methods_switch_on_revisit_rule() {
        let p = RankParams::default();
        assert_eq!(p.walk_for(Method::PrD).prd, PrdRule::Revisit);
        assert_eq!(p.walk_for(Method::WalkPr).prd, PrdRule::Off);
        let mut lit = RankParams::default();
        lit.walk.prd = PrdRule::Literal;
        assert_eq!(lit.walk_for(Method::PrDF).prd, PrdRule::Literal);
    }
}
