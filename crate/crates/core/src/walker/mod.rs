//! Monte-Carlo random surfer with visit and transition counters.
//!
//! Each arrival at node `i` adds the current path-diversity value (1 when
//! diversity is off) to `C(i)`, and, when the arrival followed a link
//! `j -> i`, to `R(i, j)` as well. Reinitializations jump to a uniform node
//! and clear the path memory; they add to `C` only.
//!
//! Counters are fixed-point `u128` in units of 2^-64, so merging the
//! counters of independent walkers is exact and order-independent.

pub mod diversity;

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::{DampingConfig, Graph, NodeId};
use crate::reliability::ContributionRatios;
use crate::rng::Stream;
use crate::solver::{fmt_f64, RankVector};

pub use diversity::{
    pd1_diversity, pd2_diversity, pd3_diversity, DiversityKind, DiversityModel, PathTracker,
    Pd2Mode, WeightModel,
};

const ONE: f64 = 18_446_744_073_709_551_616.0; // 2^64

#[inline]
fn quantize(div: f64) -> u128 {
    (div.clamp(0.0, 1.0) * ONE).round() as u128
}

#[inline]
fn dequantize(v: u128) -> f64 {
    v as f64 / ONE
}

/// Dynamic damping driven by revisits since the last reinitialization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrdRule {
    #[default]
    Off,
    /// A move onto an already visited node becomes a reinitialization
    /// (damping factor zero on revisits).
    Revisit,
    /// Verbatim variant: no teleport while standing on a node that was
    /// already visited before (epsilon set to zero).
    Literal,
}

impl FromStr for PrdRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "off" => Ok(Self::Off),
            "revisit" => Ok(Self::Revisit),
            "literal" => Ok(Self::Literal),
            other => Err(format!("unknown PR+D rule {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub epsilon: f64,
    /// Transitions to simulate, summed over all walkers.
    pub steps: u64,
    pub seed: u64,
    pub diversity: Option<DiversityModel>,
    pub prd: PrdRule,
    /// PD1 memory length.
    pub window: usize,
    /// Independent walkers sharing the step budget; walker `w` uses RNG
    /// stream `w`.
    pub walkers: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.15,
            steps: 1_000_000,
            seed: 0,
            diversity: None,
            prd: PrdRule::Off,
            window: 16,
            walkers: 1,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        DampingConfig::new(self.epsilon)?;
        if self.steps == 0 {
            return input("walk needs at least one step");
        }
        if self.walkers == 0 {
            return input("walk needs at least one walker");
        }
        if self.window == 0 {
            return input("diversity window must be at least 1");
        }
        if let Some(m) = &self.diversity {
            m.validate()?;
        }
        Ok(())
    }

    fn budget(&self, walker: usize) -> u64 {
        let w = self.walkers as u64;
        self.steps / w + u64::from((walker as u64) < self.steps % w)
    }
}

/// Visit counters `C` and per-edge transition counters `R`.
///
/// `r` is indexed by the graph's in-edge slots, so `R(i, j)` for the edge
/// `j -> i` lives at the slot of `j` within `in_slots(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkCounters {
    c: Vec<u128>,
    c_reinit: Vec<u128>,
    r: Vec<u128>,
    pub total_steps: u64,
    pub reinitializations: u64,
}

impl WalkCounters {
    pub fn new(nodes: usize, edges: usize) -> Self {
        Self {
            c: vec![0; nodes],
            c_reinit: vec![0; nodes],
            r: vec![0; edges],
            total_steps: 0,
            reinitializations: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.c.len()
    }

    pub fn c(&self, v: NodeId) -> f64 {
        dequantize(self.c[v.index()])
    }

    /// Part of `C(v)` that arrived through reinitializations.
    pub fn c_reinit(&self, v: NodeId) -> f64 {
        dequantize(self.c_reinit[v.index()])
    }

    pub fn c_values(&self) -> Vec<f64> {
        self.c.iter().map(|&v| dequantize(v)).collect()
    }

    /// `R` at an in-edge slot.
    pub fn r_slot(&self, slot: usize) -> f64 {
        dequantize(self.r[slot])
    }

    /// Exact check of `sum_j R(i,j) + reinit arrivals == C(i)` for every node.
    pub fn is_balanced(&self, g: &Graph) -> bool {
        g.nodes().all(|i| {
            let link: u128 = g.in_slots(i).map(|s| self.r[s]).sum();
            link + self.c_reinit[i.index()] == self.c[i.index()]
        })
    }

    /// Elementwise sum.
    pub fn merge(&mut self, other: &WalkCounters) -> Result<()> {
        if self.c.len() != other.c.len() || self.r.len() != other.r.len() {
            return input("cannot merge counters of different graphs");
        }
        let add = |a: &mut [u128], b: &[u128]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.c, &other.c);
        add(&mut self.c_reinit, &other.c_reinit);
        add(&mut self.r, &other.r);
        self.total_steps += other.total_steps;
        self.reinitializations += other.reinitializations;
        Ok(())
    }

    /// `node,C`.
    pub fn write_counter_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "node,C")?;
        for (i, &v) in self.c.iter().enumerate() {
            writeln!(w, "{},{}", i + 1, fmt_f64(dequantize(v)))?;
        }
        w.flush()?;
        Ok(())
    }

    /// `dst,src,R` for every edge with a non-zero count.
    pub fn write_transition_csv<W: Write>(&self, g: &Graph, mut w: W) -> Result<()> {
        writeln!(w, "dst,src,R")?;
        for i in g.nodes() {
            for (slot, &j) in g.in_slots(i).zip(g.in_neighbors(i)) {
                if self.r[slot] > 0 {
                    writeln!(w, "{},{},{}", i, j, fmt_f64(dequantize(self.r[slot])))?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// One simulated arrival.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEvent {
    pub walker: usize,
    /// Transition index within the walker; the initial placement is 0.
    pub step: u64,
    /// `None` for reinitializations.
    pub src: Option<NodeId>,
    pub dst: NodeId,
    pub div: f64,
    pub reinit: bool,
}

impl TraceEvent {
    /// `step src dst div reinit`, with `-` for a missing source. Debug aid
    /// only; the layout may change.
    pub fn write_line<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let src = self.src.map_or_else(|| "-".to_string(), |s| s.to_string());
        writeln!(
            w,
            "{} {} {} {} {}",
            self.step,
            src,
            self.dst,
            fmt_f64(self.div),
            u8::from(self.reinit)
        )
    }
}

/// Runs the configured walkers in parallel and merges their counters.
pub fn run_walk(g: &Graph, cfg: &WalkConfig) -> Result<WalkCounters> {
    cfg.validate()?;
    if g.node_count() == 0 {
        return input("graph has no nodes");
    }
    let parts: Vec<WalkCounters> = (0..cfg.walkers)
        .into_par_iter()
        .map(|w| single_walker(g, cfg, w, &mut |_| {}))
        .collect();
    let mut total = WalkCounters::new(g.node_count(), g.edge_count());
    for p in &parts {
        total.merge(p)?;
    }
    Ok(total)
}

/// Sequential variant that reports every arrival to `observer`.
pub fn run_walk_traced(
    g: &Graph,
    cfg: &WalkConfig,
    observer: &mut dyn FnMut(&TraceEvent),
) -> Result<WalkCounters> {
    cfg.validate()?;
    if g.node_count() == 0 {
        return input("graph has no nodes");
    }
    let mut total = WalkCounters::new(g.node_count(), g.edge_count());
    for w in 0..cfg.walkers {
        total.merge(&single_walker(g, cfg, w, observer))?;
    }
    Ok(total)
}

fn single_walker(
    g: &Graph,
    cfg: &WalkConfig,
    walker: usize,
    observer: &mut dyn FnMut(&TraceEvent),
) -> WalkCounters {
    let mut rng = Stream::new(cfg.seed, walker as u64);
    let mut memory = PathTracker::new(g.node_count(), cfg.diversity, cfg.window);
    let mut counters = WalkCounters::new(g.node_count(), g.edge_count());
    let budget = cfg.budget(walker);

    reinitialize(&mut memory, &mut counters, &mut rng, walker, 0, observer);
    for step in 1..=budget {
        let cur = memory.current().expect("walker always has a position");
        let deg = g.out_degree(cur);
        let mut teleport = deg == 0;
        if !teleport {
            let eps = match cfg.prd {
                PrdRule::Literal if memory.visits(cur) >= 2 => 0.0,
                _ => cfg.epsilon,
            };
            teleport = rng.chance(eps);
        }
        if !teleport {
            let k = rng.index(deg);
            let next = g.out_neighbors(cur)[k];
            if cfg.prd == PrdRule::Revisit && memory.visits(next) > 0 {
                teleport = true;
            } else {
                let div = memory.arrive(next);
                let q = quantize(div);
                counters.c[next.index()] += q;
                counters.r[g.in_slot_of_out(cur, k)] += q;
                observer(&TraceEvent {
                    walker,
                    step,
                    src: Some(cur),
                    dst: next,
                    div,
                    reinit: false,
                });
            }
        }
        if teleport {
            counters.reinitializations += 1;
            reinitialize(&mut memory, &mut counters, &mut rng, walker, step, observer);
        }
    }
    counters.total_steps = budget;
    counters
}

fn reinitialize(
    memory: &mut PathTracker,
    counters: &mut WalkCounters,
    rng: &mut Stream,
    walker: usize,
    step: u64,
    observer: &mut dyn FnMut(&TraceEvent),
) {
    memory.reset();
    let dst = NodeId::from(rng.index(counters.node_count()));
    let div = memory.arrive(dst);
    let q = quantize(div);
    counters.c[dst.index()] += q;
    counters.c_reinit[dst.index()] += q;
    observer(&TraceEvent {
        walker,
        step,
        src: None,
        dst,
        div,
        reinit: true,
    });
}

/// `C` normalized to sum one.
pub fn scores_from_counters(c: &WalkCounters) -> Result<RankVector> {
    if c.c.iter().all(|&v| v == 0) {
        return input("all visit counters are zero");
    }
    RankVector::probability(c.c_values())
}

/// Contribution ratios estimated from transition counts: row `i` is
/// `R(i, .)` divided by its link-arrival total. Reinitialization arrivals
/// carry no source and are left out, so rows match the link-only analytic
/// ratios. Nodes never reached by a link get an empty row.
pub fn ratios_from_counters(g: &Graph, c: &WalkCounters) -> Result<ContributionRatios> {
    if c.c.len() != g.node_count() || c.r.len() != g.edge_count() {
        return input("counters were produced on a different graph");
    }
    let rows = g.nodes().map(|i| {
        g.in_slots(i)
            .zip(g.in_neighbors(i))
            .filter(|(s, _)| c.r[*s] > 0)
            .map(|(s, &j)| (j, dequantize(c.r[s])))
            .collect::<Vec<_>>()
    });
    Ok(ContributionRatios::from_rows(g.node_count(), rows))
}
