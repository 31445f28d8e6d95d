//! Path-diversity increment models.
//!
//! A path memory `LP = (n_1, n_2, ...)` lists visited nodes most recent
//! first, back to the last reinitialization. Each model maps it to an
//! increment multiplier in `[0, 1]`:
//!
//! * PD1 weighs repeated nodes in a sliding window, nearer repeats counting
//!   more. Its memory includes the node just arrived at as `n_1`.
//! * PD2 subtracts a weight `g(i)` for every depth `i` at which the path is
//!   redundant with respect to the current node `n_0`.
//! * PD3 is 0 when `n_0` already occurs in the path, 1 otherwise.
//!
//! The free functions here evaluate the definitions directly on slices.
//! [`PathTracker`] produces the same values incrementally for the walker.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiversityKind {
    Pd1,
    Pd2,
    Pd3,
}

impl FromStr for DiversityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pd1" => Ok(Self::Pd1),
            "pd2" => Ok(Self::Pd2),
            "pd3" => Ok(Self::Pd3),
            other => Err(format!("unknown diversity model {other:?}")),
        }
    }
}

impl fmt::Display for DiversityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pd1 => "pd1",
            Self::Pd2 => "pd2",
            Self::Pd3 => "pd3",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightModel {
    Power,
    Exponential,
}

/// How PD2 decides that depth `i` is redundant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pd2Mode {
    /// The path contains an `i`-step segment from a visit of `n_0` to a
    /// visit of `n_i`.
    TransitionReplay,
    /// `n_i` occurs more than once among `n_0, n_1, ...`.
    DuplicateDepth,
}

impl FromStr for Pd2Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "transition-replay" | "replay" => Ok(Self::TransitionReplay),
            "duplicate-depth" | "duplicate" => Ok(Self::DuplicateDepth),
            other => Err(format!(
                "unknown pd2 mode {other:?} (expected transition-replay or duplicate-depth)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiversityModel {
    pub kind: DiversityKind,
    pub weight_model: WeightModel,
    /// Exponent of the power models.
    pub alpha: f64,
    /// PD1: base of `f(i) = gamma^i`. PD2: base of `g(i) = gamma^-i`.
    pub gamma: f64,
    /// PD1 exponential gap weight `delta^(j-i)`, at most 0.5.
    pub delta: f64,
    pub pd2_mode: Pd2Mode,
    /// Deepest PD2 redundancy checked. `None` picks a default: exact to
    /// double precision for the exponential model, 4096 for the power model.
    pub depth_cap: Option<usize>,
}

/// Default PD2 depth cap for the power model; the ignored tail is below
/// `cap^(1-alpha) / (alpha-1)`.
pub const POWER_DEPTH_CAP: usize = 4096;

impl DiversityModel {
    pub fn pd1() -> Self {
        Self {
            kind: DiversityKind::Pd1,
            weight_model: WeightModel::Exponential,
            alpha: 2.0,
            gamma: 0.5,
            delta: 0.5,
            pd2_mode: Pd2Mode::TransitionReplay,
            depth_cap: None,
        }
    }

    pub fn pd2(mode: Pd2Mode) -> Self {
        Self {
            kind: DiversityKind::Pd2,
            gamma: 2.0,
            pd2_mode: mode,
            ..Self::pd1()
        }
    }

    pub fn pd3() -> Self {
        Self {
            kind: DiversityKind::Pd3,
            ..Self::pd1()
        }
    }

    pub fn of_kind(kind: DiversityKind) -> Self {
        match kind {
            DiversityKind::Pd1 => Self::pd1(),
            DiversityKind::Pd2 => Self::pd2(Pd2Mode::TransitionReplay),
            DiversityKind::Pd3 => Self::pd3(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, self.weight_model) {
            (DiversityKind::Pd1, WeightModel::Exponential) => {
                if !(self.delta > 0.0 && self.delta <= 0.5) {
                    return input(format!("delta must lie in (0, 0.5], got {}", self.delta));
                }
                if !(self.gamma > 0.0 && self.gamma.is_finite()) {
                    return input(format!("pd1 gamma must be positive, got {}", self.gamma));
                }
            }
            (DiversityKind::Pd1, WeightModel::Power) => {
                if !(self.alpha > 0.0 && self.alpha.is_finite()) {
                    return input(format!("pd1 alpha must be positive, got {}", self.alpha));
                }
            }
            (DiversityKind::Pd2, WeightModel::Exponential) => {
                if !(self.gamma > 1.0 && self.gamma.is_finite()) {
                    return input(format!("pd2 gamma must exceed 1, got {}", self.gamma));
                }
            }
            (DiversityKind::Pd2, WeightModel::Power) => {
                if !(self.alpha > 1.0 && self.alpha.is_finite()) {
                    return input(format!("pd2 alpha must exceed 1, got {}", self.alpha));
                }
            }
            (DiversityKind::Pd3, _) => {}
        }
        if self.depth_cap == Some(0) {
            return input("depth cap must be at least 1");
        }
        Ok(())
    }

    fn pd1_f(&self, i: usize) -> f64 {
        match self.weight_model {
            WeightModel::Exponential => self.gamma.powi(i as i32),
            WeightModel::Power => (i as f64).powf(-self.alpha),
        }
    }

    fn pd1_gap(&self, d: usize) -> f64 {
        match self.weight_model {
            WeightModel::Exponential => self.delta.powi(d as i32),
            WeightModel::Power => (d as f64).powf(-self.alpha),
        }
    }

    fn pd2_g(&self, i: usize) -> f64 {
        match self.weight_model {
            WeightModel::Exponential => self.gamma.powi(-(i as i32)),
            WeightModel::Power => (i as f64).powf(-self.alpha),
        }
    }

    /// `sum_{i>=1} g(i)` in closed form.
    pub fn pd2_g_total(&self) -> f64 {
        match self.weight_model {
            WeightModel::Exponential => 1.0 / (self.gamma - 1.0),
            WeightModel::Power => zeta(self.alpha),
        }
    }

    pub fn effective_depth_cap(&self) -> usize {
        if let Some(cap) = self.depth_cap {
            return cap;
        }
        match self.weight_model {
            // stop once g(i) is below 1e-17 of the total
            WeightModel::Exponential => {
                let total = self.pd2_g_total();
                let depth = ((total * 1e17).ln() / self.gamma.ln()).ceil();
                depth.clamp(1.0, 4096.0) as usize
            }
            WeightModel::Power => POWER_DEPTH_CAP,
        }
    }
}

/// Riemann zeta for `s > 1` by Euler-Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    const M: f64 = 32.0;
    let head: f64 = (1..32).map(|k| (k as f64).powf(-s)).sum();
    head + M.powf(1.0 - s) / (s - 1.0) + 0.5 * M.powf(-s) + s * M.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * M.powf(-s - 3.0) / 720.0
}

/// PD1 on a memory listed most recent first (`lp[0] = n_1`).
pub fn pd1_diversity(lp: &[NodeId], m: &DiversityModel) -> f64 {
    if lp.is_empty() {
        return 1.0;
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, &node) in lp.iter().enumerate() {
        let i = a + 1;
        let repeats: f64 = lp[a + 1..]
            .iter()
            .enumerate()
            .filter(|(_, &other)| other == node)
            .map(|(gap, _)| m.pd1_gap(gap + 1))
            .sum();
        let g = (1.0 - repeats).max(0.0);
        let f = m.pd1_f(i);
        num += f * g;
        den += f;
    }
    (num / den).clamp(0.0, 1.0)
}

/// PD2 for the node `current` reached after the memory `lp` (most recent
/// first). Normalized so an all-distinct path scores 1.
pub fn pd2_diversity(lp: &[NodeId], current: NodeId, m: &DiversityModel) -> f64 {
    let total = m.pd2_g_total();
    let len = lp.len();
    // chronological sequence with the current node last: seq[len - i] = n_i
    let seq: Vec<NodeId> = lp.iter().rev().copied().chain([current]).collect();
    let depth = len.min(m.effective_depth_cap());
    let mut red = 0.0;
    for i in 1..=depth {
        let n_i = seq[len - i];
        let redundant = match m.pd2_mode {
            Pd2Mode::TransitionReplay => {
                (0..=len - i).any(|p| seq[p] == current && seq[p + i] == n_i)
            }
            Pd2Mode::DuplicateDepth => seq.iter().filter(|&&v| v == n_i).count() >= 2,
        };
        if redundant {
            red += m.pd2_g(i);
        }
    }
    ((total - red).max(0.0) / total).min(1.0)
}

/// 0 if `current` occurs in `lp`, else 1.
pub fn pd3_diversity(lp: &[NodeId], current: NodeId) -> f64 {
    if lp.contains(&current) {
        0.0
    } else {
        1.0
    }
}

/// Incremental path memory since the last reinitialization.
///
/// Visit counts live in node-indexed arrays stamped with an epoch, so a
/// reset costs O(1) regardless of graph size.
pub struct PathTracker {
    model: Option<DiversityModel>,
    window: usize,
    depth_cap: usize,
    // only PD2 needs the whole path; others keep a bounded tail
    keep: usize,
    path: Vec<NodeId>,
    epoch: u64,
    stamp: Vec<u64>,
    count: Vec<u32>,
    // (start value, steps, end value) of every path segment up to depth_cap
    segments: HashSet<(u32, u32, u32)>,
    track_segments: bool,
    scratch: Vec<NodeId>,
}

impl PathTracker {
    pub fn new(n: usize, model: Option<DiversityModel>, window: usize) -> Self {
        let depth_cap = model.map_or(0, |m| m.effective_depth_cap());
        let track_segments = matches!(
            model,
            Some(DiversityModel {
                kind: DiversityKind::Pd2,
                pd2_mode: Pd2Mode::TransitionReplay,
                ..
            })
        );
        let window = window.max(1);
        let keep = match model.map(|m| m.kind) {
            Some(DiversityKind::Pd2) => usize::MAX,
            Some(DiversityKind::Pd1) => window,
            _ => 1,
        };
        Self {
            model,
            window,
            depth_cap,
            keep,
            path: Vec::new(),
            epoch: 1,
            stamp: vec![0; n],
            count: vec![0; n],
            segments: HashSet::new(),
            track_segments,
            scratch: Vec::new(),
        }
    }

    /// Forgets everything (a reinitialization).
    pub fn reset(&mut self) {
        self.epoch += 1;
        self.path.clear();
        self.segments.clear();
    }

    /// Visits of `v` since the last reset.
    #[inline]
    pub fn visits(&self, v: NodeId) -> u32 {
        if self.stamp[v.index()] == self.epoch {
            self.count[v.index()]
        } else {
            0
        }
    }

    pub fn current(&self) -> Option<NodeId> {
        self.path.last().copied()
    }

    /// Records arrival at `v` and returns the increment for that arrival.
    pub fn arrive(&mut self, v: NodeId) -> f64 {
        let k = v.index();
        if self.stamp[k] != self.epoch {
            self.stamp[k] = self.epoch;
            self.count[k] = 0;
        }
        self.count[k] += 1;
        if self.keep != usize::MAX && self.path.len() >= 2 * self.keep {
            self.path.drain(..self.path.len() - self.keep);
        }
        self.path.push(v);
        if self.track_segments {
            let last = self.path.len() - 1;
            for i in 1..=last.min(self.depth_cap) {
                self.segments.insert((self.path[last - i].0, i as u32, v.0));
            }
        }
        self.diversity()
    }

    fn diversity(&mut self) -> f64 {
        let Some(m) = self.model else { return 1.0 };
        let len = self.path.len();
        let current = self.path[len - 1];
        match m.kind {
            DiversityKind::Pd1 => {
                self.scratch.clear();
                self.scratch
                    .extend(self.path.iter().rev().take(self.window).copied());
                pd1_diversity(&self.scratch, &m)
            }
            DiversityKind::Pd3 => {
                if self.visits(current) >= 2 {
                    0.0
                } else {
                    1.0
                }
            }
            DiversityKind::Pd2 => {
                let total = m.pd2_g_total();
                let history = len - 1;
                let mut red = 0.0;
                for i in 1..=history.min(self.depth_cap) {
                    let n_i = self.path[history - i];
                    let redundant = match m.pd2_mode {
                        Pd2Mode::TransitionReplay => {
                            self.segments.contains(&(current.0, i as u32, n_i.0))
                        }
                        Pd2Mode::DuplicateDepth => self.visits(n_i) >= 2,
                    };
                    if redundant {
                        red += m.pd2_g(i);
                    }
                }
                ((total - red).max(0.0) / total).min(1.0)
            }
        }
    }
}
