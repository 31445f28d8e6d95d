//! Statistical reliability of PageRank scores.
//!
//! The contribution ratio `r(i, j)` is the share of node `i`'s score that
//! arrives from `j`. The reliability of `x_i` is `F(i) = 1 - beta * sum_j
//! r(i,j)^alpha`: close to one when many feeders contribute evenly, down to
//! `1 - beta` when a single feeder carries the whole score.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::graph::{Graph, NodeId};
use crate::solver::{fmt_f64, RankVector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityParams {
    /// Concentration exponent, > 1.
    pub alpha: f64,
    /// Penalty weight in [0, 1].
    pub beta: f64,
    /// Count teleport transitions as contributions.
    pub include_damping: bool,
}

impl Default for ReliabilityParams {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            beta: 0.5,
            include_damping: false,
        }
    }
}

impl ReliabilityParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            include_damping: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0 && self.alpha.is_finite()) {
            return input(format!(
                "reliability alpha must exceed 1, got {}",
                self.alpha
            ));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return input(format!(
                "reliability beta must lie in [0, 1], got {}",
                self.beta
            ));
        }
        Ok(())
    }
}

/// Diffuse teleport part of the ratios when damping is included: every
/// source `j` sends `weight[j] * inv_total[i]` to every non-neighbor `i`.
#[derive(Clone, Debug)]
struct TeleportPart {
    weight: Vec<f64>,
    weight_total: f64,
    inv_total: Vec<f64>,
}

/// Sparse contribution matrix, one row per target node.
#[derive(Clone, Debug)]
pub struct ContributionRatios {
    offsets: Vec<usize>,
    sources: Vec<NodeId>,
    ratios: Vec<f64>,
    teleport: Option<TeleportPart>,
}

impl ContributionRatios {
    /// Builds from per-target rows. Rows with zero total are left empty.
    pub(crate) fn from_rows<I>(n: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = Vec<(NodeId, f64)>>,
    {
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut sources = Vec::new();
        let mut ratios = Vec::new();
        for row in rows {
            let total: f64 = row.iter().map(|(_, w)| w).sum();
            if total > 0.0 {
                for (s, w) in row {
                    sources.push(s);
                    ratios.push(w / total);
                }
            }
            offsets.push(sources.len());
        }
        debug_assert_eq!(offsets.len(), n + 1);
        Self {
            offsets,
            sources,
            ratios,
            teleport: None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Link contributions into `i` as `(source, ratio)`, by ascending source.
    pub fn row(&self, i: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let span = self.offsets[i.index()]..self.offsets[i.index() + 1];
        self.sources[span.clone()]
            .iter()
            .copied()
            .zip(self.ratios[span].iter().copied())
    }

    pub fn has_links(&self, i: NodeId) -> bool {
        self.offsets[i.index() + 1] > self.offsets[i.index()]
    }

    pub fn ratio(&self, i: NodeId, j: NodeId) -> f64 {
        let span = self.offsets[i.index()]..self.offsets[i.index() + 1];
        match self.sources[span.clone()].binary_search(&j) {
            Ok(k) => self.ratios[span.start + k],
            Err(_) => self
                .teleport
                .as_ref()
                .map_or(0.0, |t| t.weight[j.index()] * t.inv_total[i.index()]),
        }
    }

    /// Sum of row `i` including any teleport share.
    pub fn row_sum(&self, i: NodeId) -> f64 {
        let links: f64 = self.row(i).map(|(_, r)| r).sum();
        links + self.teleport_share(i)
    }

    fn teleport_share(&self, i: NodeId) -> f64 {
        let Some(t) = &self.teleport else { return 0.0 };
        let linked: f64 = self.row(i).map(|(j, _)| t.weight[j.index()]).sum();
        ((t.weight_total - linked) * t.inv_total[i.index()]).max(0.0)
    }
}

/// Contribution ratios `r(i,j) = p(i,j) x_j / x_i` for a solved score vector.
///
/// With `include_damping = false` only link transitions count and each row
/// is renormalized over them. With damping included every node contributes
/// its teleport share too. Rows are divided by their computed total, which
/// equals `x_i` at the fixed point.
pub fn contribution_ratios(
    g: &Graph,
    x: &RankVector,
    epsilon: f64,
    params: &ReliabilityParams,
) -> Result<ContributionRatios> {
    params.validate()?;
    let n = g.node_count();
    if x.len() != n {
        return input(format!(
            "score vector has {} entries, graph has {n} nodes",
            x.len()
        ));
    }
    let x = x.scores();
    let keep = 1.0 - epsilon;

    if !params.include_damping {
        let rows = g.nodes().map(|i| {
            g.in_neighbors(i)
                .iter()
                .map(|&j| (j, x[j.index()] / g.out_degree(j) as f64))
                .collect::<Vec<_>>()
        });
        let r = ContributionRatios::from_rows(n, rows);
        if let Some(i) = g.nodes().find(|&i| g.in_degree(i) > 0 && !r.has_links(i)) {
            return Err(Error::Numeric(format!(
                "node {i} has in-links but no feeder carries score"
            )));
        }
        return Ok(r);
    }

    let tele_prob = |j: NodeId| {
        if g.out_degree(j) == 0 {
            1.0 / n as f64
        } else {
            epsilon / n as f64
        }
    };
    let weight: Vec<f64> = g.nodes().map(|j| tele_prob(j) * x[j.index()]).collect();
    let weight_total: f64 = weight.iter().sum();

    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut sources = Vec::with_capacity(g.edge_count());
    let mut raw = Vec::with_capacity(g.edge_count());
    let mut inv_total = Vec::with_capacity(n);
    for i in g.nodes() {
        let mut link_total = 0.0;
        let mut linked_weight = 0.0;
        for &j in g.in_neighbors(i) {
            let link = keep / g.out_degree(j) as f64 * x[j.index()];
            let c = weight[j.index()] + link;
            sources.push(j);
            raw.push(c);
            link_total += c;
            linked_weight += weight[j.index()];
        }
        let total = link_total + (weight_total - linked_weight).max(0.0);
        if total.is_nan() || total <= 0.0 {
            return Err(Error::Numeric(format!("node {i} has zero score")));
        }
        inv_total.push(1.0 / total);
        offsets.push(sources.len());
    }
    let ratios = g
        .nodes()
        .flat_map(|i| g.in_slots(i).map(move |s| (i, s)))
        .map(|(i, s)| raw[s] * inv_total[i.index()])
        .collect();
    Ok(ContributionRatios {
        offsets,
        sources,
        ratios,
        teleport: Some(TeleportPart {
            weight,
            weight_total,
            inv_total,
        }),
    })
}

/// Statistical error `E` and reliability `F = 1 - E` per node.
#[derive(Clone, Debug, PartialEq)]
pub struct ReliabilityVector {
    pub error: Vec<f64>,
    pub reliability: Vec<f64>,
}

impl ReliabilityVector {
    pub fn f(&self, v: NodeId) -> f64 {
        self.reliability[v.index()]
    }

    pub fn len(&self) -> usize {
        self.reliability.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reliability.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.reliability.iter().sum::<f64>() / self.len().max(1) as f64
    }
}

/// `E(i) = beta * sum_j r(i,j)^alpha`, `F(i) = 1 - E(i)`. Nodes without
/// link contributions are treated as fully concentrated (`F = 1 - beta`).
pub fn reliability(
    r: &ContributionRatios,
    params: &ReliabilityParams,
) -> Result<ReliabilityVector> {
    params.validate()?;
    let (alpha, beta) = (params.alpha, params.beta);
    let tele_power_total = r
        .teleport
        .as_ref()
        .map(|t| t.weight.iter().map(|w| w.powf(alpha)).sum::<f64>());

    let n = r.node_count();
    let mut error = Vec::with_capacity(n);
    for i in (0..n).map(NodeId::from) {
        if !r.has_links(i) {
            error.push(beta);
            continue;
        }
        let mut concentration: f64 = r.row(i).map(|(_, v)| v.powf(alpha)).sum();
        if let (Some(t), Some(total)) = (&r.teleport, tele_power_total) {
            let linked: f64 = r.row(i).map(|(j, _)| t.weight[j.index()].powf(alpha)).sum();
            concentration += (total - linked).max(0.0) * t.inv_total[i.index()].powf(alpha);
        }
        error.push(beta * concentration);
    }
    let reliability = error.iter().map(|e| 1.0 - e).collect();
    Ok(ReliabilityVector { error, reliability })
}

/// `X'(i) = F(i) X(i)`, returned unnormalized.
pub fn apply_reliability(x: &RankVector, f: &ReliabilityVector) -> Result<RankVector> {
    if x.len() != f.len() {
        return input(format!(
            "score vector has {} entries, reliability vector {}",
            x.len(),
            f.len()
        ));
    }
    RankVector::raw(
        x.scores()
            .iter()
            .zip(&f.reliability)
            .map(|(s, fi)| s * fi.max(0.0))
            .collect(),
    )
}

/// The `k` feeders of `i` with the largest ratio; ties go to the lower id.
pub fn top_contributors(r: &ContributionRatios, i: NodeId, k: usize) -> Vec<(NodeId, f64)> {
    let mut row: Vec<(NodeId, f64)> = r.row(i).collect();
    row.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    row.truncate(k);
    row
}

/// Sum over contribution paths `target <- j1 <- ... <- source` of at most
/// `max_depth` links of the product of ratios along the path, each weighted
/// by `(1 - epsilon)^links` when `discount` is set. Paths may revisit nodes;
/// each distinct node sequence counts once.
pub fn multi_hop_contribution(
    r: &ContributionRatios,
    target: NodeId,
    source: NodeId,
    max_depth: usize,
    epsilon: f64,
    discount: bool,
) -> f64 {
    let step = if discount { 1.0 - epsilon } else { 1.0 };

    fn walk(
        r: &ContributionRatios,
        at: NodeId,
        source: NodeId,
        depth: usize,
        max_depth: usize,
        carried: f64,
        step: f64,
    ) -> f64 {
        let mut sum = 0.0;
        for (j, ratio) in r.row(at) {
            let w = carried * ratio * step;
            if w == 0.0 {
                continue;
            }
            if j == source {
                sum += w;
            }
            if depth < max_depth {
                sum += walk(r, j, source, depth + 1, max_depth, w, step);
            }
        }
        sum
    }

    if max_depth == 0 {
        return 0.0;
    }
    walk(r, target, source, 1, max_depth, 1.0, step)
}

/// One line of a contributor report.
#[derive(Clone, Debug, PartialEq)]
pub struct ContributorRow {
    pub target: NodeId,
    pub source: NodeId,
    pub ratio: f64,
    pub depth: usize,
}

/// For each depth `1..=max_depth`, the `k` largest total contributions of
/// paths with exactly that many links into `target`.
pub fn contributor_report(
    r: &ContributionRatios,
    target: NodeId,
    max_depth: usize,
    k: usize,
    epsilon: f64,
    discount: bool,
) -> Vec<ContributorRow> {
    let step = if discount { 1.0 - epsilon } else { 1.0 };
    let mut frontier: BTreeMap<NodeId, f64> = BTreeMap::from([(target, 1.0)]);
    let mut out = Vec::new();
    for depth in 1..=max_depth {
        let mut next: BTreeMap<NodeId, f64> = BTreeMap::new();
        for (&at, &w) in &frontier {
            for (j, ratio) in r.row(at) {
                *next.entry(j).or_insert(0.0) += w * ratio * step;
            }
        }
        let mut ranked: Vec<(NodeId, f64)> = next.iter().map(|(&j, &w)| (j, w)).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        out.extend(
            ranked
                .into_iter()
                .take(k)
                .map(|(source, ratio)| ContributorRow {
                    target,
                    source,
                    ratio,
                    depth,
                }),
        );
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    out
}

pub fn write_contributor_csv<W: Write>(rows: &[ContributorRow], mut w: W) -> Result<()> {
    writeln!(w, "target,source,ratio,depth")?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{}",
            row.target,
            row.source,
            fmt_f64(row.ratio),
            row.depth
        )?;
    }
    w.flush()?;
    Ok(())
}

/// `node,score,E,F,score_times_F`.
pub fn write_reliability_csv<W: Write>(
    x: &RankVector,
    rel: &ReliabilityVector,
    mut w: W,
) -> Result<()> {
    writeln!(w, "node,score,E,F,score_times_F")?;
    for (i, s) in x.scores().iter().enumerate() {
        let f = rel.reliability[i];
        writeln!(
            w,
            "{},{},{},{},{}",
            i + 1,
            fmt_f64(*s),
            fmt_f64(rel.error[i]),
            fmt_f64(f),
            fmt_f64(s * f.max(0.0))
        )?;
    }
    w.flush()?;
    Ok(())
}
