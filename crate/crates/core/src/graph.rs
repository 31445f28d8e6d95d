//! Immutable directed graph in compressed offset-array form, together with
//! the random-surfer transition kernel and the edge-list text format.
//!
//! Node indices are 0-based. The text format and every report use 1-based
//! positions so that node `k` is written as `k + 1`.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{input, Error, Result};

/// Dense node index in `[0, n)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// 1-based position used in files and reports.
    #[inline]
    pub fn position(self) -> usize {
        self.index() + 1
    }
}

impl From<usize> for NodeId {
    #[inline]
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.position())
    }
}

/// Teleport probability ε; the damping factor is `1 - ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DampingConfig {
    epsilon: f64,
}

impl DampingConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return input(format!("epsilon must lie in [0, 1], got {epsilon}"));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn damping_factor(&self) -> f64 {
        1.0 - self.epsilon
    }
}

impl Default for DampingConfig {
    fn default() -> Self {
        Self { epsilon: 0.15 }
    }
}

/// Sparse directed graph with both adjacency directions.
///
/// Edges are a set: duplicate pairs collapse on build. Self-loops are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    // out-edge slot -> in-edge slot of the same edge
    out_to_in: Vec<usize>,
}

impl Graph {
    /// Builds a graph from `(src, dst)` pairs. Duplicates are dropped.
    pub fn build<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if n > u32::MAX as usize {
            return input(format!("node count {n} exceeds u32 range"));
        }
        let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
        for (s, d) in edges {
            if s.index() >= n || d.index() >= n {
                return input(format!(
                    "edge ({}, {}) has an endpoint outside [0, {n})",
                    s.0, d.0
                ));
            }
            pairs.push((s, d));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self::from_sorted_unique(n, &pairs))
    }

    fn from_sorted_unique(n: usize, pairs: &[(NodeId, NodeId)]) -> Self {
        let m = pairs.len();
        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &(s, d) in pairs {
            out_offsets[s.index() + 1] += 1;
            in_offsets[d.index() + 1] += 1;
        }
        for k in 0..n {
            out_offsets[k + 1] += out_offsets[k];
            in_offsets[k + 1] += in_offsets[k];
        }
        let out_targets: Vec<NodeId> = pairs.iter().map(|&(_, d)| d).collect();

        // Pairs are sorted by source, so filling in-slots in that order
        // leaves every in-list sorted by source as well.
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![NodeId(0); m];
        let mut out_to_in = vec![0usize; m];
        for (slot, &(s, d)) in pairs.iter().enumerate() {
            let at = cursor[d.index()];
            cursor[d.index()] += 1;
            in_sources[at] = s;
            out_to_in[slot] = at;
        }

        Self {
            n,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            out_to_in,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n).map(NodeId::from)
    }

    /// Successors of `v`, sorted ascending.
    #[inline]
    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v.index();
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    /// Predecessors of `v`, sorted ascending.
    #[inline]
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v.index();
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    #[inline]
    pub fn out_degree(&self, v: NodeId) -> usize {
        let v = v.index();
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    #[inline]
    pub fn in_degree(&self, v: NodeId) -> usize {
        let v = v.index();
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn has_edge(&self, src: NodeId, dst: NodeId) -> bool {
        self.out_neighbors(src).binary_search(&dst).is_ok()
    }

    /// Range of in-edge slots belonging to `v`. Slots index per-edge arrays
    /// laid out in in-adjacency order (see [`Graph::in_slot_of_out`]).
    #[inline]
    pub fn in_slots(&self, v: NodeId) -> std::ops::Range<usize> {
        let v = v.index();
        self.in_offsets[v]..self.in_offsets[v + 1]
    }

    /// In-edge slot of the `k`-th out-edge of `src`.
    #[inline]
    pub fn in_slot_of_out(&self, src: NodeId, k: usize) -> usize {
        self.out_to_in[self.out_offsets[src.index()] + k]
    }

    /// All edges as `(src, dst)`, sorted by source then target.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |s| self.out_neighbors(s).iter().map(move |&d| (s, d)))
    }

    /// Returns a copy where each listed node's out-edges are replaced by
    /// the given successor sets. Incoming edges of all nodes are kept.
    pub fn with_replaced_out_edges(&self, replacements: &[(NodeId, Vec<NodeId>)]) -> Result<Self> {
        let replaced = |s: NodeId| replacements.iter().any(|(r, _)| *r == s);
        let kept = self.edges().filter(|&(s, _)| !replaced(s));
        let added = replacements
            .iter()
            .flat_map(|(s, ds)| ds.iter().map(move |&d| (*s, d)));
        Graph::build(self.n, kept.chain(added).collect::<Vec<_>>())
    }

    /// Random-surfer probability of moving from `j` to `i`.
    ///
    /// Dangling `j` spreads uniformly, so every column sums to one.
    pub fn transition_prob(&self, damping: &DampingConfig, i: NodeId, j: NodeId) -> f64 {
        let n = self.n as f64;
        let deg = self.out_degree(j);
        if deg == 0 {
            return 1.0 / n;
        }
        let eps = damping.epsilon();
        let teleport = eps / n;
        if self.has_edge(j, i) {
            teleport + (1.0 - eps) / deg as f64
        } else {
            teleport
        }
    }

    /// Nodes without out-links.
    pub fn dangling_nodes(&self) -> Vec<NodeId> {
        self.nodes().filter(|&v| self.out_degree(v) == 0).collect()
    }

    /// Writes the edge-list text format: a `# Nodes: N Edges: M` header and
    /// one 1-based `src dst` pair per line.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# Nodes: {} Edges: {}", self.n, self.edge_count())?;
        for (s, d) in self.edges() {
            writeln!(w, "{} {}", s.position(), d.position())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path.as_ref())?;
        self.write_edge_list(std::io::BufWriter::new(f))
    }

    /// Parses the edge-list text format. `#` lines are comments; a
    /// `# Nodes: N` comment fixes the node count, otherwise it is the
    /// largest index seen.
    pub fn read_edge_list<R: BufRead>(reader: R, origin: &Path) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut max_seen = 0usize;
        let mut edges = Vec::new();
        let parse_err = |line: usize, msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            msg,
        };
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                if declared.is_none() {
                    declared = parse_nodes_header(comment);
                }
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(parse_err(
                    lineno,
                    format!("expected `src dst`, got {trimmed:?}"),
                ));
            };
            let parse_pos = |tok: &str| -> Result<usize> {
                match tok.parse::<usize>() {
                    Ok(0) => Err(parse_err(lineno, "node positions are 1-based".into())),
                    Ok(p) => Ok(p),
                    Err(e) => Err(parse_err(lineno, format!("bad node {tok:?}: {e}"))),
                }
            };
            let (s, d) = (parse_pos(a)?, parse_pos(b)?);
            max_seen = max_seen.max(s).max(d);
            edges.push((NodeId::from(s - 1), NodeId::from(d - 1)));
        }
        let n = match declared {
            Some(n) if n < max_seen => {
                return input(format!(
                    "{}: header declares {n} nodes but position {max_seen} appears",
                    origin.display()
                ))
            }
            Some(n) => n,
            None => max_seen,
        };
        Graph::build(n, edges)
    }

    pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path)?;
        Self::read_edge_list(std::io::BufReader::new(f), path)
    }
}

fn parse_nodes_header(comment: &str) -> Option<usize> {
    let mut toks = comment.split_whitespace();
    while let Some(t) = toks.next() {
        if t.eq_ignore_ascii_case("nodes:") {
            return toks.next()?.parse().ok();
        }
    }
    None
}
