//! Ranking comparison in native order.
//!
//! Inputs are renormalized before comparison, so raw `PR x F` vectors can
//! be passed directly.

use std::io::Write;

use crate::error::{input, Result};
use crate::graph::Graph;
use crate::solver::{fmt_f64, RankVector};

/// Node order used for prefix sums. Position `k` holds a node index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NativeOrder(Vec<usize>);

impl NativeOrder {
    /// Node `k` at position `k`; this is the construction order of the
    /// synthetic scenarios.
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// `order[k]` is the node at position `k`; must be a permutation.
    pub fn from_positions(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &v in &order {
            if v >= order.len() || std::mem::replace(&mut seen[v], true) {
                return input("native order must be a permutation of 0..n");
            }
        }
        Ok(Self(order))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn normalized(x: &RankVector) -> Result<Vec<f64>> {
    Ok(x.normalized()?.into_scores())
}

fn check_dims(a: &RankVector, b: &RankVector) -> Result<()> {
    if a.len() != b.len() {
        return input(format!(
            "score vectors differ in length ({} vs {})",
            a.len(),
            b.len()
        ));
    }
    Ok(())
}

/// In-degree scores, normalized. Fails on a graph without edges.
pub fn incoming_baseline(g: &Graph) -> Result<RankVector> {
    if g.edge_count() == 0 {
        return input("graph has no edges; in-degree baseline is undefined");
    }
    RankVector::probability(g.nodes().map(|v| g.in_degree(v) as f64).collect())
}

/// Cumulative normalized score of the first `i` nodes in `order`.
pub fn cdf_series(x: &RankVector, order: &NativeOrder) -> Result<Vec<f64>> {
    if x.len() != order.len() {
        return input("order and score vector differ in length");
    }
    let x = normalized(x)?;
    let mut acc = 0.0;
    let mut out: Vec<f64> = order
        .0
        .iter()
        .map(|&v| {
            acc += x[v];
            acc
        })
        .collect();
    // guard against rounding above 1 at the tail
    if let Some(last) = out.last_mut() {
        *last = last.min(1.0);
    }
    Ok(out)
}

/// Mean over positions of the absolute difference of the two CDFs.
pub fn average_deviation(x1: &RankVector, x2: &RankVector, order: &NativeOrder) -> Result<f64> {
    check_dims(x1, x2)?;
    let a = cdf_series(x1, order)?;
    let b = cdf_series(x2, order)?;
    let n = a.len().max(1) as f64;
    Ok(a.iter().zip(&b).map(|(p, q)| (p - q).abs()).sum::<f64>() / n)
}

/// Per-node comparison of mean-normalized scores `Y = X N / sum X`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeDeviation {
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
    /// `Y2/Y1`, `None` where `Y1` is zero.
    pub ratio: Vec<Option<f64>>,
}

pub fn node_deviation(x1: &RankVector, x2: &RankVector) -> Result<NodeDeviation> {
    check_dims(x1, x2)?;
    let n = x1.len() as f64;
    let y = |x: &RankVector| -> Result<Vec<f64>> {
        Ok(normalized(x)?.into_iter().map(|v| v * n).collect())
    };
    let y1 = y(x1)?;
    let y2 = y(x2)?;
    let ratio = y1
        .iter()
        .zip(&y2)
        .map(|(&a, &b)| (a > 0.0).then(|| b / a))
        .collect();
    Ok(NodeDeviation { y1, y2, ratio })
}

impl NodeDeviation {
    /// `node,Y1,Y2,ratio`, `NA` for undefined ratios.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "node,Y1,Y2,ratio")?;
        for i in 0..self.y1.len() {
            let ratio = self.ratio[i].map_or_else(|| "NA".to_string(), fmt_f64);
            writeln!(
                w,
                "{},{},{},{}",
                i + 1,
                fmt_f64(self.y1[i]),
                fmt_f64(self.y2[i]),
                ratio
            )?;
        }
        w.flush()?;
        Ok(())
    }

    /// Mean of the defined ratios.
    pub fn mean_ratio(&self) -> Option<f64> {
        let defined: Vec<f64> = self.ratio.iter().flatten().copied().collect();
        (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
    }
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        let mut start = 0;
        while start < idx.len() {
            let mut end = start + 1;
            while end < idx.len() && v[idx[end]] == v[idx[start]] {
                end += 1;
            }
            let avg = (start + end - 1) as f64 / 2.0 + 1.0;
            for &k in &idx[start..end] {
                r[k] = avg;
            }
            start = end;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;

    fn rv(v: &[f64]) -> RankVector {
        RankVector::raw(v.to_vec()).unwrap()
    }

    #[test]
    fn baseline_cases() {
        let star = Graph::build(4, [1u32, 2, 3].map(|l| (NodeId(l), NodeId(0)))).unwrap();
        assert_eq!(
            incoming_baseline(&star).unwrap().scores(),
            &[1.0, 0.0, 0.0, 0.0]
        );
        let cycle = Graph::build(
            3,
            [(0, 1), (1, 2), (2, 0)].map(|(a, b)| (NodeId(a), NodeId(b))),
        )
        .unwrap();
        assert!(incoming_baseline(&cycle)
            .unwrap()
            .scores()
            .iter()
            .all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
        assert!(incoming_baseline(&Graph::build(3, []).unwrap()).is_err());
    }

    #[test]
    fn deviation_cases() {
        let id = NativeOrder::identity(3);
        let a = rv(&[0.5, 0.3, 0.2]);
        let b = rv(&[0.4, 0.4, 0.2]);
        assert_eq!(average_deviation(&a, &a, &id).unwrap(), 0.0);
        let d = average_deviation(&a, &b, &id).unwrap();
        assert!((d - 0.1 / 3.0).abs() < 1e-15, "{d}");
        assert!(average_deviation(&a, &rv(&[1.0]), &id).is_err());
    }

    #[test]
    fn node_deviation_cases() {
        let a = rv(&[0.5, 0.3, 0.2]);
        let nd = node_deviation(&a, &a).unwrap();
        assert!(nd.ratio.iter().all(|r| (r.unwrap() - 1.0).abs() < 1e-15));
        let doubled = rv(&[1.0, 0.6, 0.4]);
        let nd = node_deviation(&a, &doubled).unwrap();
        assert!(nd.ratio.iter().all(|r| (r.unwrap() - 1.0).abs() < 1e-15));
        let nd = node_deviation(&rv(&[1.0, 0.0]), &rv(&[0.5, 0.5])).unwrap();
        assert_eq!(nd.ratio[1], None);
        let mut out = Vec::new();
        nd.write_csv(&mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().ends_with("2,0.0,1.0,NA\n"));
    }

    #[test]
    fn cdf_cases() {
        let id = NativeOrder::identity(4);
        assert_eq!(
            cdf_series(&rv(&[1.0; 4]), &id).unwrap(),
            vec![0.25, 0.5, 0.75, 1.0]
        );
        assert_eq!(
            cdf_series(&rv(&[2.0, 0.0, 0.0, 0.0]), &id).unwrap(),
            vec![1.0; 4]
        );
        let rev = NativeOrder::from_positions(vec![3, 2, 1, 0]).unwrap();
        assert_eq!(
            cdf_series(&rv(&[1.0, 0.0, 0.0, 0.0]), &rev).unwrap(),
            vec![0.0, 0.0, 0.0, 1.0]
        );
        assert!(NativeOrder::from_positions(vec![0, 0]).is_err());
    }

    #[test]
    fn spearman_basics() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
    }
}
