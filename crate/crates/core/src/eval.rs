//! Locality-preservation metrics and scaling measurements.
//!
//! For each item the exact nearest neighbor in the input space is looked up in
//! the embedding, and its competition rank (one plus the number of items
//! strictly closer) is recorded under tree hop distance and under planar
//! Euclidean distance.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use thiserror::Error;

use crate::exec::Exec;
use crate::hashing::{SparseBinarySet, WeightedVector};
use crate::knng::Edge;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("metric {metric:?} is not defined for {representation} items")]
    MetricMismatch { metric: Metric, representation: &'static str },
    #[error("size mismatch: expected {expected} items, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("at least two items are required, found {0}")]
    TooFewItems(usize),
    #[error("vectors have different dimensions")]
    DimensionMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Jaccard,
    WeightedJaccard,
    Euclidean,
}

/// Borrowed input items in either representation.
#[derive(Debug, Clone, Copy)]
pub enum Items<'a> {
    Sets(&'a [SparseBinarySet]),
    Vectors(&'a [WeightedVector]),
}

impl Items<'_> {
    pub fn len(&self) -> usize {
        match self {
            Items::Sets(s) => s.len(),
            Items::Vectors(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Exact nearest neighbor of every item (ties by smallest id).
#[derive(Debug, Clone, PartialEq)]
pub struct NnTable {
    pub nn: Vec<u32>,
    pub distance: Vec<f64>,
}

impl NnTable {
    pub fn len(&self) -> usize {
        self.nn.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nn.is_empty()
    }
}

/// Bitset rows for sets over a small universe; popcount intersections.
struct BitRows {
    words: usize,
    bits: Vec<u64>,
    sizes: Vec<u32>,
}

impl BitRows {
    const MAX_UNIVERSE: u32 = 1 << 14;

    fn new(sets: &[SparseBinarySet]) -> Option<Self> {
        let max = sets.iter().map(|s| s.max_element()).max()?;
        if max >= Self::MAX_UNIVERSE {
            return None;
        }
        let words = max as usize / 64 + 1;
        let mut bits = vec![0u64; words * sets.len()];
        for (i, s) in sets.iter().enumerate() {
            for &x in s.elements() {
                bits[i * words + x as usize / 64] |= 1 << (x % 64);
            }
        }
        let sizes = sets.iter().map(|s| s.len() as u32).collect();
        Some(BitRows { words, bits, sizes })
    }

    #[inline]
    fn intersection(&self, i: usize, j: usize) -> u32 {
        let a = &self.bits[i * self.words..(i + 1) * self.words];
        let b = &self.bits[j * self.words..(j + 1) * self.words];
        a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
    }
}

/// Scans all `j != i`, keeping the first index with the strictly smallest key.
fn argmin_by<K: Copy>(n: usize, i: usize, key: impl Fn(usize) -> K, less: impl Fn(&K, &K) -> bool) -> (usize, K) {
    let start = if i == 0 { 1 } else { 0 };
    let mut best = (start, key(start));
    for j in start + 1..n {
        if j == i {
            continue;
        }
        let k = key(j);
        if less(&k, &best.1) {
            best = (j, k);
        }
    }
    best
}

/// Exact O(n^2) nearest-neighbor scan.
pub fn true_nearest_neighbors(items: Items<'_>, metric: Metric, exec: Exec) -> Result<NnTable, EvalError> {
    let n = items.len();
    if n < 2 {
        return Err(EvalError::TooFewItems(n));
    }
    let pairs: Vec<(u32, f64)> = match (items, metric) {
        (Items::Sets(sets), Metric::Jaccard) => {
            // Similarity inter/union compared exactly by cross-multiplication.
            let greater = |a: &(u64, u64), b: &(u64, u64)| a.0 * b.1 > b.0 * a.1;
            let finish = |(j, (inter, union)): (usize, (u64, u64))| (j as u32, 1.0 - inter as f64 / union as f64);
            match BitRows::new(sets) {
                Some(rows) => exec.map(n, |i| {
                    finish(argmin_by(
                        n,
                        i,
                        |j| {
                            let inter = rows.intersection(i, j) as u64;
                            (inter, (rows.sizes[i] + rows.sizes[j]) as u64 - inter)
                        },
                        greater,
                    ))
                }),
                None => exec.map(n, |i| {
                    finish(argmin_by(
                        n,
                        i,
                        |j| {
                            let (inter, union) = crate::hashing::intersection_union(&sets[i], &sets[j]);
                            (inter as u64, union as u64)
                        },
                        greater,
                    ))
                }),
            }
        }
        (Items::Vectors(vecs), Metric::Jaccard) => {
            let sets: Vec<SparseBinarySet> = vecs.iter().map(|v| v.support()).collect();
            return true_nearest_neighbors(Items::Sets(&sets), Metric::Jaccard, exec);
        }
        (Items::Vectors(vecs), Metric::WeightedJaccard) => {
            let dim = vecs[0].dim();
            if vecs.iter().any(|v| v.dim() != dim) {
                return Err(EvalError::DimensionMismatch);
            }
            exec.map(n, |i| {
                let (j, d) = argmin_by(
                    n,
                    i,
                    |j| 1.0 - crate::hashing::exact_weighted_jaccard(&vecs[i], &vecs[j]).expect("equal dims"),
                    |a, b| a < b,
                );
                (j as u32, d)
            })
        }
        (Items::Vectors(vecs), Metric::Euclidean) => {
            let dim = vecs[0].dim();
            if vecs.iter().any(|v| v.dim() != dim) {
                return Err(EvalError::DimensionMismatch);
            }
            exec.map(n, |i| {
                let (j, d2) = argmin_by(
                    n,
                    i,
                    |j| {
                        vecs[i]
                            .weights()
                            .iter()
                            .zip(vecs[j].weights())
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>()
                    },
                    |a, b| a < b,
                );
                (j as u32, d2.sqrt())
            })
        }
        (Items::Sets(_), metric) => {
            return Err(EvalError::MetricMismatch {
                metric,
                representation: "binary set",
            })
        }
    };
    let (nn, distance) = pairs.into_iter().unzip();
    Ok(NnTable { nn, distance })
}

/// Ranks of each item's true nearest neighbor under some embedded distance.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    /// Competition rank per item: `1 + |{j : dist(i, j) < dist(i, nn(i))}|`.
    pub ranks: Vec<u64>,
    /// Counts of ranks `1..=HISTOGRAM_CAP`.
    pub histogram: BTreeMap<u64, usize>,
    /// Number of ranks above `HISTOGRAM_CAP`.
    pub overflow: usize,
    pub preservation_rate: f64,
}

impl RankReport {
    pub const HISTOGRAM_CAP: u64 = 100;

    pub fn from_ranks(ranks: Vec<u64>) -> Self {
        let mut histogram = BTreeMap::new();
        let mut overflow = 0;
        for &r in &ranks {
            if r <= Self::HISTOGRAM_CAP {
                *histogram.entry(r).or_insert(0) += 1;
            } else {
                overflow += 1;
            }
        }
        let ones = ranks.iter().filter(|&&r| r == 1).count();
        let preservation_rate = if ranks.is_empty() { 0.0 } else { ones as f64 / ranks.len() as f64 };
        RankReport {
            ranks,
            histogram,
            overflow,
            preservation_rate,
        }
    }

    pub fn mean_rank(&self) -> f64 {
        self.ranks.iter().map(|&r| r as f64).sum::<f64>() / self.ranks.len().max(1) as f64
    }

    /// `rank,count` CSV; ranks above the cap share the `>100` row.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("rank,count\n");
        for (rank, count) in &self.histogram {
            writeln!(out, "{rank},{count}").unwrap();
        }
        if self.overflow > 0 {
            writeln!(out, ">{},{}", Self::HISTOGRAM_CAP, self.overflow).unwrap();
        }
        out
    }

    /// One-line summary.
    pub fn summary(&self, name: &str) -> String {
        format!(
            "{name}: n={} preservation_rate={:.6} mean_rank={:.3} overflow={}",
            self.ranks.len(),
            self.preservation_rate,
            self.mean_rank(),
            self.overflow
        )
    }
}

/// Ranks under tree hop distance; nodes in other components are farther than
/// every reachable node.
pub fn topological_ranks(n: usize, tree_edges: &[Edge], nn: &NnTable, exec: Exec) -> Result<RankReport, EvalError> {
    if nn.len() != n {
        return Err(EvalError::SizeMismatch {
            expected: n,
            found: nn.len(),
        });
    }
    // Compressed adjacency.
    let mut offsets = vec![0usize; n + 1];
    for e in tree_edges {
        offsets[e.u as usize + 1] += 1;
        offsets[e.v as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut adj = vec![0u32; offsets[n]];
    for e in tree_edges {
        adj[fill[e.u as usize]] = e.v;
        fill[e.u as usize] += 1;
        adj[fill[e.v as usize]] = e.u;
        fill[e.v as usize] += 1;
    }
    let neighbors = |v: u32| &adj[offsets[v as usize]..offsets[v as usize + 1]];

    let ranks = exec.map(n, |i| {
        let target = nn.nn[i];
        let mut seen = vec![false; n];
        seen[i] = true;
        let mut frontier = vec![i as u32];
        let mut closer = 0u64;
        loop {
            let mut next = Vec::new();
            let mut found = false;
            for &v in &frontier {
                for &w in neighbors(v) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        found |= w == target;
                        next.push(w);
                    }
                }
            }
            if found || next.is_empty() {
                // Unreachable target: everything reached is strictly closer.
                return 1 + closer;
            }
            closer += next.len() as u64;
            frontier = next;
        }
    });
    Ok(RankReport::from_ranks(ranks))
}

/// Ranks under planar Euclidean distance.
pub fn euclidean_ranks(coords: &[[f64; 2]], nn: &NnTable, exec: Exec) -> Result<RankReport, EvalError> {
    let n = coords.len();
    if nn.len() != n {
        return Err(EvalError::SizeMismatch {
            expected: n,
            found: nn.len(),
        });
    }
    let d2 = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    let ranks = exec.map(n, |i| {
        let target = d2(coords[i], coords[nn.nn[i] as usize]);
        1 + (0..n).filter(|&j| j != i && d2(coords[i], coords[j]) < target).count() as u64
    });
    Ok(RankReport::from_ranks(ranks))
}

/// Wall-clock time per pipeline phase.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseTimings {
    /// Phase I: hashing and index construction.
    pub index: Duration,
    /// Phase II: k-NN graph.
    pub knng: Duration,
    /// Phase III: spanning forest.
    pub mst: Duration,
    /// Phase IV: layout.
    pub layout: Duration,
    pub total: Duration,
}

impl PhaseTimings {
    pub fn report(&self) -> String {
        format!(
            "index={:.6}s knng={:.6}s mst={:.6}s layout={:.6}s total={:.6}s",
            self.index.as_secs_f64(),
            self.knng.as_secs_f64(),
            self.mst.as_secs_f64(),
            self.layout.as_secs_f64(),
            self.total.as_secs_f64()
        )
    }
}

/// Least-squares slope of `ln(y)` against `ln(x)`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
