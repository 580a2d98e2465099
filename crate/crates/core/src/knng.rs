//! Undirected weighted k-nearest-neighbor graphs.

use std::cmp::Ordering;

use thiserror::Error;

use crate::exec::Exec;
use crate::forest::{ForestError, LshForest, Neighbor};
use crate::hashing::SignatureMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("neighbor backend failed: {0}")]
    BackendFailure(#[from] ForestError),
    #[error("edge {index}: self-loop on node {node}")]
    SelfLoop { index: usize, node: u32 },
    #[error("edge {index}: node {node} out of range for {n} nodes")]
    NodeOutOfRange { index: usize, node: u32, n: usize },
    #[error("edge {index}: weight is not finite")]
    NonFiniteWeight { index: usize },
    #[error("{0} must be at least 1")]
    ZeroParameter(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub w: f64,
}

impl Edge {
    /// Orders edges by `(w, u, v)`.
    pub fn cmp_weight(&self, other: &Edge) -> Ordering {
        self.w
            .total_cmp(&other.w)
            .then(self.u.cmp(&other.u))
            .then(self.v.cmp(&other.v))
    }
}

/// Undirected graph with canonical edges (`u < v`), no duplicates, sorted by
/// `(w, u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Canonicalizes, collapses duplicate pairs to their minimum weight and
    /// sorts. Edges must already be loop-free and in range.
    fn from_raw(n: usize, mut edges: Vec<Edge>) -> Self {
        for e in &mut edges {
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
        }
        edges.sort_unstable_by(|a, b| (a.u, a.v).cmp(&(b.u, b.v)).then(a.w.total_cmp(&b.w)));
        edges.dedup_by(|later, first| later.u == first.u && later.v == first.v);
        edges.sort_unstable_by(Edge::cmp_weight);
        WeightedGraph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
        deg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnnGraphConfig {
    pub k: usize,
    /// Candidate multiplier of the augmented query.
    pub kc: usize,
}

impl Default for KnnGraphConfig {
    fn default() -> Self {
        KnnGraphConfig { k: 10, kc: 10 }
    }
}

/// Anything that can answer k-NN queries for the items `0..len()`.
pub trait NeighborBackend: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Up to `k` neighbors of `id` (never `id` itself), sorted by (distance, id).
    fn query_knn(&self, id: usize, k: usize, kc: usize) -> Result<Vec<Neighbor>, ForestError>;
}

impl NeighborBackend for LshForest {
    fn len(&self) -> usize {
        LshForest::len(self)
    }

    fn query_knn(&self, id: usize, k: usize, kc: usize) -> Result<Vec<Neighbor>, ForestError> {
        LshForest::query_knn(self, id, k, kc)
    }
}

/// Exhaustive scan over estimated signature distances.
#[derive(Debug, Clone, Copy)]
pub struct ExactBackend<'a> {
    signatures: &'a SignatureMatrix,
}

pub fn exact_knn_backend(signatures: &SignatureMatrix) -> ExactBackend<'_> {
    ExactBackend { signatures }
}

impl NeighborBackend for ExactBackend<'_> {
    fn len(&self) -> usize {
        self.signatures.len()
    }

    fn query_knn(&self, id: usize, k: usize, _kc: usize) -> Result<Vec<Neighbor>, ForestError> {
        let n = self.len();
        if id >= n {
            return Err(ForestError::UnknownId { id, n });
        }
        if k == 0 {
            return Err(ForestError::ZeroParameter("k"));
        }
        let d = self.signatures.d();
        let mut scored: Vec<(usize, u32)> = (0..n)
            .filter(|&j| j != id)
            .map(|j| (d - self.signatures.matches(id, j), j as u32))
            .collect();
        let k = k.min(scored.len());
        if k < scored.len() {
            scored.select_nth_unstable(k);
            scored.truncate(k);
        }
        scored.sort_unstable();
        Ok(scored
            .into_iter()
            .map(|(mismatches, id)| Neighbor {
                id,
                distance: mismatches as f64 / d as f64,
            })
            .collect())
    }
}

/// Unions every node's neighbor list into an undirected graph weighted by the
/// reported distances. The result may be disconnected.
pub fn build_knn_graph<B: NeighborBackend + ?Sized>(
    backend: &B,
    config: KnnGraphConfig,
    exec: Exec,
) -> Result<WeightedGraph, GraphError> {
    if config.k == 0 {
        return Err(GraphError::ZeroParameter("k"));
    }
    if config.kc == 0 {
        return Err(GraphError::ZeroParameter("kc"));
    }
    let n = backend.len();
    let lists = exec.try_map(n, |i| backend.query_knn(i, config.k, config.kc))?;
    let edges = lists
        .into_iter()
        .enumerate()
        .flat_map(|(i, list)| {
            list.into_iter().map(move |nb| Edge {
                u: i as u32,
                v: nb.id,
                w: nb.distance,
            })
        })
        .collect();
    Ok(WeightedGraph::from_raw(n, edges))
}

/// Validates a user edge list. Duplicate undirected pairs keep the minimum weight.
pub fn graph_from_edge_list(entries: &[(u32, u32, f64)], n: usize) -> Result<WeightedGraph, GraphError> {
    let mut edges = Vec::with_capacity(entries.len());
    for (index, &(u, v, w)) in entries.iter().enumerate() {
        for node in [u, v] {
            if node as usize >= n {
                return Err(GraphError::NodeOutOfRange { index, node, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop { index, node: u });
        }
        if !w.is_finite() {
            return Err(GraphError::NonFiniteWeight { index });
        }
        edges.push(Edge { u, v, w });
    }
    Ok(WeightedGraph::from_raw(n, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashing::{HashMode, Signature};

    fn matrix(rows: &[&[u64]]) -> SignatureMatrix {
        let sigs: Vec<Signature> = rows
            .iter()
            .map(|r| Signature {
                mode: HashMode::Binary,
                components: r.to_vec(),
            })
            .collect();
        SignatureMatrix::from_signatures(&sigs).unwrap()
    }

    #[test]
    fn two_nodes_single_edge() {
        let m = matrix(&[&[1, 2], &[1, 3]]);
        let g = build_knn_graph(&exact_knn_backend(&m), KnnGraphConfig { k: 4, kc: 1 }, Exec::default()).unwrap();
        assert_eq!(g.edges(), &[Edge { u: 0, v: 1, w: 0.5 }]);
    }

    #[test]
    fn duplicates_form_zero_triangle() {
        let m = matrix(&[&[1, 2], &[1, 2], &[1, 2]]);
        let g = build_knn_graph(&exact_knn_backend(&m), KnnGraphConfig { k: 2, kc: 1 }, Exec::default()).unwrap();
        let pairs: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
        assert_eq!(pairs, vec![(0, 1, 0.0), (0, 2, 0.0), (1, 2, 0.0)]);
    }

    #[test]
    fn exact_backend_duplicate_first_and_full_list() {
        let m = matrix(&[&[1, 2, 3], &[1, 2, 3], &[4, 5, 3]]);
        let b = exact_knn_backend(&m);
        let r = b.query_knn(0, 2, 1).unwrap();
        assert_eq!((r[0].id, r[0].distance), (1, 0.0));
        assert_eq!(r.iter().map(|x| x.id).collect::<Vec<_>>(), vec![1, 2]);
        let r = b.query_knn(2, 5, 1).unwrap();
        assert_eq!(r.iter().map(|x| x.id).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn edge_list_rules() {
        let g = graph_from_edge_list(&[(0, 1, 1.0)], 2).unwrap();
        assert_eq!(g.edges().len(), 1);
        let g = graph_from_edge_list(&[(1, 0, 2.0), (0, 1, 1.0)], 2).unwrap();
        assert_eq!(g.edges(), &[Edge { u: 0, v: 1, w: 1.0 }]);
        assert_eq!(
            graph_from_edge_list(&[(0, 1, 1.0), (3, 3, 0.5)], 4),
            Err(GraphError::SelfLoop { index: 1, node: 3 })
        );
        assert_eq!(
            graph_from_edge_list(&[(0, 5, 1.0)], 4),
            Err(GraphError::NodeOutOfRange { index: 0, node: 5, n: 4 })
        );
        assert_eq!(
            graph_from_edge_list(&[(0, 1, f64::NAN)], 4),
            Err(GraphError::NonFiniteWeight { index: 0 })
        );
    }

    #[test]
    fn sort_order_is_weight_then_ids() {
        let g = graph_from_edge_list(&[(2, 3, 0.5), (0, 3, 0.5), (1, 2, 0.1), (0, 1, 0.9)], 4).unwrap();
        let pairs: Vec<_> = g.edges().iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(pairs, vec![(1, 2), (0, 3), (2, 3), (0, 1)]);
        assert_eq!(g.degrees(), vec![2, 2, 2, 2]);
    }
}
