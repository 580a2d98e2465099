//! LSH Forest over MinHash signatures.
//!
//! Each of the `l` trees indexes one contiguous chunk of `d / l` signature
//! components. A tree is stored as the item ids sorted lexicographically by
//! their chunk; all items sharing a prefix with a query chunk then occupy one
//! contiguous range, found by binary search.

use std::cmp::Ordering;
use std::collections::HashSet;

use thiserror::Error;

use crate::exec::Exec;
use crate::hashing::{HashingError, Signature, SignatureMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ForestError {
    #[error("l = {l} must divide d = {d}")]
    ConfigMismatch { d: usize, l: usize },
    #[error("heterogeneous signatures: {0}")]
    HeterogeneousSignatures(#[from] HashingError),
    #[error("cannot index zero signatures")]
    Empty,
    #[error("query signature is incompatible with the index")]
    IncompatibleQuery,
    #[error("unknown item id {id} (index holds {n} items)")]
    UnknownId { id: usize, n: usize },
    #[error("{0} must be at least 1")]
    ZeroParameter(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LshForestConfig {
    /// Number of prefix trees.
    pub l: usize,
}

impl Default for LshForestConfig {
    fn default() -> Self {
        LshForestConfig { l: 8 }
    }
}

/// A neighbor with its estimated Jaccard distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub id: u32,
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct LshForest {
    signatures: SignatureMatrix,
    l: usize,
    chunk_len: usize,
    trees: Vec<Vec<u32>>,
}

fn common_prefix(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

pub fn build_index(signatures: SignatureMatrix, config: LshForestConfig, exec: Exec) -> Result<LshForest, ForestError> {
    LshForest::build(signatures, config, exec)
}

impl LshForest {
    pub fn build(signatures: SignatureMatrix, config: LshForestConfig, exec: Exec) -> Result<Self, ForestError> {
        let d = signatures.d();
        let l = config.l;
        if l == 0 || d % l != 0 {
            return Err(ForestError::ConfigMismatch { d, l });
        }
        if signatures.is_empty() {
            return Err(ForestError::Empty);
        }
        let n = signatures.len();
        let chunk_len = d / l;
        let trees = exec.map(l, |t| {
            let mut ids: Vec<u32> = (0..n as u32).collect();
            let chunk = |id: u32| {
                let row = signatures.row(id as usize);
                &row[t * chunk_len..(t + 1) * chunk_len]
            };
            ids.sort_unstable_by(|&a, &b| chunk(a).cmp(chunk(b)).then(a.cmp(&b)));
            ids
        });
        Ok(LshForest {
            signatures,
            l,
            chunk_len,
            trees,
        })
    }

    pub fn from_signatures(signatures: &[Signature], config: LshForestConfig, exec: Exec) -> Result<Self, ForestError> {
        if signatures.is_empty() {
            return Err(ForestError::Empty);
        }
        Self::build(SignatureMatrix::from_signatures(signatures)?, config, exec)
    }

    pub fn len(&self) -> usize {
        self.signatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signatures.is_empty()
    }

    pub fn num_trees(&self) -> usize {
        self.l
    }

    pub fn chunk_len(&self) -> usize {
        self.chunk_len
    }

    pub fn signatures(&self) -> &SignatureMatrix {
        &self.signatures
    }

    /// Item ids of tree `t` in sorted chunk order.
    pub fn tree(&self, t: usize) -> &[u32] {
        &self.trees[t]
    }

    #[inline]
    fn chunk(&self, t: usize, id: u32) -> &[u64] {
        let start = t * self.chunk_len;
        &self.signatures.row(id as usize)[start..start + self.chunk_len]
    }

    /// Half-open range of tree `t` whose chunks start with `prefix`.
    fn prefix_range(&self, t: usize, prefix: &[u64]) -> (usize, usize) {
        let tree = &self.trees[t];
        let len = prefix.len();
        let lo = tree.partition_point(|&id| self.chunk(t, id)[..len].cmp(prefix) == Ordering::Less);
        let hi = lo + tree[lo..].partition_point(|&id| self.chunk(t, id)[..len] == *prefix);
        (lo, hi)
    }

    /// Longest prefix of `q_chunk` shared with any item of tree `t`.
    fn deepest_match(&self, t: usize, q_chunk: &[u64]) -> usize {
        let tree = &self.trees[t];
        let pos = tree.partition_point(|&id| self.chunk(t, id) < q_chunk);
        let mut best = 0;
        if pos > 0 {
            best = common_prefix(q_chunk, self.chunk(t, tree[pos - 1]));
        }
        if pos < tree.len() {
            best = best.max(common_prefix(q_chunk, self.chunk(t, tree[pos])));
        }
        best
    }

    /// Synchronized descent over all trees from full chunk depth toward depth
    /// 1, stopping once `budget` distinct ids (other than `exclude`) are
    /// collected. Returns the ids in ascending order.
    fn harvest(&self, query: &[u64], budget: usize, exclude: Option<u32>) -> Vec<u32> {
        let m = self.chunk_len;
        let q_chunks: Vec<&[u64]> = (0..self.l).map(|t| &query[t * m..(t + 1) * m]).collect();
        // Depths deeper than any tree's best match harvest nothing.
        let start = (0..self.l)
            .map(|t| self.deepest_match(t, q_chunks[t]))
            .max()
            .unwrap_or(0);
        let mut found: HashSet<u32> = HashSet::with_capacity(budget.min(self.len()) * 2);
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.l];
        for depth in (1..=start).rev() {
            for t in 0..self.l {
                let (lo, hi) = self.prefix_range(t, &q_chunks[t][..depth]);
                let tree = &self.trees[t];
                let mut add = |range: std::ops::Range<usize>| {
                    for &id in &tree[range] {
                        if Some(id) != exclude {
                            found.insert(id);
                        }
                    }
                };
                // Ranges are nested across depths; only the new margins are new.
                match prev[t] {
                    Some((plo, phi)) => {
                        add(lo..plo);
                        add(phi..hi);
                    }
                    None => add(lo..hi),
                }
                if lo < hi {
                    prev[t] = Some((lo, hi));
                }
            }
            if found.len() >= budget {
                break;
            }
        }
        let mut ids: Vec<u32> = found.into_iter().collect();
        ids.sort_unstable();
        ids
    }

    fn check_query(&self, q: &Signature) -> Result<(), ForestError> {
        if q.mode != self.signatures.mode() || q.len() != self.signatures.d() {
            return Err(ForestError::IncompatibleQuery);
        }
        Ok(())
    }

    /// Candidate ids for an external query signature.
    pub fn query_candidates(&self, q: &Signature, budget: usize) -> Result<Vec<u32>, ForestError> {
        self.check_query(q)?;
        if budget == 0 {
            return Err(ForestError::ZeroParameter("budget"));
        }
        Ok(self.harvest(&q.components, budget, None))
    }

    /// Re-ranks `candidates` against `query` by full-signature distance and
    /// keeps the `k` closest, ordered by (distance, id).
    fn rank(&self, query: &[u64], candidates: Vec<u32>, k: usize) -> Vec<Neighbor> {
        let d = self.signatures.d();
        let mut scored: Vec<(usize, u32)> = candidates
            .into_iter()
            .map(|id| {
                let matches = crate::hashing::count_matches(query, self.signatures.row(id as usize));
                (d - matches, id)
            })
            .collect();
        scored.sort_unstable();
        scored.truncate(k);
        scored
            .into_iter()
            .map(|(mismatches, id)| Neighbor {
                id,
                distance: mismatches as f64 / d as f64,
            })
            .collect()
    }

    /// Approximate k nearest neighbors of an indexed item, excluding itself.
    ///
    /// Harvests `k * kc` candidates, then ranks them by estimated distance on
    /// the full signature.
    pub fn query_knn(&self, query_id: usize, k: usize, kc: usize) -> Result<Vec<Neighbor>, ForestError> {
        let n = self.len();
        if query_id >= n {
            return Err(ForestError::UnknownId { id: query_id, n });
        }
        if k == 0 {
            return Err(ForestError::ZeroParameter("k"));
        }
        if kc == 0 {
            return Err(ForestError::ZeroParameter("kc"));
        }
        let query = self.signatures.row(query_id);
        let candidates = self.harvest(query, k.saturating_mul(kc), Some(query_id as u32));
        Ok(self.rank(query, candidates, k))
    }

    /// Approximate k nearest neighbors of an external signature.
    pub fn query_knn_signature(&self, q: &Signature, k: usize, kc: usize) -> Result<Vec<Neighbor>, ForestError> {
        self.check_query(q)?;
        if k == 0 || kc == 0 {
            return Err(ForestError::ZeroParameter(if k == 0 { "k" } else { "kc" }));
        }
        let candidates = self.harvest(&q.components, k.saturating_mul(kc), None);
        Ok(self.rank(&q.components, candidates, k))
    }
}
