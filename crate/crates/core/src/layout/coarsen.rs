//! Multilevel coarsening of a tree by repeated edge contraction.

/// One level of the hierarchy: a tree on `n` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub n: usize,
    /// `(u, v, w)` with `u < v`.
    pub edges: Vec<(u32, u32, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy {
    /// `levels[0]` is the input tree, the last entry the coarsest level.
    pub levels: Vec<Level>,
    /// `parents[i][v]` is the node of `levels[i + 1]` that `v` of `levels[i]`
    /// was merged into.
    pub parents: Vec<Vec<u32>>,
}

impl Hierarchy {
    /// Number of contraction steps performed.
    pub fn depth(&self) -> usize {
        self.parents.len()
    }

    pub fn coarsest(&self) -> &Level {
        self.levels.last().expect("at least the input level")
    }
}

/// Greedy maximal matching in ascending `(w, u, v)` order; every node left
/// unmatched then joins the group of its lightest neighbor. Groups are
/// connected, so the contracted graph is again a tree, and each group has at
/// least two nodes, so a connected level at least halves.
fn contract(level: &Level) -> (Level, Vec<u32>) {
    let mut order: Vec<usize> = (0..level.edges.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        let (ua, va, wa) = level.edges[a];
        let (ub, vb, wb) = level.edges[b];
        wa.total_cmp(&wb).then((ua, va).cmp(&(ub, vb)))
    });
    let mut mate = vec![u32::MAX; level.n];
    for &e in &order {
        let (u, v, _) = level.edges[e];
        if mate[u as usize] == u32::MAX && mate[v as usize] == u32::MAX {
            mate[u as usize] = v;
            mate[v as usize] = u;
        }
    }
    let mut parent = vec![u32::MAX; level.n];
    let mut next = 0u32;
    for v in 0..level.n {
        if parent[v] == u32::MAX && mate[v] != u32::MAX {
            parent[v] = next;
            parent[mate[v] as usize] = next;
            next += 1;
        }
    }
    // Maximality: all neighbors of an unmatched node are matched.
    for &e in &order {
        let (u, v, _) = level.edges[e];
        for (a, b) in [(u, v), (v, u)] {
            if mate[a as usize] == u32::MAX && parent[a as usize] == u32::MAX {
                parent[a as usize] = parent[b as usize];
            }
        }
    }
    for p in parent.iter_mut().filter(|p| **p == u32::MAX) {
        *p = next;
        next += 1;
    }
    let mut edges: Vec<(u32, u32, f64)> = level
        .edges
        .iter()
        .filter_map(|&(u, v, w)| {
            let (pu, pv) = (parent[u as usize], parent[v as usize]);
            (pu != pv).then_some((pu.min(pv), pu.max(pv), w))
        })
        .collect();
    edges.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    (
        Level {
            n: next as usize,
            edges,
        },
        parent,
    )
}

/// Contracts matching groups, lightest edges first, until the tree has at
/// most `coarsest_size` nodes or no edges.
pub fn coarsen(n: usize, edges: &[(u32, u32, f64)], coarsest_size: usize) -> Hierarchy {
    let mut levels = vec![Level {
        n,
        edges: edges.to_vec(),
    }];
    let mut parents = Vec::new();
    loop {
        let cur = levels.last().expect("non-empty");
        if cur.n <= coarsest_size || cur.edges.is_empty() {
            break;
        }
        let (next, parent) = contract(cur);
        levels.push(next);
        parents.push(parent);
    }
    Hierarchy { levels, parents }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: u32) -> Vec<(u32, u32, f64)> {
        (0..n - 1).map(|i| (i, i + 1, 1.0)).collect()
    }

    #[test]
    fn small_tree_is_not_contracted() {
        let h = coarsen(2, &[(0, 1, 0.5)], 32);
        assert_eq!(h.depth(), 0);
        assert_eq!(h.levels.len(), 1);
    }

    #[test]
    fn path_of_64_halves() {
        // Any maximal matching on a 64-path has 22..=32 edges; the greedy one
        // in (w, u, v) order with equal weights matches (0,1), (2,3), ... .
        let h = coarsen(64, &path(64), 32);
        assert!(h.depth() >= 1);
        let first = &h.levels[1];
        assert!((32..=33).contains(&first.n), "{}", first.n);
    }

    #[test]
    fn levels_remain_trees() {
        // Random tree: node i attaches to a pseudo-random earlier node.
        let n = 500u32;
        let edges: Vec<(u32, u32, f64)> = (1..n)
            .map(|i| {
                let p = (crate::rng::splitmix64(i as u64) % i as u64) as u32;
                (p, i, (crate::rng::splitmix64(i as u64 + 99) % 100) as f64 / 100.0)
            })
            .collect();
        let h = coarsen(n as usize, &edges, 8);
        for lvl in &h.levels {
            assert_eq!(lvl.edges.len() + 1, lvl.n);
            let mut uf = crate::mst::UnionFind::new(lvl.n);
            for &(u, v, _) in &lvl.edges {
                assert!(u < v);
                assert!(uf.union(u, v), "cycle at level with n = {}", lvl.n);
            }
        }
        for (i, parent) in h.parents.iter().enumerate() {
            assert_eq!(parent.len(), h.levels[i].n);
            assert!(parent.iter().all(|&p| (p as usize) < h.levels[i + 1].n));
        }
    }

    #[test]
    fn star_collapses_in_one_step() {
        let edges: Vec<(u32, u32, f64)> = (1..1000).map(|i| (0, i, 1.0)).collect();
        let h = coarsen(1000, &edges, 32);
        assert_eq!(h.depth(), 1);
        assert_eq!(h.coarsest().n, 1);
        assert!(h.parents[0].iter().all(|&p| p == 0));
    }

    #[test]
    fn connected_levels_at_least_halve() {
        // Caterpillar: a spine with several leaves per spine node.
        let mut edges = Vec::new();
        for s in 0..50u32 {
            if s > 0 {
                edges.push((s - 1, s, 0.5));
            }
            for k in 0..6 {
                edges.push((s, 50 + s * 6 + k, 0.1 * k as f64));
            }
        }
        let h = coarsen(350, &edges, 2);
        for w in h.levels.windows(2) {
            assert!(2 * w[1].n <= w[0].n + 1, "{} -> {}", w[0].n, w[1].n);
        }
        assert!(h.coarsest().n <= 2);
    }
}
