//! Minimum spanning forest by Kruskal's algorithm.

use crate::knng::{Edge, WeightedGraph};

/// Disjoint-set forest with union by rank and path compression.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (hi, lo) = match self.rank[ra as usize].cmp(&self.rank[rb as usize]) {
            std::cmp::Ordering::Less => (rb, ra),
            std::cmp::Ordering::Greater => (ra, rb),
            std::cmp::Ordering::Equal => {
                self.rank[ra as usize] += 1;
                (ra, rb)
            }
        };
        self.parent[lo as usize] = hi;
        true
    }
}

/// Acyclic subgraph with one spanning tree per connected component.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningForest {
    n: usize,
    tree_edges: Vec<Edge>,
    component: Vec<u32>,
}

impl SpanningForest {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Accepted edges, canonical and sorted by `(w, u, v)`.
    pub fn tree_edges(&self) -> &[Edge] {
        &self.tree_edges
    }

    /// Component label per node: the smallest node id in its component.
    pub fn component(&self) -> &[u32] {
        &self.component
    }

    pub fn num_components(&self) -> usize {
        self.component
            .iter()
            .enumerate()
            .filter(|&(i, &c)| i as u32 == c)
            .count()
    }

    pub fn total_weight(&self) -> f64 {
        self.tree_edges.iter().map(|e| e.w).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.tree_edges {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
        deg
    }

    /// Adjacency lists in ascending neighbor order.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.tree_edges {
            adj[e.u as usize].push(e.v);
            adj[e.v as usize].push(e.u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Builds a forest from edges already known to be acyclic, e.g. a parsed
    /// `edges.csv`.
    pub fn from_tree_edges(n: usize, edges: Vec<Edge>) -> Option<Self> {
        let graph = crate::knng::graph_from_edge_list(
            &edges.iter().map(|e| (e.u, e.v, e.w)).collect::<Vec<_>>(),
            n,
        )
        .ok()?;
        let forest = kruskal(&graph);
        (forest.tree_edges.len() == graph.edges().len()).then_some(forest)
    }
}

/// Scans edges in `(w, u, v)` order and keeps those joining distinct sets.
pub fn kruskal(graph: &WeightedGraph) -> SpanningForest {
    let n = graph.n();
    let mut uf = UnionFind::new(n);
    let mut tree_edges = Vec::with_capacity(n.saturating_sub(1));
    for e in graph.edges() {
        if uf.union(e.u, e.v) {
            tree_edges.push(*e);
            if tree_edges.len() + 1 == n {
                break;
            }
        }
    }
    let component = components(n, &tree_edges);
    SpanningForest {
        n,
        tree_edges,
        component,
    }
}

/// Labels each node with the smallest node id of its tree.
pub fn components(n: usize, tree_edges: &[Edge]) -> Vec<u32> {
    let mut adj = vec![Vec::new(); n];
    for e in tree_edges {
        adj[e.u as usize].push(e.v);
        adj[e.v as usize].push(e.u);
    }
    const UNSET: u32 = u32::MAX;
    let mut label = vec![UNSET; n];
    let mut stack = Vec::new();
    for root in 0..n as u32 {
        if label[root as usize] != UNSET {
            continue;
        }
        label[root as usize] = root;
        stack.push(root);
        while let Some(x) = stack.pop() {
            for &y in &adj[x as usize] {
                if label[y as usize] == UNSET {
                    label[y as usize] = root;
                    stack.push(y);
                }
            }
        }
    }
    label
}
