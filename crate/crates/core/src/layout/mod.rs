//! Multilevel spring-electrical layout of a spanning forest.
//!
//! Each tree is coarsened by edge contraction, the coarsest level is placed
//! at random, and every finer level starts from its parents' positions and is
//! refined with force iterations: repulsion `C p^(1+r) / dist^r` between all
//! pairs (Barnes-Hut approximated) and attraction `dist^2 / p` along tree
//! edges. Nodes move a cooling step length along their net force direction.
//! When a level is prolonged the parent positions are stretched by the square
//! root of the node count ratio, so the finer level starts near its natural
//! extent and only needs local refinement.
//! Components are then packed on a grid and the drawing is centered.

pub mod coarsen;
pub mod quadtree;

pub use coarsen::{coarsen, Hierarchy, Level};
pub use quadtree::{quadtree_repulsion, QuadTree, REPULSION_C};

use crate::exec::Exec;
use crate::knng::Edge;
use crate::mst::SpanningForest;
use crate::rng::CounterRng;

/// Initial step of finer levels, as a fraction of `p`.
const FINE_STEP: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutConfig {
    /// Point size; scales ideal edge length and repulsion.
    pub p: f64,
    pub iterations_per_level: usize,
    /// Barnes-Hut opening criterion.
    pub theta: f64,
    /// Distance exponent `r` of the repulsion law; 1 gives `C p^2 / dist`.
    pub repulsion_exponent: f64,
    pub coarsest_size: usize,
    /// Multiplicative step cooling per iteration.
    pub step_decay: f64,
    pub seed: u64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            p: 1.0,
            iterations_per_level: 200,
            theta: 1.0,
            repulsion_exponent: 2.0,
            coarsest_size: 32,
            step_decay: 0.97,
            seed: 42,
        }
    }
}

impl LayoutConfig {
    pub fn validate(&self) -> Result<(), &'static str> {
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err("p must be positive");
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err("theta must be positive");
        }
        if !(self.repulsion_exponent > 0.0 && self.repulsion_exponent.is_finite()) {
            return Err("repulsion_exponent must be positive");
        }
        if self.coarsest_size < 2 {
            return Err("coarsest_size must be at least 2");
        }
        if !(self.step_decay > 0.0 && self.step_decay < 1.0) {
            return Err("step_decay must lie in (0, 1)");
        }
        if self.iterations_per_level == 0 {
            return Err("iterations_per_level must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutResult {
    pub coords: Vec<[f64; 2]>,
    pub tree_edges: Vec<Edge>,
    pub component: Vec<u32>,
}

impl LayoutResult {
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.coords.len()];
        for e in &self.tree_edges {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
        deg
    }
}

/// Axis-aligned bounding box `[xmin, ymin, xmax, ymax]`.
pub fn bounding_box(coords: &[[f64; 2]]) -> [f64; 4] {
    coords.iter().fold(
        [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY],
        |b, &[x, y]| [b[0].min(x), b[1].min(y), b[2].max(x), b[3].max(y)],
    )
}

fn random_offset(rng: &CounterRng, counter: u64, radius: f64) -> [f64; 2] {
    let angle = std::f64::consts::TAU * rng.unit_at(2 * counter);
    [radius * angle.cos(), radius * angle.sin()]
}

/// Runs the force iterations of one level in place.
fn refine(pos: &mut [[f64; 2]], edges: &[(u32, u32, f64)], config: &LayoutConfig, step0: f64, seed: u64, exec: Exec) {
    let p = config.p;
    let mut step = step0;
    let mut force = vec![[0.0f64; 2]; pos.len()];
    for it in 0..config.iterations_per_level {
        let jitter_seed = crate::rng::splitmix64(seed ^ (it as u64).wrapping_mul(0x2545_f491_4f6c_dd1d));
        let rep = quadtree_repulsion(pos, config.theta, p, config.repulsion_exponent, jitter_seed, exec);
        force.copy_from_slice(&rep);
        for &(u, v, _) in edges {
            let (a, b) = (pos[u as usize], pos[v as usize]);
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let dist = (dx * dx + dy * dy).sqrt();
            // dist^2 / p along the unit vector: (dx, dy) * dist / p.
            let (fx, fy) = (dx * dist / p, dy * dist / p);
            force[u as usize][0] += fx;
            force[u as usize][1] += fy;
            force[v as usize][0] -= fx;
            force[v as usize][1] -= fy;
        }
        for (x, f) in pos.iter_mut().zip(&force) {
            let norm = (f[0] * f[0] + f[1] * f[1]).sqrt();
            if norm > 0.0 && norm.is_finite() {
                x[0] += step * f[0] / norm;
                x[1] += step * f[1] / norm;
            }
            assert!(x[0].is_finite() && x[1].is_finite(), "non-finite layout coordinate");
        }
        step *= config.step_decay;
    }
}

/// Lays out one connected tree given in local ids; the result is centered at
/// its bounding-box center.
pub fn layout_tree(n: usize, edges: &[(u32, u32, f64)], config: &LayoutConfig, seed: u64, exec: Exec) -> Vec<[f64; 2]> {
    if n == 1 {
        return vec![[0.0, 0.0]];
    }
    let hierarchy = coarsen(n, edges, config.coarsest_size);
    let rng = CounterRng::new(seed);
    let depth = hierarchy.depth();

    let coarsest = hierarchy.coarsest();
    let radius = config.p * (coarsest.n as f64).sqrt();
    let init = rng.substream(depth as u64 + 1);
    let mut pos: Vec<[f64; 2]> = (0..coarsest.n as u64)
        .map(|v| {
            let r = radius * init.unit_at(2 * v).sqrt();
            let angle = std::f64::consts::TAU * init.unit_at(2 * v + 1);
            [r * angle.cos(), r * angle.sin()]
        })
        .collect();
    refine(&mut pos, &coarsest.edges, config, config.p, seed ^ depth as u64, exec);

    for lvl in (0..depth).rev() {
        let level = &hierarchy.levels[lvl];
        let parent = &hierarchy.parents[lvl];
        let off = rng.substream(lvl as u64 + 1);
        let stretch = (level.n as f64 / pos.len() as f64).sqrt();
        pos = (0..level.n)
            .map(|v| {
                let base = pos[parent[v] as usize];
                let o = random_offset(&off, v as u64, config.p / 10.0);
                [stretch * base[0] + o[0], stretch * base[1] + o[1]]
            })
            .collect();
        refine(&mut pos, &level.edges, config, FINE_STEP * config.p, seed ^ lvl as u64, exec);
    }

    let bb = bounding_box(&pos);
    let (cx, cy) = ((bb[0] + bb[2]) / 2.0, (bb[1] + bb[3]) / 2.0);
    for x in &mut pos {
        x[0] -= cx;
        x[1] -= cy;
    }
    pos
}

/// Lays out every component of `forest`, packs them on a grid in order of
/// descending size and centers the whole drawing at the origin.
pub fn layout(forest: &SpanningForest, config: &LayoutConfig, exec: Exec) -> LayoutResult {
    let n = forest.n();
    let labels = forest.component();

    // Members of each component in ascending id order, keyed by label.
    let mut members: Vec<Vec<u32>> = Vec::new();
    let mut slot = vec![u32::MAX; n];
    for v in 0..n {
        let root = labels[v] as usize;
        if slot[root] == u32::MAX {
            slot[root] = members.len() as u32;
            members.push(Vec::new());
        }
        members[slot[root] as usize].push(v as u32);
    }
    let mut local = vec![0u32; n];
    for comp in &members {
        for (i, &v) in comp.iter().enumerate() {
            local[v as usize] = i as u32;
        }
    }
    let mut comp_edges: Vec<Vec<(u32, u32, f64)>> = vec![Vec::new(); members.len()];
    for e in forest.tree_edges() {
        let c = slot[labels[e.u as usize] as usize] as usize;
        comp_edges[c].push((local[e.u as usize], local[e.v as usize], e.w));
    }

    let layouts: Vec<Vec<[f64; 2]>> = exec.map(members.len(), |c| {
        let label = members[c][0] as u64;
        let seed = crate::rng::splitmix64(config.seed ^ label.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        layout_tree(members[c].len(), &comp_edges[c], config, seed, exec)
    });

    // Grid packing: largest components first, rows of ceil(sqrt(c)) components.
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| members[b].len().cmp(&members[a].len()).then(members[a][0].cmp(&members[b][0])));
    let cols = (members.len() as f64).sqrt().ceil().max(1.0) as usize;
    let mut coords = vec![[0.0f64; 2]; n];
    let (mut x_cursor, mut y_cursor, mut row_height) = (0.0f64, 0.0f64, 0.0f64);
    for (k, &c) in order.iter().enumerate() {
        if k > 0 && k % cols == 0 {
            x_cursor = 0.0;
            y_cursor += row_height;
            row_height = 0.0;
        }
        let bb = bounding_box(&layouts[c]);
        let gap = 4.0 * config.p * (members[c].len() as f64).sqrt();
        let (w, h) = (bb[2] - bb[0], bb[3] - bb[1]);
        for (i, &v) in members[c].iter().enumerate() {
            let [x, y] = layouts[c][i];
            coords[v as usize] = [x - bb[0] + x_cursor, y - bb[1] + y_cursor];
        }
        x_cursor += w + gap;
        row_height = row_height.max(h + gap);
    }

    let bb = bounding_box(&coords);
    let (cx, cy) = ((bb[0] + bb[2]) / 2.0, (bb[1] + bb[3]) / 2.0);
    for x in &mut coords {
        x[0] -= cx;
        x[1] -= cy;
    }

    LayoutResult {
        coords,
        tree_edges: forest.tree_edges().to_vec(),
        component: labels.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knng::graph_from_edge_list;
    use crate::mst::kruskal;

    fn forest(n: usize, edges: &[(u32, u32, f64)]) -> SpanningForest {
        kruskal(&graph_from_edge_list(edges, n).unwrap())
    }

    fn quick() -> LayoutConfig {
        LayoutConfig {
            iterations_per_level: 50,
            ..LayoutConfig::default()
        }
    }

    #[test]
    fn single_node_at_origin() {
        let r = layout(&forest(1, &[]), &LayoutConfig::default(), Exec::default());
        assert_eq!(r.coords, vec![[0.0, 0.0]]);
    }

    #[test]
    fn two_nodes_symmetric_about_origin() {
        let r = layout(&forest(2, &[(0, 1, 0.3)]), &LayoutConfig::default(), Exec::default());
        let [a, b] = [r.coords[0], r.coords[1]];
        assert_ne!(a, b);
        assert!((a[0] + b[0]).abs() < 1e-12 && (a[1] + b[1]).abs() < 1e-12);
        assert!(a.iter().chain(&b).all(|x| x.is_finite()));
    }

    #[test]
    fn isolated_nodes_are_spread() {
        let r = layout(&forest(5, &[]), &quick(), Exec::default());
        for i in 0..5 {
            for j in i + 1..5 {
                assert_ne!(r.coords[i], r.coords[j]);
            }
        }
    }

    #[test]
    fn deterministic_across_exec_modes() {
        let edges: Vec<(u32, u32, f64)> = (1..300u32)
            .map(|i| ((crate::rng::splitmix64(i as u64) % i as u64) as u32, i, 0.5))
            .collect();
        let f = forest(300, &edges);
        let a = layout(&f, &quick(), Exec::Parallel);
        let b = layout(&f, &quick(), Exec::Sequential);
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        assert!(LayoutConfig::default().validate().is_ok());
        for bad in [
            LayoutConfig { p: 0.0, ..LayoutConfig::default() },
            LayoutConfig { theta: -1.0, ..LayoutConfig::default() },
            LayoutConfig { repulsion_exponent: 0.0, ..LayoutConfig::default() },
            LayoutConfig { coarsest_size: 1, ..LayoutConfig::default() },
            LayoutConfig { step_decay: 1.0, ..LayoutConfig::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
