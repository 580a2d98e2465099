use std::collections::HashSet;

use treeviz::exec::Exec;
use treeviz::knng::graph_from_edge_list;
use treeviz::layout::{bounding_box, layout, LayoutConfig, LayoutResult};
use treeviz::mst::{kruskal, SpanningForest};
use treeviz::rng::StreamRng;

/// Random recursive tree: node i attaches to a uniform earlier node.
fn random_tree_edges(n: usize, offset: u32, rng: &mut StreamRng) -> Vec<(u32, u32, f64)> {
    (1..n as u32)
        .map(|i| (offset + rng.below(i as u64) as u32, offset + i, 0.1 + rng.next_unit()))
        .collect()
}

fn forest_of(n: usize, edges: &[(u32, u32, f64)]) -> SpanningForest {
    kruskal(&graph_from_edge_list(edges, n).unwrap())
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn mean_edge_length(r: &LayoutResult) -> f64 {
    r.tree_edges.iter().map(|e| dist(r.coords[e.u as usize], r.coords[e.v as usize])).sum::<f64>() / r.tree_edges.len() as f64
}

fn random_nonadjacent_mean(r: &LayoutResult, pairs: usize, seed: u64) -> f64 {
    let adjacent: HashSet<(u32, u32)> = r.tree_edges.iter().map(|e| (e.u, e.v)).collect();
    let n = r.n() as u64;
    let mut rng = StreamRng::new(seed);
    let (mut sum, mut count) = (0.0, 0);
    while count < pairs {
        let (i, j) = (rng.below(n) as u32, rng.below(n) as u32);
        if i != j && !adjacent.contains(&(i.min(j), i.max(j))) {
            sum += dist(r.coords[i as usize], r.coords[j as usize]);
            count += 1;
        }
    }
    sum / pairs as f64
}

#[test]
fn adjacent_pairs_are_closer_than_random_pairs() {
    let mut rng = StreamRng::new(1);
    let forest = forest_of(1000, &random_tree_edges(1000, 0, &mut rng));
    let r = layout(&forest, &LayoutConfig::default(), Exec::default());
    let (adj, rand) = (mean_edge_length(&r), random_nonadjacent_mean(&r, 1000, 2));
    assert!(adj < rand, "adjacent {adj} random {rand}");
}

#[test]
fn neighborhood_fidelity_factor_two() {
    for (n, seed) in [(200, 3), (500, 4)] {
        let mut rng = StreamRng::new(seed);
        let forest = forest_of(n, &random_tree_edges(n, 0, &mut rng));
        let r = layout(&forest, &LayoutConfig::default(), Exec::default());
        let (adj, rand) = (mean_edge_length(&r), random_nonadjacent_mean(&r, 2000, seed));
        assert!(2.0 * adj <= rand, "n {n}: adjacent {adj} random {rand}");
    }
}

#[test]
fn edge_length_increases_with_p() {
    let mut rng = StreamRng::new(5);
    let forest = forest_of(500, &random_tree_edges(500, 0, &mut rng));
    let lengths: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&p| mean_edge_length(&layout(&forest, &LayoutConfig { p, ..LayoutConfig::default() }, Exec::default())))
        .collect();
    assert!(lengths.windows(2).all(|w| w[0] < w[1]), "{lengths:?}");
}

#[test]
fn component_boxes_do_not_overlap() {
    let mut rng = StreamRng::new(6);
    let sizes = [120usize, 60, 60, 30, 7, 2, 1];
    let mut edges = Vec::new();
    let mut offset = 0u32;
    for &s in &sizes {
        edges.extend(random_tree_edges(s, offset, &mut rng));
        offset += s as u32;
    }
    let n = offset as usize;
    let r = layout(&forest_of(n, &edges), &LayoutConfig::default(), Exec::default());
    let mut labels: Vec<u32> = r.component.clone();
    labels.sort_unstable();
    labels.dedup();
    assert_eq!(labels.len(), sizes.len());
    let boxes: Vec<[f64; 4]> = labels
        .iter()
        .map(|&l| {
            let pts: Vec<[f64; 2]> = (0..n).filter(|&v| r.component[v] == l).map(|v| r.coords[v]).collect();
            bounding_box(&pts)
        })
        .collect();
    for a in 0..boxes.len() {
        for b in a + 1..boxes.len() {
            let (x, y) = (boxes[a], boxes[b]);
            let overlap = x[0] <= y[2] && y[0] <= x[2] && x[1] <= y[3] && y[1] <= x[3];
            assert!(!overlap, "components {} and {} overlap", labels[a], labels[b]);
        }
    }
}

#[test]
fn layout_is_bit_identical_across_exec_modes_and_runs() {
    let mut rng = StreamRng::new(7);
    let mut edges = random_tree_edges(300, 0, &mut rng);
    edges.extend(random_tree_edges(40, 300, &mut rng));
    let forest = forest_of(340, &edges);
    let config = LayoutConfig::default();
    let a = layout(&forest, &config, Exec::Sequential);
    let b = layout(&forest, &config, Exec::Parallel);
    let c = layout(&forest, &config, Exec::Parallel);
    assert_eq!(a, b);
    assert_eq!(b, c);
    assert!(a.coords.iter().all(|x| x[0].is_finite() && x[1].is_finite()));
}

#[test]
fn duplicate_items_with_zero_length_edges_stay_finite() {
    let edges: Vec<(u32, u32, f64)> = (1..50).map(|i| (0, i, 0.0)).collect();
    let r = layout(&forest_of(50, &edges), &LayoutConfig::default(), Exec::default());
    assert!(r.coords.iter().all(|x| x[0].is_finite() && x[1].is_finite()));
}

#[test]
fn single_node_sits_at_origin() {
    let r = layout(&forest_of(1, &[]), &LayoutConfig::default(), Exec::default());
    assert_eq!(r.coords, vec![[0.0, 0.0]]);
}
