//! Barnes-Hut quadtree for the repulsive forces of the spring-electrical model.
//!
//! The repulsion between two points at distance `d` has magnitude
//! `C p^(1+r) / d^r`. With `r = 1` this is the classic `C p^2 / d`; larger `r`
//! weakens the long-range pressure that crowds the periphery of big drawings.

use crate::exec::Exec;
use crate::rng::CounterRng;

/// Repulsion strength `C`.
pub const REPULSION_C: f64 = 0.2;

/// `d^-(r+1)` from `d^2`, so that `(dx, dy) * kernel` has magnitude `d^-r`.
#[inline]
fn kernel(d2: f64, r: f64) -> f64 {
    if r == 1.0 {
        1.0 / d2
    } else if r == 2.0 {
        1.0 / (d2 * d2.sqrt())
    } else {
        d2.powf(-(r + 1.0) / 2.0)
    }
}

const LEAF_CAPACITY: usize = 8;
const MAX_DEPTH: u32 = 40;
const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Cell {
    x0: f64,
    y0: f64,
    size: f64,
    mass: f64,
    cx: f64,
    cy: f64,
    children: [u32; 4],
    start: u32,
    end: u32,
}

impl Cell {
    fn is_leaf(&self) -> bool {
        self.children == [NONE; 4]
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x0 + self.size && y >= self.y0 && y <= self.y0 + self.size
    }
}

/// Quadtree over a point set; cells store point count and centroid.
#[derive(Debug, Clone)]
pub struct QuadTree<'a> {
    points: &'a [[f64; 2]],
    order: Vec<u32>,
    cells: Vec<Cell>,
}

impl<'a> QuadTree<'a> {
    pub fn new(points: &'a [[f64; 2]]) -> Self {
        let mut tree = QuadTree {
            points,
            order: (0..points.len() as u32).collect(),
            cells: Vec::with_capacity(points.len() / 2 + 1),
        };
        if points.is_empty() {
            return tree;
        }
        let (mut xmin, mut ymin, mut xmax, mut ymax) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &[x, y] in points {
            xmin = xmin.min(x);
            ymin = ymin.min(y);
            xmax = xmax.max(x);
            ymax = ymax.max(y);
        }
        let size = (xmax - xmin).max(ymax - ymin).max(f64::MIN_POSITIVE);
        tree.build(0, points.len(), xmin, ymin, size, 0);
        tree
    }

    fn build(&mut self, start: usize, end: usize, x0: f64, y0: f64, size: f64, depth: u32) -> u32 {
        let (mut sx, mut sy) = (0.0, 0.0);
        for &i in &self.order[start..end] {
            let [x, y] = self.points[i as usize];
            sx += x;
            sy += y;
        }
        let mass = (end - start) as f64;
        let id = self.cells.len() as u32;
        self.cells.push(Cell {
            x0,
            y0,
            size,
            mass,
            cx: sx / mass,
            cy: sy / mass,
            children: [NONE; 4],
            start: start as u32,
            end: end as u32,
        });
        if end - start <= LEAF_CAPACITY || depth >= MAX_DEPTH {
            return id;
        }
        let half = size / 2.0;
        let (xm, ym) = (x0 + half, y0 + half);
        let pts = self.points;
        let slice = &mut self.order[start..end];
        // Partition into quadrants: (bottom, top) by y, then (left, right) by x.
        let split_y = partition(slice, |i| pts[i as usize][1] < ym);
        let split_lo = partition(&mut slice[..split_y], |i| pts[i as usize][0] < xm);
        let split_hi = split_y + partition(&mut slice[split_y..], |i| pts[i as usize][0] < xm);
        let bounds = [
            (start, start + split_lo, x0, y0),
            (start + split_lo, start + split_y, xm, y0),
            (start + split_y, start + split_hi, x0, ym),
            (start + split_hi, end, xm, ym),
        ];
        let mut children = [NONE; 4];
        for (q, &(s, e, cx0, cy0)) in bounds.iter().enumerate() {
            if e > s {
                children[q] = self.build(s, e, cx0, cy0, half, depth + 1);
            }
        }
        self.cells[id as usize].children = children;
        id
    }

    /// Repulsive force on point `i`, `C p^(1+r) / dist^r` away from each other
    /// point, approximating cells with `size / dist <= theta` by their centroid.
    pub fn force_on(&self, i: usize, theta: f64, p: f64, r: f64) -> [f64; 2] {
        if self.cells.is_empty() {
            return [0.0, 0.0];
        }
        let [xi, yi] = self.points[i];
        let (mut fx, mut fy) = (0.0, 0.0);
        let mut stack = vec![0u32];
        while let Some(c) = stack.pop() {
            let cell = &self.cells[c as usize];
            if cell.is_leaf() {
                for &j in &self.order[cell.start as usize..cell.end as usize] {
                    if j as usize == i {
                        continue;
                    }
                    let [xj, yj] = self.points[j as usize];
                    let (dx, dy) = (xi - xj, yi - yj);
                    let d2 = dx * dx + dy * dy;
                    if d2 > 0.0 {
                        let k = kernel(d2, r);
                        fx += dx * k;
                        fy += dy * k;
                    }
                }
                continue;
            }
            let (dx, dy) = (xi - cell.cx, yi - cell.cy);
            let d2 = dx * dx + dy * dy;
            if !cell.contains(xi, yi) && cell.size * cell.size <= theta * theta * d2 {
                let k = cell.mass * kernel(d2, r);
                fx += dx * k;
                fy += dy * k;
            } else {
                stack.extend(cell.children.iter().copied().filter(|&ch| ch != NONE));
            }
        }
        let k = REPULSION_C * p * p.powf(r);
        [k * fx, k * fy]
    }
}

fn partition(slice: &mut [u32], pred: impl Fn(u32) -> bool) -> usize {
    let mut split = 0;
    for k in 0..slice.len() {
        if pred(slice[k]) {
            slice.swap(split, k);
            split += 1;
        }
    }
    split
}

/// Offsets all but the first point of every group of exactly coincident points
/// by a seeded vector of length `p * 1e-4`.
pub fn separate_coincident(coords: &mut [[f64; 2]], p: f64, seed: u64) {
    let mut idx: Vec<usize> = (0..coords.len()).collect();
    idx.sort_unstable_by(|&a, &b| {
        coords[a][0]
            .total_cmp(&coords[b][0])
            .then(coords[a][1].total_cmp(&coords[b][1]))
            .then(a.cmp(&b))
    });
    let rng = CounterRng::new(seed);
    let mut anchor = coords.first().copied();
    for w in 0..idx.len() {
        let i = idx[w];
        if w > 0 && Some(coords[i]) == anchor {
            let angle = std::f64::consts::TAU * rng.unit_at(i as u64);
            coords[i][0] += p * 1e-4 * angle.cos();
            coords[i][1] += p * 1e-4 * angle.sin();
        } else {
            anchor = Some(coords[i]);
        }
    }
}

/// Per-node repulsive forces via Barnes-Hut with exponent `r`. Coincident
/// points are separated by a deterministic jitter before the tree is built.
pub fn quadtree_repulsion(coords: &[[f64; 2]], theta: f64, p: f64, r: f64, seed: u64, exec: Exec) -> Vec<[f64; 2]> {
    let mut pts = coords.to_vec();
    separate_coincident(&mut pts, p, seed);
    let tree = QuadTree::new(&pts);
    exec.map(pts.len(), |i| tree.force_on(i, theta, p, r))
}
