//! Ear-clipping triangulation, its dual tree, and the balanced-diagonal scan
//! used to cut a polygon into pieces of 6 to 9 edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{orient, Point, SimplePolygon};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triangulation {
    pub polygon: SimplePolygon,
    pub triangles: Vec<[usize; 3]>,
    pub diagonals: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualTree {
    pub nodes: usize,
    /// `(triangle, triangle, diagonal index)`.
    pub edges: Vec<(usize, usize, usize)>,
}

/// Diagonal whose `k`-edge side is cut off: the side runs from `from`
/// counter-clockwise to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedCut {
    pub diagonal: (usize, usize),
    pub from: usize,
    pub to: usize,
    pub k: usize,
}

fn in_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    orient(a, b, p) >= 0.0 && orient(b, c, p) >= 0.0 && orient(c, a, p) >= 0.0
}

pub fn triangulate(poly: &SimplePolygon) -> Result<Triangulation> {
    triangulate_from(poly, 0)
}

/// Ear clipping that starts its ear scan at vertex `start`; different starts
/// give different triangulations.
pub fn triangulate_from(poly: &SimplePolygon, start: usize) -> Result<Triangulation> {
    let n = poly.len();
    let mut ring: Vec<usize> = (0..n).map(|k| (start + k) % n).collect();
    let mut triangles = Vec::with_capacity(n.saturating_sub(2));
    let mut diagonals = Vec::with_capacity(n.saturating_sub(3));
    let v = |i: usize| poly.vertex(i);
    while ring.len() > 3 {
        let m = ring.len();
        let ear = (0..m).find(|&j| {
            let (a, b, c) = (ring[(j + m - 1) % m], ring[j], ring[(j + 1) % m]);
            if orient(v(a), v(b), v(c)) <= 0.0 {
                return false;
            }
            ring.iter().all(|&o| {
                o == a || o == b || o == c || {
                    let p = v(o);
                    p == v(a) || p == v(c) || !in_triangle(p, v(a), v(b), v(c))
                }
            })
        });
        let Some(j) = ear else {
            return Err(Error::PartitionFailed(format!(
                "no ear found with {m} vertices left"
            )));
        };
        let (a, b, c) = (ring[(j + m - 1) % m], ring[j], ring[(j + 1) % m]);
        triangles.push([a, b, c]);
        diagonals.push((a.min(c), a.max(c)));
        ring.remove(j);
    }
    if ring.len() == 3 {
        triangles.push([ring[0], ring[1], ring[2]]);
    }
    Ok(Triangulation {
        polygon: poly.clone(),
        triangles,
        diagonals,
    })
}

fn has_side(t: &[usize; 3], a: usize, b: usize) -> bool {
    t.contains(&a) && t.contains(&b)
}

pub fn dual_tree(t: &Triangulation) -> DualTree {
    let mut edges = Vec::with_capacity(t.diagonals.len());
    for (d, &(a, b)) in t.diagonals.iter().enumerate() {
        let mut owners = t
            .triangles
            .iter()
            .enumerate()
            .filter(|(_, tri)| has_side(tri, a, b))
            .map(|(i, _)| i);
        if let (Some(x), Some(y)) = (owners.next(), owners.next()) {
            edges.push((x, y, d));
        }
    }
    DualTree {
        nodes: t.triangles.len(),
        edges,
    }
}

impl DualTree {
    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b, _)| a == node || b == node)
            .count()
    }
}

fn is_polygon_edge(n: usize, a: usize, b: usize) -> bool {
    (a + 1) % n == b || (b + 1) % n == a
}

/// Number of polygon edges on the side of each diagonal that is away from
/// triangle 0, from subtree sums over the dual tree.
pub fn subtree_edge_counts(t: &Triangulation) -> Vec<usize> {
    let n = t.polygon.len();
    let tree = dual_tree(t);
    let own: Vec<usize> = t
        .triangles
        .iter()
        .map(|tri| {
            (0..3)
                .filter(|&j| is_polygon_edge(n, tri[j], tri[(j + 1) % 3]))
                .count()
        })
        .collect();
    let m = tree.nodes;
    let mut adj = vec![Vec::new(); m];
    for &(a, b, d) in &tree.edges {
        adj[a].push((b, d));
        adj[b].push((a, d));
    }
    // iterative DFS order from triangle 0
    let mut order = Vec::with_capacity(m);
    let mut parent = vec![(usize::MAX, usize::MAX); m];
    let mut seen = vec![false; m];
    let mut stack = vec![0];
    seen[0] = m > 0;
    while let Some(u) = stack.pop() {
        order.push(u);
        for &(w, d) in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = (u, d);
                stack.push(w);
            }
        }
    }
    let mut sum = own;
    let mut counts = vec![0; t.diagonals.len()];
    for &u in order.iter().rev() {
        let (p, d) = parent[u];
        if p != usize::MAX {
            counts[d] = sum[u];
            sum[p] += sum[u];
        }
    }
    counts
}

/// First diagonal (in triangulation order) with 5 to 8 polygon edges on one
/// side, preferring the smaller side.
pub fn balanced_diagonal(t: &Triangulation) -> Result<BalancedCut> {
    let n = t.polygon.len();
    if n < 10 {
        return Err(Error::TooSmall(n));
    }
    let counts = subtree_edge_counts(t);
    let in_range = |k: usize| (5..=8).contains(&k);
    let pick = |prefer_small: bool| {
        t.diagonals.iter().zip(&counts).find_map(|(&(a, b), &s)| {
            let k = if prefer_small { s.min(n - s) } else { s.max(n - s) };
            in_range(k).then(|| cut_for(n, a, b, k))
        })
    };
    pick(true).or_else(|| pick(false)).ok_or_else(|| {
        Error::PartitionFailed(format!("no diagonal cuts off 5..8 edges of the {n}-gon"))
    })
}

fn cut_for(n: usize, a: usize, b: usize, k: usize) -> BalancedCut {
    // with a < b the chain a..b holds b - a polygon edges
    if b - a == k {
        BalancedCut {
            diagonal: (a, b),
            from: a,
            to: b,
            k,
        }
    } else {
        debug_assert_eq!(n - (b - a), k);
        BalancedCut {
            diagonal: (a, b),
            from: b,
            to: a,
            k,
        }
    }
}

/// Vertex indices from `from` counter-clockwise to `to`, both included.
pub fn chain(n: usize, from: usize, to: usize) -> Vec<usize> {
    let mut out = vec![from];
    let mut i = from;
    while i != to {
        i = (i + 1) % n;
        out.push(i);
    }
    out
}
