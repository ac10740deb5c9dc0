use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{closest_on_segment, closest_points_segments, segment_visible, Point, SimplePolygon};

/// Polyline inside a polygon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyPath {
    pub waypoints: Vec<Point>,
    pub total_length: f64,
}

impl PolyPath {
    pub fn new(waypoints: Vec<Point>) -> Self {
        let total_length = waypoints.windows(2).map(|w| w[0].dist(w[1])).sum();
        PolyPath {
            waypoints,
            total_length,
        }
    }

    /// Point at arc length `s` (clamped to the path).
    pub fn point_at(&self, s: f64) -> Point {
        let mut rest = s.max(0.0);
        for w in self.waypoints.windows(2) {
            let l = w[0].dist(w[1]);
            if rest <= l && l > 0.0 {
                return w[0].lerp(w[1], rest / l);
            }
            rest -= l;
        }
        *self.waypoints.last().expect("path has at least one waypoint")
    }

    /// Arc length of the point of the path closest to `p`.
    pub fn project(&self, p: Point) -> f64 {
        let mut best = (f64::INFINITY, 0.0);
        let mut s0 = 0.0;
        for w in self.waypoints.windows(2) {
            let l = w[0].dist(w[1]);
            let q = closest_on_segment(p, w[0], w[1]);
            let d = q.dist(p);
            if d < best.0 {
                best = (d, s0 + q.dist(w[0]));
            }
            s0 += l;
        }
        best.1
    }
}

#[derive(PartialEq)]
struct State {
    cost: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, o: &Self) -> Ordering {
        o.cost.total_cmp(&self.cost).then_with(|| o.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Dijkstra over `nodes` with straight visible edges, from per-node start
/// costs. Returns distances and predecessors.
fn dijkstra(
    poly: &SimplePolygon,
    nodes: &[Point],
    start: &[f64],
) -> (Vec<f64>, Vec<Option<usize>>) {
    let m = nodes.len();
    let mut dist = start.to_vec();
    let mut prev = vec![None; m];
    let mut done = vec![false; m];
    let mut heap: BinaryHeap<State> = (0..m)
        .filter(|&i| dist[i].is_finite())
        .map(|i| State {
            cost: dist[i],
            node: i,
        })
        .collect();
    while let Some(State { cost, node }) = heap.pop() {
        if done[node] || cost > dist[node] {
            continue;
        }
        done[node] = true;
        for j in 0..m {
            if done[j] || j == node {
                continue;
            }
            let c = cost + nodes[node].dist(nodes[j]);
            if c < dist[j] && segment_visible(poly, nodes[node], nodes[j]) {
                dist[j] = c;
                prev[j] = Some(node);
                heap.push(State { cost: c, node: j });
            }
        }
    }
    (dist, prev)
}

fn chain(prev: &[Option<usize>], mut k: usize) -> Vec<usize> {
    let mut out = vec![k];
    while let Some(p) = prev[k] {
        out.push(p);
        k = p;
    }
    out.reverse();
    out
}

/// Geodesic from `a` to `b` inside `poly`. Interior waypoints are reflex
/// vertices.
pub fn shortest_path(poly: &SimplePolygon, a: Point, b: Point) -> PolyPath {
    if a.dist(b) == 0.0 {
        return PolyPath::new(vec![a]);
    }
    if segment_visible(poly, a, b) {
        return PolyPath::new(vec![a, b]);
    }
    let mut nodes = vec![a, b];
    nodes.extend(poly.reflex_indices().into_iter().map(|i| poly.vertex(i)));
    let mut start = vec![f64::INFINITY; nodes.len()];
    start[0] = 0.0;
    let (_, prev) = dijkstra(poly, &nodes, &start);
    let idx = chain(&prev, 1);
    if idx.first() != Some(&0) {
        // disconnected only through numerical trouble; fall back to the chord
        return PolyPath::new(vec![a, b]);
    }
    PolyPath::new(idx.into_iter().map(|i| nodes[i]).collect())
}

/// All-pairs geodesics between the reflex vertices of a polygon, for
/// repeated point-to-point queries.
#[derive(Debug, Clone)]
pub struct GeodesicGraph {
    nodes: Vec<Point>,
    dist: Vec<Vec<f64>>,
    /// First hop from `i` toward `j`.
    next: Vec<Vec<usize>>,
}

impl GeodesicGraph {
    pub fn new(poly: &SimplePolygon) -> GeodesicGraph {
        let nodes: Vec<Point> = poly.reflex_indices().into_iter().map(|i| poly.vertex(i)).collect();
        let k = nodes.len();
        let mut dist = vec![vec![f64::INFINITY; k]; k];
        let mut next = vec![vec![usize::MAX; k]; k];
        for i in 0..k {
            dist[i][i] = 0.0;
            next[i][i] = i;
            for j in i + 1..k {
                if segment_visible(poly, nodes[i], nodes[j]) {
                    let d = nodes[i].dist(nodes[j]);
                    dist[i][j] = d;
                    dist[j][i] = d;
                    next[i][j] = j;
                    next[j][i] = i;
                }
            }
        }
        for m in 0..k {
            for i in 0..k {
                for j in 0..k {
                    let c = dist[i][m] + dist[m][j];
                    if c < dist[i][j] {
                        dist[i][j] = c;
                        next[i][j] = next[i][m];
                    }
                }
            }
        }
        GeodesicGraph { nodes, dist, next }
    }

    /// Same geodesic as [`shortest_path`], from the precomputed table.
    pub fn path(&self, poly: &SimplePolygon, a: Point, b: Point) -> PolyPath {
        if a.dist(b) == 0.0 || segment_visible(poly, a, b) {
            return PolyPath::new(if a.dist(b) == 0.0 { vec![a] } else { vec![a, b] });
        }
        let k = self.nodes.len();
        let from: Vec<f64> = self
            .nodes
            .iter()
            .map(|&v| if segment_visible(poly, a, v) { a.dist(v) } else { f64::INFINITY })
            .collect();
        let to: Vec<f64> = self
            .nodes
            .iter()
            .map(|&v| if segment_visible(poly, v, b) { v.dist(b) } else { f64::INFINITY })
            .collect();
        let mut best = (f64::INFINITY, 0, 0);
        for i in (0..k).filter(|&i| from[i].is_finite()) {
            for j in (0..k).filter(|&j| to[j].is_finite()) {
                let c = from[i] + self.dist[i][j] + to[j];
                if c < best.0 {
                    best = (c, i, j);
                }
            }
        }
        if !best.0.is_finite() {
            return PolyPath::new(vec![a, b]);
        }
        let (_, mut i, j) = best;
        let mut pts = vec![a, self.nodes[i]];
        while i != j {
            i = self.next[i][j];
            pts.push(self.nodes[i]);
        }
        pts.push(b);
        PolyPath::new(pts)
    }
}

/// Points along the boundary of `region`, at most `step` apart, vertices
/// included.
pub(crate) fn boundary_samples(region: &SimplePolygon, step: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for (a, b) in region.edges() {
        let k = ((a.dist(b) / step).ceil() as usize).max(1);
        for j in 0..k {
            out.push(a.lerp(b, j as f64 / k as f64));
        }
    }
    out
}

/// Boundary points of `region` within about `radius` of `center`, `h` apart.
fn samples_near(region: &SimplePolygon, center: Point, radius: f64, h: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for (a, b) in region.edges() {
        let len = a.dist(b);
        if len == 0.0 || super::dist_point_segment(center, a, b) > radius {
            continue;
        }
        let t0 = (center - a).dot(b - a) / (len * len);
        let lo = (t0 - radius / len).max(0.0);
        let hi = (t0 + radius / len).min(1.0);
        let k = (((hi - lo) * len / h).ceil() as usize).max(1);
        for j in 0..=k {
            out.push(a.lerp(b, lo + (hi - lo) * j as f64 / k as f64));
        }
    }
    out
}

fn closest_point_of(region: &SimplePolygon, p: Point) -> Point {
    if region.contains(p) {
        return p;
    }
    region
        .edges()
        .map(|(a, b)| closest_on_segment(p, a, b))
        .min_by(|x, y| x.dist(p).total_cmp(&y.dist(p)))
        .expect("region has edges")
}

/// Nearest point of `region` visible from `p`, approximated on `samples`
/// when the true nearest point is hidden.
fn visible_approach(
    poly: &SimplePolygon,
    region: &SimplePolygon,
    samples: &[Point],
    p: Point,
) -> Option<Point> {
    let c = closest_point_of(region, p);
    if segment_visible(poly, p, c) {
        return Some(c);
    }
    let mut cand: Vec<Point> = samples.to_vec();
    cand.sort_by(|x, y| x.dist(p).total_cmp(&y.dist(p)));
    cand.into_iter().find(|&q| segment_visible(poly, p, q))
}

fn direct_pair(
    poly: &SimplePolygon,
    a: &SimplePolygon,
    b: &SimplePolygon,
    step: f64,
) -> Option<(Point, Point)> {
    let mut best: Option<(f64, Point, Point)> = None;
    for (p, q) in a.edges() {
        for (r, s) in b.edges() {
            let (x, y) = closest_points_segments(p, q, r, s);
            if best.is_none_or(|(d, _, _)| x.dist(y) < d) {
                best = Some((x.dist(y), x, y));
            }
        }
    }
    let (_, x, y) = best?;
    if segment_visible(poly, x, y) {
        return Some((x, y));
    }
    // coarse search over sample pairs, then local refinement
    let coarse = step * 10.0;
    let sa = boundary_samples(a, coarse);
    let sb = boundary_samples(b, coarse);
    let mut pairs: Vec<(f64, Point, Point)> = sa
        .iter()
        .flat_map(|&p| sb.iter().map(move |&q| (p.dist(q), p, q)))
        .collect();
    pairs.sort_by(|u, v| u.0.total_cmp(&v.0));
    let (mut d, mut x, mut y) = pairs
        .into_iter()
        .find(|&(_, p, q)| segment_visible(poly, p, q))?;
    let mut h = coarse;
    while h > step * 1e-3 {
        let mut improved = false;
        let fa = samples_near(a, x, 2.0 * h, h);
        let fb = samples_near(b, y, 2.0 * h, h);
        for &p in &fa {
            for &q in &fb {
                let dd = p.dist(q);
                if dd < d && segment_visible(poly, p, q) {
                    (d, x, y) = (dd, p, q);
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Some((x, y))
}

/// Shortest path inside `poly` from some point of region `a` to some point of
/// region `b` (both subsets of `poly`). Regions are sampled along their
/// boundaries every `step`; a path of a single point is returned when the
/// regions meet.
pub fn geodesic_between_sets(
    poly: &SimplePolygon,
    a: &SimplePolygon,
    b: &SimplePolygon,
    step: f64,
) -> Option<PolyPath> {
    let meet = super::intersect_polygons(a, b);
    if let Some(m) = meet.iter().max_by(|x, y| x.area().total_cmp(&y.area())) {
        return Some(PolyPath::new(vec![m.centroid()]));
    }
    let mut best: Option<PolyPath> = direct_pair(poly, a, b, step).map(|(x, y)| PolyPath::new(vec![x, y]));
    let reflex: Vec<Point> = poly
        .reflex_indices()
        .into_iter()
        .map(|i| poly.vertex(i))
        .collect();
    if reflex.is_empty() {
        return best;
    }
    let sa = boundary_samples(a, step);
    let sb = boundary_samples(b, step);
    let from_a: Vec<Option<Point>> = reflex.iter().map(|&v| visible_approach(poly, a, &sa, v)).collect();
    let to_b: Vec<Option<Point>> = reflex.iter().map(|&v| visible_approach(poly, b, &sb, v)).collect();
    let start: Vec<f64> = reflex
        .iter()
        .zip(&from_a)
        .map(|(v, p)| p.map_or(f64::INFINITY, |p| p.dist(*v)))
        .collect();
    let (dist, prev) = dijkstra(poly, &reflex, &start);
    for k in 0..reflex.len() {
        let Some(qb) = to_b[k] else { continue };
        let total = dist[k] + reflex[k].dist(qb);
        if !total.is_finite() || best.as_ref().is_some_and(|p| p.total_length <= total) {
            continue;
        }
        let idx = chain(&prev, k);
        let Some(pa) = from_a[idx[0]] else { continue };
        let mut w = vec![pa];
        w.extend(idx.iter().map(|&i| reflex[i]));
        w.push(qb);
        w.dedup_by(|x, y| x.dist(*y) == 0.0);
        best = Some(PolyPath::new(w));
    }
    best
}

/// Shortest path inside `poly` from point `p` to some point of `region`.
pub fn geodesic_to_set(
    poly: &SimplePolygon,
    p: Point,
    region: &SimplePolygon,
    step: f64,
) -> Option<PolyPath> {
    if region.contains(p) {
        return Some(PolyPath::new(vec![p]));
    }
    let samples = boundary_samples(region, step);
    let mut best = visible_approach(poly, region, &samples, p).map(|q| PolyPath::new(vec![p, q]));
    let reflex: Vec<Point> = poly
        .reflex_indices()
        .into_iter()
        .map(|i| poly.vertex(i))
        .collect();
    let start: Vec<f64> = reflex
        .iter()
        .map(|&v| {
            if segment_visible(poly, p, v) {
                p.dist(v)
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let (dist, prev) = dijkstra(poly, &reflex, &start);
    for k in 0..reflex.len() {
        if !dist[k].is_finite() || best.as_ref().is_some_and(|b| b.total_length <= dist[k]) {
            continue;
        }
        let Some(q) = visible_approach(poly, region, &samples, reflex[k]) else {
            continue;
        };
        let total = dist[k] + reflex[k].dist(q);
        if best.as_ref().is_some_and(|b| b.total_length <= total) {
            continue;
        }
        let mut w = vec![p];
        w.extend(chain(&prev, k).into_iter().map(|i| reflex[i]));
        w.push(q);
        w.dedup_by(|x, y| x.dist(*y) == 0.0);
        best = Some(PolyPath::new(w));
    }
    best
}
