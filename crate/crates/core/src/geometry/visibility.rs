use super::{eps, line_params, orient, Point, SimplePolygon};
use crate::error::{Error, Result};

/// Angular offset of the probing rays cast beside each vertex.
const DELTA: f64 = 1e-9;

fn scale(poly: &SimplePolygon) -> f64 {
    let (lo, hi) = poly.bbox();
    (hi - lo).norm().max(1.0)
}

/// Nearest boundary hit of the ray `origin + t * dir` with `t > tmin`.
/// Edges incident to vertex `skip` are ignored. Returns `(t, edge index)`.
pub fn first_hit(
    poly: &SimplePolygon,
    origin: Point,
    dir: Point,
    tmin: f64,
    skip: Option<usize>,
) -> Option<(f64, usize)> {
    let n = poly.len();
    let mut best: Option<(f64, usize)> = None;
    for i in 0..n {
        if let Some(s) = skip {
            if i == s || i == poly.prev(s) {
                continue;
            }
        }
        let (c, d) = poly.edge(i);
        let Some((t, u)) = line_params(origin, origin + dir, c, d) else {
            continue;
        };
        if t > tmin && (-1e-12..=1.0 + 1e-12).contains(&u) && best.is_none_or(|(bt, _)| t < bt) {
            best = Some((t, i));
        }
    }
    best
}

/// Point where the exact direction `dir` meets edge `edge`, snapped onto a
/// vertex when within a relative `1e-10` of one.
fn exact_hit(poly: &SimplePolygon, origin: Point, dir: Point, edge: usize, fallback: Point) -> Point {
    let (c, d) = poly.edge(edge);
    let mut p = match line_params(origin, origin + dir, c, d) {
        Some((t, u)) if t > 0.0 => c.lerp(d, u.clamp(0.0, 1.0)),
        _ => fallback,
    };
    let snap = 1e-10 * scale(poly);
    for v in [c, d] {
        if p.dist(v) <= snap {
            p = v;
        }
    }
    p
}

/// Whether the closed segment `ab` lies inside `poly`. Touching the boundary,
/// running along an edge, or passing exactly through a vertex is allowed.
pub fn segment_visible(poly: &SimplePolygon, a: Point, b: Point) -> bool {
    if !poly.contains(a) || !poly.contains(b) {
        return false;
    }
    let len = a.dist(b);
    if len <= eps() {
        return true;
    }
    let tol = eps();
    let mut ts = vec![0.0, 1.0];
    for (c, d) in poly.edges() {
        if let Some((t, u)) = line_params(a, b, c, d) {
            if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
                ts.push(t);
            }
        }
    }
    let dir = b - a;
    for &v in poly.vertices() {
        let t = (v - a).dot(dir) / dir.norm2();
        if (0.0..=1.0).contains(&t) && v.dist(a.lerp(b, t)) <= tol {
            ts.push(t);
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.windows(2)
        .filter(|w| (w[1] - w[0]) * len > 1e-12)
        .all(|w| poly.contains(a.lerp(b, 0.5 * (w[0] + w[1]))))
}

struct Hit {
    angle: f64,
    side: i8,
    point: Point,
}

fn order_hits(hits: &mut Vec<Hit>) {
    hits.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    // within a cluster of equal angles the clockwise-side ray comes first
    let mut i = 0;
    while i < hits.len() {
        let mut j = i + 1;
        while j < hits.len() && hits[j].angle - hits[i].angle <= 1e-12 {
            j += 1;
        }
        hits[i..j].sort_by_key(|h| h.side);
        i = j;
    }
}

/// Region of `poly` visible from `p`, by an angular sweep over the vertices.
pub fn visibility_polygon(poly: &SimplePolygon, p: Point) -> Result<SimplePolygon> {
    if !poly.contains(p) {
        return Err(Error::DegenerateInput(format!(
            "viewpoint ({}, {}) is outside the polygon",
            p.x, p.y
        )));
    }
    let sc = scale(poly);
    let tmin = 1e-12 * sc;
    let apex = poly.vertices().iter().position(|v| v.dist(p) <= eps());
    let on_boundary = apex.is_some() || poly.on_boundary(p);
    let mut hits = Vec::new();
    for (k, &v) in poly.vertices().iter().enumerate() {
        if Some(k) == apex {
            continue;
        }
        let Some(dir) = (v - p).normalized() else {
            continue;
        };
        let mut angle = dir.angle();
        if angle > std::f64::consts::PI - 1e-12 {
            angle = -std::f64::consts::PI;
        }
        for side in [-1i8, 1] {
            let d = dir.rotated(f64::from(side) * DELTA);
            let Some((t, e)) = first_hit(poly, p, d, tmin, apex) else {
                continue;
            };
            let raw = p + d * t;
            if on_boundary && !poly.contains_strict(p.lerp(raw, 0.5)) {
                continue;
            }
            let point = exact_hit(poly, p, dir, e, raw);
            hits.push(Hit { angle, side, point });
        }
    }
    order_hits(&mut hits);
    let mut ring: Vec<Point> = hits.iter().map(|h| h.point).collect();
    if on_boundary && !ring.is_empty() {
        // the origin sits in the angular gap that looks out of the polygon
        let m = ring.len();
        let h = 1e-6 * sc;
        let mut best: Option<(f64, usize)> = None;
        for i in 0..m {
            let a0 = hits[i].angle;
            let mut a1 = hits[(i + 1) % m].angle;
            if a1 < a0 || (i + 1 == m) {
                a1 += 2.0 * std::f64::consts::PI;
            }
            let gap = a1 - a0;
            let mid = Point::new(1.0, 0.0).rotated(0.5 * (a0 + a1));
            if !poly.contains_strict(p + mid * h) && best.is_none_or(|(g, _)| gap > g) {
                best = Some((gap, i));
            }
        }
        let cut = match best {
            Some((_, i)) => i + 1,
            None => 0,
        };
        ring.rotate_left(cut % m);
        ring.insert(0, p);
    }
    SimplePolygon::from_derived(ring).ok_or_else(|| {
        Error::DegenerateInput(format!("empty visibility region from ({}, {})", p.x, p.y))
    })
}

/// Part of the region visible from vertex `apex` that lies in the cone swept
/// counter-clockwise from `start_dir` to `end_dir` (cone narrower than π).
pub fn cone_visibility(
    poly: &SimplePolygon,
    apex: usize,
    start_dir: Point,
    end_dir: Point,
) -> Option<SimplePolygon> {
    let o = poly.vertex(apex);
    let e1 = start_dir.normalized()?;
    let e2 = end_dir.normalized()?;
    let rel = |d: Point| e1.cross(d).atan2(e1.dot(d));
    let width = rel(e2);
    if width <= 2.0 * DELTA {
        return None;
    }
    let tmin = 1e-12 * scale(poly);
    let mut dirs: Vec<(f64, i8, Point)> = vec![(0.0, 1, e1), (width, -1, e2)];
    for (k, &v) in poly.vertices().iter().enumerate() {
        if k == apex {
            continue;
        }
        let Some(d) = (v - o).normalized() else {
            continue;
        };
        let a = rel(d);
        if a > -1e-12 && a < width + 1e-12 {
            dirs.push((a.clamp(0.0, width), -1, d));
            dirs.push((a.clamp(0.0, width), 1, d));
        }
    }
    let mut hits = Vec::new();
    for (a, side, d) in dirs {
        let pa = (a + f64::from(side) * DELTA).clamp(DELTA, width - DELTA);
        let probe = e1.rotated(pa);
        let Some((t, e)) = first_hit(poly, o, probe, tmin, Some(apex)) else {
            continue;
        };
        let raw = o + probe * t;
        let point = exact_hit(poly, o, d, e, raw);
        // a hit recomputed along the exact direction must stay in the cone
        if orient(o, o + e1, point) < -eps() || orient(o, o + e2, point) > eps() {
            hits.push(Hit { angle: pa, side, point: raw });
        } else {
            hits.push(Hit { angle: a, side, point });
        }
    }
    order_hits(&mut hits);
    let mut ring = vec![o];
    ring.extend(hits.iter().map(|h| h.point));
    SimplePolygon::from_derived(ring)
}
