use geo::{BooleanOps, Coord, LineString, Polygon as GeoPolygon};

use super::{orient, Point, SimplePolygon};

/// Keeps the part of the ring `pts` on the left of the directed line `a -> b`.
pub fn clip_half_plane(pts: &[Point], a: Point, b: Point) -> Vec<Point> {
    let n = pts.len();
    let mut out = Vec::with_capacity(n + 2);
    let side = |p: Point| orient(a, b, p);
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let (sp, sq) = (side(p), side(q));
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push(p.lerp(q, t));
        }
    }
    out
}

/// Sutherland-Hodgman clip of `subject` by the convex ring `clip`
/// (counter-clockwise).
pub fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut out = subject.to_vec();
    let m = clip.len();
    for i in 0..m {
        if out.is_empty() {
            break;
        }
        out = clip_half_plane(&out, clip[i], clip[(i + 1) % m]);
    }
    out
}

/// Kernel of `poly`: points that see the whole polygon. `None` when empty.
pub fn kernel(poly: &SimplePolygon) -> Option<SimplePolygon> {
    let (lo, hi) = poly.bbox();
    let pad = (hi - lo).norm();
    let mut ring = vec![
        Point::new(lo.x - pad, lo.y - pad),
        Point::new(hi.x + pad, lo.y - pad),
        Point::new(hi.x + pad, hi.y + pad),
        Point::new(lo.x - pad, hi.y + pad),
    ];
    for (a, b) in poly.edges() {
        ring = clip_half_plane(&ring, a, b);
        if ring.len() < 3 {
            return None;
        }
    }
    SimplePolygon::from_derived(ring)
}

fn to_geo(p: &SimplePolygon) -> GeoPolygon<f64> {
    let coords: Vec<Coord<f64>> = p.vertices().iter().map(|v| Coord { x: v.x, y: v.y }).collect();
    GeoPolygon::new(LineString::from(coords), vec![])
}

/// Components of the intersection of two simple polygons.
pub fn intersect_polygons(a: &SimplePolygon, b: &SimplePolygon) -> Vec<SimplePolygon> {
    let out = to_geo(a).intersection(&to_geo(b));
    out.0
        .iter()
        .filter_map(|g| {
            let pts: Vec<Point> = g.exterior().0.iter().map(|c| Point::new(c.x, c.y)).collect();
            SimplePolygon::from_derived(pts)
        })
        .collect()
}

/// Components of `a` minus `b` (outer rings only).
pub fn subtract_polygons(a: &SimplePolygon, b: &SimplePolygon) -> Vec<SimplePolygon> {
    let out = to_geo(a).difference(&to_geo(b));
    out.0
        .iter()
        .filter_map(|g| {
            let pts: Vec<Point> = g.exterior().0.iter().map(|c| Point::new(c.x, c.y)).collect();
            SimplePolygon::from_derived(pts)
        })
        .collect()
}
