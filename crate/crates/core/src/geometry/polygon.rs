use serde::{Deserialize, Serialize};

use super::{dist_point_segment, eps, orient, segment_distance, Point};
use crate::error::PolygonError;

/// Counter-clockwise simple polygon with per-vertex reflex flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "RawPolygon", try_from = "RawPolygon")]
pub struct SimplePolygon {
    vertices: Vec<Point>,
    reflex: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct RawPolygon {
    vertices: Vec<Point>,
}

impl From<SimplePolygon> for RawPolygon {
    fn from(p: SimplePolygon) -> Self {
        RawPolygon { vertices: p.vertices }
    }
}

impl TryFrom<RawPolygon> for SimplePolygon {
    type Error = PolygonError;

    fn try_from(raw: RawPolygon) -> Result<Self, PolygonError> {
        if raw.vertices.len() < 3 {
            return Err(PolygonError::TooFewVertices(raw.vertices.len()));
        }
        if let Some(i) = raw.vertices.iter().position(|p| !p.is_finite()) {
            return Err(PolygonError::NonFinite(i));
        }
        if signed_area(&raw.vertices) <= 0.0 {
            return Err(PolygonError::ZeroArea);
        }
        Ok(SimplePolygon::with_flags(raw.vertices))
    }
}

pub(crate) fn signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        s += pts[i].cross(pts[(i + 1) % n]);
    }
    0.5 * s
}

fn collinear(a: Point, b: Point, c: Point, tol: f64) -> bool {
    // distance of the middle vertex from the chord through its neighbours,
    // or of a neighbour from the other edge's line when the chord is tiny
    let chord = c - a;
    let cl = chord.norm();
    let d_mid = if cl > 0.0 {
        orient(a, c, b).abs() / cl
    } else {
        0.0
    };
    let back = (b - a).dot(c - b) < 0.0;
    d_mid <= tol || (back && orient(a, b, c).abs() <= tol * (b - a).norm().max((c - b).norm()))
}

impl SimplePolygon {
    /// Validates a vertex ring. Clockwise input is reversed to
    /// counter-clockwise; collinear consecutive vertices are rejected.
    pub fn new(mut vertices: Vec<Point>) -> Result<Self, PolygonError> {
        let n = vertices.len();
        if n < 3 {
            return Err(PolygonError::TooFewVertices(n));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(PolygonError::NonFinite(i));
        }
        let tol = eps();
        for i in 0..n {
            let j = (i + 1) % n;
            if vertices[i].dist(vertices[j]) <= tol {
                return Err(PolygonError::DuplicateVertex(i, j));
            }
        }
        for i in 0..n {
            let a = vertices[(i + n - 1) % n];
            let c = vertices[(i + 1) % n];
            if collinear(a, vertices[i], c, tol) {
                return Err(PolygonError::Collinear(i));
            }
        }
        for i in 0..n {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                if segment_distance(a, b, c, d) <= tol {
                    return Err(PolygonError::NotSimple(i, j));
                }
            }
        }
        let area = signed_area(&vertices);
        if area.abs() <= tol * tol {
            return Err(PolygonError::ZeroArea);
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Self::with_flags(vertices))
    }

    /// Builds a polygon from computed geometry (visibility regions, clipped
    /// pieces). Near-duplicate and collinear vertices are dropped and the
    /// ring is oriented counter-clockwise; simplicity is not re-checked.
    pub fn from_derived(points: Vec<Point>) -> Option<Self> {
        let tol = eps();
        let mut pts: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            if !p.is_finite() {
                return None;
            }
            if pts.last().is_none_or(|q| q.dist(p) > tol) {
                pts.push(p);
            }
        }
        while pts.len() > 1 && pts[0].dist(*pts.last().unwrap()) <= tol {
            pts.pop();
        }
        loop {
            let n = pts.len();
            if n < 3 {
                return None;
            }
            let mut removed = false;
            for i in 0..n {
                let a = pts[(i + n - 1) % n];
                let c = pts[(i + 1) % n];
                if collinear(a, pts[i], c, tol) || a.dist(pts[i]) <= tol {
                    pts.remove(i);
                    removed = true;
                    break;
                }
            }
            if !removed {
                break;
            }
        }
        let area = signed_area(&pts);
        if area.abs() <= tol * tol {
            return None;
        }
        if area < 0.0 {
            pts.reverse();
        }
        Some(Self::with_flags(pts))
    }

    /// Sub-polygon on the given vertex indices, kept as is (a vertex may sit
    /// on a straight angle where a cut continues an edge).
    pub fn sub_polygon(&self, ids: &[usize]) -> SimplePolygon {
        Self::with_flags(ids.iter().map(|&i| self.vertex(i)).collect())
    }

    fn with_flags(vertices: Vec<Point>) -> Self {
        let n = vertices.len();
        let reflex = (0..n)
            .map(|i| {
                let a = vertices[(i + n - 1) % n];
                let c = vertices[(i + 1) % n];
                orient(a, vertices[i], c) < 0.0
            })
            .collect();
        SimplePolygon { vertices, reflex }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i % self.len()]
    }

    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    pub fn prev(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> (Point, Point) {
        (self.vertex(i), self.vertex(i + 1))
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        (0..self.len()).map(move |i| self.edge(i))
    }

    pub fn is_reflex(&self, i: usize) -> bool {
        self.reflex[i]
    }

    pub fn reflex_flags(&self) -> &[bool] {
        &self.reflex
    }

    pub fn reflex_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.reflex[i]).collect()
    }

    pub fn is_convex(&self) -> bool {
        !self.reflex.iter().any(|&r| r)
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn centroid(&self) -> Point {
        let n = self.len();
        let a = self.signed_area();
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let (p, q) = self.edge(i);
            let w = p.cross(q);
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        Point::new(cx / (6.0 * a), cy / (6.0 * a))
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, p) in self.vertices.iter().enumerate() {
            for q in &self.vertices[i + 1..] {
                d = d.max((*p - *q).norm2());
            }
        }
        d.sqrt()
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| dist_point_segment(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn on_boundary(&self, p: Point) -> bool {
        let e = eps();
        self.edges().any(|(a, b)| dist_point_segment(p, a, b) <= e)
    }

    /// Crossing-number test without boundary tolerance.
    pub fn contains_strict(&self, p: Point) -> bool {
        let mut inside = false;
        let n = self.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Inside or within `eps` of the boundary.
    pub fn contains(&self, p: Point) -> bool {
        self.contains_strict(p) || self.on_boundary(p)
    }

    /// Cell centres of a `per_axis` x `per_axis` grid over the bounding box
    /// that fall strictly inside the polygon.
    pub fn grid_points(&self, per_axis: usize) -> Vec<Point> {
        let (lo, hi) = self.bbox();
        let mut out = Vec::new();
        for i in 0..per_axis {
            for j in 0..per_axis {
                let p = Point::new(
                    lo.x + (hi.x - lo.x) * (i as f64 + 0.5) / per_axis as f64,
                    lo.y + (hi.y - lo.y) * (j as f64 + 0.5) / per_axis as f64,
                );
                if self.contains_strict(p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Vertex indices shifted so the ring starts at `start`.
    pub fn rotated(&self, start: usize) -> SimplePolygon {
        let n = self.len();
        let vertices = (0..n).map(|k| self.vertices[(start + k) % n]).collect();
        Self::with_flags(vertices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(pts: &[(f64, f64)]) -> Result<SimplePolygon, PolygonError> {
        SimplePolygon::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    fn l_hexagon() -> SimplePolygon {
        poly(&[(0., 0.), (4., 0.), (4., 2.), (2., 2.), (2., 4.), (0., 4.)]).unwrap()
    }

    #[test]
    fn unit_square_contains() {
        let sq = poly(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]).unwrap();
        assert!(sq.contains(Point::new(0.5, 0.5)));
        assert!(!sq.contains(Point::new(2.0, 0.0)));
        assert!(sq.contains(Point::new(1.0, 0.5)));
        assert!(sq.is_convex());
    }

    #[test]
    fn l_hexagon_notch_is_outside() {
        let l = l_hexagon();
        assert!(!l.contains(Point::new(3.0, 3.0)));
        assert_eq!(l.reflex_indices(), vec![3]);
        assert_eq!(l.area(), 12.0);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let p = poly(&[(0., 0.), (0., 1.), (1., 1.), (1., 0.)]).unwrap();
        assert!(p.signed_area() > 0.0);
    }

    #[test]
    fn rejects_bad_rings() {
        assert_eq!(poly(&[(0., 0.), (1., 0.)]).unwrap_err().tag(), "too-few-vertices");
        assert_eq!(
            poly(&[(0., 0.), (1., 0.), (2., 0.), (1., 1.)]).unwrap_err().tag(),
            "collinear"
        );
        assert_eq!(
            poly(&[(0., 0.), (2., 2.), (2., 0.), (0., 2.)]).unwrap_err().tag(),
            "not-simple"
        );
        assert_eq!(
            poly(&[(0., 0.), (1., 0.), (1., 0.), (0., 1.)]).unwrap_err().tag(),
            "duplicate-vertex"
        );
        assert_eq!(
            poly(&[(0., 0.), (f64::NAN, 0.), (0., 1.)]).unwrap_err().tag(),
            "non-finite"
        );
    }

    #[test]
    fn derived_polygon_drops_collinear_points() {
        let p = SimplePolygon::from_derived(vec![
            Point::new(0., 0.),
            Point::new(1., 0.),
            Point::new(2., 0.),
            Point::new(2., 2.),
            Point::new(2., 2.),
            Point::new(0., 2.),
        ])
        .unwrap();
        assert_eq!(p.len(), 4);
    }
}
