//! Planar kernel: points, segments, rays, simple polygons, visibility and
//! geodesics inside a polygon.
//!
//! Everything is `f64` with a single absolute tolerance [`eps`] (default
//! `1e-9` world units, overridable through `GUARDSIM_EPS`). Points within
//! `eps` of the boundary count as inside, and a line of sight may graze the
//! boundary, including passing exactly through a reflex corner.

mod clip;
mod path;
mod polygon;
mod visibility;

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use clip::{clip_convex, clip_half_plane, intersect_polygons, kernel, subtract_polygons};
pub(crate) use path::boundary_samples;
pub use path::{geodesic_between_sets, geodesic_to_set, shortest_path, GeodesicGraph, PolyPath};
pub use polygon::SimplePolygon;
pub use visibility::{cone_visibility, first_hit, segment_visible, visibility_polygon};

pub const DEFAULT_EPS: f64 = 1e-9;

/// Boundary tolerance in world units.
pub fn eps() -> f64 {
    static EPS: OnceLock<f64> = OnceLock::new();
    *EPS.get_or_init(|| {
        std::env::var("GUARDSIM_EPS")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|e| e.is_finite() && *e > 0.0)
            .unwrap_or(DEFAULT_EPS)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Point> {
        let n = self.norm();
        (n > f64::MIN_POSITIVE && n.is_finite()).then(|| self / n)
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn rotated(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Div<f64> for Point {
    type Output = Point;
    fn div(self, k: f64) -> Point {
        Point::new(self.x / k, self.y / k)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Orientation of `c` relative to the directed line `a -> b`; positive when
/// `c` is to the left.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Parameter in `[0, 1]` of the point of segment `ab` closest to `p`.
pub fn project_on_segment(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return 0.0;
    }
    ((p - a).dot(d) / l2).clamp(0.0, 1.0)
}

pub fn closest_on_segment(p: Point, a: Point, b: Point) -> Point {
    a.lerp(b, project_on_segment(p, a, b))
}

pub fn dist_point_segment(p: Point, a: Point, b: Point) -> f64 {
    p.dist(closest_on_segment(p, a, b))
}

/// Intersection parameters `(t, u)` of the lines `a + t (b - a)` and
/// `c + u (d - c)`; `None` when parallel.
pub fn line_params(a: Point, b: Point, c: Point, d: Point) -> Option<(f64, f64)> {
    let r = b - a;
    let s = d - c;
    let denom = r.cross(s);
    if denom.abs() <= 1e-300 || denom.abs() <= 1e-14 * r.norm() * s.norm() {
        return None;
    }
    let ac = c - a;
    Some((ac.cross(s) / denom, ac.cross(r) / denom))
}

/// Whether closed segments `ab` and `cd` come within `tol` of each other.
pub fn segments_touch(a: Point, b: Point, c: Point, d: Point, tol: f64) -> bool {
    segment_distance(a, b, c, d) <= tol
}

/// Euclidean distance between closed segments `ab` and `cd`.
pub fn segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    if let Some((t, u)) = line_params(a, b, c, d) {
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
            return 0.0;
        }
    }
    dist_point_segment(a, c, d)
        .min(dist_point_segment(b, c, d))
        .min(dist_point_segment(c, a, b))
        .min(dist_point_segment(d, a, b))
}

/// Closest pair of points between segments `ab` and `cd`.
pub fn closest_points_segments(a: Point, b: Point, c: Point, d: Point) -> (Point, Point) {
    if let Some((t, u)) = line_params(a, b, c, d) {
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
            let p = a.lerp(b, t);
            return (p, p);
        }
    }
    let candidates = [
        (a, closest_on_segment(a, c, d)),
        (b, closest_on_segment(b, c, d)),
        (closest_on_segment(c, a, b), c),
        (closest_on_segment(d, a, b), d),
    ];
    candidates
        .into_iter()
        .min_by(|x, y| x.0.dist(x.1).total_cmp(&y.0.dist(y.1)))
        .unwrap()
}

/// A half-line with unit direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub origin: Point,
    pub direction: Point,
}

impl Ray {
    /// Builds a ray, normalizing `direction`. `None` for a zero direction.
    pub fn new(origin: Point, direction: Point) -> Option<Ray> {
        Some(Ray {
            origin,
            direction: direction.normalized()?,
        })
    }

    pub fn at(&self, t: f64) -> Point {
        self.origin + self.direction * t
    }

    pub fn distance_to(&self, p: Point) -> f64 {
        let t = (p - self.origin).dot(self.direction);
        if t <= 0.0 {
            p.dist(self.origin)
        } else {
            p.dist(self.at(t))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ray_distance_covers_the_disc_behind_the_origin() {
        let r = Ray::new(Point::new(0.0, 0.0), Point::new(2.0, 0.0)).unwrap();
        assert!((r.direction.norm() - 1.0).abs() < 1e-12);
        assert_eq!(r.distance_to(Point::new(0.5, -0.5)), 0.5);
        assert_eq!(r.distance_to(Point::new(-3.0, 4.0)), 5.0);
        assert!(Ray::new(Point::default(), Point::default()).is_none());
    }

    #[test]
    fn segment_distance_cases() {
        let o = Point::new(0.0, 0.0);
        let x = Point::new(1.0, 0.0);
        assert_eq!(segment_distance(o, x, Point::new(0.5, -1.0), Point::new(0.5, 1.0)), 0.0);
        assert_eq!(segment_distance(o, x, Point::new(2.0, 0.0), Point::new(3.0, 0.0)), 1.0);
        let (p, q) = closest_points_segments(o, x, Point::new(0.5, 2.0), Point::new(0.5, 1.0));
        assert_eq!((p, q), (Point::new(0.5, 0.0), Point::new(0.5, 1.0)));
    }
}
