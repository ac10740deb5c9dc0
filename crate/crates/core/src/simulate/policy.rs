use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{first_hit, segment_visible, GeodesicGraph, Point, SimplePolygon};

/// Intruder behaviour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Policy {
    RandomWalk,
    GreedyEscape,
    /// Visit the waypoints in order along geodesics, then start over.
    Scripted { waypoints: Vec<Point> },
    /// Scripted tour of the hiding spots behind every reflex corner.
    CornerRush,
    /// Sample-and-hold steering inputs, each applied from its step on.
    Steered { inputs: Vec<SteerInput> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteerInput {
    pub step: u64,
    pub heading: Point,
    /// Fraction of the intruder speed, clamped to `[0, 1]`.
    pub magnitude: f64,
}

impl SteerInput {
    /// Unit heading and clamped magnitude; a zero heading means standing.
    pub fn velocity(&self) -> Point {
        let m = if self.magnitude.is_finite() {
            self.magnitude.clamp(0.0, 1.0)
        } else {
            0.0
        };
        self.heading.normalized().map_or(Point::default(), |h| h * m)
    }
}

/// Points just behind each reflex corner, on both sides of its two edge
/// extensions, then points tucked into every convex corner.
pub fn hiding_spots(poly: &SimplePolygon) -> Vec<Point> {
    let tmin = 1e-9 * poly.diameter().max(1.0);
    let mut out = Vec::new();
    for i in poly.reflex_indices() {
        let o = poly.vertex(i);
        for nb in [poly.prev(i), poly.next(i)] {
            let Some(dir) = (o - poly.vertex(nb)).normalized() else {
                continue;
            };
            let Some((t, _)) = first_hit(poly, o, dir, tmin, Some(i)) else {
                continue;
            };
            let base = o + dir * (0.5 * t);
            for side in [1.0, -1.0] {
                let p = base + dir.perp() * (side * 0.1 * t);
                if poly.contains_strict(p) && !poly.on_boundary(p) {
                    out.push(p);
                }
            }
        }
    }
    for i in 0..poly.len() {
        if poly.is_reflex(i) {
            continue;
        }
        let v = poly.vertex(i);
        let (a, b) = (poly.vertex(poly.prev(i)) - v, poly.vertex(poly.next(i)) - v);
        let reach = 0.1 * a.norm().min(b.norm());
        let Some(bis) = (a.normalized().unwrap_or_default() + b.normalized().unwrap_or_default()).normalized() else {
            continue;
        };
        let p = v + bis * reach;
        if poly.contains_strict(p) && !poly.on_boundary(p) {
            out.push(p);
        }
    }
    out
}

/// Moves from `x` along unit `dir` by `dist`, reflecting off the boundary
/// when `reflect` is set and stopping short of it otherwise. Returns the new
/// point and heading.
pub fn advance(poly: &SimplePolygon, x: Point, dir: Point, dist: f64, reflect: bool) -> (Point, Point) {
    let scale = poly.diameter().max(1.0);
    let margin = 1e-9 * scale;
    let (mut pos, mut d, mut left) = (x, dir, dist);
    for _ in 0..4 {
        if left <= 0.0 {
            break;
        }
        match first_hit(poly, pos, d, 1e-12 * scale, None) {
            Some((t, e)) if t < left + margin => {
                pos = pos + d * (t - margin).max(0.0);
                left -= t;
                if !reflect {
                    break;
                }
                let (a, b) = poly.edge(e);
                let Some(u) = (b - a).normalized() else { break };
                d = u * (2.0 * d.dot(u)) - d;
            }
            _ => {
                pos = pos + d * left;
                left = 0.0;
            }
        }
    }
    // without reflection the move stops short of the first hit
    if poly.contains(pos) {
        (pos, d)
    } else {
        (x, d)
    }
}

/// Per-run intruder state.
#[derive(Debug, Clone)]
pub(crate) struct Driver {
    pub policy: Policy,
    pub heading: f64,
    pub waypoints: Vec<Point>,
    pub next_waypoint: usize,
    pub spots: Vec<Point>,
    pub steer: Point,
    pub steer_idx: usize,
    geodesics: std::sync::Arc<GeodesicGraph>,
}

impl Driver {
    pub fn new(poly: &SimplePolygon, policy: Policy, rng: &mut ChaCha8Rng) -> Driver {
        let spots = hiding_spots(poly);
        let waypoints = match &policy {
            Policy::Scripted { waypoints } => waypoints.clone(),
            Policy::CornerRush => spots.clone(),
            _ => vec![],
        };
        Driver {
            heading: rng.random_range(0.0..std::f64::consts::TAU),
            policy,
            waypoints,
            next_waypoint: 0,
            spots,
            steer: Point::default(),
            steer_idx: 0,
            geodesics: std::sync::Arc::new(GeodesicGraph::new(poly)),
        }
    }

    /// One straight move along the first leg of the geodesic toward the
    /// current waypoint.
    fn follow(&mut self, poly: &SimplePolygon, x: Point, reach: f64) -> Point {
        if self.waypoints.is_empty() {
            return x;
        }
        if x.dist(self.waypoints[self.next_waypoint]) <= 1e-12 {
            self.next_waypoint = (self.next_waypoint + 1) % self.waypoints.len();
        }
        let w = self.waypoints[self.next_waypoint];
        let path = self.geodesics.path(poly, x, w);
        let first = path.waypoints.get(1).copied().unwrap_or(w);
        let d = x.dist(first);
        let y = if d <= reach { first } else { x.lerp(first, reach / d) };
        if y.dist(w) <= 1e-12 {
            self.next_waypoint = (self.next_waypoint + 1) % self.waypoints.len();
        }
        y
    }

    /// Next intruder position from `x` with step length `reach`.
    pub fn next(
        &mut self,
        poly: &SimplePolygon,
        x: Point,
        reach: f64,
        step: u64,
        rng: &mut ChaCha8Rng,
        hidden: &dyn Fn(Point) -> bool,
        guards: &[Point],
    ) -> Point {
        match self.policy.clone() {
            Policy::RandomWalk => {
                self.heading += rng.random_range(-0.6..0.6);
                let dir = Point::new(self.heading.cos(), self.heading.sin());
                let (p, d) = advance(poly, x, dir, reach, true);
                self.heading = d.angle();
                p
            }
            Policy::GreedyEscape => self.greedy(poly, x, reach, hidden, guards),
            Policy::Scripted { .. } | Policy::CornerRush => self.follow(poly, x, reach),
            Policy::Steered { inputs } => {
                while self.steer_idx < inputs.len() && inputs[self.steer_idx].step <= step {
                    self.steer = inputs[self.steer_idx].velocity();
                    self.steer_idx += 1;
                }
                match self.steer.normalized() {
                    Some(dir) => advance(poly, x, dir, reach * self.steer.norm(), false).0,
                    None => x,
                }
            }
        }
    }

    fn greedy(
        &mut self,
        poly: &SimplePolygon,
        x: Point,
        reach: f64,
        hidden: &dyn Fn(Point) -> bool,
        guards: &[Point],
    ) -> Point {
        let mut near = self.spots.clone();
        near.sort_by(|a, b| a.dist(x).total_cmp(&b.dist(x)));
        let goal = near.into_iter().find(|&s| hidden(s));
        let aim = goal.map(|g| {
            let p = self.geodesics.path(poly, x, g);
            p.waypoints.get(1).copied().unwrap_or(g)
        });
        let far = |y: Point| guards.iter().map(|g| g.dist(y)).fold(f64::INFINITY, f64::min);
        let mut best = (f64::NEG_INFINITY, f64::NEG_INFINITY, x);
        for k in 0..32 {
            let a = std::f64::consts::TAU * k as f64 / 32.0;
            let (y, _) = advance(poly, x, Point::new(a.cos(), a.sin()), reach, false);
            let progress = aim.map_or(0.0, |w| {
                let gain = w.dist(x) - w.dist(y);
                // do not overshoot the aim point
                if w.dist(x) <= reach && y.dist(w) > 0.0 {
                    gain - y.dist(w)
                } else {
                    gain
                }
            });
            let score = (progress, far(y));
            let better = score.0 > best.0 + 1e-12
                || ((score.0 - best.0).abs() <= 1e-12 && score.1 > best.1);
            if better {
                best = (score.0, score.1, y);
            }
        }
        if let Some(w) = aim {
            if w.dist(x) <= reach && segment_visible(poly, x, w) {
                return w;
            }
        }
        best.2
    }
}
