use serde::{Deserialize, Serialize};

use super::{speed_bound, RoadMap, SpeedProblem};
use crate::error::{Error, Result};
use crate::geometry::{
    boundary_samples, dist_point_segment, eps, first_hit, intersect_polygons, orient,
    segment_distance, segment_visible, subtract_polygons, Point, Ray, SimplePolygon,
};

/// One straight road-map segment with the corner it looks around.
///
/// The window is the chord from the corner along the sight line from the
/// segment's start; the pocket is the part of the cell behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub start: Point,
    pub end: Point,
    pub length: f64,
    pub corner: usize,
    pub corner_point: Point,
    pub window: (Point, Point),
    /// Unit normal of the window pointing away from the pocket.
    pub lit_normal: Point,
    pub pocket: SimplePolygon,
}

impl Leg {
    pub fn window_distance(&self, p: Point) -> f64 {
        dist_point_segment(p, self.window.0, self.window.1)
    }
}

/// Trigger region of one leg at a given radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicZone {
    pub leg: usize,
    pub corner: usize,
    pub trigger_ray: Ray,
    pub window: (Point, Point),
    pub radius: f64,
    pub segment: (Point, Point),
    pub pocket: SimplePolygon,
    /// Closed outline for drawing (arcs in 64 pieces), clipped to the cell.
    pub outline: Vec<Point>,
}

impl DynamicZone {
    pub fn distance(&self, p: Point) -> f64 {
        dist_point_segment(p, self.window.0, self.window.1)
    }

    /// Inside the cell, off the pocket, and within the radius of the window.
    pub fn contains(&self, cell: &SimplePolygon, p: Point) -> bool {
        cell.contains(p) && !self.pocket.contains(p) && self.distance(p) < self.radius
    }
}

fn pocket_for(poly: &SimplePolygon, c: usize, hit: Point, edge: usize, dir: Point) -> Option<(SimplePolygon, Point)> {
    let n = poly.len();
    let cp = poly.vertex(c);
    let to_next = poly.vertex(c + 1) - cp;
    let to_prev = poly.vertex(poly.prev(c)) - cp;
    let (dn, dp) = (to_next.dot(dir), to_prev.dot(dir));
    if dn.max(dp) < 0.0 {
        return None;
    }
    let ahead_next = dn > dp;
    let mut ring = vec![cp];
    if ahead_next {
        // corner, c+1, ..., edge start, hit
        let mut i = (c + 1) % n;
        loop {
            ring.push(poly.vertex(i));
            if i == edge {
                break;
            }
            i = (i + 1) % n;
        }
        ring.push(hit);
    } else {
        // hit, edge end, ..., c-1, corner
        ring.clear();
        ring.push(hit);
        let mut i = (edge + 1) % n;
        while i != c {
            ring.push(poly.vertex(i));
            i = (i + 1) % n;
        }
        ring.push(cp);
    }
    let pocket = SimplePolygon::from_derived(ring)?;
    let ahead = if ahead_next { to_next } else { to_prev };
    let side = orient(cp, cp + dir, cp + ahead).signum();
    Some((pocket, dir.perp() * -side))
}

fn make_leg(poly: &SimplePolygon, start: Point, end: Point, corner: usize) -> Option<Leg> {
    let cp = poly.vertex(corner);
    let dir = (cp - start).normalized()?;
    let tmin = 1e-12 * poly.diameter().max(1.0);
    let (t, e) = first_hit(poly, cp, dir, tmin, Some(corner))?;
    let hit = cp + dir * t;
    if !segment_visible(poly, cp, hit) {
        return None;
    }
    let (pocket, lit_normal) = pocket_for(poly, corner, hit, e, dir)?;
    Some(Leg {
        start,
        end,
        length: start.dist(end),
        corner,
        corner_point: cp,
        window: (cp, hit),
        lit_normal,
        pocket,
    })
}

fn sees_around(poly: &SimplePolygon, from: Point, corner: usize) -> bool {
    let o = poly.vertex(corner);
    let e1 = o - poly.vertex(poly.prev(corner));
    let e2 = o - poly.vertex(poly.next(corner));
    let v = from - o;
    e1.cross(v) >= -eps() && v.cross(e2) >= -eps() && segment_visible(poly, from, o)
}

/// Legs of a road map. A leg ending on a reflex vertex looks around that
/// vertex; a leg ending at a target region looks around the group corner
/// its start does not see around (the one hiding the most).
pub fn build_legs(poly: &SimplePolygon, road: &RoadMap) -> Result<Vec<Leg>> {
    let w = &road.waypoints;
    let mut legs = Vec::new();
    for k in 1..w.len() {
        let (a, b) = (w[k - 1], w[k]);
        let bend = poly
            .reflex_indices()
            .into_iter()
            .find(|&i| poly.vertex(i).dist(b) <= eps());
        let leg = if let Some(c) = bend {
            make_leg(poly, a, b, c)
        } else {
            let g = road.stations.iter().position(|&s| s == k).ok_or_else(|| {
                Error::StrategyUnavailable(format!("waypoint {k} is neither a corner nor a station"))
            })?;
            road.groups[g]
                .iter()
                .filter(|&&c| !sees_around(poly, a, c) && segment_visible(poly, a, poly.vertex(c)))
                .filter_map(|&c| make_leg(poly, a, b, c))
                .max_by(|x, y| x.pocket.area().total_cmp(&y.pocket.area()))
        };
        let leg = leg.ok_or_else(|| {
            Error::StrategyUnavailable(format!("segment {k} has no corner to look around"))
        })?;
        legs.push(leg);
    }
    Ok(legs)
}

/// Radius caps: a zone keeps clear of every other reflex vertex outside its
/// pocket, and two zones together fit between their windows.
pub fn leg_caps(poly: &SimplePolygon, legs: &[Leg]) -> SpeedProblem {
    let diam = poly.diameter();
    let caps = legs
        .iter()
        .map(|leg| {
            poly.reflex_indices()
                .into_iter()
                .filter(|&v| v != leg.corner && !leg.pocket.contains(poly.vertex(v)))
                .map(|v| leg.window_distance(poly.vertex(v)))
                .fold(diam, f64::min)
        })
        .collect();
    let mut pair_caps = Vec::new();
    for j in 0..legs.len() {
        for k in j + 1..legs.len() {
            let (a, b) = legs[j].window;
            let (c, d) = legs[k].window;
            pair_caps.push((j, k, segment_distance(a, b, c, d)));
        }
    }
    SpeedProblem {
        lengths: legs.iter().map(|l| l.length).collect(),
        caps,
        pair_caps,
    }
}

/// Event-triggered guard target: intruder position to road-map arc length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingMap {
    pub legs: Vec<Leg>,
    pub radii: Vec<f64>,
}

impl TrackingMap {
    /// Piecewise parameter in `[0, m]`: integer values are waypoints, a
    /// fractional value inside leg `k` grows from 0 at the zone's outer rim
    /// to 1 on the window.
    pub fn tau(&self, x: Point) -> f64 {
        for (k, leg) in self.legs.iter().enumerate() {
            if !leg.pocket.contains(x) {
                let f = (1.0 - leg.window_distance(x) / self.radii[k]).clamp(0.0, 1.0);
                return k as f64 + f;
            }
        }
        self.legs.len() as f64
    }

    pub fn arc_length(&self, tau: f64) -> f64 {
        let m = self.legs.len();
        if m == 0 {
            return 0.0;
        }
        let k = (tau.floor().max(0.0) as usize).min(m - 1);
        let before: f64 = self.legs[..k].iter().map(|l| l.length).sum();
        before + (tau - k as f64).clamp(0.0, 1.0) * self.legs[k].length
    }

    pub fn target(&self, x: Point) -> f64 {
        self.arc_length(self.tau(x))
    }

    /// Leg whose zone holds `x`, if any.
    pub fn zone_of(&self, x: Point) -> Option<usize> {
        let t = self.tau(x);
        let k = t.floor() as usize;
        (t > k as f64 && k < self.legs.len()).then_some(k)
    }
}

/// Checks on sample points of `cell` that every point is seen from the
/// guard positions the map can send the guard to while the point is
/// occupied. Returns the first failing point.
pub fn validate_tracking(cell: &SimplePolygon, map: &TrackingMap) -> std::result::Result<(), Point> {
    let mut pts = cell.grid_points(60);
    pts.extend(boundary_samples(cell, cell.diameter() / 200.0));
    pts.extend(cell.vertices().iter().copied());
    let ends: Vec<Point> = std::iter::once(map.legs[0].start)
        .chain(map.legs.iter().map(|l| l.end))
        .collect();
    for x in pts {
        let t = map.tau(x);
        let k = t.floor() as usize;
        let ok = if t > k as f64 && k < map.legs.len() {
            segment_visible(cell, ends[k], x) && segment_visible(cell, ends[k + 1], x)
        } else {
            segment_visible(cell, ends[k.min(ends.len() - 1)], x)
        };
        if !ok {
            return Err(x);
        }
    }
    Ok(())
}

fn outline(cell: &SimplePolygon, leg: &Leg, r: f64) -> Vec<Point> {
    let (c, h) = leg.window;
    let Some(t) = (h - c).normalized() else {
        return vec![];
    };
    // stadium around the window, half turns of 32 pieces at each end
    let a0 = t.angle() - std::f64::consts::FRAC_PI_2;
    let mut ring = Vec::with_capacity(66);
    for (center, base) in [(h, a0), (c, a0 + std::f64::consts::PI)] {
        for j in 0..=32 {
            let a = base + std::f64::consts::PI * j as f64 / 32.0;
            ring.push(center + Point::new(a.cos(), a.sin()) * r);
        }
    }
    let Some(shape) = SimplePolygon::from_derived(ring) else {
        return vec![];
    };
    intersect_polygons(cell, &shape)
        .iter()
        .flat_map(|piece| subtract_polygons(piece, &leg.pocket))
        .max_by(|a, b| a.area().total_cmp(&b.area()))
        .map(|p| p.vertices().to_vec())
        .unwrap_or_default()
}

/// Zones for guard speed `v_p`: radius `d_k v_e / v_p` per leg. Fails with
/// `SpeedTooLow` when the radii break a cap of `problem`.
pub fn build_dynamic_zones(
    cell: &SimplePolygon,
    legs: &[Leg],
    problem: &SpeedProblem,
    v_e: f64,
    v_p: f64,
) -> Result<Vec<DynamicZone>> {
    if !(v_e > 0.0 && v_p > 0.0) {
        return Err(Error::ConfigInvalid("speeds must be positive".into()));
    }
    let radii: Vec<f64> = legs.iter().map(|l| l.length * v_e / v_p).collect();
    let over = |used: f64, cap: f64| used > cap * (1.0 + 1e-12);
    let broken = radii.iter().zip(&problem.caps).any(|(&r, &c)| over(r, c))
        || problem
            .pair_caps
            .iter()
            .any(|&(j, k, c)| over(radii[j] + radii[k], c));
    if broken {
        let required = speed_bound(problem, v_e)?.v_star;
        return Err(Error::SpeedTooLow {
            given: v_p,
            required,
        });
    }
    Ok(legs
        .iter()
        .enumerate()
        .map(|(k, leg)| DynamicZone {
            leg: k,
            corner: leg.corner,
            trigger_ray: Ray::new(leg.window.0, leg.window.1 - leg.window.0)
                .unwrap_or(Ray {
                    origin: leg.window.0,
                    direction: Point::new(1.0, 0.0),
                }),
            window: leg.window,
            radius: radii[k],
            segment: (leg.start, leg.end),
            pocket: leg.pocket.clone(),
            outline: outline(cell, leg, radii[k]),
        })
        .collect())
}
