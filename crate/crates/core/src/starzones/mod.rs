//! Star regions of reflex vertices, road maps between them, dynamic zones
//! and the guard-speed program.

mod roadmap;
mod speed;
mod zones;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    cone_visibility, eps, intersect_polygons, segment_distance, Point, SimplePolygon,
};

pub(crate) use roadmap::interior_point;
pub use roadmap::{build_road_map, group_reflex_vertices, RoadMap};
pub use speed::{speed_bound, SpeedBound, SpeedProblem};
pub use zones::{
    build_dynamic_zones, build_legs, leg_caps, validate_tracking, DynamicZone, Leg, TrackingMap,
};

/// Points that see reflex vertex `owner_vertex` and lie in the wedge of its
/// two edge extensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarRegion {
    pub owner_vertex: usize,
    pub apex: Point,
    /// Wedge directions, counter-clockwise from `wedge.0` to `wedge.1`.
    pub wedge: (Point, Point),
    pub region: SimplePolygon,
}

impl StarRegion {
    /// Closed-wedge test with tolerance `tol`.
    pub fn in_wedge(&self, p: Point, tol: f64) -> bool {
        let v = p - self.apex;
        let (e1, e2) = self.wedge;
        e1.cross(v) >= -tol * e1.norm() && v.cross(e2) >= -tol * e2.norm()
    }
}

pub fn star_region(poly: &SimplePolygon, vertex: usize) -> Result<StarRegion> {
    if vertex >= poly.len() || !poly.is_reflex(vertex) {
        return Err(Error::NotReflex(vertex));
    }
    let o = poly.vertex(vertex);
    let e1 = o - poly.vertex(poly.prev(vertex));
    let e2 = o - poly.vertex(poly.next(vertex));
    let region = cone_visibility(poly, vertex, e1, e2).ok_or_else(|| {
        Error::DegenerateInput(format!("star region of vertex {vertex} is empty"))
    })?;
    Ok(StarRegion {
        owner_vertex: vertex,
        apex: o,
        wedge: (e1, e2),
        region,
    })
}

pub fn star_regions(poly: &SimplePolygon) -> Result<Vec<StarRegion>> {
    poly.reflex_indices()
        .into_iter()
        .map(|i| star_region(poly, i))
        .collect()
}

/// Common part of all regions (largest component), `None` when they share
/// no area.
pub fn star_intersection(regions: &[&SimplePolygon]) -> Option<SimplePolygon> {
    let (first, rest) = regions.split_first()?;
    let mut acc = (*first).clone();
    for r in rest {
        acc = intersect_polygons(&acc, r)
            .into_iter()
            .max_by(|a, b| a.area().total_cmp(&b.area()))?;
    }
    Some(acc)
}

fn polygons_touch(a: &SimplePolygon, b: &SimplePolygon) -> bool {
    a.contains(b.vertex(0))
        || b.contains(a.vertex(0))
        || a.edges()
            .any(|(p, q)| b.edges().any(|(r, s)| segment_distance(p, q, r, s) <= eps()))
}

fn edge_meets(region: &SimplePolygon, a: Point, b: Point) -> bool {
    region.contains(a)
        || region.contains(b)
        || region.edges().any(|(p, q)| segment_distance(a, b, p, q) <= eps())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflexEdgeCount {
    pub vertex: usize,
    /// Edges of the polygon with no point in the star region.
    pub non_intersecting: usize,
    pub required_edges: usize,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PentagonAngleCheck {
    pub vertex: usize,
    pub edge: (usize, usize),
    pub angle_sum: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinEdgesDiagnostics {
    pub n: usize,
    pub per_reflex: Vec<ReflexEdgeCount>,
    /// Largest number of pairwise disjoint star regions.
    pub disjoint_star_regions: usize,
    pub star_count_required: Option<usize>,
    pub star_count_ok: bool,
    pub pentagon_angles: Vec<PentagonAngleCheck>,
    pub violations: usize,
}

fn interior_angle(poly: &SimplePolygon, i: usize) -> f64 {
    let a = poly.vertex(poly.prev(i)) - poly.vertex(i);
    let b = poly.vertex(poly.next(i)) - poly.vertex(i);
    // counter-clockwise from the next edge to the previous edge
    let ang = b.cross(a).atan2(b.dot(a));
    if ang < 0.0 {
        ang + std::f64::consts::TAU
    } else {
        ang
    }
}

fn max_disjoint(disjoint: &[Vec<bool>]) -> usize {
    let m = disjoint.len();
    let mut best = usize::from(m > 0);
    for mask in 1u32..(1u32 << m) {
        let k = mask.count_ones() as usize;
        if k <= best {
            continue;
        }
        let ids: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
        let ok = ids
            .iter()
            .enumerate()
            .all(|(x, &i)| ids[x + 1..].iter().all(|&j| disjoint[i][j]));
        if ok {
            best = k;
        }
    }
    best
}

/// Edge-count lemmas checked on `poly`: each reflex vertex with `r >= 2`
/// edges missing its star region needs `r + 3` edges (5 when `r = 1`), and
/// `2, 3, 4, 5` pairwise disjoint star regions need `6, 7, 9, 10` edges.
pub fn min_edges_check(poly: &SimplePolygon) -> Result<MinEdgesDiagnostics> {
    let n = poly.len();
    let stars = star_regions(poly)?;
    let mut per_reflex = Vec::new();
    let mut pentagon_angles = Vec::new();
    for s in &stars {
        let missing: Vec<usize> = (0..n)
            .filter(|&e| {
                let (a, b) = poly.edge(e);
                !edge_meets(&s.region, a, b)
            })
            .collect();
        let r = missing.len();
        let required_edges = match r {
            0 => 0,
            1 => 5,
            _ => r + 3,
        };
        per_reflex.push(ReflexEdgeCount {
            vertex: s.owner_vertex,
            non_intersecting: r,
            required_edges,
            ok: n >= required_edges,
        });
        if n == 5 && stars.len() == 1 && r == 2 {
            for &e in &missing {
                let j = poly.next(e);
                let angle_sum = interior_angle(poly, e) + interior_angle(poly, j);
                pentagon_angles.push(PentagonAngleCheck {
                    vertex: s.owner_vertex,
                    edge: (e, j),
                    angle_sum,
                    ok: angle_sum < std::f64::consts::PI,
                });
            }
        }
    }
    let m = stars.len();
    let mut disjoint = vec![vec![false; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let d = !polygons_touch(&stars[i].region, &stars[j].region);
            disjoint[i][j] = d;
            disjoint[j][i] = d;
        }
    }
    let nd = max_disjoint(&disjoint);
    let star_count_required = match nd {
        2 => Some(6),
        3 => Some(7),
        4 => Some(9),
        5 => Some(10),
        _ => None,
    };
    let star_count_ok = star_count_required.is_none_or(|req| n >= req);
    let violations = per_reflex.iter().filter(|c| !c.ok).count()
        + pentagon_angles.iter().filter(|c| !c.ok).count()
        + usize::from(!star_count_ok);
    Ok(MinEdgesDiagnostics {
        n,
        per_reflex,
        disjoint_star_regions: nd,
        star_count_required,
        star_count_ok,
        pentagon_angles,
        violations,
    })
}
