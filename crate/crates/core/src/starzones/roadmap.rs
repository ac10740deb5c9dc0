use serde::{Deserialize, Serialize};

use super::{star_intersection, StarRegion};
use crate::error::{Error, Result};
use crate::geometry::{
    boundary_samples, geodesic_between_sets, geodesic_to_set, Point, PolyPath, SimplePolygon,
};
use crate::triangulation::triangulate;

/// Patrol path of a mobile guard. `groups[g]` lists the reflex vertices
/// whose star regions share the target region `targets[g]`; the path visits
/// the targets in order, touching `targets[g]` at waypoint `stations[g]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadMap {
    pub waypoints: Vec<Point>,
    pub length: f64,
    pub groups: Vec<Vec<usize>>,
    pub targets: Vec<SimplePolygon>,
    pub stations: Vec<usize>,
}

impl RoadMap {
    pub fn path(&self) -> PolyPath {
        PolyPath::new(self.waypoints.clone())
    }

    pub fn segments(&self) -> Vec<(Point, Point)> {
        self.waypoints.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        self.waypoints.windows(2).map(|w| w[0].dist(w[1])).collect()
    }
}

/// A point well inside `poly`: its centroid when interior, otherwise the
/// centroid of its largest triangle.
pub(crate) fn interior_point(poly: &SimplePolygon) -> Point {
    let c = poly.centroid();
    if poly.contains_strict(c) && !poly.on_boundary(c) {
        return c;
    }
    let Ok(t) = triangulate(poly) else { return c };
    t.triangles
        .iter()
        .map(|tri| {
            let (a, b, d) = (poly.vertex(tri[0]), poly.vertex(tri[1]), poly.vertex(tri[2]));
            ((b - a).cross(d - a).abs(), (a + b + d) / 3.0)
        })
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .map_or(c, |x| x.1)
}

fn set_partitions(m: usize) -> Vec<Vec<usize>> {
    // restricted growth strings
    let mut out = Vec::new();
    let mut a = vec![0usize; m];
    fn rec(i: usize, maxv: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == a.len() {
            out.push(a.clone());
            return;
        }
        for v in 0..=maxv + 1 {
            a[i] = v;
            rec(i + 1, maxv.max(v), a, out);
        }
    }
    if m == 0 {
        return vec![vec![]];
    }
    rec(1, 0, &mut a, &mut out);
    out
}

/// Groupings of the star regions into the fewest blocks with a common
/// region each. Every returned grouping has the same block count.
pub fn group_reflex_vertices(stars: &[StarRegion]) -> Vec<(Vec<Vec<usize>>, Vec<SimplePolygon>)> {
    let m = stars.len();
    let mut best: Vec<(Vec<Vec<usize>>, Vec<SimplePolygon>)> = Vec::new();
    let mut best_k = usize::MAX;
    'outer: for labels in set_partitions(m) {
        let k = labels.iter().max().map_or(0, |&x| x + 1);
        if k > best_k {
            continue;
        }
        let mut blocks = vec![Vec::new(); k];
        for (i, &g) in labels.iter().enumerate() {
            blocks[g].push(i);
        }
        let mut targets = Vec::with_capacity(k);
        for b in &blocks {
            let regions: Vec<&SimplePolygon> = b.iter().map(|&i| &stars[i].region).collect();
            match star_intersection(&regions) {
                Some(t) => targets.push(t),
                None => continue 'outer,
            }
        }
        if k < best_k {
            best.clear();
            best_k = k;
        }
        let groups = blocks
            .iter()
            .map(|b| b.iter().map(|&i| stars[i].owner_vertex).collect())
            .collect();
        best.push((groups, targets));
    }
    best
}

fn concat(first: &PolyPath, second: &PolyPath) -> Vec<Point> {
    let mut w: Vec<Point> = first.waypoints.iter().rev().copied().collect();
    w.extend(second.waypoints.iter().skip(1).copied());
    w
}

fn station_candidates(t: &SimplePolygon, step: f64) -> Vec<Point> {
    let mut c = boundary_samples(t, step);
    c.push(interior_point(t));
    c
}

fn three_group_path(
    poly: &SimplePolygon,
    ta: &SimplePolygon,
    tm: &SimplePolygon,
    tb: &SimplePolygon,
    step: f64,
) -> Option<(Vec<Point>, usize)> {
    let mut best: Option<(f64, PolyPath, PolyPath)> = None;
    let consider = |w: Point, best: &mut Option<(f64, PolyPath, PolyPath)>| {
        let (Some(pa), Some(pb)) = (
            geodesic_to_set(poly, w, ta, step),
            geodesic_to_set(poly, w, tb, step),
        ) else {
            return;
        };
        let total = pa.total_length + pb.total_length;
        if best.as_ref().is_none_or(|b| total < b.0) {
            *best = Some((total, pa, pb));
        }
    };
    for w in station_candidates(tm, step * 10.0) {
        consider(w, &mut best);
    }
    // refine along the boundary near the best station
    let w0 = best.as_ref()?.1.waypoints[0];
    for w in boundary_samples(tm, step) {
        if w.dist(w0) <= 20.0 * step {
            consider(w, &mut best);
        }
    }
    let (_, pa, pb) = best?;
    let station = pa.waypoints.len() - 1;
    Some((concat(&pa, &pb), station))
}

/// Road map through the target regions of the fewest star-region groups.
/// Among equally small groupings the shortest road map wins.
pub fn build_road_map(poly: &SimplePolygon, stars: &[StarRegion]) -> Result<RoadMap> {
    let step = 1e-3 * poly.diameter();
    if stars.is_empty() {
        let p = interior_point(poly);
        return Ok(RoadMap {
            waypoints: vec![p],
            length: 0.0,
            groups: vec![],
            targets: vec![],
            stations: vec![0],
        });
    }
    let candidates = group_reflex_vertices(stars);
    let k = candidates.first().map_or(0, |c| c.0.len());
    if k > 3 {
        return Err(Error::Unsupported(format!(
            "{k} groups of star regions without a common point"
        )));
    }
    let mut best: Option<RoadMap> = None;
    for (groups, targets) in candidates {
        let built = match targets.len() {
            1 => Some(RoadMap {
                waypoints: vec![interior_point(&targets[0])],
                length: 0.0,
                groups,
                targets,
                stations: vec![0],
            }),
            2 => geodesic_between_sets(poly, &targets[0], &targets[1], step).map(|p| {
                let last = p.waypoints.len() - 1;
                RoadMap {
                    length: p.total_length,
                    waypoints: p.waypoints,
                    groups,
                    targets,
                    stations: vec![0, last],
                }
            }),
            _ => {
                let mut local: Option<RoadMap> = None;
                for mid in 0..3 {
                    let (a, b) = match mid {
                        0 => (1, 2),
                        1 => (0, 2),
                        _ => (0, 1),
                    };
                    let Some((w, st)) =
                        three_group_path(poly, &targets[a], &targets[mid], &targets[b], step)
                    else {
                        continue;
                    };
                    let path = PolyPath::new(w);
                    if local.as_ref().is_some_and(|l| l.length <= path.total_length) {
                        continue;
                    }
                    let last = path.waypoints.len() - 1;
                    local = Some(RoadMap {
                        length: path.total_length,
                        waypoints: path.waypoints,
                        groups: vec![groups[a].clone(), groups[mid].clone(), groups[b].clone()],
                        targets: vec![targets[a].clone(), targets[mid].clone(), targets[b].clone()],
                        stations: vec![0, st, last],
                    });
                }
                local
            }
        };
        if let Some(r) = built {
            if best.as_ref().is_none_or(|b| r.length < b.length) {
                best = Some(r);
            }
        }
    }
    best.ok_or_else(|| Error::Infeasible("no road map joins the star regions".into()))
}

#[cfg(test)]
mod tests {
    use super::super::star_regions;
    use super::*;

    #[test]
    fn set_partition_counts_are_bell_numbers() {
        let counts: Vec<usize> = (1..=5).map(|m| set_partitions(m).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 15, 52]);
    }

    #[test]
    fn crown_road_map_runs_along_the_floor() {
        let c = SimplePolygon::new(
            [(0., 0.), (6., 0.), (6., 4.), (5., 1.), (1., 1.), (0., 4.)]
                .iter()
                .map(|&(x, y)| Point::new(x, y))
                .collect(),
        )
        .unwrap();
        let stars = star_regions(&c).unwrap();
        let rm = build_road_map(&c, &stars).unwrap();
        assert_eq!(rm.groups.len(), 2);
        assert!((rm.length - 10.0 / 3.0).abs() < 1e-9);
    }
}
