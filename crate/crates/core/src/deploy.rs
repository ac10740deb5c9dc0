//! Per-partition guard assignment and the whole-polygon deployment plan.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{kernel, visibility_polygon, Point, SimplePolygon};
use crate::orthogonal::OrthogonalReport;
use crate::partition::{guard_budget, minimal_partition, nonagon_split, GuardBudget, PartitionSet};
use crate::starzones::{
    build_dynamic_zones, build_legs, build_road_map, leg_caps, speed_bound, star_regions,
    validate_tracking, DynamicZone, RoadMap, SpeedProblem, TrackingMap,
};
use crate::triangulation::triangulate;

/// Rounds of cap shrinking tried before a cell falls back to vertex guards.
const SHRINK_ROUNDS: usize = 20;
const SHRINK: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobileGuard {
    pub road_map: RoadMap,
    pub zones: Vec<DynamicZone>,
    pub tracking: TrackingMap,
    pub v_star: f64,
    /// `v_star / v_e`.
    pub ratio: f64,
    pub active_constraints: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum GuardMode {
    Static { position: Point },
    Mobile(Box<MobileGuard>),
}

impl GuardMode {
    pub fn v_star(&self) -> f64 {
        match self {
            GuardMode::Static { .. } => 0.0,
            GuardMode::Mobile(m) => m.v_star,
        }
    }

    pub fn is_mobile(&self) -> bool {
        matches!(self, GuardMode::Mobile(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardAssignment {
    /// Index of the partition (or quad group) the guard serves.
    pub partition_id: usize,
    pub cell: usize,
    #[serde(flatten)]
    pub mode: GuardMode,
}

/// Region one set of guards is responsible for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub polygon: SimplePolygon,
    pub partition_id: usize,
    pub guards: Vec<usize>,
    /// Why the cell uses vertex guards instead of the single-guard strategy.
    pub fallback: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentPlan {
    pub name: String,
    pub polygon: SimplePolygon,
    pub v_e: f64,
    pub partition_set: Option<PartitionSet>,
    pub orthogonal: Option<OrthogonalReport>,
    pub cells: Vec<Cell>,
    pub assignments: Vec<GuardAssignment>,
    pub global_v_star: f64,
    pub guard_total: usize,
    pub bound: usize,
    pub budget: GuardBudget,
}

impl DeploymentPlan {
    /// Cells whose closed region holds `p`.
    pub fn cells_at(&self, p: Point) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&c| self.cells[c].polygon.contains(p))
            .collect()
    }
}

/// Guards of one cell, before they get indices in a plan.
#[derive(Debug, Clone, PartialEq)]
pub struct CellDeployment {
    pub polygon: SimplePolygon,
    pub guards: Vec<GuardMode>,
    pub fallback: Option<String>,
}

fn sees_all(poly: &SimplePolygon, p: Point) -> bool {
    visibility_polygon(poly, p)
        .map(|v| v.area() >= poly.area() * (1.0 - 1e-9))
        .unwrap_or(false)
}

/// A point seeing the whole polygon: the kernel centroid.
pub fn static_point(poly: &SimplePolygon) -> Option<Point> {
    let k = kernel(poly)?;
    let c = k.centroid();
    let p = if k.contains(c) { c } else { k.vertex(0) };
    sees_all(poly, p).then_some(p)
}

/// Single mobile guard for a polygon without a kernel.
pub fn mobile_guard(poly: &SimplePolygon, v_e: f64) -> Result<GuardMode> {
    let stars = star_regions(poly)?;
    let road = build_road_map(poly, &stars)?;
    if road.length <= crate::geometry::eps() {
        let p = road.waypoints[0];
        return if sees_all(poly, p) {
            Ok(GuardMode::Static { position: p })
        } else {
            Err(Error::StrategyUnavailable(
                "common star region does not see the whole cell".into(),
            ))
        };
    }
    let legs = build_legs(poly, &road)?;
    let mut problem = leg_caps(poly, &legs);
    for _ in 0..SHRINK_ROUNDS {
        let bound = speed_bound(&problem, v_e)?;
        let tracking = TrackingMap {
            legs: legs.clone(),
            radii: bound.radii.clone(),
        };
        if validate_tracking(poly, &tracking).is_ok() {
            let zones = build_dynamic_zones(poly, &legs, &problem, v_e, bound.v_star)?;
            return Ok(GuardMode::Mobile(Box::new(MobileGuard {
                road_map: road,
                zones,
                tracking,
                v_star: bound.v_star,
                ratio: bound.ratio,
                active_constraints: bound.active_constraints,
            })));
        }
        problem = shrink(&problem);
    }
    Err(Error::StrategyUnavailable(
        "tracking map keeps losing sight after shrinking the zones".into(),
    ))
}

fn shrink(p: &SpeedProblem) -> SpeedProblem {
    SpeedProblem {
        lengths: p.lengths.clone(),
        caps: p.caps.iter().map(|c| c * SHRINK).collect(),
        pair_caps: p.pair_caps.iter().map(|&(j, k, c)| (j, k, c * SHRINK)).collect(),
    }
}

/// Vertex guards on the smallest colour class of a 3-colouring of a
/// triangulation.
pub fn vertex_guards(poly: &SimplePolygon) -> Result<Vec<Point>> {
    let t = triangulate(poly)?;
    let n = poly.len();
    let mut colour = vec![usize::MAX; n];
    let mut done = vec![false; t.triangles.len()];
    let first = t.triangles[0];
    for (c, &v) in first.iter().enumerate() {
        colour[v] = c;
    }
    done[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for (i, tri) in t.triangles.iter().enumerate() {
            if done[i] {
                continue;
            }
            let known: Vec<usize> = tri.iter().copied().filter(|&v| colour[v] != usize::MAX).collect();
            if known.len() == 2 {
                let missing = 3 - colour[known[0]] - colour[known[1]];
                for &v in tri {
                    if colour[v] == usize::MAX {
                        colour[v] = missing;
                    }
                }
                done[i] = true;
                changed = true;
            } else if known.len() == 3 {
                done[i] = true;
            }
        }
    }
    let class = (0..3)
        .min_by_key(|&c| colour.iter().filter(|&&x| x == c).count())
        .unwrap_or(0);
    Ok((0..n)
        .filter(|&v| colour[v] == class)
        .map(|v| poly.vertex(v))
        .collect())
}

fn fallback(poly: &SimplePolygon, reason: String) -> Result<CellDeployment> {
    Ok(CellDeployment {
        polygon: poly.clone(),
        guards: vertex_guards(poly)?
            .into_iter()
            .map(|position| GuardMode::Static { position })
            .collect(),
        fallback: Some(reason),
    })
}

/// One guard for a cell: static when a point sees all of it, otherwise a
/// mobile guard. Cells where the single-guard strategy does not apply get
/// vertex guards and a recorded reason.
pub fn deploy_partition(poly: &SimplePolygon, v_e: f64) -> Result<CellDeployment> {
    if let Some(position) = static_point(poly) {
        return Ok(CellDeployment {
            polygon: poly.clone(),
            guards: vec![GuardMode::Static { position }],
            fallback: None,
        });
    }
    match mobile_guard(poly, v_e) {
        Ok(g) => Ok(CellDeployment {
            polygon: poly.clone(),
            guards: vec![g],
            fallback: None,
        }),
        Err(
            e @ (Error::StrategyUnavailable(_)
            | Error::Unsupported(_)
            | Error::Infeasible(_)
            | Error::DegenerateInput(_)),
        ) => fallback(poly, e.to_string()),
        Err(e) => Err(e),
    }
}

/// Pentagon with a static guard plus the hexagon half.
pub fn deploy_nonagon(poly: &SimplePolygon, v_e: f64) -> Result<Vec<CellDeployment>> {
    let (pent, hex) = nonagon_split(poly)?;
    let pent = poly.sub_polygon(&pent);
    let hex = poly.sub_polygon(&hex);
    let position = static_point(&pent).ok_or_else(|| {
        Error::StrategyUnavailable("pentagon half of the nonagon has no kernel".into())
    })?;
    Ok(vec![
        CellDeployment {
            polygon: pent,
            guards: vec![GuardMode::Static { position }],
            fallback: None,
        },
        deploy_partition(&hex, v_e)?,
    ])
}

pub(crate) fn check_speed(v_e: f64) -> Result<()> {
    if v_e > 0.0 && v_e.is_finite() {
        Ok(())
    } else {
        Err(Error::ConfigInvalid(format!("intruder speed {v_e} must be positive")))
    }
}

/// Assembles cells (tagged with their partition index) into a plan.
pub(crate) fn assemble(
    name: &str,
    poly: &SimplePolygon,
    v_e: f64,
    parts: Vec<(usize, CellDeployment)>,
    bound: usize,
    budget: GuardBudget,
) -> DeploymentPlan {
    let mut cells = Vec::new();
    let mut assignments = Vec::new();
    for (pid, cd) in parts {
        let cell = cells.len();
        let mut guards = Vec::new();
        for mode in cd.guards {
            guards.push(assignments.len());
            assignments.push(GuardAssignment {
                partition_id: pid,
                cell,
                mode,
            });
        }
        cells.push(Cell {
            polygon: cd.polygon,
            partition_id: pid,
            guards,
            fallback: cd.fallback,
        });
    }
    let global_v_star = assignments.iter().map(|a| a.mode.v_star()).fold(0.0, f64::max);
    DeploymentPlan {
        name: name.to_string(),
        polygon: poly.clone(),
        v_e,
        partition_set: None,
        orthogonal: None,
        guard_total: assignments.len(),
        cells,
        assignments,
        global_v_star,
        bound,
        budget,
    }
}

/// Minimal partition, one deployment per partition, one static guard for
/// the remainder.
pub fn deploy_polygon(name: &str, poly: &SimplePolygon, v_e: f64) -> Result<DeploymentPlan> {
    check_speed(v_e)?;
    let ps = minimal_partition(poly)?;
    let mut parts = Vec::new();
    let mut per_partition = Vec::new();
    for (pid, p) in ps.partitions.iter().enumerate() {
        let cds = if p.edges() == 9 {
            match deploy_nonagon(&p.polygon, v_e) {
                Ok(c) => c,
                Err(Error::StrategyUnavailable(_) | Error::PartitionFailed(_)) => {
                    vec![deploy_partition(&p.polygon, v_e)?]
                }
                Err(e) => return Err(e),
            }
        } else {
            vec![deploy_partition(&p.polygon, v_e)?]
        };
        if !p.is_remainder() {
            per_partition.push(cds.iter().map(|c| c.guards.len()).sum());
        }
        parts.extend(cds.into_iter().map(|c| (pid, c)));
    }
    let mut budget = guard_budget(&ps, &per_partition);
    // the remainder is counted once by the budget whatever it holds
    let remainder_guards: usize = parts
        .iter()
        .filter(|(pid, _)| ps.partitions[*pid].is_remainder())
        .map(|(_, c)| c.guards.len())
        .sum();
    if remainder_guards > 1 {
        budget.total += remainder_guards - 1;
        budget.satisfies = budget.total < budget.bound;
    }
    let mut plan = assemble(name, poly, v_e, parts, budget.bound, budget);
    plan.partition_set = Some(ps);
    Ok(plan)
}
