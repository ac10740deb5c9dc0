//! Discrete-time pursuit: an intruder policy against the plan's guards,
//! with a visibility check every step.

mod policy;

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::deploy::{DeploymentPlan, GuardMode};
use crate::error::{Error, Result};
use crate::geometry::{closest_on_segment, eps, segment_visible, Point, PolyPath, SimplePolygon};
use crate::io::{digest, to_canonical_json};

pub use policy::{advance, hiding_spots, Policy, SteerInput};
use policy::Driver;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Time step; chosen from the zone radii when absent.
    pub dt: Option<f64>,
    pub v_e: f64,
    pub v_p: f64,
    pub steps: u64,
    pub seed: u64,
    pub policy: Policy,
    /// Intruder start; an interior point of the polygon when absent.
    pub start: Option<Point>,
}

impl SimConfig {
    pub fn new(plan: &DeploymentPlan, policy: Policy, steps: u64, seed: u64) -> SimConfig {
        SimConfig {
            dt: None,
            v_e: plan.v_e,
            v_p: plan.global_v_star,
            steps,
            seed,
            policy,
            start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub step: u64,
    pub t: f64,
    pub intruder: Point,
    pub guards: Vec<Point>,
    /// Zone each mobile guard is tracking, by leg index.
    pub active_zone: Vec<Option<usize>>,
    pub visible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub schema_version: u32,
    pub polygon: SimplePolygon,
    pub config: SimConfig,
    pub config_digest: String,
    pub plan_digest: String,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub breach_steps: Vec<u64>,
    pub records: usize,
    /// FNV-1a over the canonical state lines joined by newlines.
    pub states_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub header: TraceHeader,
    pub records: Vec<SimState>,
    pub breach_steps: Vec<u64>,
}

impl SimTrace {
    pub fn summary(&self) -> Result<TraceSummary> {
        let mut h = fnv::FnvHasher::default();
        use std::hash::Hasher;
        for (i, r) in self.records.iter().enumerate() {
            if i > 0 {
                h.write(b"\n");
            }
            h.write(to_canonical_json(r)?.as_bytes());
        }
        Ok(TraceSummary {
            breach_steps: self.breach_steps.clone(),
            records: self.records.len(),
            states_digest: format!("{:016x}", h.finish()),
        })
    }

    /// JSON lines: header, one state per line, summary.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = to_canonical_json(&self.header)?;
        out.push('\n');
        for r in &self.records {
            out.push_str(&to_canonical_json(r)?);
            out.push('\n');
        }
        out.push_str(&to_canonical_json(&self.summary()?)?);
        out.push('\n');
        Ok(out)
    }

    pub fn from_json_lines(text: &str) -> Result<SimTrace> {
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        if lines.len() < 2 {
            return Err(Error::Format("trace needs a header and a summary".into()));
        }
        let header: TraceHeader = serde_json::from_str(lines[0])?;
        let records = lines[1..lines.len() - 1]
            .iter()
            .map(|l| serde_json::from_str(l))
            .collect::<std::result::Result<Vec<SimState>, _>>()?;
        let summary: TraceSummary = serde_json::from_str(lines[lines.len() - 1])?;
        let trace = SimTrace {
            header,
            records,
            breach_steps: summary.breach_steps.clone(),
        };
        if trace.summary()? != summary {
            return Err(Error::Format("trace summary does not match its records".into()));
        }
        Ok(trace)
    }
}

/// For each pair of cells, the shared boundary segment on the way from the
/// first toward the second.
#[derive(Debug, Clone)]
struct Routes {
    exit: Vec<Vec<Option<(Point, Point)>>>,
}

fn overlap(a: (Point, Point), b: (Point, Point)) -> Option<(Point, Point)> {
    let d = a.1 - a.0;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return None;
    }
    let tol = eps() * 10.0;
    let off = |p: Point| d.cross(p - a.0).abs() / l2.sqrt();
    if off(b.0) > tol || off(b.1) > tol {
        return None;
    }
    let t = |p: Point| (p - a.0).dot(d) / l2;
    let (u, v) = (t(b.0), t(b.1));
    let lo = u.min(v).max(0.0);
    let hi = u.max(v).min(1.0);
    ((hi - lo) * l2.sqrt() > tol).then(|| (a.0 + d * lo, a.0 + d * hi))
}

impl Routes {
    fn new(plan: &DeploymentPlan) -> Routes {
        let m = plan.cells.len();
        let mut shared: Vec<Vec<Option<(Point, Point)>>> = vec![vec![None; m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let found = plan.cells[i].polygon.edges().find_map(|e| {
                    plan.cells[j].polygon.edges().find_map(|f| overlap(e, f))
                });
                shared[i][j] = found;
                shared[j][i] = found;
            }
        }
        let mut exit = vec![vec![None; m]; m];
        for (src, row) in exit.iter_mut().enumerate() {
            // breadth-first search, remembering the first hop
            let mut first: Vec<Option<usize>> = vec![None; m];
            let mut seen = vec![false; m];
            seen[src] = true;
            let mut queue = VecDeque::new();
            for nb in 0..m {
                if shared[src][nb].is_some() {
                    seen[nb] = true;
                    first[nb] = Some(nb);
                    queue.push_back(nb);
                }
            }
            while let Some(v) = queue.pop_front() {
                for nb in 0..m {
                    if !seen[nb] && shared[v][nb].is_some() {
                        seen[nb] = true;
                        first[nb] = first[v];
                        queue.push_back(nb);
                    }
                }
            }
            for dst in 0..m {
                row[dst] = first[dst].and_then(|h| shared[src][h]);
            }
        }
        Routes { exit }
    }
}

/// Smallest zone radius of the plan's mobile guards.
pub fn min_zone_radius(plan: &DeploymentPlan) -> Option<f64> {
    plan.assignments
        .iter()
        .filter_map(|a| match &a.mode {
            GuardMode::Mobile(m) => m.tracking.radii.iter().copied().reduce(f64::min),
            GuardMode::Static { .. } => None,
        })
        .reduce(f64::min)
}

/// Time step: the given one if it keeps the intruder's step under a quarter
/// of every zone radius, otherwise an error; by default exactly that bound.
pub fn choose_dt(plan: &DeploymentPlan, config: &SimConfig) -> Result<f64> {
    let bad = |m: String| Err(Error::ConfigInvalid(m));
    if !(config.v_e >= 0.0 && config.v_e.is_finite()) {
        return bad(format!("intruder speed {} is invalid", config.v_e));
    }
    if !(config.v_p >= 0.0 && config.v_p.is_finite()) {
        return bad(format!("guard speed {} is invalid", config.v_p));
    }
    let v = config.v_e.max(f64::MIN_POSITIVE);
    let limit = match min_zone_radius(plan) {
        Some(r) => r / (4.0 * v),
        None => plan.polygon.diameter() / (200.0 * v),
    };
    match config.dt {
        None => Ok(limit),
        Some(dt) if !(dt > 0.0 && dt.is_finite()) => bad(format!("dt {dt} must be positive")),
        Some(dt) if dt > limit * (1.0 + 1e-12) => {
            bad(format!("dt {dt} exceeds the zone-radius limit {limit}"))
        }
        Some(dt) => Ok(dt),
    }
}

struct MobileState {
    path: PolyPath,
    s: f64,
}

/// A running simulation. The service steps one of these per session.
pub struct Simulator<'a> {
    plan: &'a DeploymentPlan,
    config: SimConfig,
    dt: f64,
    rng: ChaCha8Rng,
    driver: Driver,
    routes: Routes,
    mobile: Vec<Option<MobileState>>,
    spot_cells: Vec<Vec<usize>>,
    state: SimState,
    cells: Vec<usize>,
}

impl<'a> Simulator<'a> {
    pub fn new(plan: &'a DeploymentPlan, config: SimConfig) -> Result<Simulator<'a>> {
        let dt = choose_dt(plan, &config)?;
        let start = match config.start {
            Some(p) if plan.polygon.contains(p) => p,
            Some(p) => {
                return Err(Error::ConfigInvalid(format!(
                    "start ({}, {}) is outside the polygon",
                    p.x, p.y
                )))
            }
            None => crate::starzones::interior_point(&plan.polygon),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let driver = Driver::new(&plan.polygon, config.policy.clone(), &mut rng);
        let spot_cells = driver.spots.iter().map(|&s| plan.cells_at(s)).collect();
        let mobile = plan
            .assignments
            .iter()
            .map(|a| match &a.mode {
                GuardMode::Mobile(m) => Some(MobileState {
                    path: m.road_map.path(),
                    s: 0.0,
                }),
                GuardMode::Static { .. } => None,
            })
            .collect();
        let mut sim = Simulator {
            plan,
            dt,
            rng,
            driver,
            routes: Routes::new(plan),
            mobile,
            spot_cells,
            state: SimState {
                step: 0,
                t: 0.0,
                intruder: start,
                guards: vec![],
                active_zone: vec![],
                visible: true,
            },
            cells: vec![],
            config,
        };
        sim.cells = sim.cells_at(start);
        for g in 0..plan.assignments.len() {
            if let Some((s, _)) = sim.target(g, start) {
                if let Some(m) = sim.mobile[g].as_mut() {
                    m.s = s;
                }
            }
        }
        sim.state.guards = sim.guard_positions();
        sim.state.active_zone = (0..plan.assignments.len())
            .map(|g| sim.target(g, start).and_then(|t| t.1))
            .collect();
        sim.state.visible = sim.seen(start, &sim.cells.clone(), &sim.state.guards);
        Ok(sim)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// Replaces the held steering input from the next step on.
    pub fn steer(&mut self, heading: Point, magnitude: f64) {
        self.driver.steer = SteerInput {
            step: 0,
            heading,
            magnitude,
        }
        .velocity();
    }

    fn cells_at(&self, x: Point) -> Vec<usize> {
        let c = self.plan.cells_at(x);
        if !c.is_empty() {
            return c;
        }
        // numerically outside every cell: take the nearest one
        (0..self.plan.cells.len())
            .min_by(|&a, &b| {
                let da = self.plan.cells[a].polygon.boundary_distance(x);
                let db = self.plan.cells[b].polygon.boundary_distance(x);
                da.total_cmp(&db)
            })
            .into_iter()
            .collect()
    }

    /// Arc-length target and zone of mobile guard `g` for intruder `x`.
    fn target(&self, g: usize, x: Point) -> Option<(f64, Option<usize>)> {
        let a = &self.plan.assignments[g];
        let GuardMode::Mobile(m) = &a.mode else {
            return None;
        };
        let cell = &self.plan.cells[a.cell].polygon;
        let p = if cell.contains(x) {
            x
        } else {
            let here = self.cells_at(x)[0];
            match self.routes.exit[a.cell][here] {
                Some((u, v)) => closest_on_segment(x, u, v),
                None => x,
            }
        };
        Some((m.tracking.target(p), m.tracking.zone_of(p)))
    }

    fn guard_positions(&self) -> Vec<Point> {
        self.plan
            .assignments
            .iter()
            .zip(&self.mobile)
            .map(|(a, m)| match (&a.mode, m) {
                (GuardMode::Static { position }, _) => *position,
                (_, Some(m)) => m.path.point_at(m.s),
                _ => Point::default(),
            })
            .collect()
    }

    fn seen(&self, x: Point, cells: &[usize], guards: &[Point]) -> bool {
        cells.iter().any(|&c| {
            self.plan.cells[c]
                .guards
                .iter()
                .any(|&g| segment_visible(&self.plan.polygon, guards[g], x))
        })
    }

    /// Advances one step and returns the new state.
    pub fn step(&mut self) -> &SimState {
        let x = self.state.intruder;
        let guards = self.state.guards.clone();
        let plan = self.plan;
        let hidden = |s: Point| {
            let idx = self.driver.spots.iter().position(|&q| q == s);
            let cells = idx.map_or_else(|| plan.cells_at(s), |i| self.spot_cells[i].clone());
            !cells.iter().any(|&c| {
                plan.cells[c]
                    .guards
                    .iter()
                    .any(|&g| segment_visible(&plan.polygon, guards[g], s))
            })
        };
        let responsible: Vec<Point> = self
            .cells
            .iter()
            .flat_map(|&c| plan.cells[c].guards.iter().map(|&g| guards[g]))
            .collect();
        let reach = self.config.v_e * self.dt;
        let mut driver = self.driver.clone();
        let next = driver.next(
            &plan.polygon,
            x,
            reach,
            self.state.step + 1,
            &mut self.rng,
            &hidden,
            &responsible,
        );
        self.driver = driver;
        let y = if next.dist(x) > reach {
            x.lerp(next, reach / next.dist(x))
        } else {
            next
        };
        let max_move = self.config.v_p * self.dt + 0.5 * eps();
        let mut zones = Vec::with_capacity(plan.assignments.len());
        for g in 0..plan.assignments.len() {
            let t = self.target(g, y);
            if let (Some((target, _)), Some(m)) = (t, self.mobile[g].as_mut()) {
                m.s += (target - m.s).clamp(-max_move, max_move);
            }
            zones.push(t.and_then(|t| t.1));
        }
        let new_cells = self.cells_at(y);
        let guards = self.guard_positions();
        let mut visible = self.seen(y, &new_cells, &guards);
        if !visible && new_cells != self.cells {
            visible = self.seen(y, &self.cells, &guards);
        }
        self.cells = new_cells;
        self.state = SimState {
            step: self.state.step + 1,
            t: (self.state.step + 1) as f64 * self.dt,
            intruder: y,
            guards,
            active_zone: zones,
            visible,
        };
        &self.state
    }
}

/// Runs `config.steps` steps from the plan's initial deployment.
pub fn run(plan: &DeploymentPlan, config: &SimConfig) -> Result<SimTrace> {
    let mut sim = Simulator::new(plan, config.clone())?;
    let mut records = Vec::with_capacity(config.steps as usize + 1);
    records.push(sim.state().clone());
    for _ in 0..config.steps {
        records.push(sim.step().clone());
    }
    let breach_steps = records.iter().filter(|r| !r.visible).map(|r| r.step).collect();
    Ok(SimTrace {
        header: TraceHeader {
            schema_version: crate::io::SCHEMA_VERSION,
            polygon: plan.polygon.clone(),
            config: config.clone(),
            config_digest: digest(config)?,
            plan_digest: digest(plan)?,
            dt: sim.dt(),
        },
        records,
        breach_steps,
    })
}
