//! SVG pictures of plans and traces. Road maps are open paths, zones and
//! regions closed paths, static guards dots.

use std::fmt::Write as _;

use crate::deploy::{DeploymentPlan, GuardMode};
use crate::geometry::{Point, SimplePolygon};
use crate::simulate::SimTrace;
use crate::starzones::star_regions;

const PALETTE: [&str; 8] = [
    "#f4d9a6", "#c9e4c5", "#cfd8f0", "#f2c4ce", "#e0d3f0", "#d4efe9", "#f5e3c3", "#dcdcdc",
];

struct Canvas {
    out: String,
    scale: f64,
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

impl Canvas {
    fn new(poly: &SimplePolygon) -> Canvas {
        let (lo, hi) = poly.bbox();
        let size = (hi - lo).norm().max(1e-9);
        let pad = 0.05 * size;
        let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="{}">"#,
            fmt(lo.x - pad),
            fmt(-hi.y - pad),
            fmt(w),
            fmt(h),
            fmt(800.0 * h / w)
        );
        // world y points up
        out.push_str("<g transform=\"scale(1,-1)\">\n");
        Canvas {
            out,
            scale: size / 400.0,
        }
    }

    fn path(&mut self, class: &str, pts: &[Point], closed: bool, style: &str) {
        if pts.is_empty() {
            return;
        }
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let _ = write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, fmt(p.x), fmt(p.y));
        }
        if closed {
            d.push('Z');
        }
        let _ = writeln!(self.out, r#"<path class="{class}" d="{}" {style}/>"#, d.trim_end());
    }

    fn dot(&mut self, class: &str, p: Point, r: f64, fill: &str) {
        let _ = writeln!(
            self.out,
            r#"<circle class="{class}" cx="{}" cy="{}" r="{}" fill="{fill}"/>"#,
            fmt(p.x),
            fmt(p.y),
            fmt(r * self.scale)
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</g>\n</svg>\n");
        self.out
    }

    fn stroke(&self, colour: &str, width: f64) -> String {
        format!(
            r#"fill="none" stroke="{colour}" stroke-width="{}""#,
            fmt(width * self.scale)
        )
    }
}

pub fn render_plan(plan: &DeploymentPlan) -> String {
    let mut c = Canvas::new(&plan.polygon);
    for (i, cell) in plan.cells.iter().enumerate() {
        let style = format!(
            r##"fill="{}" stroke="#888" stroke-width="{}""##,
            PALETTE[i % PALETTE.len()],
            fmt(0.5 * c.scale)
        );
        c.path("cell", cell.polygon.vertices(), true, &style);
    }
    for a in &plan.assignments {
        if let GuardMode::Mobile(_) = a.mode {
            let cell = &plan.cells[a.cell].polygon;
            for s in star_regions(cell).unwrap_or_default() {
                let style = r##"fill="#ffe680" fill-opacity="0.5" stroke="none""##;
                c.path("star-region", s.region.vertices(), true, style);
            }
        }
    }
    for a in &plan.assignments {
        if let GuardMode::Mobile(m) = &a.mode {
            for z in &m.zones {
                let style = r##"fill="#e85d75" fill-opacity="0.25" stroke="#e85d75""##;
                c.path("zone", &z.outline, true, style);
            }
        }
    }
    let outline = c.stroke("#222", 1.5);
    c.path("polygon", plan.polygon.vertices(), true, &outline);
    for a in &plan.assignments {
        match &a.mode {
            GuardMode::Static { position } => c.dot("guard-static", *position, 4.0, "#1f4fd1"),
            GuardMode::Mobile(m) => {
                let line = c.stroke("#1f4fd1", 2.0);
                c.path("road-map", &m.road_map.waypoints, false, &line);
                c.dot("guard-mobile", m.road_map.waypoints[0], 3.0, "#1f4fd1");
            }
        }
    }
    c.finish()
}

pub fn render_trace(trace: &SimTrace) -> String {
    let poly = &trace.header.polygon;
    let mut c = Canvas::new(poly);
    let outline = c.stroke("#222", 1.5);
    c.path("polygon", poly.vertices(), true, &outline);
    if trace.records.len() > 1 {
        let pts: Vec<Point> = trace.records.iter().map(|r| r.intruder).collect();
        let line = c.stroke("#d62728", 1.0);
        c.path("intruder", &pts, false, &line);
        let guards = trace.records[0].guards.len();
        for g in 0..guards {
            let pts: Vec<Point> = trace.records.iter().map(|r| r.guards[g]).collect();
            let line = c.stroke("#1f4fd1", 1.0);
            c.path("guard-track", &pts, false, &line);
        }
        for r in trace.records.iter().filter(|r| !r.visible) {
            c.dot("breach", r.intruder, 2.0, "#d62728");
        }
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deploy::deploy_polygon;
    use crate::simulate::{run, Policy, SimConfig};

    #[test]
    fn crown_plan_has_a_road_map_and_a_zone() {
        let c = SimplePolygon::new(
            [(0., 0.), (6., 0.), (6., 4.), (5., 1.), (1., 1.), (0., 4.)]
                .iter()
                .map(|&(x, y)| Point::new(x, y))
                .collect(),
        )
        .unwrap();
        let plan = deploy_polygon("crown", &c, 1.0).unwrap();
        let svg = render_plan(&plan);
        assert!(svg.contains(r#"class="road-map""#));
        assert!(svg.contains(r#"class="zone""#));
        let zone_line = svg.lines().find(|l| l.contains("class=\"zone\"")).unwrap();
        assert!(zone_line.contains(" Z\""));
        let t = run(&plan, &SimConfig::new(&plan, Policy::RandomWalk, 0, 1)).unwrap();
        let svg = render_trace(&t);
        assert!(svg.contains(r#"class="polygon""#));
        assert!(!svg.contains("intruder"));
    }
}
