use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use guardsim::io::{read_json, PlanFile};
use guardsim::partition::PartitionSet;
use guardsim::simulate::SimTrace;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

fn guardsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_guardsim")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn deploy(dir: &Path, name: &str) -> PathBuf {
    let out = dir.join(format!("{name}.plan.json"));
    let o = guardsim(&["deploy", s(&fixture(name)), "--ve", "1", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn self_intersecting_input_exits_2_with_a_tag() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.json");
    let input = fixture("self_intersecting");
    for cmd in ["partition", "deploy"] {
        let mut args = vec![cmd, s(&input)];
        if cmd == "deploy" {
            args.extend(["--ve", "1"]);
        }
        args.push(s(&out));
        let o = guardsim(&args);
        assert_eq!(o.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("E:not-simple"));
    }
    assert!(!out.exists());
}

#[test]
fn missing_input_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = guardsim(&["partition", s(&dir.path().join("nope.json")), s(&dir.path().join("o.json"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("E:"));
}

#[test]
fn tampered_plan_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let plan = deploy(dir.path(), "crown");
    let text = std::fs::read_to_string(&plan).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["plan"]["guard_total"] = Value::from(7);
    std::fs::write(&plan, v.to_string()).unwrap();
    let o = guardsim(&["simulate", s(&plan), "--steps", "5", s(&dir.path().join("t.jsonl"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn l_hexagon_is_one_piece() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.json");
    let o = guardsim(&["partition", s(&fixture("l_hexagon")), s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let set: PartitionSet = read_json(&out).unwrap();
    assert_eq!(set.partitions.len(), 1);
    assert!(set.cut_diagonals.is_empty());
}

#[test]
fn twenty_gon_pieces_recount() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.json");
    assert_eq!(guardsim(&["partition", s(&fixture("notched_20gon")), s(&out)]).status.code(), Some(0));
    let set: PartitionSet = read_json(&out).unwrap();
    assert_eq!(set.n, 20);
    let pieces = set.partitions.len();
    let sum: usize = set.partitions.iter().map(|p| p.edges()).sum();
    // each cut is an edge of two pieces
    assert_eq!(sum, 20 + 2 * set.cut_diagonals.len());
    assert_eq!(set.cut_diagonals.len(), pieces - 1);
    for p in &set.partitions {
        assert_eq!(p.edges(), p.original_edge_count + p.diagonal_edge_count);
        assert_eq!(p.edges(), p.polygon.len());
    }
}

#[test]
fn convex_hexagon_gets_one_static_guard() {
    let dir = tempfile::tempdir().unwrap();
    let f: PlanFile = read_json(&deploy(dir.path(), "convex_hexagon")).unwrap();
    assert_eq!(f.plan.guard_total, 1);
    assert_eq!(f.plan.global_v_star, 0.0);
    let v = serde_json::to_value(&f.plan.assignments).unwrap();
    assert_eq!(v[0]["mode"], "static");
}

#[test]
fn crown_gets_a_mobile_guard() {
    let dir = tempfile::tempdir().unwrap();
    let f: PlanFile = read_json(&deploy(dir.path(), "crown")).unwrap();
    assert!(f.plan.global_v_star > 0.0);
    let v = serde_json::to_value(&f.plan.assignments).unwrap();
    assert!(v.as_array().unwrap().iter().any(|a| a["mode"] == "mobile"));
}

#[test]
fn orthogonal_input_uses_quadrilaterals() {
    let dir = tempfile::tempdir().unwrap();
    let f: PlanFile = read_json(&deploy(dir.path(), "corridor")).unwrap();
    let report = f.plan.orthogonal.expect("orthogonal report");
    assert_eq!(report.quadrilateralization.quads.len() * 2 + 2, 16);
    assert!(f.plan.guard_total < 16 / 4);
}

#[test]
fn zero_steps_gives_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let plan = deploy(dir.path(), "crown");
    let trace = dir.path().join("t.jsonl");
    let o = guardsim(&["simulate", s(&plan), "--steps", "0", s(&trace)]);
    assert_eq!(o.status.code(), Some(0));
    let t = SimTrace::from_json_lines(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(t.records.len(), 1);
    assert_eq!(t.records[0].step, 0);
}

#[test]
fn bad_policy_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let plan = deploy(dir.path(), "crown");
    let o = guardsim(&["simulate", s(&plan), "--policy-json", "{\"kind\":\"teleport\"}", s(&dir.path().join("t"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("E:"));
}

#[test]
fn plan_render_shows_road_maps() {
    let dir = tempfile::tempdir().unwrap();
    let plan = deploy(dir.path(), "notched_20gon");
    let svg = dir.path().join("p.svg");
    assert_eq!(guardsim(&["render", s(&plan), s(&svg)]).status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.contains("class=\"road-map\""));
    assert!(text.contains("class=\"guard-mobile\""));
    assert!(text.contains("class=\"zone\""));
}

#[test]
fn empty_trace_renders_only_the_polygon() {
    let dir = tempfile::tempdir().unwrap();
    let plan = deploy(dir.path(), "crown");
    let trace = dir.path().join("t.jsonl");
    guardsim(&["simulate", s(&plan), "--steps", "0", s(&trace)]);
    let svg = dir.path().join("t.svg");
    assert_eq!(guardsim(&["render", s(&trace), s(&svg)]).status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains("class=\"polygon\""));
    assert!(!text.contains("intruder"));

    let long = dir.path().join("l.jsonl");
    guardsim(&["simulate", s(&plan), "--steps", "50", s(&long)]);
    assert_eq!(guardsim(&["render", s(&long), s(&svg)]).status.code(), Some(0));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("class=\"intruder\""));
}

#[test]
fn trace_lines_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let plan = deploy(dir.path(), "notched_20gon");
    let trace = dir.path().join("t.jsonl");
    let o = guardsim(&["simulate", s(&plan), "--policy", "corner-rush", "--steps", "300", "--seed", "7", s(&trace)]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&trace).unwrap();
    let t = SimTrace::from_json_lines(&text).unwrap();
    assert_eq!(t.records.len(), 301);
    assert_eq!(t.to_json_lines().unwrap(), text);
}

#[test]
fn busy_port_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let plan = deploy(dir.path(), "crown");
    let holder = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = holder.local_addr().unwrap().port().to_string();
    let o = guardsim(&["serve", s(&plan), "--port", &port]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("E:"));
}
