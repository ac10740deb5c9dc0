use std::ffi::{CStr, CString};
use std::ptr;

use guardsim_ffi::*;

const CROWN: &str = r#"{"schema_version":1,"name":"crown","vertices":[[0,0],[6,0],[6,4],[5,1],[1,1],[0,4]]}"#;

fn last_error() -> String {
    unsafe { CStr::from_ptr(gs_last_error()) }.to_string_lossy().into_owned()
}

fn crown_plan() -> *mut GsPlan {
    let json = CString::new(CROWN).unwrap();
    let mut plan = ptr::null_mut();
    let s = unsafe { gs_plan_from_polygon_json(json.as_ptr(), 1.0, &mut plan) };
    assert_eq!(s, GsStatus::Ok);
    assert!(!plan.is_null());
    plan
}

#[test]
fn crown_deploys_one_mobile_guard() {
    let plan = crown_plan();
    unsafe {
        assert_eq!(gs_plan_guard_total(plan), 1);
        assert_eq!(gs_plan_bound(plan), 2);
        assert!((gs_plan_v_star(plan) - 5.0 / 6.0).abs() < 1e-6);
        gs_plan_free(plan);
    }
}

#[test]
fn self_intersecting_ring_is_rejected() {
    let json = CString::new(r#"{"schema_version":1,"name":"bow","vertices":[[0,0],[4,4],[4,0],[0,4]]}"#).unwrap();
    let mut plan = ptr::null_mut();
    let s = unsafe { gs_plan_from_polygon_json(json.as_ptr(), 1.0, &mut plan) };
    assert_eq!(s, GsStatus::InvalidPolygon);
    assert!(plan.is_null());
    assert!(last_error().starts_with("E:not-simple"));
}

#[test]
fn bad_arguments_are_reported() {
    let mut plan = ptr::null_mut();
    unsafe {
        assert_eq!(gs_plan_from_polygon_json(ptr::null(), 1.0, &mut plan), GsStatus::NullArgument);
        let junk = CString::new("{").unwrap();
        assert_eq!(gs_plan_from_polygon_json(junk.as_ptr(), 1.0, &mut plan), GsStatus::InvalidFormat);
        let json = CString::new(CROWN).unwrap();
        assert_eq!(gs_plan_from_polygon_json(json.as_ptr(), 0.0, &mut plan), GsStatus::InvalidConfig);
        assert_eq!(gs_plan_guard_total(ptr::null()), 0);
        assert!(gs_plan_v_star(ptr::null()).is_nan());
        gs_plan_free(ptr::null_mut());
        gs_string_free(ptr::null_mut());
    }
}

#[test]
fn plan_json_round_trips_through_handles() {
    let plan = crown_plan();
    unsafe {
        let mut text = ptr::null_mut();
        assert_eq!(gs_plan_to_json(plan, &mut text), GsStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(gs_plan_from_plan_json(text, &mut again), GsStatus::Ok);
        let mut text2 = ptr::null_mut();
        assert_eq!(gs_plan_to_json(again, &mut text2), GsStatus::Ok);
        assert_eq!(CStr::from_ptr(text), CStr::from_ptr(text2));
        gs_string_free(text);
        gs_string_free(text2);
        gs_plan_free(again);
        gs_plan_free(plan);
    }
}

#[test]
fn simulate_counts_breaches() {
    let plan = crown_plan();
    let tour = CString::new(r#"{"kind":"scripted","waypoints":[[0.2,3.4],[5.8,3.4]]}"#).unwrap();
    unsafe {
        let mut breaches = usize::MAX;
        let mut trace = ptr::null_mut();
        let s = gs_simulate(plan, tour.as_ptr(), 2000, 1, f64::NAN, &mut breaches, &mut trace);
        assert_eq!(s, GsStatus::Ok);
        assert_eq!(breaches, 0);
        let lines = CStr::from_ptr(trace).to_str().unwrap().lines().count();
        assert_eq!(lines, 2001 + 2);
        gs_string_free(trace);
        let half = gs_plan_v_star(plan) * 0.5;
        let s = gs_simulate(plan, tour.as_ptr(), 2000, 1, half, &mut breaches, ptr::null_mut());
        assert_eq!(s, GsStatus::Ok);
        assert!(breaches > 0);
        let bad = CString::new(r#"{"kind":"teleport"}"#).unwrap();
        let s = gs_simulate(plan, bad.as_ptr(), 10, 1, f64::NAN, &mut breaches, ptr::null_mut());
        assert_eq!(s, GsStatus::InvalidConfig);
        gs_plan_free(plan);
    }
}

#[test]
fn header_declares_the_interface_and_compiles() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/guardsim.h")).unwrap();
    for name in [
        "typedef struct GsPlan GsPlan;",
        "gs_plan_from_polygon_json",
        "gs_plan_from_plan_json",
        "gs_plan_to_json",
        "gs_plan_guard_total",
        "gs_plan_v_star",
        "gs_simulate",
        "gs_string_free",
        "gs_last_error",
        "GS_STATUS_INVALID_POLYGON = 3",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let Ok(status) = std::process::Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-include"])
        .arg(dir.join("include/guardsim.h"))
        .arg(dir.join("tests/smoke.c"))
        .status()
    else {
        eprintln!("no C compiler ({cc}); syntax check not run");
        return;
    };
    assert!(status.success());
    // link and run against the static library when cargo built it
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().and_then(|d| d.parent()).map(|d| d.join("libguardsim_ffi.a"));
    let Some(lib) = lib.filter(|l| l.exists()) else {
        eprintln!("static library not found; link check not run");
        return;
    };
    let out = tempfile_path("smoke");
    let status = std::process::Command::new(&cc)
        .args(["-std=c99", "-include"])
        .arg(dir.join("include/guardsim.h"))
        .arg(dir.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = std::process::Command::new(&out).output().unwrap();
    assert!(run.status.success());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "1 guards, 0 breaches");
    let _ = std::fs::remove_file(out);
}

fn tempfile_path(stem: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("guardsim-{stem}-{}", std::process::id()))
}
