//! Acceptance run over the fixture corpus. Prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use guardsim::deploy::{deploy_polygon, DeploymentPlan};
use guardsim::geometry::{segment_visible, Point, SimplePolygon};
use guardsim::io::{read_polygon, PolygonInput};
use guardsim::partition::minimal_partition;
use guardsim::simulate::{run, Policy, SimConfig};
use guardsim::starzones::{min_edges_check, speed_bound, star_regions, SpeedProblem};

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn corpus() -> Vec<PolygonInput> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    // the invalid fixture is there for the CLI error path
    paths
        .iter()
        .filter(|p| !p.ends_with("self_intersecting.json"))
        .map(|p| read_polygon(p).unwrap_or_else(|e| panic!("{}: {e}", p.display())))
        .collect()
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Outcome {
    Outcome { ok, detail }
}

fn partition_structure(corpus: &[PolygonInput]) -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut with_remainder = 0;
    for f in corpus {
        let ps = match minimal_partition(&f.polygon) {
            Ok(ps) => ps,
            Err(e) => {
                problems.push(format!("{}: {e}", f.name));
                continue;
            }
        };
        let remainders: Vec<usize> = ps
            .partitions
            .iter()
            .filter(|p| p.is_remainder())
            .map(|p| p.edges())
            .collect();
        let shapes_ok = ps
            .partitions
            .iter()
            .all(|p| (6..=9).contains(&p.edges()) || (p.is_remainder() && (3..=5).contains(&p.edges())));
        if !shapes_ok || remainders.len() > 1 {
            problems.push(format!("{}: piece sizes {:?}", f.name, ps.partitions.iter().map(|p| p.edges()).collect::<Vec<_>>()));
        }
        // edge accounting: every cut diagonal is counted twice
        let k_prime = remainders.first().copied().unwrap_or(0);
        with_remainder += usize::from(k_prime > 0);
        let pieces = ps.partitions.len();
        let sum: usize = ps
            .partitions
            .iter()
            .filter(|p| !p.is_remainder())
            .map(|p| p.original_edge_count + p.diagonal_edge_count)
            .sum();
        if f.polygon.len() + 2 * (pieces - 1) != sum + k_prime || !ps.edge_identity().holds {
            problems.push(format!("{}: edge identity", f.name));
        }
        let area: f64 = ps.partitions.iter().map(|p| p.polygon.area()).sum();
        let total = f.polygon.area();
        if ((area - total) / total).abs() > 1e-9 {
            problems.push(format!("{}: area {area} vs {total}", f.name));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 5.0 {
        problems.push(format!("took {secs:.2} s"));
    }
    outcome(
        problems.is_empty() && corpus.len() >= 20,
        format!(
            "{} fixtures, {:.2} s; {with_remainder} with a remainder piece; edge identity n + 2(pieces - 1) - k' = sum, \
             piece sizes, at most one remainder, area conserved{}",
            corpus.len(),
            secs,
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

fn guard_bounds(corpus: &[PolygonInput]) -> Outcome {
    let mut problems = Vec::new();
    let (mut general, mut ortho, mut printed_eq10_off) = (0, 0, 0);
    for f in corpus {
        let plan = match deploy_polygon(&f.name, &f.polygon, 1.0) {
            Ok(p) => p,
            Err(e) => {
                problems.push(format!("{}: {e}", f.name));
                continue;
            }
        };
        let n = f.polygon.len();
        if plan.budget.hypothesis {
            general += 1;
            if !(plan.guard_total < n / 3) {
                problems.push(format!("{}: {} guards, bound {}", f.name, plan.guard_total, n / 3));
            }
        }
        if !f.orthogonal {
            continue;
        }
        let plan = match f.deploy(1.0) {
            Ok(p) => p,
            Err(e) => {
                problems.push(format!("{}: {e}", f.name));
                continue;
            }
        };
        let report = plan.orthogonal.as_ref().expect("orthogonal report");
        let c = &report.counts;
        let r = report.quadrilateralization.quads.len();
        let (n2, n3, n4, k) = (c.n2, c.n3, c.n4, c.k_prime);
        // recomputed from the group sizes
        let eq8 = r == 2 * n2 + 3 * n3 + 4 * n4 + k;
        let eq9 = n / 4 == (r + 1) / 2 && 2 * ((r + 1) / 2) <= r + 1;
        let exact_floor = n2 + n3 + n4 + (n3 + 2 * n4 + k + 1) / 2;
        let printed = n2 + n3 + n4 + k + (n3 + 2 * n4) / 2;
        if !eq8 || !eq9 || exact_floor != (r + 1) / 2 {
            problems.push(format!("{}: counting identities", f.name));
        }
        printed_eq10_off += usize::from(printed != (r + 1) / 2);
        if c.hypothesis {
            ortho += 1;
            if !(plan.guard_total < n / 4) {
                problems.push(format!("{}: {} guards, bound {}", f.name, plan.guard_total, n / 4));
            }
        }
    }
    outcome(
        problems.is_empty() && general > 0 && ortho > 0,
        format!(
            "{general} fixtures under the general hypotheses, {ortho} orthogonal ones; group-count identities match; \
             the printed floor of (r+1)/2 drops a half on {printed_eq10_off} fixtures (odd n3, no leftover quad){}",
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

fn in_wedge(w: (Point, Point), v: Point) -> bool {
    w.0.cross(v) >= 0.0 && v.cross(w.1) >= 0.0
}

fn star_oracle(corpus: &[PolygonInput]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut regions, mut samples, mut mismatches, mut banded) = (0, 0usize, 0, 0);
    let mut problems = Vec::new();
    for f in corpus {
        let poly = &f.polygon;
        let stars = match star_regions(poly) {
            Ok(s) => s,
            Err(e) => {
                problems.push(format!("{}: {e}", f.name));
                continue;
            }
        };
        if stars.is_empty() {
            continue;
        }
        let (lo, hi) = poly.bbox();
        let mut pts = Vec::with_capacity(1000);
        while pts.len() < 1000 {
            let p = Point::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
            if poly.contains(p) {
                pts.push(p);
            }
        }
        for s in &stars {
            regions += 1;
            let o = poly.vertex(s.owner_vertex);
            for &p in &pts {
                samples += 1;
                let analytic = s.region.contains(p);
                let definition = segment_visible(poly, p, o) && in_wedge(s.wedge, p - o);
                if analytic != definition {
                    if s.region.boundary_distance(p) <= 1e-6 {
                        banded += 1;
                    } else {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    outcome(
        mismatches == 0 && problems.is_empty() && regions > 0,
        format!(
            "{regions} regions, {samples} classifications, {mismatches} mismatches outside the 1e-6 band, {banded} inside{}",
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

fn lemma_diagnostics(corpus: &[PolygonInput]) -> Outcome {
    let mut shapes: Vec<(String, SimplePolygon)> = Vec::new();
    for f in corpus {
        shapes.push((f.name.clone(), f.polygon.clone()));
        if let Ok(ps) = minimal_partition(&f.polygon) {
            for (i, p) in ps.partitions.iter().enumerate() {
                shapes.push((format!("{}#{i}", f.name), p.polygon.clone()));
            }
        }
    }
    let (mut violations, mut octagons, mut worst_octagon) = (0, 0, 0);
    let mut problems = Vec::new();
    for (name, poly) in &shapes {
        match min_edges_check(poly) {
            Ok(d) => {
                violations += d.violations;
                if d.violations > 0 {
                    problems.push(format!("{name}: {} violations", d.violations));
                }
                if poly.len() == 8 {
                    octagons += 1;
                    worst_octagon = worst_octagon.max(d.disjoint_star_regions);
                }
            }
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    outcome(
        problems.is_empty() && worst_octagon <= 3,
        format!(
            "{} polygons and partition pieces, {violations} violations; {octagons} octagons, at most {worst_octagon} disjoint star regions{}",
            shapes.len(),
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

fn speed() -> Outcome {
    let p = SpeedProblem {
        lengths: vec![3.0, 4.0],
        caps: vec![2.0, 3.0],
        pair_caps: vec![(0, 1, 4.0)],
    };
    let b = speed_bound(&p, 1.0).unwrap();
    // grid oracle over the feasible radii
    let steps = 4000;
    let mut oracle = f64::INFINITY;
    for i in 1..=steps {
        let r1 = 2.0 * i as f64 / steps as f64;
        for j in 1..=steps {
            let r2 = 3.0 * j as f64 / steps as f64;
            if r1 + r2 <= 4.0 {
                oracle = oracle.min((3.0 / r1).max(4.0 / r2));
            }
        }
    }
    let doubled = speed_bound(&p, 2.0).unwrap().v_star;
    let zero = speed_bound(
        &SpeedProblem {
            lengths: vec![0.0],
            caps: vec![1.0],
            pair_caps: vec![],
        },
        1.0,
    )
    .unwrap()
    .v_star;
    let l = SimplePolygon::new(
        [(0., 0.), (4., 0.), (4., 2.), (2., 2.), (2., 4.), (0., 4.)]
            .iter()
            .map(|&(x, y)| Point::new(x, y))
            .collect(),
    )
    .unwrap();
    let l_plan = deploy_polygon("l", &l, 1.0).unwrap();
    let ok = (b.v_star - 1.75).abs() <= 1e-3
        && (b.v_star - oracle).abs() <= 1e-3
        && doubled == 2.0 * b.v_star
        && zero == 0.0
        && l_plan.global_v_star == 0.0;
    outcome(
        ok,
        format!(
            "v* = {:.6}, grid oracle {oracle:.6}, v*(2) = {doubled} vs 2 v*(1) = {}, zero-length road map {zero}, L-hexagon plan {}",
            b.v_star,
            2.0 * b.v_star,
            l_plan.global_v_star
        ),
    )
}

fn tracking(corpus: &[PolygonInput]) -> Outcome {
    let start = Instant::now();
    let plans: Vec<(String, Result<DeploymentPlan, String>)> = corpus
        .iter()
        .map(|f| (f.name.clone(), f.deploy(1.0).map_err(|e| e.to_string())))
        .collect();
    let policies = [
        ("random_walk", Policy::RandomWalk),
        ("greedy_escape", Policy::GreedyEscape),
        ("corner_rush", Policy::CornerRush),
    ];
    let jobs: Vec<(usize, usize)> = (0..plans.len()).flat_map(|i| (0..policies.len()).map(move |k| (i, k))).collect();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let results: Vec<(usize, usize, Result<usize, String>)> = std::thread::scope(|s| {
        let chunks: Vec<Vec<(usize, usize)>> = (0..threads)
            .map(|t| jobs.iter().copied().skip(t).step_by(threads).collect())
            .collect();
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|chunk| {
                let plans = &plans;
                let policies = &policies;
                s.spawn(move || {
                    chunk
                        .into_iter()
                        .map(|(i, k)| {
                            let r = match &plans[i].1 {
                                Ok(plan) => {
                                    let cfg = SimConfig::new(plan, policies[k].1.clone(), 10_000, 42);
                                    run(plan, &cfg).map(|t| t.breach_steps.len()).map_err(|e| e.to_string())
                                }
                                Err(e) => Err(e.clone()),
                            };
                            (i, k, r)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    let mut problems = Vec::new();
    for (i, k, r) in &results {
        match r {
            Ok(0) => {}
            Ok(b) => problems.push(format!("{}/{}: {b} breaches", plans[*i].0, policies[*k].0)),
            Err(e) => problems.push(format!("{}/{}: {e}", plans[*i].0, policies[*k].0)),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    // under-speed witness through the command line
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("crown.plan.json");
    let trace = dir.path().join("crown.trace.jsonl");
    let bin = env!("CARGO_BIN_EXE_guardsim");
    let deploy = Command::new(bin)
        .arg("deploy")
        .arg(fixtures_dir().join("crown.json"))
        .args(["--ve", "1"])
        .arg(&plan)
        .status()
        .unwrap();
    let v_star = read_polygon(&fixtures_dir().join("crown.json")).unwrap().deploy(1.0).unwrap().global_v_star;
    let witness = r#"{"kind":"scripted","waypoints":[[0.2,3.4],[5.8,3.4]]}"#;
    let sim = |vp: f64| {
        Command::new(bin)
            .arg("simulate")
            .arg(&plan)
            .args(["--policy-json", witness, "--steps", "10000", "--seed", "42", "--vp"])
            .arg(vp.to_string())
            .arg(&trace)
            .output()
            .unwrap()
            .status
            .code()
    };
    let (full, half) = (sim(v_star), sim(0.5 * v_star));
    if !deploy.success() || full != Some(0) || half != Some(3) {
        problems.push(format!("witness exits: deploy {deploy}, full speed {full:?}, half speed {half:?}"));
    }
    if secs >= 30.0 {
        problems.push(format!("took {secs:.2} s"));
    }
    outcome(
        problems.is_empty(),
        format!(
            "{} fixtures x 3 policies x 10^4 steps in {secs:.2} s on {threads} threads; crown witness exits {full:?} at v*, {half:?} at v*/2{}",
            plans.len(),
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_guardsim");
    let mut problems = Vec::new();
    let mut digests = Vec::new();
    for name in ["notched_20gon", "crown", "corridor"] {
        let mut files = Vec::new();
        for run in 0..2 {
            let plan = dir.path().join(format!("{name}.{run}.plan.json"));
            let trace = dir.path().join(format!("{name}.{run}.trace.jsonl"));
            let d = Command::new(bin)
                .arg("deploy")
                .arg(fixtures_dir().join(format!("{name}.json")))
                .args(["--ve", "1"])
                .arg(&plan)
                .status()
                .unwrap();
            let s = Command::new(bin)
                .arg("simulate")
                .arg(&plan)
                .args(["--policy", "greedy-escape", "--steps", "2000", "--seed", "42"])
                .arg(&trace)
                .status()
                .unwrap();
            if !d.success() || !s.success() {
                problems.push(format!("{name}: run {run} failed"));
            }
            files.push((std::fs::read(&plan).unwrap_or_default(), std::fs::read(&trace).unwrap_or_default()));
        }
        if files[0] != files[1] || files[0].0.is_empty() {
            problems.push(format!("{name}: outputs differ"));
        }
        digests.push(format!(
            "{name} {:016x}/{:016x}",
            guardsim::io::fnv1a64(&files[0].0),
            guardsim::io::fnv1a64(&files[0].1)
        ));
    }
    outcome(
        problems.is_empty(),
        format!(
            "plan/trace digests {}{}",
            digests.join(", "),
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

fn main() {
    let corpus = corpus();
    let criteria: [(&str, &dyn Fn() -> Outcome); 7] = [
        ("partition structure", &|| partition_structure(&corpus)),
        ("guard-count bounds", &|| guard_bounds(&corpus)),
        ("star-region oracle", &|| star_oracle(&corpus)),
        ("lemma diagnostics", &|| lemma_diagnostics(&corpus)),
        ("speed bound", &speed),
        ("tracking guarantee", &|| tracking(&corpus)),
        ("determinism", &determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        failed += usize::from(!o.ok);
        println!("{} {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
