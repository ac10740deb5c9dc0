use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use guardsim::deploy::DeploymentPlan;
use guardsim::error::{Error, Result};
use guardsim::io::{read_json, read_polygon, write_canonical_file, PlanFile};
use guardsim::partition::minimal_partition;
use guardsim::render::{render_plan, render_trace};
use guardsim::serve::{session_config, Server};
use guardsim::simulate::{run, Policy, SimConfig, SimTrace};

const EXIT_OK: i32 = 0;
const EXIT_IO: i32 = 1;
const EXIT_INVALID: i32 = 2;
const EXIT_BREACH: i32 = 3;

#[derive(Parser)]
#[command(name = "guardsim", version, about = "Guard deployment and pursuit simulation for simple polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyName {
    RandomWalk,
    GreedyEscape,
    CornerRush,
}

#[derive(Subcommand)]
enum Command {
    /// Write the minimal partition of a polygon file.
    Partition { input: PathBuf, output: PathBuf },
    /// Deploy guards and write a plan file.
    Deploy {
        input: PathBuf,
        /// Intruder speed bound.
        #[arg(long)]
        ve: f64,
        output: PathBuf,
    },
    /// Simulate a plan and write a trace; exits 3 when the intruder escaped view.
    Simulate {
        plan: PathBuf,
        #[arg(long, value_enum, default_value = "random-walk")]
        policy: PolicyName,
        /// Policy as JSON, e.g. scripted waypoints or recorded steering; overrides --policy.
        #[arg(long)]
        policy_json: Option<String>,
        #[arg(long, default_value_t = 1000)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Guard speed; the plan's required speed by default.
        #[arg(long)]
        vp: Option<f64>,
        /// Intruder speed; the plan's by default.
        #[arg(long)]
        ve: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        output: PathBuf,
    },
    /// Draw a plan or a trace as SVG.
    Render { input: PathBuf, output: PathBuf },
    /// Serve live steered sessions over websocket.
    Serve {
        plan: PathBuf,
        #[arg(long, default_value_t = 8765)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        vp: Option<f64>,
    },
}

fn read_plan(path: &Path) -> Result<DeploymentPlan> {
    let f: PlanFile = read_json(path)?;
    f.verify()?;
    Ok(f.plan)
}

fn simulate_config(
    plan: &DeploymentPlan,
    policy: PolicyName,
    policy_json: Option<&str>,
    steps: u64,
    seed: u64,
) -> Result<SimConfig> {
    let policy = match policy_json {
        Some(s) => serde_json::from_str(s).map_err(|e| Error::ConfigInvalid(format!("policy: {e}")))?,
        None => match policy {
            PolicyName::RandomWalk => Policy::RandomWalk,
            PolicyName::GreedyEscape => Policy::GreedyEscape,
            PolicyName::CornerRush => Policy::CornerRush,
        },
    };
    Ok(SimConfig::new(plan, policy, steps, seed))
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Partition { input, output } => {
            let p = read_polygon(&input)?;
            let set = minimal_partition(&p.polygon)?;
            write_canonical_file(&output, &set)?;
            Ok(EXIT_OK)
        }
        Command::Deploy { input, ve, output } => {
            let plan = read_polygon(&input)?.deploy(ve)?;
            write_canonical_file(&output, &PlanFile::new(plan)?)?;
            Ok(EXIT_OK)
        }
        Command::Simulate {
            plan,
            policy,
            policy_json,
            steps,
            seed,
            vp,
            ve,
            dt,
            output,
        } => {
            let plan = read_plan(&plan)?;
            let mut config = simulate_config(&plan, policy, policy_json.as_deref(), steps, seed)?;
            config.v_p = vp.unwrap_or(config.v_p);
            config.v_e = ve.unwrap_or(config.v_e);
            config.dt = dt;
            let trace = run(&plan, &config)?;
            std::fs::write(&output, trace.to_json_lines()?)?;
            if trace.breach_steps.is_empty() {
                Ok(EXIT_OK)
            } else {
                eprintln!(
                    "breach: {} of {} steps unseen, first at step {}",
                    trace.breach_steps.len(),
                    trace.records.len(),
                    trace.breach_steps[0]
                );
                Ok(EXIT_BREACH)
            }
        }
        Command::Render { input, output } => {
            let text = std::fs::read_to_string(&input)?;
            let svg = match serde_json::from_str::<PlanFile>(&text) {
                Ok(f) => {
                    f.verify()?;
                    render_plan(&f.plan)
                }
                Err(_) => render_trace(&SimTrace::from_json_lines(&text)?),
            };
            std::fs::write(&output, svg)?;
            Ok(EXIT_OK)
        }
        Command::Serve {
            plan,
            port,
            host,
            seed,
            vp,
        } => {
            let plan = read_plan(&plan)?;
            let mut base = session_config(&plan, seed);
            base.v_p = vp.unwrap_or(base.v_p);
            let server = Server::bind(plan, &format!("{host}:{port}"), base)?;
            eprintln!("listening on ws://{}", server.local_addr()?);
            server.run()?;
            Ok(EXIT_OK)
        }
    }
}

pub fn main() -> i32 {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("E:{} {e}", e.tag());
            match e {
                Error::Io(_) => EXIT_IO,
                _ => EXIT_INVALID,
            }
        }
    }
}
