//! `oblot`: command-line front end for the robot decision engine.
//!
//! Exit codes: 0 success, 2 input error, 3 unsolvable, 4 round budget exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::{debug, warn};
use oblot_core::canonize::canonize;
use oblot_core::graph::{load_configuration, load_graph};
use oblot_core::hypergraph::{build, export, import};
use oblot_core::problems::load_problem;
use oblot_core::simulator::{run_with_planner, TerminalStatus};
use oblot_core::solver::{DecisionStatus, Planner};
use oblot_core::{
    AdversaryStrategy, ConfigHypergraph, Configuration, Graph, ProblemSpec, Scheduler,
};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const EXIT_INPUT: u8 = 2;
const EXIT_UNSOLVABLE: u8 = 3;
const EXIT_MAX_ROUNDS: u8 = 4;

#[derive(Parser)]
#[command(
    name = "oblot",
    version,
    about = "Configuration hypergraphs and optimal moves for oblivious robots"
)]
struct Cli {
    /// Directory for cached hypergraphs (falls back to OBLOT_CACHE)
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical encoding (hex) and labeling
    Canon(Target),
    /// Print the automorphism orbits with their ranks
    Orbits(Target),
    /// Build the configuration hypergraph
    Build {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short)]
        k: u32,
        #[arg(long, default_value = "fsync")]
        scheduler: Scheduler,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Solvability, distance and move for every configuration, as JSON lines
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short)]
        k: u32,
        #[arg(long)]
        problem: PathBuf,
    },
    /// The decision all robots of one configuration take this round
    Move {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        problem: PathBuf,
    },
    /// Run the robots against an adversary and print the trace
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        /// worst, first or random:<seed>
        #[arg(long, default_value = "worst")]
        adversary: AdversaryStrategy,
        #[arg(long)]
        max_rounds: Option<usize>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Target {
    /// Configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Graph file, canonized without robots
    #[arg(long)]
    graph: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let cache = cli
        .cache
        .clone()
        .or_else(|| std::env::var_os("OBLOT_CACHE").map(PathBuf::from));
    match run(cli.command, cache.as_deref()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_graph(path: &Path) -> anyhow::Result<Graph> {
    load_graph(&read(path)?).with_context(|| format!("invalid graph in {}", path.display()))
}

fn read_config(path: &Path) -> anyhow::Result<Configuration> {
    load_configuration(&read(path)?, path.parent())
        .with_context(|| format!("invalid configuration in {}", path.display()))
}

fn read_problem(path: &Path) -> anyhow::Result<ProblemSpec> {
    load_problem(&read(path)?).with_context(|| format!("invalid problem in {}", path.display()))
}

fn read_target(t: &Target) -> anyhow::Result<(Graph, Vec<u32>)> {
    match (&t.config, &t.graph) {
        (Some(c), _) => {
            let c = read_config(c)?;
            Ok((c.graph().clone(), c.lambda().to_vec()))
        }
        (None, Some(g)) => {
            let g = read_graph(g)?;
            let n = g.vertex_count();
            Ok((g, vec![0; n]))
        }
        (None, None) => bail!("one of --config or --graph is required"),
    }
}

fn emit(value: &Value) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{value}")?;
    Ok(())
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn cache_key(g: &Graph, k: u32, scheduler: Scheduler) -> anyhow::Result<String> {
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_value(g)?.to_string().as_bytes());
    hasher.update(k.to_le_bytes());
    hasher.update(scheduler.to_string().as_bytes());
    Ok(hex::encode(hasher.finalize()))
}

/// Builds the hypergraph, or reuses a cached export when a cache is set.
/// Unreadable or stale cache entries are rebuilt.
fn hypergraph(
    g: &Graph,
    k: u32,
    scheduler: Scheduler,
    cache: Option<&Path>,
) -> anyhow::Result<ConfigHypergraph> {
    let Some(dir) = cache else {
        return Ok(build(g, k, scheduler)?);
    };
    let path = dir.join(format!("{}.json", cache_key(g, k, scheduler)?));
    if let Ok(text) = fs::read_to_string(&path) {
        match import(&text) {
            Ok(h) if h.graph() == g && h.k() == k && h.scheduler() == scheduler => {
                debug!("cache hit {}", path.display());
                return Ok(h);
            }
            Ok(_) => warn!("cache entry {} belongs to another instance", path.display()),
            Err(err) => warn!("ignoring unreadable cache entry {}: {err}", path.display()),
        }
    }
    let h = build(g, k, scheduler)?;
    let store = || -> anyhow::Result<()> {
        fs::create_dir_all(dir)?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, export(&h, "json")?)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    };
    if let Err(err) = store() {
        warn!("could not write cache entry {}: {err:#}", path.display());
    }
    Ok(h)
}

fn planner_for(
    c: &Configuration,
    spec: &ProblemSpec,
    cache: Option<&Path>,
) -> anyhow::Result<Planner> {
    let h = hypergraph(c.graph(), c.total_robots(), Scheduler::Fsync, cache)?;
    Ok(Planner::new(h, spec)?)
}

fn run(command: Command, cache: Option<&Path>) -> anyhow::Result<u8> {
    match command {
        Command::Canon(target) => {
            let (g, lambda) = read_target(&target)?;
            let form = canonize(&g, &lambda).form;
            emit(&json!({"encoding": form.to_hex(), "labeling": form.labeling()}))?;
        }
        Command::Orbits(target) => {
            let (g, lambda) = read_target(&target)?;
            let p = canonize(&g, &lambda).orbits;
            let orbits: Vec<Value> = (0..p.len())
                .map(|i| {
                    let vs = p.vertices(i);
                    json!({"rank": p.rank(i), "vertices": vs, "robots": lambda[vs[0]]})
                })
                .collect();
            emit(&json!({ "orbits": orbits }))?;
        }
        Command::Build {
            graph,
            k,
            scheduler,
            out,
            dot,
        } => {
            let g = read_graph(&graph)?;
            let h = hypergraph(&g, k, scheduler, cache)?;
            write_file(&out, &export(&h, "json")?)?;
            if let Some(dot) = dot {
                write_file(&dot, &export(&h, "dot")?)?;
            }
            println!(
                "configs={} hyperarcs={}",
                h.config_count(),
                h.hyperarcs().len()
            );
        }
        Command::Solve { graph, k, problem } => {
            let g = read_graph(&graph)?;
            let spec = read_problem(&problem)?;
            let planner = Planner::new(hypergraph(&g, k, Scheduler::Fsync, cache)?, &spec)?;
            let s = planner.solvability();
            for (i, c) in planner.hypergraph().configs().iter().enumerate() {
                let entry = planner.entry(i);
                emit(&json!({
                    "index": i,
                    "lambda": c.lambda,
                    "final": s.is_final(i),
                    "solvable": s.is_solvable(i),
                    "distance": entry.map(|e| e.distance),
                    "move": entry.and_then(|e| e.mv.as_ref()),
                }))?;
            }
        }
        Command::Move { config, problem } => {
            let c = read_config(&config)?;
            let spec = read_problem(&problem)?;
            let decision = planner_for(&c, &spec, cache)?.decide(c.lambda())?;
            emit(&serde_json::to_value(&decision)?)?;
            if decision.status == DecisionStatus::Unsolvable {
                return Ok(EXIT_UNSOLVABLE);
            }
        }
        Command::Simulate {
            config,
            problem,
            adversary,
            max_rounds,
        } => {
            let c = read_config(&config)?;
            let spec = read_problem(&problem)?;
            let planner = planner_for(&c, &spec, cache)?;
            let trace = run_with_planner(&planner, c.lambda(), adversary, max_rounds)?;
            emit(&serde_json::to_value(&trace)?)?;
            return Ok(match trace.status {
                TerminalStatus::ReachedFinal => 0,
                TerminalStatus::Unsolvable => EXIT_UNSOLVABLE,
                TerminalStatus::MaxRoundsExceeded => EXIT_MAX_ROUNDS,
            });
        }
    }
    Ok(0)
}
