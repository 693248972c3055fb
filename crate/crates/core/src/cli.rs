//! Command-line front end. Every command exits with 0, 1, 2 or 3; 3 always
//! means the inputs could not be used.

use std::ffi::OsString;
use std::fs;
use std::path::{Path as FsPath, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::agent::{explore_world, load_scenario, run_goal_sequence, DEFAULT_MAX_CYCLES};
use crate::coverage::{score_with_threshold, verdict_for_find_task, CoverageReport, CoverageRequirement, Trace, DEFAULT_CORNER_THRESHOLD};
use crate::exploration::{ExplorationMode, FrontierPolicy};
use crate::geometry::Point;
use crate::navgraph::{build_navgraph, DEFAULT_PENALTY};
use crate::navmesh::refine;
use crate::pathfinding::{path_between_points, Algorithm, PathJson};
use crate::simworld::{load_world, WorldState};

pub const EXIT_ERROR: i32 = 3;
pub const SEED_ENV: &str = "NAVTEST_SEED";

#[derive(Debug, Parser)]
#[command(name = "navtest", version, about = "Navigation, exploration and coverage tools for game testing agents")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a goal scenario against its world and write the verdict.
    Run(RunArgs),
    /// Export a world's navgraph as JSON.
    Graph(GraphArgs),
    /// Find a path between two points of a world.
    Path(PathArgs),
    /// Explore a world for an entity, or sweep all of it.
    Explore(ExploreArgs),
    /// Score a visit trace against a world's navgraph.
    Coverage(CoverageArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub scenario: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_MAX_CYCLES)]
    pub max_cycles: u64,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    pub world: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Split faces until every corner is within this distance of its face center.
    #[arg(long)]
    pub refine: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Astar,
    Dijkstra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PreferArg {
    Centers,
    Borders,
    None,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    pub world: PathBuf,
    #[arg(long, value_parser = parse_point)]
    pub from: Point,
    #[arg(long, value_parser = parse_point)]
    pub to: Point,
    #[arg(long, value_enum, default_value = "astar")]
    pub algo: AlgoArg,
    #[arg(long, value_enum, default_value = "none")]
    pub prefer: PreferArg,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    pub world: PathBuf,
    /// Stop once this entity is in view.
    #[arg(long, required_unless_present = "full", conflicts_with = "full")]
    pub target: Option<String>,
    /// Explore everything reachable.
    #[arg(long)]
    pub full: bool,
    /// Pick frontier vertices at random from this seed instead of nearest first.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub centers_only: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_CYCLES)]
    pub max_cycles: u64,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RequirementArg {
    AllVertices,
    AllCenters,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    pub world: PathBuf,
    /// JSON file `{"visited": [ids], "traversed": [[a, b], ...]}`.
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CORNER_THRESHOLD)]
    pub threshold: f64,
    /// Whether the sought entity was found.
    #[arg(long)]
    pub found: bool,
    #[arg(long, value_enum, default_value = "all-vertices")]
    pub requirement: RequirementArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_point(s: &str) -> Result<Point, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x, y, z] if parts.iter().all(|v| v.is_finite()) => Ok(Point::new(x, y, z)),
        _ => Err(format!("expected x,y,z, got {s:?}")),
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_ERROR,
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_ERROR
        }
    }
}

pub fn run(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Graph(a) => cmd_graph(a),
        Command::Path(a) => cmd_path(a),
        Command::Explore(a) => cmd_explore(a),
        Command::Coverage(a) => cmd_coverage(a),
    }
}

fn env_seed() -> Result<Option<u64>, String> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| format!("{SEED_ENV} is not an integer: {s:?}")),
        Err(_) => Ok(None),
    }
}

fn write_json<T: Serialize>(path: &FsPath, value: &T) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn world(path: &FsPath) -> Result<WorldState, String> {
    load_world(path).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct RunReport<'a> {
    scenario: String,
    seed: Option<u64>,
    #[serde(flatten)]
    result: &'a crate::agent::TestResult,
}

fn cmd_run(a: RunArgs) -> Result<i32, String> {
    let (scenario, mut w) = load_scenario(&a.scenario).map_err(|e| e.to_string())?;
    let seed = match a.seed {
        Some(s) => Some(s),
        None => env_seed()?.or(scenario.seed),
    };
    let result = run_goal_sequence(&mut w, &scenario.goals(), scenario.options(seed, a.max_cycles));
    if let Some(p) = &a.report {
        let report = RunReport { scenario: a.scenario.display().to_string(), seed, result: &result };
        write_json(p, &report)?;
    }
    if let Some(p) = &a.trace {
        write_json(p, &result.trace)?;
    }
    let met = result.goals.iter().filter(|g| g.status == crate::agent::GoalStatus::Success).count();
    println!(
        "{}: {met}/{} goals met in {} cycles, vertex coverage {:.3} ({})",
        result.verdict.outcome,
        scenario.goals.len(),
        result.cycles,
        result.coverage.vertex_coverage,
        result.verdict.reason
    );
    Ok(result.verdict.outcome.exit_code())
}

fn cmd_graph(a: GraphArgs) -> Result<i32, String> {
    let w = world(&a.world)?;
    let mesh = match a.refine {
        Some(r) => refine(w.mesh(), r).map_err(|e| e.to_string())?,
        None => w.mesh().clone(),
    };
    let g = build_navgraph(&mesh);
    let export = g.to_export();
    match &a.out {
        Some(p) => {
            write_json(p, &export)?;
            println!("{} vertices, {} edges written to {}", export.vertices.len(), export.edges.len(), p.display());
        }
        None => println!("{}", serde_json::to_string(&export).map_err(|e| e.to_string())?),
    }
    Ok(0)
}

fn cmd_path(a: PathArgs) -> Result<i32, String> {
    let w = world(&a.world)?;
    let mut g = w.graph().clone();
    let prefs = match a.prefer {
        PreferArg::Centers => Some(g.center_vertices()),
        PreferArg::Borders => Some(g.border_vertices()),
        PreferArg::None => None,
    };
    if let Some(p) = prefs {
        g.set_preferences(p, DEFAULT_PENALTY).map_err(|e| e.to_string())?;
    }
    let algo = match a.algo {
        AlgoArg::Astar => Algorithm::AStar,
        AlgoArg::Dijkstra => Algorithm::Dijkstra,
    };
    let path = path_between_points(&g, a.from, a.to, algo).map_err(|e| e.to_string())?;
    let (json, code) = match &path {
        Some(p) => (p.to_json(), 0),
        None => (PathJson::none(), 1),
    };
    println!("{}", serde_json::to_string(&json).map_err(|e| e.to_string())?);
    Ok(code)
}

fn cmd_explore(a: ExploreArgs) -> Result<i32, String> {
    let mut w = world(&a.world)?;
    if let Some(t) = &a.target {
        if w.entity(t).is_none() {
            // Not an error: the test is precisely whether it can be found.
            eprintln!("note: {t:?} is not in this world");
        }
    }
    let seed = match a.seed {
        Some(s) => Some(s),
        None => env_seed()?,
    };
    let policy = seed.map_or(FrontierPolicy::Nearest, FrontierPolicy::Random);
    let mode = if a.centers_only { ExplorationMode::CentersOnly } else { ExplorationMode::AllVertices };
    let run = explore_world(&mut w, a.target.as_deref(), policy, mode, a.max_cycles);
    if let Some(p) = &a.report {
        write_json(p, &run)?;
    }
    if let Some(p) = &a.trace {
        write_json(p, &run.trace)?;
    }
    let frontier = run.trace.last().map_or(0, |e| e.frontier);
    let what = match (&a.target, run.found) {
        (Some(t), Some(true)) => format!("found {t}"),
        (Some(t), _) => format!("{t} not found"),
        (None, _) => "full sweep".to_string(),
    };
    println!(
        "{what}: status {:?} after {} cycles and {} legs, frontier {frontier}, vertex_coverage {}",
        run.status, run.cycles, run.legs, run.coverage.vertex_coverage
    );
    let ok = match run.found {
        Some(found) => found,
        None => frontier == 0,
    };
    Ok(if ok { 0 } else { 2 })
}

#[derive(Serialize)]
struct CoverageOutput<'a> {
    #[serde(flatten)]
    report: &'a CoverageReport,
    verdict: String,
}

fn cmd_coverage(a: CoverageArgs) -> Result<i32, String> {
    let w = world(&a.world)?;
    let text = fs::read_to_string(&a.trace).map_err(|e| format!("cannot read {}: {e}", a.trace.display()))?;
    let trace: Trace = serde_json::from_str(&text).map_err(|e| format!("bad trace file: {e}"))?;
    let report = score_with_threshold(w.graph(), &trace, a.threshold).map_err(|e| e.to_string())?;
    let requirement = match a.requirement {
        RequirementArg::AllVertices => CoverageRequirement::AllVertices,
        RequirementArg::AllCenters => CoverageRequirement::AllCenters,
    };
    let verdict = verdict_for_find_task(a.found, None, &report, requirement);
    let out = CoverageOutput { report: &report, verdict: verdict.outcome.to_string() };
    match &a.out {
        Some(p) => {
            write_json(p, &out)?;
            println!(
                "vertex {:.3}, centers {:.3}, border edges {:.3}, corners {:.3}: {}",
                report.vertex_coverage,
                report.center_vertex_coverage,
                report.border_edge_coverage,
                report.corner_coverage,
                verdict.outcome
            );
        }
        None => println!("{}", serde_json::to_string(&out).map_err(|e| e.to_string())?),
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("1,2.5,-3"), Ok(Point::new(1.0, 2.5, -3.0)));
        assert_eq!(parse_point(" 1 , 2 , 3 "), Ok(Point::new(1.0, 2.0, 3.0)));
        assert!(parse_point("1,2").is_err());
        assert!(parse_point("1,2,x").is_err());
        assert!(parse_point("1,2,inf").is_err());
    }

    #[test]
    fn usage_errors_exit_3() {
        assert_eq!(main_with_args(["navtest", "frobnicate"]), EXIT_ERROR);
        assert_eq!(main_with_args(["navtest", "path", "w.json", "--from", "0,0"]), EXIT_ERROR);
        assert_eq!(main_with_args(["navtest", "explore", "w.json"]), EXIT_ERROR);
        assert_eq!(main_with_args(["navtest", "--help"]), 0);
    }

    #[test]
    fn missing_world_exits_3() {
        assert_eq!(main_with_args(["navtest", "graph", "/nonexistent/world.json"]), EXIT_ERROR);
        assert_eq!(main_with_args(["navtest", "run", "/nonexistent/scenario.json"]), EXIT_ERROR);
    }
}
