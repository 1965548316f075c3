use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use gridpatrol::env::{full_visibility_hamiltonian, DirSeqPatroller, Environment};
use gridpatrol::feasibility::{hamiltonian_search, hamiltonicity_parity, DEFAULT_HAMILTONIAN_CAP};
use gridpatrol::grid::sensing_regions;
use gridpatrol::sim::{floor_entry_audit, run, Controller, PatrolReport};
use gridpatrol::{
    brute_force_0bit_search, theorem1_check, verify_patrols, AgentState, Arena, ArrowMap, EnvError, FloorSpec,
    GridDims, MemState, Policy, Position, SearchCaps, Target, TablePolicy, Verdict,
};

#[derive(Parser)]
#[command(name = "gridpatrol", version, about = "Simulate and verify grid-patrolling agents")]
struct Cli {
    /// Worker threads for sweeps and searches.
    #[arg(long, global = true, env = "GRIDPATROL_JOBS")]
    jobs: Option<usize>,
    /// JSON file presetting caps and budgets; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the main output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a memoryless agent can patrol the grid.
    Check(GridArgs),
    /// Run one agent and print its trace.
    Simulate(SimulateArgs),
    /// Run from every start and check coverage within a budget.
    Verify(VerifyArgs),
    /// Exhaustively search for a memoryless policy.
    Search0(SearchArgs),
    /// Print the sensing regions and their grid structure.
    Regions(RegionArgs),
    /// Search for a Hamiltonian cycle of the grid.
    Hamiltonian(HamArgs),
    /// Draw the arrow diagram of a policy.
    Viz(VizArgs),
    /// Commands on arbitrary environments.
    #[command(subcommand)]
    Env(EnvCommand),
}

#[derive(Args)]
struct GridArgs {
    /// Axis lengths, e.g. 5,3,3,2.
    #[arg(long)]
    dims: String,
    /// Sensing range.
    #[arg(short = 'V', long = "range", default_value_t = 1)]
    range: u32,
}

#[derive(Args)]
struct PolicyArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// memoryless, memoryless-v1, memoryless-vgt1, makemove1d, makemove2d,
    /// makemove3d, makemove, makemove-noninductive, or table:<file>.
    #[arg(long)]
    policy: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    policy: PolicyArgs,
    /// Start vertex, e.g. 1,1.
    #[arg(long)]
    start: String,
    #[arg(long, default_value_t = 0)]
    mem: u32,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Print the floor-entry audit for k-floors instead of the trace.
    #[arg(long)]
    audit: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    policy: PolicyArgs,
    /// Step budget per start (default: vertices times memory states).
    #[arg(long)]
    budget: Option<usize>,
    /// Restrict the target to a floor, written k=q_{k+1},...,q_d.
    #[arg(long)]
    floor: Option<String>,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    max_nodes: Option<u64>,
    #[arg(long)]
    max_vertices: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionFormat {
    Json,
    Dot,
}

#[derive(Args)]
struct RegionArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: RegionFormat,
}

#[derive(Args)]
struct HamArgs {
    #[arg(long)]
    dims: String,
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VizFormat {
    Dot,
    Svg,
    Json,
}

#[derive(Args)]
struct VizArgs {
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long, value_enum, default_value = "dot")]
    format: VizFormat,
}

#[derive(Args)]
struct EnvSource {
    /// Coordinate file, one comma-separated tuple per line.
    #[arg(long, conflicts_with = "generate", required_unless_present = "generate")]
    file: Option<PathBuf>,
    /// grid-with-hole, l-shape, or grid:<dims>.
    #[arg(long)]
    generate: Option<String>,
}

#[derive(Subcommand)]
enum EnvCommand {
    /// Connectivity and diameter.
    Check(EnvSource),
    /// Patrol with the direction-sequence sweep or a table policy.
    Patrol(EnvPatrolArgs),
    /// Full-visibility memoryless policy along a Hamiltonian cycle.
    Hamiltonian(EnvHamArgs),
}

#[derive(Args)]
struct EnvPatrolArgs {
    #[command(flatten)]
    source: EnvSource,
    /// dirseq or table:<file>.
    #[arg(long)]
    policy: String,
    /// Simulate from this vertex only and print the trace.
    #[arg(long)]
    start: Option<String>,
    #[arg(long, default_value_t = 0)]
    mem: u32,
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args)]
struct EnvHamArgs {
    #[command(flatten)]
    source: EnvSource,
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    jobs: Option<usize>,
    budget: Option<usize>,
    max_steps: Option<usize>,
    max_nodes: Option<u64>,
    max_vertices: Option<usize>,
    hamiltonian_cap: Option<usize>,
}

#[derive(Debug)]
struct Failure {
    code: &'static str,
    message: String,
}

impl Failure {
    fn new(code: &'static str, message: impl ToString) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

macro_rules! impl_from {
    ($($ty:ty => $code:literal),* $(,)?) => {
        $(impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                Failure::new($code, e)
            }
        })*
    };
}

impl_from!(
    gridpatrol::GridError => "grid",
    gridpatrol::PolicyError => "policy",
    gridpatrol::SimError => "simulation",
    gridpatrol::SearchError => "search",
    EnvError => "environment",
    std::io::Error => "io",
    serde_json::Error => "json",
);

/// What a command produced: the main artifact, a one-line summary for
/// humans, and whether the verdict was positive.
struct Outcome {
    body: String,
    summary: String,
    ok: bool,
}

impl Outcome {
    fn json(value: &Value, summary: impl Into<String>, ok: bool) -> Self {
        Self {
            body: serde_json::to_string_pretty(value).expect("json values serialize") + "\n",
            summary: summary.into(),
            ok,
        }
    }
}

struct Ctx {
    jobs: usize,
    config: Config,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            eprintln!("{}", out.summary);
            if let Err(e) = emit(cli.output.as_deref(), &out.body) {
                return report_error(&Failure::from(e));
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &Failure) -> ExitCode {
    eprintln!("error[{}]: {}", e.code, e.message);
    println!("{}", json!({"error": {"code": e.code, "message": e.message}}));
    ExitCode::from(2)
}

fn emit(path: Option<&Path>, body: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let config: Config = match &cli.config {
        Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
        None => Config::default(),
    };
    let jobs = cli.jobs.or(config.jobs).unwrap_or(1).max(1);
    let ctx = Ctx { jobs, config };
    match &cli.command {
        Command::Check(a) => check(a),
        Command::Simulate(a) => simulate(&ctx, a),
        Command::Verify(a) => verify(&ctx, a),
        Command::Search0(a) => search0(&ctx, a),
        Command::Regions(a) => regions(a),
        Command::Hamiltonian(a) => hamiltonian(&ctx, a),
        Command::Viz(a) => viz(a),
        Command::Env(EnvCommand::Check(a)) => env_check(a),
        Command::Env(EnvCommand::Patrol(a)) => env_patrol(&ctx, a),
        Command::Env(EnvCommand::Hamiltonian(a)) => env_hamiltonian(&ctx, a),
    }
}

fn parse_dims(s: &str) -> Result<GridDims, Failure> {
    Ok(s.parse::<GridDims>()?)
}

fn parse_position(s: &str) -> Result<Position, Failure> {
    Ok(s.parse::<Position>()?)
}

fn build_policy(args: &PolicyArgs) -> Result<(GridDims, Policy), Failure> {
    let dims = parse_dims(&args.grid.dims)?;
    let v = args.grid.range;
    if v == 0 {
        return Err(Failure::new("usage", "sensing range must be at least 1"));
    }
    let unit = |name: &str, policy: Policy| {
        if v == 1 {
            Ok(policy)
        } else {
            Err(Failure::new("usage", format!("{name} needs sensing range V=1, got V={v}")))
        }
    };
    let policy = match args.policy.as_str() {
        "memoryless" | "memoryless-v1" if v == 1 => Policy::memoryless_v1(dims.clone()),
        "memoryless" => {
            return Err(Failure::new(
                "usage",
                format!("memoryless is the V=1 algorithm; with V={v} use --policy memoryless-vgt1"),
            ))
        }
        "memoryless-v1" => unit("memoryless-v1", Policy::memoryless_v1(dims.clone()))?,
        "memoryless-vgt1" => Policy::memoryless_vgt1(dims.clone(), v)?,
        "makemove1d" => unit("makemove1d", Policy::MakeMove1D)?,
        "makemove2d" => unit("makemove2d", Policy::MakeMove2D)?,
        "makemove3d" => unit("makemove3d", Policy::MakeMove3D)?,
        "makemove" => unit("makemove", Policy::MakeMoveRecursive)?,
        "makemove-noninductive" => unit("makemove-noninductive", Policy::MakeMoveNoninductive)?,
        other => match other.strip_prefix("table:") {
            Some(path) => {
                let table = TablePolicy::parse(&fs::read_to_string(path)?)?;
                if table.range() != v {
                    return Err(Failure::new(
                        "usage",
                        format!("table declares range {} but V={v} was requested", table.range()),
                    ));
                }
                Policy::Table(table)
            }
            None => return Err(Failure::new("usage", format!("unknown policy {other:?}"))),
        },
    };
    Ok((dims, policy))
}

fn check(a: &GridArgs) -> Result<Outcome, Failure> {
    let dims = parse_dims(&a.dims)?;
    let verdict = theorem1_check(dims.as_slice(), a.range);
    let summary = match &verdict.reason {
        None => format!("{dims} with V={}: patrollable without memory", a.range),
        Some(r) => format!("{dims} with V={}: not patrollable without memory ({r})", a.range),
    };
    let ok = verdict.patrollable_0bit;
    Ok(Outcome::json(&serde_json::to_value(&verdict)?, summary, ok))
}

fn simulate(ctx: &Ctx, a: &SimulateArgs) -> Result<Outcome, Failure> {
    let (dims, policy) = build_policy(&a.policy)?;
    let start = parse_position(&a.start)?;
    dims.check(&start)?;
    let mem = policy.initial_memory(a.mem)?;
    let max_steps = a
        .max_steps
        .or(ctx.config.max_steps)
        .unwrap_or(2 * dims.vertex_count() * policy.memory_states() as usize);
    let trace = run(&dims, &policy, AgentState::new(start, mem), max_steps, &Target::All)?;
    let summary = format!(
        "{} steps, cover time {}, orbit {}",
        trace.steps,
        trace.cover_time.map_or("none".into(), |t| t.to_string()),
        match (trace.cycle_start, trace.cycle_len) {
            (Some(s), Some(l)) => format!("closes at t={s} with period {l}"),
            _ => "not closed".into(),
        }
    );
    let body = match a.audit {
        Some(k) => serde_json::to_value(floor_entry_audit(&trace, &dims, k)?)?,
        None => trace.to_json(),
    };
    Ok(Outcome::json(&body, summary, true))
}

fn parse_floor(dims: &GridDims, s: &str) -> Result<FloorSpec, Failure> {
    let bad = || Failure::new("usage", format!("floor {s:?} should look like k=q_(k+1),...,q_d"));
    let (k, rest) = s.split_once('=').ok_or_else(bad)?;
    let k: usize = k.trim().parse().map_err(|_| bad())?;
    let fixed = if rest.trim().is_empty() {
        Vec::new()
    } else {
        rest.split(',')
            .map(|q| q.trim().parse::<i64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    Ok(FloorSpec::new(dims, k, fixed)?)
}

fn report_outcome(report: &PatrolReport, what: &str) -> Result<Outcome, Failure> {
    let summary = format!(
        "{what}: {} over {} starts (worst cover time {}, budget {}, {} failing)",
        report.verdict,
        report.starts,
        report.worst_cover_time.map_or("n/a".into(), |t| t.to_string()),
        report.budget,
        report.failures.len()
    );
    Ok(Outcome::json(
        &serde_json::to_value(report)?,
        summary,
        report.verdict == Verdict::Pass,
    ))
}

fn verify(ctx: &Ctx, a: &VerifyArgs) -> Result<Outcome, Failure> {
    let (dims, policy) = build_policy(&a.policy)?;
    let target = match &a.floor {
        Some(f) => Target::Floor(parse_floor(&dims, f)?),
        None => Target::All,
    };
    let budget = a
        .budget
        .or(ctx.config.budget)
        .unwrap_or(dims.vertex_count() * policy.memory_states() as usize);
    let report = verify_patrols(&dims, &policy, &target, budget, ctx.jobs)?;
    report_outcome(&report, &format!("{} on {dims}", policy.kind()))
}

fn search0(ctx: &Ctx, a: &SearchArgs) -> Result<Outcome, Failure> {
    let dims = parse_dims(&a.grid.dims)?;
    let defaults = SearchCaps::default();
    let caps = SearchCaps {
        max_vertices: a
            .max_vertices
            .or(ctx.config.max_vertices)
            .unwrap_or(defaults.max_vertices),
        max_nodes: a.max_nodes.or(ctx.config.max_nodes).unwrap_or(defaults.max_nodes),
    };
    match brute_force_0bit_search(&dims, a.grid.range, caps, ctx.jobs)? {
        Some(table) => Ok(Outcome {
            body: table.to_text(),
            summary: format!("{dims} with V={}: found a memoryless patrolling policy", a.grid.range),
            ok: true,
        }),
        None => Ok(Outcome::json(
            &json!({"found": false}),
            format!("{dims} with V={}: no memoryless policy patrols this grid", a.grid.range),
            false,
        )),
    }
}

fn regions(a: &RegionArgs) -> Result<Outcome, Failure> {
    let dims = parse_dims(&a.grid.dims)?;
    let graph = sensing_regions(&dims, a.grid.range)?;
    let iso = graph.verify_isomorphism();
    let summary = format!(
        "{} regions, isomorphic to the grid {}: {}",
        graph.regions.len(),
        graph.iso_dims,
        iso.as_ref().map_or_else(|e| e.clone(), |_| "verified".into())
    );
    let body = match a.format {
        RegionFormat::Dot => graph.to_dot(),
        RegionFormat::Json => {
            let regions: Vec<Value> = graph
                .regions
                .iter()
                .zip(&graph.witness)
                .map(|(r, w)| json!({"key": r.key, "members": r.members.len(), "witness": w.coords()}))
                .collect();
            let value = json!({
                "iso_dims": graph.iso_dims.as_slice(),
                "regions": regions,
                "edges": graph.adjacency,
                "isomorphism_verified": iso.is_ok(),
            });
            serde_json::to_string_pretty(&value)? + "\n"
        }
    };
    Ok(Outcome {
        body,
        summary,
        ok: iso.is_ok(),
    })
}

fn cycle_json(cycle: &Option<Vec<Position>>) -> Value {
    json!({
        "found": cycle.is_some(),
        "cycle": cycle.as_ref().map(|c| c.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>()),
    })
}

fn hamiltonian(ctx: &Ctx, a: &HamArgs) -> Result<Outcome, Failure> {
    let dims = parse_dims(&a.dims)?;
    let cap = a.cap.or(ctx.config.hamiltonian_cap).unwrap_or(DEFAULT_HAMILTONIAN_CAP);
    let cycle = hamiltonian_search(&dims, cap)?;
    let mut value = cycle_json(&cycle);
    value["parity_possible"] = json!(hamiltonicity_parity(&dims));
    let summary = match &cycle {
        Some(c) => format!("{dims}: Hamiltonian cycle of length {}", c.len()),
        None => format!("{dims}: no Hamiltonian cycle"),
    };
    Ok(Outcome::json(&value, summary, cycle.is_some()))
}

fn viz(a: &VizArgs) -> Result<Outcome, Failure> {
    let (dims, policy) = build_policy(&a.policy)?;
    let map = ArrowMap::build(&dims, &policy);
    let body = match a.format {
        VizFormat::Dot => map.to_dot(),
        VizFormat::Svg => map.to_svg(),
        VizFormat::Json => serde_json::to_string_pretty(&map)? + "\n",
    };
    let recurrent = map.arrows.iter().filter(|a| a.recurrent).count();
    let summary = format!(
        "{} arrows ({recurrent} recurrent), {} configurations without a move",
        map.arrows.len(),
        map.stuck.len()
    );
    Ok(Outcome {
        body,
        summary,
        ok: true,
    })
}

/// Reads the environment; the outer error is for I/O and usage problems.
fn try_load_env(src: &EnvSource) -> Result<Result<Environment, EnvError>, Failure> {
    match (&src.file, &src.generate) {
        (Some(path), _) => Ok(Environment::parse(&fs::read_to_string(path)?)),
        (None, Some(name)) => Ok(Environment::generate(name)),
        (None, None) => Err(Failure::new("usage", "give --file or --generate")),
    }
}

fn load_env(src: &EnvSource) -> Result<Environment, Failure> {
    Ok(try_load_env(src)??)
}

fn env_check(a: &EnvSource) -> Result<Outcome, Failure> {
    match try_load_env(a)? {
        Ok(env) => {
            let s = env.summary();
            let summary = format!("{} vertices, connected, diameter {}", s.vertices, s.diameter);
            Ok(Outcome::json(&serde_json::to_value(&s)?, summary, true))
        }
        Err(e @ EnvError::Disconnected { components }) => Ok(Outcome::json(
            &json!({"connected": false, "components": components}),
            e.to_string(),
            false,
        )),
        Err(e) => Err(e.into()),
    }
}

fn patrol_env<C: Controller>(
    ctx: &Ctx,
    env: &Environment,
    ctrl: &C,
    a: &EnvPatrolArgs,
    start_mem: C::Memory,
    default_budget: usize,
) -> Result<Outcome, Failure> {
    let budget = a.budget.or(ctx.config.budget).unwrap_or(default_budget);
    match &a.start {
        Some(s) => {
            let start = parse_position(s)?;
            if !env.contains(&start) {
                return Err(EnvError::NotAVertex(start).into());
            }
            let trace = run(env, ctrl, AgentState::new(start, start_mem), budget, &Target::All)?;
            let summary = format!(
                "{} steps ({} stays), cover time {}, {} distinct memory states",
                trace.steps,
                trace.stays.len(),
                trace.cover_time.map_or("none".into(), |t| t.to_string()),
                trace.distinct_memories
            );
            Ok(Outcome::json(&trace.to_json(), summary, true))
        }
        None => {
            let report = verify_patrols(env, ctrl, &Target::All, budget, ctx.jobs)?;
            report_outcome(&report, &env.describe())
        }
    }
}

fn env_patrol(ctx: &Ctx, a: &EnvPatrolArgs) -> Result<Outcome, Failure> {
    let env = load_env(&a.source)?;
    if a.policy == "dirseq" {
        let pat = DirSeqPatroller::new(&env);
        let budget = pat.sweep_steps();
        return patrol_env(ctx, &env, &pat, a, pat.initial_state(), budget);
    }
    let Some(path) = a.policy.strip_prefix("table:") else {
        return Err(Failure::new("usage", format!("unknown env policy {:?}", a.policy)));
    };
    let policy = Policy::Table(TablePolicy::parse(&fs::read_to_string(path)?)?);
    let mem: MemState = policy.initial_memory(a.mem)?;
    let budget = env.vertex_count() * policy.memory_states() as usize;
    patrol_env(ctx, &env, &policy, a, mem, budget)
}

fn env_hamiltonian(ctx: &Ctx, a: &EnvHamArgs) -> Result<Outcome, Failure> {
    let env = load_env(&a.source)?;
    let cap = a.cap.or(ctx.config.hamiltonian_cap).unwrap_or(DEFAULT_HAMILTONIAN_CAP);
    let cycle = hamiltonian_search(&env, cap)?;
    let mut value = cycle_json(&cycle);
    let ok = match full_visibility_hamiltonian(&env, cap)? {
        Some(policy) => {
            let report = verify_patrols(&env, &policy, &Target::All, env.vertex_count(), ctx.jobs)?;
            value["range"] = json!(policy.range());
            value["verify"] = serde_json::to_value(&report)?;
            report.verdict == Verdict::Pass
        }
        None => false,
    };
    let summary = if ok {
        format!("{}: memoryless full-visibility policy patrols it", env.describe())
    } else {
        format!("{}: no Hamiltonian cycle, so no memoryless policy", env.describe())
    };
    Ok(Outcome::json(&value, summary, ok))
}
