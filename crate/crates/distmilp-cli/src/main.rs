//! Experiment harness for distributed MILP solving: generate instances, run
//! networks of agents over simulated (lossy) digraphs, sweep experiment
//! families, and cross-check against the centralized oracle.
//!
//! Exit codes: 0 converged / success, 2 not converged, 1 usage or data error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use distmilp::agent::NetworkProblem;
use distmilp::netsim::{
    consensus_round, run, summary_json, write_trace_csv, GraphModel, LossModel, RunStatus,
    Topology,
};
use distmilp::oracle::{brute_force_milp, centralized_gomory, GomoryOutcome};
use distmilp::problems::{
    build_assignment_milp, gen_random_milp, partition, read_instance, write_instance,
    AssignmentSpec, MilpInstance, PartitionPolicy,
};
use distmilp::scalar::{self, Scalar};

mod stats;
mod sweep;

#[derive(Parser)]
#[command(
    name = "distmilp",
    version,
    about = "Distributed mixed-integer linear programming by cut generation and constraint exchange"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random MILP instance file.
    Gen(GenArgs),
    /// Run the distributed algorithm on an instance file.
    Solve(SolveArgs),
    /// Run a named experiment family and emit aggregate tables.
    Sweep(sweep::SweepArgs),
    /// Solve a task-assignment problem from a JSON spec.
    Assign(AssignArgs),
    /// Solve an instance centrally (brute force or cutting planes).
    SolveCentralized(CentralArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    /// Total number of decision variables.
    #[arg(long)]
    d: usize,
    /// Leading integer variables.
    #[arg(long)]
    dz: usize,
    /// Constraint rows.
    #[arg(long)]
    n: usize,
    /// Bounding box half-width (default 100).
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct SolveArgs {
    /// Instance file produced by `gen` (or hand-written).
    #[arg(long)]
    instance: PathBuf,
    /// Number of agents; rows are distributed round-robin.
    #[arg(long, default_value_t = 8)]
    agents: usize,
    /// Communication graph: `cyclic`, `erdos:<p>:<diam>`, or
    /// `proximity:<radius>` (seeded positions in the unit square).
    #[arg(long, default_value = "cyclic")]
    graph: String,
    /// Algorithm variant: `int` (needs integer optimal cost) or `eps:<tol>`
    /// with an exact tolerance like `eps:1/10`.
    #[arg(long, default_value = "eps:1/10")]
    variant: String,
    /// Per-edge packet loss probability.
    #[arg(long, default_value_t = 0.0)]
    loss: f64,
    /// Seed for loss draws and randomized graphs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5000)]
    max_rounds: u64,
    /// Generate one cut per fractional coordinate instead of only the first.
    #[arg(long, default_value_t = false)]
    multi_cuts: bool,
    /// Override the halting threshold (defaults to 2*diameter+1, scaled up
    /// under loss).
    #[arg(long)]
    halt_threshold: Option<u64>,
    /// Also solve centrally and report the exact optimum in the summary.
    #[arg(long, default_value_t = false)]
    with_oracle: bool,
    /// Trace CSV output path.
    #[arg(long, default_value = "trace.csv")]
    trace: PathBuf,
    /// Summary JSON output path.
    #[arg(long, default_value = "summary.json")]
    summary: PathBuf,
}

#[derive(Args)]
struct AssignArgs {
    /// Assignment spec JSON.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 4)]
    agents: usize,
    #[arg(long, default_value = "cyclic")]
    graph: String,
    #[arg(long, default_value_t = 0.0)]
    loss: f64,
    /// Tolerance (exact token, e.g. `1/10`).
    #[arg(long, default_value = "1/10")]
    eps: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5000)]
    max_rounds: u64,
    /// Multiple cuts per round (default on for assignment problems).
    #[arg(long, default_value_t = true)]
    multi_cuts: bool,
    #[arg(long)]
    halt_threshold: Option<u64>,
    #[arg(long, default_value_t = true)]
    with_oracle: bool,
    #[arg(long, default_value = "trace.csv")]
    trace: PathBuf,
    #[arg(long, default_value = "summary.json")]
    summary: PathBuf,
}

#[derive(Args)]
struct CentralArgs {
    #[arg(long)]
    instance: PathBuf,
    /// `brute` (exhaustive, exact) or `gomory` (cutting planes; needs an
    /// integer-valued optimal cost).
    #[arg(long, default_value = "brute")]
    method: String,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
}

/// Everything a run needs, echoed into the summary so runs are reproducible
/// from their summaries alone.
pub(crate) struct RunSpec {
    pub instance: MilpInstance,
    pub variant: VariantSpec,
    pub agents: usize,
    pub graph: String,
    pub topology: Topology,
    pub loss: LossModel,
    pub max_rounds: u64,
    pub halt_threshold: u64,
    pub multi_cuts: bool,
}

#[derive(Clone)]
pub(crate) enum VariantSpec {
    Int,
    Eps(Scalar),
}

impl VariantSpec {
    pub(crate) fn parse(text: &str) -> Result<Self> {
        if text == "int" {
            return Ok(VariantSpec::Int);
        }
        if let Some(tok) = text.strip_prefix("eps:") {
            let eps = scalar::parse_token(tok).map_err(|e| anyhow!("bad tolerance: {e}"))?;
            return Ok(VariantSpec::Eps(eps));
        }
        bail!("variant must be `int` or `eps:<tol>`, got `{text}`")
    }

    pub(crate) fn label(&self) -> String {
        match self {
            VariantSpec::Int => "int".into(),
            VariantSpec::Eps(e) => format!("eps:{}", scalar::token(e)),
        }
    }

    pub(crate) fn epsilon(&self) -> Option<&Scalar> {
        match self {
            VariantSpec::Int => None,
            VariantSpec::Eps(e) => Some(e),
        }
    }
}

pub(crate) fn parse_graph(text: &str, agents: usize, seed: u64) -> Result<(GraphModel, String)> {
    if text == "cyclic" {
        return Ok((GraphModel::Cyclic { agents }, "cyclic".into()));
    }
    if let Some(rest) = text.strip_prefix("erdos:") {
        let (p, diam) = rest
            .split_once(':')
            .ok_or_else(|| anyhow!("expected erdos:<p>:<diam>"))?;
        let edge_prob: f64 = p.parse().context("bad edge probability")?;
        let diameter: usize = diam.parse().context("bad diameter")?;
        return Ok((
            GraphModel::ErdosRenyi {
                agents,
                edge_prob,
                seed,
                diameter,
            },
            format!("erdos:{edge_prob}:{diameter}"),
        ));
    }
    if let Some(radius) = text.strip_prefix("proximity:") {
        let radius: f64 = radius.parse().context("bad radius")?;
        let model = GraphModel::random_proximity(agents, radius, seed)
            .map_err(|e| anyhow!("{e}"))
            .context("no strongly connected placement found")?;
        return Ok((model, format!("proximity:{radius}")));
    }
    bail!("graph must be `cyclic`, `erdos:<p>:<diam>`, or `proximity:<radius>`, got `{text}`")
}

/// Halting threshold: the reliable-network rule on the given schedule,
/// widened under loss by the expected rounds per successful delivery.
pub(crate) fn default_halt_threshold(topology: &Topology, loss_p: f64) -> Result<u64> {
    let base = topology.halt_threshold().map_err(|e| anyhow!("{e}"))?;
    if loss_p <= 0.0 {
        return Ok(base);
    }
    let window = (1.0 / (1.0 - loss_p)).ceil() as u64;
    Ok(base.max(2 * topology.n_agents() as u64 * window + 1))
}

/// Execute a run, write the trace and summary, and report the exit code.
pub(crate) fn finish_run(
    spec: &RunSpec,
    with_oracle: bool,
    trace_path: &std::path::Path,
    summary_path: &std::path::Path,
) -> Result<ExitCode> {
    let parts = partition(&spec.instance, spec.agents, &PartitionPolicy::RoundRobin)
        .map_err(|e| anyhow!("{e}"))?;
    let problem = match &spec.variant {
        VariantSpec::Int => NetworkProblem::exact(&spec.instance, parts, spec.multi_cuts),
        VariantSpec::Eps(eps) => {
            NetworkProblem::tolerance(&spec.instance, parts, eps, spec.multi_cuts)
                .map_err(|e| anyhow!("{e}"))?
        }
    };
    let outcome = run(
        &problem,
        &spec.topology,
        &spec.loss,
        spec.max_rounds,
        spec.halt_threshold,
    )
    .map_err(|e| anyhow!("{e}"))?;

    let recovered = outcome.agents[0].recover();
    let final_cost = scalar::dot(&spec.instance.cost, &recovered.point);
    let oracle_cost = if with_oracle {
        Some(
            brute_force_milp(&spec.instance)
                .map_err(|e| anyhow!("{e}"))?
                .cost,
        )
    } else {
        None
    };

    write_trace_csv(&outcome.trace, trace_path).map_err(|e| anyhow!("{e}"))?;
    let mut summary = summary_json(&outcome.trace);
    let extra = json!({
        "final_cost": scalar::token(&final_cost),
        "final_cost_bound": scalar::token(&recovered.cost_bound),
        "oracle_cost": oracle_cost.as_ref().map(scalar::token),
        "eps": spec.variant.epsilon().map(scalar::token),
        "variant": spec.variant.label(),
        "graph": spec.graph,
        "agents": spec.agents,
        "multi_cuts": spec.multi_cuts,
        "max_rounds": spec.max_rounds,
        "instance_meta": {
            "seed": spec.instance.meta.seed,
            "generator": spec.instance.meta.generator,
            "d": spec.instance.dim(),
            "dz": spec.instance.d_z,
            "n": spec.instance.n_rows(),
            "m": scalar::token(&spec.instance.m),
        },
    });
    merge(&mut summary, extra);
    std::fs::write(summary_path, serde_json::to_string_pretty(&summary)?)?;

    let converged = outcome.trace.status == RunStatus::Converged;
    println!(
        "{}: rounds={} consensus={:?} final_cost={}{}",
        if converged { "converged" } else { "not converged" },
        outcome.trace.rounds_executed(),
        consensus_round(&outcome.trace),
        scalar::token(&final_cost),
        oracle_cost
            .map(|c| format!(" oracle_cost={}", scalar::token(&c)))
            .unwrap_or_default(),
    );
    Ok(if converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn merge(into: &mut serde_json::Value, from: serde_json::Value) {
    if let (Some(a), Some(b)) = (into.as_object_mut(), from.as_object()) {
        for (k, v) in b {
            a.insert(k.clone(), v.clone());
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are not errors.
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => sweep::cmd_sweep(args),
        Command::Assign(args) => cmd_assign(args),
        Command::SolveCentralized(args) => cmd_central(args),
    }
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    let mut instance =
        gen_random_milp(args.seed, args.d, args.dz, args.n).map_err(|e| anyhow!("{e}"))?;
    if let Some(m) = args.m {
        instance = instance.with_box(scalar::int(m));
    }
    write_instance(&instance, &args.out)
        .map_err(|e| anyhow!("{e}"))
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote {} (d={}, dz={}, n={}, m={})",
        args.out.display(),
        instance.dim(),
        instance.d_z,
        instance.n_rows(),
        scalar::token(&instance.m)
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let (instance, flags) = read_instance(&args.instance)
        .map_err(|e| anyhow!("{e}"))
        .with_context(|| format!("reading {}", args.instance.display()))?;
    if flags.defaulted_m {
        eprintln!("warning: instance file has no box parameter; defaulting to 100");
    }
    let variant = VariantSpec::parse(&args.variant)?;
    let (model, graph_label) = parse_graph(&args.graph, args.agents, args.seed)?;
    let topology = model.resolve().map_err(|e| anyhow!("{e}"))?;
    let halt_threshold = match args.halt_threshold {
        Some(t) => t,
        None => default_halt_threshold(&topology, args.loss)?,
    };
    let spec = RunSpec {
        instance,
        variant,
        agents: args.agents,
        graph: graph_label,
        topology,
        loss: LossModel::new(args.loss, args.seed).map_err(|e| anyhow!("{e}"))?,
        max_rounds: args.max_rounds,
        halt_threshold,
        multi_cuts: args.multi_cuts,
    };
    finish_run(&spec, args.with_oracle, &args.trace, &args.summary)
}

fn cmd_assign(args: AssignArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.spec)
        .with_context(|| format!("reading {}", args.spec.display()))?;
    let spec_json = AssignmentSpec::from_json(&text).map_err(|e| anyhow!("{e}"))?;
    let instance = build_assignment_milp(&spec_json).map_err(|e| anyhow!("{e}"))?;
    let epsilon = scalar::parse_token(&args.eps).map_err(|e| anyhow!("bad tolerance: {e}"))?;
    let (model, graph_label) = parse_graph(&args.graph, args.agents, args.seed)?;
    let topology = model.resolve().map_err(|e| anyhow!("{e}"))?;
    let halt_threshold = match args.halt_threshold {
        Some(t) => t,
        None => default_halt_threshold(&topology, args.loss)?,
    };
    let spec = RunSpec {
        instance,
        variant: VariantSpec::Eps(epsilon),
        agents: args.agents,
        graph: graph_label,
        topology,
        loss: LossModel::new(args.loss, args.seed).map_err(|e| anyhow!("{e}"))?,
        max_rounds: args.max_rounds,
        halt_threshold,
        multi_cuts: args.multi_cuts,
    };
    finish_run(&spec, args.with_oracle, &args.trace, &args.summary)
}

fn cmd_central(args: CentralArgs) -> Result<ExitCode> {
    let (instance, flags) = read_instance(&args.instance).map_err(|e| anyhow!("{e}"))?;
    if flags.defaulted_m {
        eprintln!("warning: instance file has no box parameter; defaulting to 100");
    }
    match args.method.as_str() {
        "brute" => {
            let sol = brute_force_milp(&instance).map_err(|e| anyhow!("{e}"))?;
            let point: Vec<String> = sol.point.iter().map(scalar::token).collect();
            println!("optimal cost {}", scalar::token(&sol.cost));
            println!("lex-optimal point [{}]", point.join(", "));
            Ok(ExitCode::SUCCESS)
        }
        "gomory" => {
            match centralized_gomory(&instance, args.max_iters).map_err(|e| anyhow!("{e}"))? {
                GomoryOutcome::Converged {
                    solution,
                    iterations,
                    cuts_added,
                } => {
                    let point: Vec<String> = solution.point.iter().map(scalar::token).collect();
                    println!(
                        "optimal cost {} after {iterations} iterations ({cuts_added} cuts)",
                        scalar::token(&solution.cost)
                    );
                    println!("lex-optimal point [{}]", point.join(", "));
                    Ok(ExitCode::SUCCESS)
                }
                GomoryOutcome::NotConverged {
                    iterations,
                    last_cost,
                    ..
                } => {
                    println!(
                        "not converged after {iterations} iterations; relaxation cost {}",
                        scalar::token(&last_cost)
                    );
                    Ok(ExitCode::from(2))
                }
            }
        }
        other => bail!("method must be `brute` or `gomory`, got `{other}`"),
    }
}
