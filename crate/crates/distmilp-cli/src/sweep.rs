//! Experiment families: network-size scaling on rings and fixed-diameter
//! random digraphs, tolerance sweeps, and packet-loss sweeps on a
//! task-assignment instance. Emits one CSV row per run plus box-plot
//! aggregates per parameter value, shaped for plotting.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use rayon::prelude::*;
use serde_json::json;

use distmilp::agent::NetworkProblem;
use distmilp::netsim::{consensus_round, run, GraphModel, LossModel, RunStatus, Topology};
use distmilp::oracle::brute_force_milp;
use distmilp::problems::{
    build_assignment_milp, gen_random_milp, partition, AssignmentSpec, MilpInstance,
    PartitionPolicy,
};
use distmilp::scalar::{self, Scalar};

use crate::stats::five_number;
use crate::default_halt_threshold;

#[derive(Args)]
pub struct SweepArgs {
    /// One of `scaling-cyclic`, `scaling-fixed-diam`, `eps-sweep`,
    /// `loss-sweep`.
    #[arg(long)]
    experiment: String,
    /// Repetitions per parameter value (instances or loss seeds).
    #[arg(long, default_value_t = 10)]
    reps: u64,
    /// Base seed for instances, graphs, and loss draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Assignment spec for `loss-sweep` (defaults to a built-in fixture).
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 5000)]
    max_rounds: u64,
    /// Output directory for `runs.csv`, `aggregate.csv`, `aggregate.json`.
    #[arg(long, default_value = "sweep-out")]
    out_dir: PathBuf,
}

struct RunRow {
    param: String,
    rep: u64,
    seed: u64,
    rounds: u64,
    consensus: Option<u64>,
    converged: bool,
    final_cost: String,
    gap: Option<String>,
}

const DEFAULT_ASSIGNMENT: &str = r#"{
    "targets": [
        {"multiplicity": 1}, {"multiplicity": 1},
        {"multiplicity": 1}, {"multiplicity": 1}
    ],
    "vehicles": 3,
    "paths": [
        {"vehicle": 0, "time": 2, "targets": [0]},
        {"vehicle": 0, "time": 5, "targets": [0, 1]},
        {"vehicle": 1, "time": 3, "targets": [1]},
        {"vehicle": 1, "time": 4, "targets": [1, 2]},
        {"vehicle": 2, "time": 6, "targets": [2, 3]},
        {"vehicle": 2, "time": 3, "targets": [3]},
        {"vehicle": 0, "time": 7, "targets": [0, 1, 2, 3]},
        {"vehicle": 1, "time": 6, "targets": [2, 3]}
    ]
}"#;

/// Desk-scale instance family shared by the scaling experiments.
fn scaling_instance(seed: u64) -> Result<MilpInstance> {
    Ok(gen_random_milp(seed, 4, 2, 32)
        .map_err(|e| anyhow!("{e}"))?
        .with_box(scalar::int(5)))
}

fn tolerance_run(
    instance: &MilpInstance,
    epsilon: &Scalar,
    topology: &Topology,
    loss: &LossModel,
    max_rounds: u64,
    halt_threshold: u64,
    multi_cuts: bool,
) -> Result<(u64, Option<u64>, bool, Scalar)> {
    let parts = partition(instance, topology.n_agents(), &PartitionPolicy::RoundRobin)
        .map_err(|e| anyhow!("{e}"))?;
    let problem = NetworkProblem::tolerance(instance, parts, epsilon, multi_cuts)
        .map_err(|e| anyhow!("{e}"))?;
    let outcome =
        run(&problem, topology, loss, max_rounds, halt_threshold).map_err(|e| anyhow!("{e}"))?;
    let recovered = outcome.agents[0].recover();
    let cost = scalar::dot(&instance.cost, &recovered.point);
    Ok((
        outcome.trace.rounds_executed(),
        consensus_round(&outcome.trace),
        outcome.trace.status == RunStatus::Converged,
        cost,
    ))
}

pub fn cmd_sweep(args: SweepArgs) -> Result<ExitCode> {
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let rows = match args.experiment.as_str() {
        "scaling-cyclic" => scaling_cyclic(&args)?,
        "scaling-fixed-diam" => scaling_fixed_diam(&args)?,
        "eps-sweep" => eps_sweep(&args)?,
        "loss-sweep" => loss_sweep(&args)?,
        other => bail!(
            "experiment must be one of scaling-cyclic, scaling-fixed-diam, eps-sweep, \
             loss-sweep; got `{other}`"
        ),
    };
    write_outputs(&args, &rows)?;
    Ok(ExitCode::SUCCESS)
}

fn scaling_cyclic(args: &SweepArgs) -> Result<Vec<RunRow>> {
    let eps = scalar::rat(1, 2);
    let mut rows = Vec::new();
    for n in [4usize, 8, 16, 32] {
        let topology = GraphModel::Cyclic { agents: n }
            .resolve()
            .map_err(|e| anyhow!("{e}"))?;
        let threshold = topology.halt_threshold().map_err(|e| anyhow!("{e}"))?;
        let batch: Result<Vec<RunRow>> = (0..args.reps)
            .into_par_iter()
            .map(|rep| {
                let instance = scaling_instance(args.seed + rep)?;
                let (rounds, consensus, converged, cost) = tolerance_run(
                    &instance,
                    &eps,
                    &topology,
                    &LossModel::ideal(),
                    args.max_rounds,
                    threshold,
                    false,
                )?;
                Ok(RunRow {
                    param: format!("N={n}"),
                    rep,
                    seed: args.seed + rep,
                    rounds,
                    consensus,
                    converged,
                    final_cost: scalar::token(&cost),
                    gap: None,
                })
            })
            .collect();
        rows.extend(batch?);
    }
    Ok(rows)
}

fn scaling_fixed_diam(args: &SweepArgs) -> Result<Vec<RunRow>> {
    let eps = scalar::rat(1, 2);
    let mut rows = Vec::new();
    for (n, edge_prob) in [(8usize, 0.22f64), (16, 0.14), (32, 0.085)] {
        let topology = GraphModel::ErdosRenyi {
            agents: n,
            edge_prob,
            seed: args.seed + 4000 + n as u64,
            diameter: 4,
        }
        .resolve()
        .map_err(|e| anyhow!("{e}"))?;
        let threshold = topology.halt_threshold().map_err(|e| anyhow!("{e}"))?;
        let batch: Result<Vec<RunRow>> = (0..args.reps)
            .into_par_iter()
            .map(|rep| {
                let instance = scaling_instance(args.seed + rep)?;
                let (rounds, consensus, converged, cost) = tolerance_run(
                    &instance,
                    &eps,
                    &topology,
                    &LossModel::ideal(),
                    args.max_rounds,
                    threshold,
                    false,
                )?;
                Ok(RunRow {
                    param: format!("N={n}"),
                    rep,
                    seed: args.seed + rep,
                    rounds,
                    consensus,
                    converged,
                    final_cost: scalar::token(&cost),
                    gap: None,
                })
            })
            .collect();
        rows.extend(batch?);
    }
    Ok(rows)
}

fn eps_sweep(args: &SweepArgs) -> Result<Vec<RunRow>> {
    let instance = scaling_instance(args.seed + 777)?;
    let j_star = brute_force_milp(&instance).map_err(|e| anyhow!("{e}"))?.cost;
    let topology = GraphModel::Cyclic { agents: 8 }
        .resolve()
        .map_err(|e| anyhow!("{e}"))?;
    let threshold = topology.halt_threshold().map_err(|e| anyhow!("{e}"))?;
    let sweep = [
        scalar::int(1),
        scalar::rat(1, 2),
        scalar::rat(1, 10),
        scalar::rat(1, 20),
    ];
    sweep
        .par_iter()
        .map(|eps| {
            let (rounds, consensus, converged, cost) = tolerance_run(
                &instance,
                eps,
                &topology,
                &LossModel::ideal(),
                args.max_rounds,
                threshold,
                false,
            )?;
            let gap = &cost - &j_star;
            Ok(RunRow {
                param: format!("eps={}", scalar::token(eps)),
                rep: 0,
                seed: args.seed + 777,
                rounds,
                consensus,
                converged,
                final_cost: scalar::token(&cost),
                gap: Some(scalar::token(&gap)),
            })
        })
        .collect()
}

fn loss_sweep(args: &SweepArgs) -> Result<Vec<RunRow>> {
    let text = match &args.spec {
        Some(path) => std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?,
        None => DEFAULT_ASSIGNMENT.to_string(),
    };
    let spec = AssignmentSpec::from_json(&text).map_err(|e| anyhow!("{e}"))?;
    let instance = build_assignment_milp(&spec).map_err(|e| anyhow!("{e}"))?;
    let j_star = brute_force_milp(&instance).map_err(|e| anyhow!("{e}"))?.cost;
    let eps = scalar::rat(1, 10);
    let agents = 5usize;
    let model = GraphModel::random_proximity(agents, 0.42, args.seed + 7)
        .map_err(|e| anyhow!("{e}"))?;
    let topology = model.resolve().map_err(|e| anyhow!("{e}"))?;

    let cases: Vec<(f64, u64)> = [0.0, 0.1, 0.3, 0.5, 0.7]
        .iter()
        .flat_map(|&p| (0..args.reps).map(move |rep| (p, rep)))
        .collect();
    cases
        .par_iter()
        .map(|&(p, rep)| {
            let loss = LossModel::new(p, args.seed + 1000 + rep).map_err(|e| anyhow!("{e}"))?;
            let threshold = default_halt_threshold(&topology, p)?;
            let (rounds, consensus, converged, cost) = tolerance_run(
                &instance,
                &eps,
                &topology,
                &loss,
                args.max_rounds,
                threshold,
                true,
            )?;
            let gap = &cost - &j_star;
            Ok(RunRow {
                param: format!("p={p}"),
                rep,
                seed: args.seed + 1000 + rep,
                rounds,
                consensus,
                converged,
                final_cost: scalar::token(&cost),
                gap: Some(scalar::token(&gap)),
            })
        })
        .collect()
}

fn write_outputs(args: &SweepArgs, rows: &[RunRow]) -> Result<()> {
    let mut runs_csv =
        String::from("experiment,param,rep,seed,rounds,consensus_round,converged,final_cost,gap\n");
    for row in rows {
        let _ = writeln!(
            runs_csv,
            "{},{},{},{},{},{},{},{},{}",
            args.experiment,
            row.param,
            row.rep,
            row.seed,
            row.rounds,
            row.consensus.map(|c| c.to_string()).unwrap_or_default(),
            row.converged,
            row.final_cost,
            row.gap.clone().unwrap_or_default(),
        );
    }
    std::fs::write(args.out_dir.join("runs.csv"), runs_csv)?;

    // Aggregate consensus rounds per parameter value, preserving first-seen
    // parameter order.
    let mut params: Vec<String> = Vec::new();
    for row in rows {
        if !params.contains(&row.param) {
            params.push(row.param.clone());
        }
    }
    let mut agg_csv =
        String::from("experiment,param,count,min,q1,median,q3,max,outliers,converged\n");
    let mut agg_json = Vec::new();
    for param in &params {
        let sample: Vec<u64> = rows
            .iter()
            .filter(|r| &r.param == param)
            .filter_map(|r| r.consensus)
            .collect();
        let converged = rows
            .iter()
            .filter(|r| &r.param == param && r.converged)
            .count();
        if sample.is_empty() {
            let _ = writeln!(
                agg_csv,
                "{},{param},0,,,,,,,{converged}",
                args.experiment
            );
            continue;
        }
        let stats = five_number(&sample);
        let outliers = stats
            .outliers
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            agg_csv,
            "{},{param},{},{},{},{},{},{},{outliers},{converged}",
            args.experiment, stats.count, stats.min, stats.q1, stats.median, stats.q3, stats.max,
        );
        agg_json.push(json!({
            "param": param,
            "count": stats.count,
            "min": stats.min,
            "q1": stats.q1,
            "median": stats.median,
            "q3": stats.q3,
            "max": stats.max,
            "outliers": stats.outliers,
            "converged": converged,
        }));
        println!(
            "{param}: median consensus {} (q1 {}, q3 {}, {} outliers, {}/{} converged)",
            stats.median,
            stats.q1,
            stats.q3,
            stats.outliers.len(),
            converged,
            rows.iter().filter(|r| &r.param == param).count(),
        );
    }
    std::fs::write(args.out_dir.join("aggregate.csv"), agg_csv)?;
    let config = json!({
        "experiment": args.experiment,
        "reps": args.reps,
        "seed": args.seed,
        "max_rounds": args.max_rounds,
        "groups": agg_json,
    });
    std::fs::write(
        args.out_dir.join("aggregate.json"),
        serde_json::to_string_pretty(&config)?,
    )?;
    Ok(())
}
