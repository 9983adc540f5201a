//! `equipart`: generate, partition, decompose and verify instances.
//!
//! Exit status: 0 on success, 1 on bad input (or any other error), 2 when the
//! answer is a proven "no": no partition into k parts exists, no
//! decomposition exists, or `verify` finds a valid but non-equitable
//! partition.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use equipart::bbranching::{b_potential, equitable_b_partition, is_b_branching};
use equipart::branching::{equitable_branching_partition, is_branching};
use equipart::idp::{check_decomposition, decompose, partition_into_k_bbranchings, IdpQuery};
use equipart::io::{DecomposeQueryFile, Instance};
use equipart::matching_forest::{
    equitable_mf_partition, is_matching_forest, max_boundary_gap, MatchingForest,
};
use equipart::oracle::{find_partition, generate_partitionable, GeneratorConfig, PartitionKind};
use equipart::{Limits, MixedGraph};

use report::{Gaps, RunReport};

#[derive(Parser)]
#[command(name = "equipart", version, about = "Equitable partitions into branchings, b-branchings and matching forests")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Instance file (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Where to write the result; stdout when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Number of parts; overrides the instance's `k`.
    #[arg(long, global = true)]
    k: Option<usize>,

    /// Re-check validity and equitability before writing.
    #[arg(long, global = true)]
    verify: bool,

    /// TOML file with limit overrides (same keys as the flags, snake_case).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    fallback_threshold: Option<usize>,

    #[arg(long, global = true)]
    size_limit: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an instance and check that its partition, if any, has valid parts.
    Check,
    /// Rebalance a partition of a digraph's arcs into branchings.
    PartitionBranchings,
    /// Rebalance a partition of a mixed graph into matching forests.
    PartitionMf,
    /// Rebalance a partition of a digraph's arcs into b-branchings.
    PartitionBb,
    /// Split an integer arc vector into b-branchings meeting size/indegree conditions.
    Decompose {
        /// Query file with `x`, `kappa` and optional `ell`, `Vprime`, `bprime`.
        #[arg(long)]
        query: PathBuf,
    },
    /// Generate a seeded instance together with a valid initial partition.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        edge_density: f64,
        #[arg(long, default_value_t = 0.6)]
        arc_density: f64,
        #[arg(long, default_value_t = 3)]
        b_max: usize,
    },
    /// Check that a partition is valid and equitable.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Branching,
    MatchingForest,
    BBranching,
}

impl From<Kind> for PartitionKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Branching => PartitionKind::Branching,
            Kind::MatchingForest => PartitionKind::MatchingForest,
            Kind::BBranching => PartitionKind::BBranching,
        }
    }
}

enum Failure {
    Input(String),
    No(String),
}

impl From<equipart::Error> for Failure {
    fn from(e: equipart::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

fn input_error(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::No(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}

fn limits(cli: &Cli) -> Outcome<Limits> {
    let mut limits = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| input_error(format!("--config: cannot read {}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| input_error(format!("--config: {e}")))?
        }
        None => Limits::default(),
    };
    if let Some(t) = cli.fallback_threshold {
        limits.fallback_threshold = t;
    }
    if let Some(s) = cli.size_limit {
        limits.size_limit = s;
    }
    Ok(limits)
}

fn read(path: Option<&Path>, flag: &str) -> Outcome<Vec<u8>> {
    let path = path.ok_or_else(|| input_error(format!("{flag}: required")))?;
    std::fs::read(path).map_err(|e| input_error(format!("{flag}: cannot read {}: {e}", path.display())))
}

fn write(cli: &Cli, value: &impl Serialize) -> Outcome<()> {
    let mut text = serde_json::to_string_pretty(value).expect("output serializes");
    text.push('\n');
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| input_error(format!("--output: cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_instance(bytes: &[u8]) -> Outcome<Instance> {
    let text = std::str::from_utf8(bytes).map_err(|e| input_error(format!("input is not UTF-8: {e}")))?;
    Ok(Instance::parse(text)?)
}

fn run(cli: &Cli) -> Outcome<()> {
    let started = Instant::now();
    let limits = limits(cli)?;
    let mut report = match &cli.command {
        Command::Gen {
            kind,
            seed,
            n,
            edge_density,
            arc_density,
            b_max,
        } => {
            for (name, p) in [("--edge-density", edge_density), ("--arc-density", arc_density)] {
                if !(0.0..=1.0).contains(p) {
                    return Err(input_error(format!("{name}: must lie in [0, 1]")));
                }
            }
            if cli.k == Some(0) {
                return Err(input_error("--k: must be at least 1"));
            }
            let config = GeneratorConfig {
                seed: *seed,
                n: *n,
                k: cli.k.unwrap_or(2),
                edge_density: *edge_density,
                arc_density: *arc_density,
                b_max: *b_max,
            };
            let inst = generate_partitionable(&config, (*kind).into());
            write(cli, &inst.to_file())?;
            RunReport::new("gen", &serde_json::to_vec(&config).expect("config serializes"))
        }
        Command::Decompose { query } => {
            let bytes = read(cli.input.as_deref(), "--input")?;
            let inst = parse_instance(&bytes)?;
            let query_bytes = read(Some(query), "--query")?;
            let q: DecomposeQueryFile = serde_json::from_slice(&query_bytes)
                .map_err(|e| input_error(format!("--query: {e}")))?;
            let mut report = RunReport::new("decompose", &[bytes, query_bytes].concat());
            run_decompose(cli, &inst, q, &limits, &mut report)?;
            report
        }
        command => {
            let bytes = read(cli.input.as_deref(), "--input")?;
            let mut inst = parse_instance(&bytes)?;
            let name = match command {
                Command::Check => "check",
                Command::PartitionBranchings => "partition-branchings",
                Command::PartitionMf => "partition-mf",
                Command::PartitionBb => "partition-bb",
                _ => "verify",
            };
            let mut report = RunReport::new(name, &bytes);
            match command {
                Command::Check => {
                    let parts = check_parts(&inst)?;
                    if let Some(parts) = parts {
                        report.gaps = Some(Gaps::of(&inst.graph, &parts));
                    }
                }
                Command::Verify => {
                    let parts = check_parts(&inst)?.ok_or_else(|| input_error("partition: missing"))?;
                    report.gaps = Some(Gaps::of(&inst.graph, &parts));
                    emit(&mut report, started);
                    return equitable(&inst, &parts).map_err(Failure::No);
                }
                _ => {
                    partition(cli, command, &mut inst, &limits, &mut report)?;
                    write(cli, &inst.to_file())?;
                }
            }
            report
        }
    };
    emit(&mut report, started);
    Ok(())
}

fn emit(report: &mut RunReport, started: Instant) {
    report.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    eprintln!("{}", serde_json::to_string(report).expect("report serializes"));
}

/// Validates every part of the instance's partition, if it has one.
fn check_parts(inst: &Instance) -> Outcome<Option<Vec<MatchingForest>>> {
    if inst.partition.is_none() {
        return Ok(None);
    }
    let parts = inst.forest_partition()?;
    let d = inst.digraph();
    for (i, f) in parts.iter().enumerate() {
        let ok = match (inst.effective_kind(), &inst.b) {
            (PartitionKind::BBranching, Some(b)) => f.edges.is_empty() && is_b_branching(d, b, &f.arcs),
            (PartitionKind::Branching, _) => is_branching(d, &f.arcs),
            _ => is_matching_forest(&inst.graph, f),
        };
        if !ok {
            let what = match inst.effective_kind() {
                PartitionKind::BBranching => "a b-branching",
                PartitionKind::Branching => "a branching",
                PartitionKind::MatchingForest => "a matching forest",
            };
            return Err(input_error(format!("partition[{i}]: not {what}")));
        }
    }
    Ok(Some(parts))
}

fn floor_ceil(x: usize, total: usize, k: usize) -> bool {
    x == total / k || x == total.div_ceil(k)
}

/// Equitability of an already validated partition, per its kind.
fn equitable(inst: &Instance, parts: &[MatchingForest]) -> Result<(), String> {
    let g = &inst.graph;
    let k = parts.len();
    if k == 0 {
        return Ok(());
    }
    match inst.effective_kind() {
        PartitionKind::Branching => {
            let m = g.arcs().len();
            match parts.iter().position(|f| !floor_ceil(f.arcs.len(), m, k)) {
                None => Ok(()),
                Some(i) => Err(format!(
                    "not equitable: part {i} has {} arcs, expected {} or {}",
                    parts[i].arcs.len(),
                    m / k,
                    m.div_ceil(k)
                )),
            }
        }
        PartitionKind::MatchingForest => match max_boundary_gap(g, parts) {
            gap if gap <= 2 => Ok(()),
            gap => Err(format!("not equitable: boundary sizes differ by {gap} > 2")),
        },
        PartitionKind::BBranching => {
            let arcs: Vec<Vec<usize>> = parts.iter().map(|f| f.arcs.clone()).collect();
            match b_potential(g.digraph(), &arcs) {
                0 => Ok(()),
                p => Err(format!(
                    "not equitable: sizes or indegrees stray from their averages (deviation {p})"
                )),
            }
        }
    }
}

fn part_count(cli: &Cli, inst: &Instance) -> Outcome<usize> {
    let from_file = inst.partition.as_ref().map(Vec::len).or(inst.k);
    match (cli.k, from_file) {
        (Some(0), _) => Err(input_error("--k: must be at least 1")),
        (Some(k), Some(f)) if inst.partition.is_some() && k != f => Err(input_error(format!(
            "--k: {k} disagrees with the {f}-part partition in the input"
        ))),
        (Some(k), _) => Ok(k),
        (None, Some(f)) => Ok(f),
        (None, None) => Err(input_error("k: missing; give --k or a partition")),
    }
}

fn partition(
    cli: &Cli,
    command: &Command,
    inst: &mut Instance,
    limits: &Limits,
    report: &mut RunReport,
) -> Outcome<()> {
    let k = part_count(cli, inst)?;
    let n = inst.graph.n();
    inst.kind = Some(match command {
        Command::PartitionBranchings => PartitionKind::Branching,
        Command::PartitionBb => PartitionKind::BBranching,
        _ => PartitionKind::MatchingForest,
    });
    match command {
        Command::PartitionBranchings | Command::PartitionBb => {
            if !inst.graph.is_digraph() {
                return Err(input_error("edges: this subcommand takes a digraph (no edges)"));
            }
            let b = match command {
                Command::PartitionBb => inst.b.clone().ok_or_else(|| input_error("b: missing"))?,
                _ => vec![1; n],
            };
            let d = inst.digraph().clone();
            let initial = match &inst.partition {
                Some(_) => inst.arc_partition()?,
                None => partition_into_k_bbranchings(&d, &b, k, limits)?
                    .ok_or_else(|| Failure::No(format!("no partition into {k} parts exists")))?,
            };
            let out = match command {
                Command::PartitionBb => equitable_b_partition(&d, &b, &initial, limits)?,
                _ => equitable_branching_partition(&d, &initial, limits)?,
            };
            report.potentials(&out.potentials);
            inst.set_arc_partition(&out.parts);
        }
        _ => {
            let initial = match &inst.partition {
                Some(_) => inst.forest_partition()?,
                None => find_partition(&inst.graph, None, k, limits)?
                    .ok_or_else(|| Failure::No(format!("no partition into {k} parts exists")))?,
            };
            let out = equitable_mf_partition(&inst.graph, &initial, limits)?;
            report.potentials(&out.potentials);
            inst.set_forest_partition(&out.parts);
        }
    }
    let parts = inst.forest_partition()?;
    report.gaps = Some(Gaps::of(&inst.graph, &parts));
    if cli.verify {
        let checked = check_parts(inst)?.expect("partition was just set");
        equitable(inst, &checked).map_err(|e| input_error(format!("verification failed: {e}")))?;
        if report.final_potential > report.initial_potential {
            return Err(input_error("verification failed: potential increased"));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DecomposeOutput {
    kappa: usize,
    x: Vec<usize>,
    parts: Vec<Vec<usize>>,
}

fn run_decompose(
    cli: &Cli,
    inst: &Instance,
    q: DecomposeQueryFile,
    limits: &Limits,
    report: &mut RunReport,
) -> Outcome<()> {
    if !inst.graph.is_digraph() {
        return Err(input_error("edges: decompose takes a digraph (no edges)"));
    }
    let b = inst.b.clone().ok_or_else(|| input_error("b: missing"))?;
    let d = inst.digraph();
    let x = q.x.clone();
    let query = IdpQuery::from(q);
    let parts = decompose(d, &b, &x, &query, limits)?.ok_or_else(|| {
        Failure::No(format!("x is not a sum of {} b-branchings", query.kappa))
    })?;
    if cli.verify {
        check_decomposition(d, &b, &x, &query, &parts)
            .map_err(|e| input_error(format!("verification failed: {e}")))?;
    }
    let forests: Vec<MatchingForest> = parts
        .iter()
        .map(|p| MatchingForest::new(Vec::new(), p.clone()))
        .collect();
    report.gaps = Some(Gaps::of(&MixedGraph::from_digraph(d.clone()), &forests));
    write(
        cli,
        &DecomposeOutput {
            kappa: query.kappa,
            x,
            parts,
        },
    )
}
