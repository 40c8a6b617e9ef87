//! `galois` — compute Galois groups of squarefree polynomials over Q_p.
//!
//! Subcommands:
//! * `compute` — one polynomial, printed as cycle-notation generators
//!   (or a JSON job record with `--json`).
//! * `batch` — newline-delimited JSON job records, run in parallel,
//!   results appended per line; `--summary` prints a group-order histogram.
//! * `oracle` — exhaustive simulated sweep over the transitive subgroups
//!   of an overgroup, reporting per-group success and query counts.
//!
//! Exit codes: 0 success, 1 computation failure, 2 usage error.

use std::io::{BufRead, Write};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use galois_core::choice::{GroupShape, TrancheMode};
use galois_core::engine::{
    galois_group, parse_params, simulated_run, Algorithm, ChooseSpec, GaloisResult,
};
use galois_core::perm::{is_conjugate, PermGroup};
use galois_core::stats::orbit_sizes;

#[derive(Parser)]
#[command(name = "galois", about = "Galois groups of polynomials over Q_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Galois group of one polynomial.
    Compute(ComputeArgs),
    /// Run a file of job records, appending results to each line.
    Batch(BatchArgs),
    /// Sweep a deduction strategy over all transitive subgroups of W
    /// using the exact simulated oracle.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct ComputeArgs {
    /// The prime p.
    #[arg(long)]
    p: u64,
    /// Ascending integer coefficients, e.g. "[-2,0,1]" for x^2 - 2.
    #[arg(long)]
    poly: String,
    /// Parameterization: a shorthand (A0..B2, 00) or a Seq/ARM expression.
    #[arg(long, default_value = "A0")]
    params: String,
    /// Emit the result as a JSON job record.
    #[arg(long)]
    json: bool,
    /// Seed for all pseudorandom choices (Tschirnhaus transformations).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BatchArgs {
    /// File of newline-delimited JSON job records without results.
    file: String,
    /// Print a histogram of group orders after the batch.
    #[arg(long)]
    summary: bool,
    /// Worker thread count.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct OracleArgs {
    /// Overgroup: S<n>, A<n>, C<n>, or wreath products like S2wrS2wrS2.
    #[arg(long = "W")]
    w: String,
    /// Parameterization whose ARM leg supplies strategy, statistic and
    /// chooser (the model part is ignored: the oracle is exact).
    #[arg(long, default_value = "A2")]
    params: String,
    /// Prime used by the OrbitIndex chooser's valuation filter.
    #[arg(long, default_value_t = 2)]
    p: u64,
}

/// One batch job: inputs plus, after a run, results.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
struct JobRecord {
    prime: u64,
    /// Ascending coefficients as decimal strings.
    coefficients: Vec<String>,
    parameterization: String,
    #[serde(default)]
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    result: Option<JobResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
struct JobResult {
    /// Generators of the group, parseable by the library.
    group: String,
    order: u64,
    orbit_sizes: Vec<u64>,
    /// Degree of each resolvent evaluated, in order.
    resolvents: Vec<usize>,
    millis: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Compute(args) => cmd_compute(&args),
        Command::Batch(args) => cmd_batch(&args),
        Command::Oracle(args) => cmd_oracle(&args),
    }
}

fn parse_poly(text: &str) -> Result<Vec<BigInt>, String> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(|t| t.trim().parse::<BigInt>().map_err(|e| format!("bad coefficient '{t}': {e}")))
        .collect()
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn cmd_compute(args: &ComputeArgs) -> ExitCode {
    let poly = match parse_poly(&args.poly) {
        Ok(p) => p,
        Err(e) => return usage_error(&e),
    };
    let params = match parse_params(&args.params) {
        Ok(p) => p,
        Err(e) => return usage_error(&e.to_string()),
    };
    let start = Instant::now();
    match galois_group(args.p, &poly, &params, args.seed) {
        Ok(result) => {
            if args.json {
                let record = JobRecord {
                    prime: args.p,
                    coefficients: poly.iter().map(|c| c.to_string()).collect(),
                    parameterization: args.params.clone(),
                    seed: args.seed,
                    result: Some(job_result(&result, start.elapsed().as_millis() as u64)),
                    error: None,
                };
                println!("{}", serde_json::to_string(&record).expect("serializable"));
            } else {
                println!("group: {}", result.group.to_text());
                println!("order: {}", result.group.order());
                println!("orbits: {:?}", orbit_sizes(&result.group).entries());
                println!("algorithm: {}", result.algorithm);
                for line in &result.model_info {
                    println!("model: {line}");
                }
                for line in &result.trace {
                    println!("trace: {line}");
                }
                println!(
                    "resolvents: {} (degrees {:?})",
                    result.resolvent_degrees.len(),
                    result.resolvent_degrees
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn job_result(result: &GaloisResult, millis: u64) -> JobResult {
    JobResult {
        group: result.group.to_text(),
        order: result.group.order() as u64,
        orbit_sizes: orbit_sizes(&result.group).entries().to_vec(),
        resolvents: result.resolvent_degrees.clone(),
        millis,
    }
}

fn run_job(record: &mut JobRecord) {
    let poly: Result<Vec<BigInt>, String> = record
        .coefficients
        .iter()
        .map(|t| t.parse::<BigInt>().map_err(|e| format!("bad coefficient '{t}': {e}")))
        .collect();
    let outcome = poly
        .and_then(|poly| {
            parse_params(&record.parameterization)
                .map(|params| (poly, params))
                .map_err(|e| e.to_string())
        })
        .and_then(|(poly, params)| {
            let start = Instant::now();
            galois_group(record.prime, &poly, &params, record.seed)
                .map(|r| job_result(&r, start.elapsed().as_millis() as u64))
                .map_err(|e| e.to_string())
        });
    match outcome {
        Ok(result) => record.result = Some(result),
        Err(e) => record.error = Some(e),
    }
}

fn cmd_batch(args: &BatchArgs) -> ExitCode {
    let file = match std::fs::File::open(&args.file) {
        Ok(f) => f,
        Err(e) => return usage_error(&format!("cannot open {}: {e}", args.file)),
    };
    // Parse every line up front; malformed lines become error records so
    // the batch continues and output order stays by line index.
    let mut records: Vec<JobRecord> = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = match line {
            Ok(l) => l,
            Err(e) => return usage_error(&format!("read error: {e}")),
        };
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<JobRecord>(&line) {
            Ok(r) => records.push(r),
            Err(e) => records.push(JobRecord {
                prime: 0,
                coefficients: Vec::new(),
                parameterization: String::new(),
                seed: 0,
                result: None,
                error: Some(format!("line {}: malformed record: {e}", i + 1)),
            }),
        }
    }
    let cursor = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<JobRecord>>> =
        records.iter().map(|_| Mutex::new(None)).collect();
    let workers = args.jobs.max(1).min(records.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                let Some(record) = records.get(i) else { break };
                let mut record = record.clone();
                if record.error.is_none() {
                    run_job(&mut record);
                }
                *slots[i].lock().expect("worker panicked") = Some(record);
            });
        }
    });
    let done: Vec<JobRecord> = slots
        .into_iter()
        .map(|s| s.into_inner().expect("worker panicked").expect("job ran"))
        .collect();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for record in &done {
        writeln!(out, "{}", serde_json::to_string(record).expect("serializable")).ok();
    }
    if args.summary {
        let mut histogram: std::collections::BTreeMap<u64, usize> = Default::default();
        let mut failed = 0usize;
        for record in &done {
            match &record.result {
                Some(r) => *histogram.entry(r.order).or_default() += 1,
                None => failed += 1,
            }
        }
        writeln!(out, "summary: {} jobs, {} failed", done.len(), failed).ok();
        for (order, count) in histogram {
            writeln!(out, "  order {order}: {count}").ok();
        }
    }
    ExitCode::SUCCESS
}

/// Parses `S<n>`, `A<n>`, `C<n>`, and `wr`-joined wreath products
/// (innermost factor first, so `C2wrC3` is C_2 ≀ C_3 on 6 points).
fn parse_overgroup(text: &str) -> Result<GroupShape, String> {
    let mut shapes = Vec::new();
    for tok in text.split("wr") {
        let (family, size) = tok.split_at(1);
        let n: usize = size
            .parse()
            .map_err(|_| format!("bad group token '{tok}'"))?;
        shapes.push(match family {
            "S" => GroupShape::Symmetric(n),
            "A" => GroupShape::Explicit(PermGroup::alternating(n)),
            "C" => GroupShape::Explicit(PermGroup::cyclic(n)),
            _ => return Err(format!("bad group token '{tok}'")),
        });
    }
    Ok(if shapes.len() == 1 {
        shapes.pop().expect("nonempty")
    } else {
        GroupShape::Wreath(shapes)
    })
}

fn cmd_oracle(args: &OracleArgs) -> ExitCode {
    let shape = match parse_overgroup(&args.w) {
        Ok(s) => s,
        Err(e) => return usage_error(&e),
    };
    let params = match parse_params(&args.params) {
        Ok(p) => p,
        Err(e) => return usage_error(&e.to_string()),
    };
    let Some(arm) = params.algorithms.iter().find_map(|a| match a {
        Algorithm::Arm(arm) => Some(arm.clone()),
        Algorithm::Tame => None,
    }) else {
        return usage_error("parameterization has no ARM leg");
    };
    let w = shape.group();
    let mode = match arm.choose {
        ChooseSpec::All => TrancheMode::All,
        ChooseSpec::Index => TrancheMode::Index,
        ChooseSpec::OrbitIndex(k) => TrancheMode::OrbitIndex { p: args.p, max_val: Some(k) },
    };
    let hidden = match galois_core::perm::all_subgroup_classes(&w) {
        Ok(classes) => classes,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let mut failures = 0usize;
    let mut total = 0usize;
    for g in hidden.into_iter().filter(PermGroup::is_transitive) {
        total += 1;
        let kind = match arm.deduce {
            galois_core::engine::DeduceSpec::All => galois_core::deduce::StrategyKind::All,
            galois_core::engine::DeduceSpec::Maximal => {
                galois_core::deduce::StrategyKind::Maximal(Default::default())
            }
            galois_core::engine::DeduceSpec::Maximal2 => galois_core::deduce::StrategyKind::Maximal2,
        };
        match simulated_run(&shape, &g, kind, &arm.stat, &mode) {
            Ok((answer, queries)) => {
                let ok = matches!(is_conjugate(&w, &answer, &g), Ok(Some(_)));
                if !ok {
                    failures += 1;
                }
                println!(
                    "G of order {:>6}: {} in {} queries",
                    g.order(),
                    if ok { "recovered" } else { "WRONG ANSWER" },
                    queries
                );
            }
            Err(e) => {
                failures += 1;
                println!("G of order {:>6}: failed ({e})", g.order());
            }
        }
    }
    println!("sweep: {}/{} recovered", total - failures, total);
    ExitCode::SUCCESS
}
