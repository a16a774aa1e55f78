//! Command-line interface: `kernelize`, `solve`, `verify`, and `gen`.
//!
//! Exit codes:
//! * `kernelize` — 0 kernel produced, 1 instance decided early, 2 bad
//!   input/usage, 4 internal invariant violation;
//! * `solve` — 0 YES, 1 NO, 2 bad input/usage, 3 instance over the oracle
//!   limit;
//! * `verify` — 0 campaign clean, 1 disagreements or failed bounds, 2 bad
//!   configuration;
//! * `gen` — 0 on success, 2 bad usage.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::generate::{generate, Family, GenSpec};
use crate::graph::{Decision, Instance};
use crate::io::{
    build_report, parse_instance, report_to_json, serialize_instance,
    serialize_instance_with_id_map,
};
use crate::kernel::kernelize;
use crate::oracle::{exact_tds_with_limit, OracleError, DEFAULT_ORACLE_LIMIT};
use crate::verify::{report_json, run_verify, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DECIDED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TOO_LARGE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "wtds",
    version,
    about = "Weighted tree deletion set kernelization toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Shrink an instance to a decision-equivalent kernel
    Kernelize(KernelizeArgs),
    /// Decide a small instance exactly by exhaustive search
    Solve(SolveArgs),
    /// Run a randomized self-verification campaign
    Verify(VerifyArgs),
    /// Generate benchmark instances
    Gen(GenArgs),
}

#[derive(Args, Debug)]
pub struct KernelizeArgs {
    /// Input instance file
    pub input: PathBuf,
    /// Write the kernel here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write a JSON report here
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Suppress the stderr summary
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Input instance file
    pub input: PathBuf,
    /// Largest vertex count the exhaustive search accepts
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    pub oracle_limit: usize,
    /// Print only the YES/NO line
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Number of instances to check
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Campaign seed; a fixed seed reproduces the report byte for byte
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest instance size to generate
    #[arg(long, default_value_t = 10)]
    pub max_n: usize,
    /// Largest budget to generate
    #[arg(long, default_value_t = 3)]
    pub max_k: i64,
    /// Largest vertex weight to generate
    #[arg(long, default_value_t = 3)]
    pub max_weight: u64,
    /// Largest vertex count the oracle accepts
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    pub oracle_limit: usize,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Suppress the stderr summary
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Instance family: random | planted | theta | gadgets
    #[arg(long, default_value = "random")]
    pub family: String,
    /// How many instances to emit
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 12)]
    pub max_n: usize,
    #[arg(long, default_value_t = 3)]
    pub max_k: i64,
    #[arg(long, default_value_t = 3)]
    pub max_weight: u64,
    /// Edge probability for the random family
    #[arg(long, default_value_t = 0.3)]
    pub edge_probability: f64,
    /// Write `instance_NNNN.wtds` files into this directory (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Dispatches a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Kernelize(args) => cmd_kernelize(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Gen(args) => cmd_gen(&args),
    }
}

fn load_instance(path: &Path) -> Result<Instance, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn cmd_kernelize(args: &KernelizeArgs) -> i32 {
    let inst = match load_instance(&args.input) {
        Ok(inst) => inst,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let started = Instant::now();
    let rep = match kernelize(&inst) {
        Ok(rep) => rep,
        Err(e) => {
            eprintln!("error: kernelization failed: {e}");
            return EXIT_INTERNAL;
        }
    };
    let timings = BTreeMap::from([("total_ms".to_string(), started.elapsed().as_millis() as u64)]);
    let report = build_report(&inst, &rep, timings);

    let kernel_text = serialize_instance_with_id_map(&rep.kernel);
    if let Some(path) = &args.output {
        if let Err(e) = write_file(path, &kernel_text) {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    } else {
        print!("{kernel_text}");
    }
    if let Some(path) = &args.report {
        if let Err(e) = write_file(path, &report_to_json(&report)) {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    if !args.quiet {
        eprintln!(
            "kernelize: {} vertices -> {}, decided: {}, bounds: {}",
            report.input.vertices,
            report.kernel.vertices,
            report.decided,
            if report.bounds.iter().all(|b| b.satisfied) {
                "ok"
            } else {
                "VIOLATED"
            }
        );
    }
    if rep.decided.is_some() {
        EXIT_DECIDED
    } else {
        EXIT_OK
    }
}

pub fn cmd_solve(args: &SolveArgs) -> i32 {
    let inst = match load_instance(&args.input) {
        Ok(inst) => inst,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let answer = match exact_tds_with_limit(&inst, args.oracle_limit) {
        Ok(a) => a,
        Err(OracleError::TooLarge { vertices, limit }) => {
            eprintln!("error: instance has {vertices} vertices, exhaustive limit is {limit}");
            return EXIT_TOO_LARGE;
        }
    };
    println!("{}", answer.decision);
    if !args.quiet {
        if let Some(witness) = &answer.witness {
            let ids: Vec<String> = witness.deleted.iter().map(|v| v.index().to_string()).collect();
            println!("witness: [{}] weight {}", ids.join(" "), witness.weight(&inst));
        }
    }
    match answer.decision {
        Decision::Yes => EXIT_OK,
        Decision::No => EXIT_DECIDED,
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> i32 {
    let cfg = VerifyConfig {
        samples: args.samples,
        seed: args.seed,
        max_n: args.max_n,
        max_k: args.max_k,
        max_weight: args.max_weight,
        oracle_limit: args.oracle_limit,
    };
    let report = match run_verify(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let json = report_json(&report);
    if let Some(path) = &args.report {
        if let Err(e) = write_file(path, &json) {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    } else {
        print!("{json}");
    }
    if !args.quiet {
        eprintln!(
            "verify: {} instances ({} yes / {} no), {} disagreements, {} errors, bounds {}",
            report.samples_run,
            report.yes_instances,
            report.no_instances,
            report.disagreements.len(),
            report.errors.len(),
            if report.bounds_all_satisfied { "ok" } else { "VIOLATED" }
        );
    }
    if report.ok() {
        EXIT_OK
    } else {
        EXIT_DECIDED
    }
}

fn parse_family(name: &str) -> Option<Family> {
    match name {
        "random" => Some(Family::Random),
        "planted" => Some(Family::PlantedTds),
        "theta" => Some(Family::Theta),
        "gadgets" => Some(Family::DoubleEdgeGadgets),
        _ => None,
    }
}

pub fn cmd_gen(args: &GenArgs) -> i32 {
    let Some(family) = parse_family(&args.family) else {
        eprintln!(
            "error: unknown family `{}` (expected random, planted, theta, or gadgets)",
            args.family
        );
        return EXIT_USAGE;
    };
    if args.max_n == 0 || args.max_weight == 0 || args.max_k < 0 {
        eprintln!("error: max-n and max-weight must be positive and max-k nonnegative");
        return EXIT_USAGE;
    }
    let spec = GenSpec {
        family,
        n_min: 1,
        n_max: args.max_n,
        edge_probability: args.edge_probability,
        weight_min: 1,
        weight_max: args.max_weight,
        k_min: 0,
        k_max: args.max_k,
        seed: args.seed,
    };
    if let Some(dir) = &args.out {
        if let Err(e) = std::fs::create_dir_all(dir) {
            eprintln!("error: {}: {e}", dir.display());
            return EXIT_USAGE;
        }
        for (i, gen) in generate(&spec).take(args.count).enumerate() {
            let path = dir.join(format!("instance_{i:04}.wtds"));
            if let Err(e) = write_file(&path, &serialize_instance(&gen.instance)) {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
            println!("{}", path.display());
        }
    } else {
        for (i, gen) in generate(&spec).take(args.count).enumerate() {
            if args.count > 1 {
                println!("c --- instance {i}");
            }
            print!("{}", serialize_instance(&gen.instance));
        }
    }
    EXIT_OK
}
