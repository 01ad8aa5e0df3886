//! Command-line front end: generate instances, solve them with a chosen
//! method, and run the benchmark table.
//!
//! Exit codes: 0 success, 1 I/O or file-content failure, 2 bad flags,
//! 3 enumeration guard tripped.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dlsched_core::bench::{
    render_table, run_benchmark, BenchConfig, BenchError, ExactSolver, TableFormat,
};
use dlsched_core::instances::{
    batch_provenance, generate_batch, generate_instance, instance_to_string, read_instance,
    reference_rates, GenError, GenSpec, InstanceIoError, PRNG_NAME,
};
use dlsched_core::model::{Instance, SolveOutcome};
use dlsched_core::solvers::{
    solve_exact_bnb, solve_exact_enumeration, solve_heuristic, solve_ldr, solve_sdr, EnumOptions,
    HeuristicOptions, SolveError, DEFAULT_ENUM_GUARD,
};

#[derive(Parser)]
#[command(
    name = "dlsched",
    version,
    about = "Single-machine makespan minimization with deteriorating jobs and learning effects"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate seeded random instances
    Gen(GenArgs),
    /// Solve one instance with a chosen method
    Solve(SolveArgs),
    /// Compare exact, heuristic, and SDR across sizes
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of jobs per instance
    #[arg(long)]
    n: usize,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instances to generate; more than one produces a batch file
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Output path (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    ranges: RangeArgs,
}

#[derive(Args)]
struct RangeArgs {
    /// Deterioration-rate range LOW,HIGH
    #[arg(long, value_parser = parse_range, default_value = "0,6")]
    b_range: (f64, f64),
    /// Basic-processing-time range LOW,HIGH
    #[arg(long, value_parser = parse_range, default_value = "0.5,2.5")]
    a0_range: (f64, f64),
    /// Start-time range LOW,HIGH
    #[arg(long, value_parser = parse_range, default_value = "0.5,1.5")]
    t0_range: (f64, f64),
    /// Learning-index range LOW,HIGH
    #[arg(long, value_parser = parse_range, default_value = "0,1")]
    alpha_range: (f64, f64),
}

impl RangeArgs {
    fn to_spec(&self, seed: u64) -> GenSpec {
        GenSpec {
            b_range: self.b_range,
            a0_range: self.a0_range,
            t0_range: self.t0_range,
            alpha_range: self.alpha_range,
            seed,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file to read
    #[arg(long)]
    input: Option<PathBuf>,
    /// Use the built-in rate vector for this size (2..=10) instead of a
    /// file; requires --a0, --alpha, and --t0
    #[arg(long)]
    reference_n: Option<usize>,
    #[arg(long)]
    a0: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    t0: Option<f64>,
    /// Solution method
    #[arg(long, value_enum)]
    solver: SolverChoice,
    /// Worker threads for enumeration (defaults to available cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Refuse enumeration above this many jobs
    #[arg(long, default_value_t = DEFAULT_ENUM_GUARD)]
    enum_guard: usize,
    /// Enumerate past the guard anyway
    #[arg(long)]
    force: bool,
    /// Second-sequence variant: second-smallest rate in the SDR first pick
    #[arg(long)]
    second_smallest: bool,
    #[arg(long, value_enum, default_value_t = SolveFormat::Text)]
    format: SolveFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverChoice {
    /// Exhaustive permutation enumeration
    Exact,
    /// Pruned depth-first exact search
    Bnb,
    Sdr,
    Ldr,
    Heuristic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveFormat {
    Text,
    Csv,
}

#[derive(Args)]
struct BenchArgs {
    /// Sizes to run: "LO..HI" (inclusive) or a single "N"
    #[arg(long, value_parser = parse_n_set)]
    n: SizeSet,
    /// Replications per size
    #[arg(long, default_value_t = 30)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = BenchFormat::Markdown)]
    format: BenchFormat,
    /// Output path (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Exact reference solver
    #[arg(long, value_enum, default_value_t = ExactChoice::Enum)]
    exact: ExactChoice,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ENUM_GUARD)]
    enum_guard: usize,
    #[arg(long)]
    force: bool,
    #[arg(long)]
    second_smallest: bool,
    #[command(flatten)]
    ranges: RangeArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchFormat {
    Csv,
    Markdown,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExactChoice {
    Enum,
    Bnb,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (low, high) = s
        .split_once(',')
        .ok_or_else(|| format!("expected LOW,HIGH, got {s:?}"))?;
    let low: f64 = low.trim().parse().map_err(|e| format!("bad low bound {low:?}: {e}"))?;
    let high: f64 = high.trim().parse().map_err(|e| format!("bad high bound {high:?}: {e}"))?;
    Ok((low, high))
}

/// Instance sizes parsed from "LO..HI" or "N"; a newtype so clap takes the
/// whole set as one value.
#[derive(Clone)]
struct SizeSet(Vec<usize>);

fn parse_n_set(s: &str) -> Result<SizeSet, String> {
    let parse_one = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad job count {v:?}: {e}"))
    };
    let set: Vec<usize> = if let Some((low, high)) = s.split_once("..") {
        let (low, high) = (parse_one(low)?, parse_one(high)?);
        if low > high {
            return Err(format!("empty size range {s:?}"));
        }
        (low..=high).collect()
    } else {
        vec![parse_one(s)?]
    };
    if set.contains(&0) {
        return Err("n must be at least 1".to_string());
    }
    Ok(SizeSet(set))
}

enum CliError {
    /// Bad flag values or combinations (exit 2).
    Usage(String),
    /// I/O failures and unreadable files (exit 1).
    Io(String),
    /// Enumeration guard tripped (exit 3).
    Guard(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
            CliError::Guard(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Guard(m) => m,
        }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::TooLarge { .. } => {
                CliError::Guard(format!("{e}; rerun with --force to override"))
            }
        }
    }
}

impl From<InstanceIoError> for CliError {
    fn from(e: InstanceIoError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Solve(inner) => inner.into(),
            BenchError::Gen(inner) => inner.into(),
            other => CliError::Io(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(usize::from).unwrap_or(1)
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => {
            let mut file = File::create(path)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
            file.write_all(content.as_bytes())?;
        }
        None => {
            io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".to_string()));
    }
    if args.count == 0 {
        return Err(CliError::Usage("--count must be at least 1".to_string()));
    }
    let spec = args.ranges.to_spec(args.seed);
    let provenance = batch_provenance(&spec, args.n, args.count);

    let mut content = String::new();
    if args.count == 1 {
        let instance = generate_instance(&spec, args.n)?;
        for line in &provenance {
            writeln!(content, "# {line}").expect("string write");
        }
        content.push_str(&instance_to_string(&instance));
    } else {
        let batch = generate_batch(&spec, args.n, args.count)?;
        let mut buf = Vec::new();
        dlsched_core::instances::write_batch(&mut buf, &batch, &provenance)?;
        content.push_str(&String::from_utf8(buf).expect("batch text is ASCII"));
    }
    write_output(args.output.as_deref(), &content)?;
    for line in &provenance {
        eprintln!("# {line}");
    }
    Ok(())
}

fn load_solve_instance(args: &SolveArgs) -> Result<Instance, CliError> {
    match (&args.input, args.reference_n) {
        (Some(_), Some(_)) => {
            Err(CliError::Usage("--input and --reference-n are mutually exclusive".to_string()))
        }
        (None, None) => {
            Err(CliError::Usage("exactly one of --input or --reference-n is required".to_string()))
        }
        (Some(path), None) => {
            let file = File::open(path)
                .map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
            Ok(read_instance(&mut BufReader::new(file))?)
        }
        (None, Some(n)) => {
            let rates = reference_rates()
                .into_iter()
                .find(|(size, _)| *size == n)
                .map(|(_, b)| b)
                .ok_or_else(|| {
                    CliError::Usage(format!("--reference-n must be in 2..=10, got {n}"))
                })?;
            let missing: Vec<&str> = [
                ("--a0", args.a0.is_none()),
                ("--alpha", args.alpha.is_none()),
                ("--t0", args.t0.is_none()),
            ]
            .iter()
            .filter_map(|&(flag, absent)| absent.then_some(flag))
            .collect();
            if !missing.is_empty() {
                return Err(CliError::Usage(format!(
                    "--reference-n also needs {}",
                    missing.join(", ")
                )));
            }
            Instance::new(args.a0.unwrap(), args.alpha.unwrap(), args.t0.unwrap(), rates)
                .map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let instance = load_solve_instance(&args)?;
    if instance.t0() == 0.0 {
        eprintln!("note: instance starts at t0 = 0");
    }
    let heuristic_options = HeuristicOptions { second_smallest_variant: args.second_smallest };
    let enum_options = EnumOptions {
        workers: args.workers.unwrap_or_else(default_workers),
        count_evaluated: false,
        guard: args.enum_guard,
        force: args.force,
    };
    let outcome: SolveOutcome = match args.solver {
        SolverChoice::Exact => solve_exact_enumeration(&instance, &enum_options)?.outcome,
        SolverChoice::Bnb => solve_exact_bnb(&instance),
        SolverChoice::Sdr => solve_sdr(&instance),
        SolverChoice::Ldr => solve_ldr(&instance),
        SolverChoice::Heuristic => solve_heuristic(&instance, &heuristic_options),
    };

    let schedule = outcome.schedule();
    let completions: Vec<String> =
        schedule.completion_times().iter().map(|c| c.to_string()).collect();
    let mut out = String::new();
    match args.format {
        SolveFormat::Text => {
            writeln!(out, "solver: {}", outcome.solver()).expect("string write");
            writeln!(out, "n: {}", instance.n()).expect("string write");
            writeln!(out, "sequence: {}", schedule.sequence()).expect("string write");
            writeln!(out, "completions: {}", completions.join(" ")).expect("string write");
            writeln!(out, "makespan: {}", schedule.makespan()).expect("string write");
            writeln!(out, "wall_s: {:.6}", outcome.wall_time().as_secs_f64()).expect("string write");
        }
        SolveFormat::Csv => {
            writeln!(out, "solver,n,sequence,completions,makespan,wall_s").expect("string write");
            writeln!(
                out,
                "{},{},{},{},{},{:.6}",
                outcome.solver(),
                instance.n(),
                schedule.sequence(),
                completions.join(" "),
                schedule.makespan(),
                outcome.wall_time().as_secs_f64()
            )
            .expect("string write");
        }
    }
    io::stdout().write_all(out.as_bytes())?;
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    if args.n.0.is_empty() {
        return Err(CliError::Usage("--n is required".to_string()));
    }
    if args.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".to_string()));
    }
    let config = BenchConfig {
        n_set: args.n.0.clone(),
        replications: args.reps,
        gen: args.ranges.to_spec(args.seed),
        exact: match args.exact {
            ExactChoice::Enum => ExactSolver::Enumeration,
            ExactChoice::Bnb => ExactSolver::BranchAndBound,
        },
        enum_options: EnumOptions {
            workers: args.workers.unwrap_or_else(default_workers),
            count_evaluated: false,
            guard: args.enum_guard,
            force: args.force,
        },
        heuristic: HeuristicOptions { second_smallest_variant: args.second_smallest },
    };

    let provenance = format!(
        "seed={} prng={PRNG_NAME} reps={} n={:?} exact={} second_smallest={}",
        args.seed,
        args.reps,
        args.n.0,
        match args.exact {
            ExactChoice::Enum => "enum",
            ExactChoice::Bnb => "bnb",
        },
        args.second_smallest
    );

    let table = run_benchmark(&config)?;
    let rendered = match args.format {
        // CSV stays machine-parseable: provenance goes to stderr only
        BenchFormat::Csv => {
            eprintln!("# {provenance}");
            render_table(&table, TableFormat::Csv)?
        }
        BenchFormat::Markdown => {
            let body = render_table(&table, TableFormat::Markdown)?;
            format!("{provenance}\n\n{body}")
        }
    };
    write_output(args.output.as_deref(), &rendered)?;
    Ok(())
}
