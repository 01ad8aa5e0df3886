//! Experiment harness: run the exact, heuristic, and SDR solvers over
//! generated instances and tabulate makespans, solve times, and error
//! percentages against the exact optimum.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::instances::{derive_seed, generate_instance, GenError, GenSpec};
use crate::model::Sequence;
use crate::solvers::{
    solve_exact_bnb, solve_exact_enumeration, solve_heuristic, solve_sdr, EnumOptions,
    HeuristicOptions, SolveError,
};

/// Negative errors up to this relative size are treated as float noise and
/// clamped to zero; anything larger means the "exact" reference is broken.
pub const ERROR_CLAMP_RTOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("optimal makespan must be positive, got {0}")]
    NonPositiveOptimum(f64),
    #[error("algorithm makespan {alg} is below the exact optimum {opt}: the exact reference is inconsistent")]
    InconsistentOptimum { alg: f64, opt: f64 },
    #[error("table has no rows")]
    EmptyTable,
    #[error("unknown table format {0:?}; expected \"csv\" or \"markdown\"")]
    UnknownFormat(String),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// `100 * (alg - opt) / opt`, clamped to 0 when a tiny negative value is
/// pure float noise.
pub fn error_percentage(alg_makespan: f64, opt_makespan: f64) -> Result<f64, BenchError> {
    if opt_makespan.is_nan() || opt_makespan <= 0.0 {
        return Err(BenchError::NonPositiveOptimum(opt_makespan));
    }
    let err = 100.0 * (alg_makespan - opt_makespan) / opt_makespan;
    if err >= 0.0 {
        Ok(err)
    } else if err >= -100.0 * ERROR_CLAMP_RTOL {
        Ok(0.0)
    } else {
        Err(BenchError::InconsistentOptimum { alg: alg_makespan, opt: opt_makespan })
    }
}

/// One benchmark instance: makespans, solve times (seconds), and error
/// percentages of each method, plus the sequences behind them.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub n: usize,
    pub instance_id: String,
    pub makespan_exact: f64,
    pub makespan_heuristic: f64,
    pub makespan_sdr: f64,
    pub time_exact: f64,
    pub time_heuristic: f64,
    pub time_sdr: f64,
    pub err_heuristic: f64,
    pub err_sdr: f64,
    pub seq_exact: Sequence,
    pub seq_heuristic: Sequence,
    pub seq_sdr: Sequence,
}

/// All rows of a run plus the arithmetic means of the error columns.
#[derive(Debug, Clone)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
    pub mean_err_heuristic: f64,
    pub mean_err_sdr: f64,
}

impl BenchTable {
    pub fn from_rows(rows: Vec<BenchRow>) -> Result<Self, BenchError> {
        if rows.is_empty() {
            return Err(BenchError::EmptyTable);
        }
        let len = rows.len() as f64;
        let mean_err_heuristic = rows.iter().map(|r| r.err_heuristic).sum::<f64>() / len;
        let mean_err_sdr = rows.iter().map(|r| r.err_sdr).sum::<f64>() / len;
        Ok(Self { rows, mean_err_heuristic, mean_err_sdr })
    }
}

/// Which exact method provides the optimum column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExactSolver {
    #[default]
    Enumeration,
    BranchAndBound,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Instance sizes to run, in order.
    pub n_set: Vec<usize>,
    /// Instances per size.
    pub replications: usize,
    /// Generation ranges and the base seed; replication `k` of the `i`-th
    /// size uses `derive_seed(gen.seed, i * replications + k)`.
    pub gen: GenSpec,
    pub exact: ExactSolver,
    pub enum_options: EnumOptions,
    pub heuristic: HeuristicOptions,
}

impl BenchConfig {
    /// 30 replications per size with the default generation ranges.
    pub fn new(n_set: Vec<usize>, seed: u64) -> Self {
        Self {
            n_set,
            replications: 30,
            gen: GenSpec::with_seed(seed),
            exact: ExactSolver::default(),
            enum_options: EnumOptions::default(),
            heuristic: HeuristicOptions::default(),
        }
    }
}

/// Runs every `(n, replication)` cell: generate, solve with the exact
/// reference, the heuristic, and SDR, and tabulate. Makespans and sequences
/// are fully determined by the config; only the time columns vary.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchTable, BenchError> {
    let mut rows = Vec::with_capacity(config.n_set.len() * config.replications);
    let mut stream = 0u64;
    for &n in &config.n_set {
        for rep in 0..config.replications {
            let spec = GenSpec { seed: derive_seed(config.gen.seed, stream), ..config.gen.clone() };
            stream += 1;
            let instance = generate_instance(&spec, n)?;

            let exact = match config.exact {
                ExactSolver::Enumeration => {
                    solve_exact_enumeration(&instance, &config.enum_options)?.outcome
                }
                ExactSolver::BranchAndBound => solve_exact_bnb(&instance),
            };
            let heuristic = solve_heuristic(&instance, &config.heuristic);
            let sdr = solve_sdr(&instance);

            let opt = exact.schedule().makespan();
            rows.push(BenchRow {
                n,
                instance_id: format!("n{n:02}r{rep:02}"),
                makespan_exact: opt,
                makespan_heuristic: heuristic.schedule().makespan(),
                makespan_sdr: sdr.schedule().makespan(),
                time_exact: exact.wall_time().as_secs_f64(),
                time_heuristic: heuristic.wall_time().as_secs_f64(),
                time_sdr: sdr.wall_time().as_secs_f64(),
                err_heuristic: error_percentage(heuristic.schedule().makespan(), opt)?,
                err_sdr: error_percentage(sdr.schedule().makespan(), opt)?,
                seq_exact: exact.schedule().sequence().clone(),
                seq_heuristic: heuristic.schedule().sequence().clone(),
                seq_sdr: sdr.schedule().sequence().clone(),
            });
        }
    }
    BenchTable::from_rows(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl FromStr for TableFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "markdown" => Ok(TableFormat::Markdown),
            other => Err(BenchError::UnknownFormat(other.to_string())),
        }
    }
}

/// CSV column order; the markdown render uses the same cells.
pub const CSV_HEADER: &str =
    "n,instance_id,mk_exact,mk_heur,mk_sdr,t_exact,t_heur,t_sdr,err_heur,err_sdr";

/// Makespans at 3 decimals; seconds and percentages at 2.
fn row_cells(row: &BenchRow) -> [String; 10] {
    [
        row.n.to_string(),
        row.instance_id.clone(),
        format!("{:.3}", row.makespan_exact),
        format!("{:.3}", row.makespan_heuristic),
        format!("{:.3}", row.makespan_sdr),
        format!("{:.2}", row.time_exact),
        format!("{:.2}", row.time_heuristic),
        format!("{:.2}", row.time_sdr),
        format!("{:.2}", row.err_heuristic),
        format!("{:.2}", row.err_sdr),
    ]
}

fn mean_cells(table: &BenchTable) -> [String; 10] {
    let empty = String::new;
    [
        "mean".to_string(),
        empty(),
        empty(),
        empty(),
        empty(),
        empty(),
        empty(),
        empty(),
        format!("{:.2}", table.mean_err_heuristic),
        format!("{:.2}", table.mean_err_sdr),
    ]
}

/// Renders the table with a trailing mean row. Both formats share the cell
/// formatter, so their numeric strings are identical.
pub fn render_table(table: &BenchTable, format: TableFormat) -> Result<String, BenchError> {
    if table.rows.is_empty() {
        return Err(BenchError::EmptyTable);
    }
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for row in &table.rows {
                out.push_str(&row_cells(row).join(","));
                out.push('\n');
            }
            out.push_str(&mean_cells(table).join(","));
            out.push('\n');
        }
        TableFormat::Markdown => {
            let header: Vec<&str> = CSV_HEADER.split(',').collect();
            writeln!(out, "| {} |", header.join(" | ")).expect("string write");
            writeln!(out, "|{}|", vec!["---"; header.len()].join("|")).expect("string write");
            for row in &table.rows {
                writeln!(out, "| {} |", row_cells(row).join(" | ")).expect("string write");
            }
            writeln!(out, "| {} |", mean_cells(table).join(" | ")).expect("string write");
        }
    }
    Ok(out)
}
