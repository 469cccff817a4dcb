//! Command-line driver. Exit codes: 0 success, 1 usage or I/O error, 2
//! validation mismatch or failed self-test.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::closure::ceil_log2;
use crate::error::{Error, Result};
use crate::generate::{generate_graph, generate_points, GraphKind, GraphSpec, WeightDist};
use crate::io;
use crate::mmo::{tile_count, MmoConfig};
use crate::report::{Algorithm, Problem, RunReport};
use crate::selftest;
use crate::semiring::PrecisionMode;
use crate::solve::{solve, ProblemInput, SolveRequest};

#[derive(Debug, Parser)]
#[command(
    name = "semiring-mxu",
    version,
    about = "Tiled semiring matrix engine and graph closure solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a synthetic graph (edge list) or point set (dense matrix).
    Gen(GenArgs),
    /// Solve one problem instance.
    Solve(SolveArgs),
    /// Sweep sizes and tabulate iterations and tile operations.
    Bench(BenchArgs),
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// erdos_renyi, path, cycle, grid, dag_layered or points.
    #[arg(long, default_value = "erdos_renyi")]
    kind: String,
    /// Vertex count (or point count for `points`).
    #[arg(long)]
    n: usize,
    /// Coordinate dimension for `points`.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    /// uniform:LO:HI, int:LO:HI, pow2:MAXEXP or distinct.
    #[arg(long, default_value = "int:1:10")]
    weights: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    undirected: bool,
    #[arg(long)]
    connected: bool,
    #[arg(long, default_value = "exact32")]
    precision: String,
    /// Write here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// apsp, aplp, mcp, maxrp, minrp, mst, gtc or knn.
    problem: String,
    /// Edge list, or the query points (dense matrix) for knn.
    #[arg(long)]
    input: PathBuf,
    /// Reference points for knn (defaults to the queries).
    #[arg(long)]
    refs: Option<PathBuf>,
    /// Neighbours per query for knn.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// bf, leyzorek or oracle.
    #[arg(long, default_value = "leyzorek")]
    algo: String,
    #[arg(long, default_value = "exact32")]
    precision: String,
    /// Compare against the oracle; exit 2 on mismatch.
    #[arg(long)]
    validate: bool,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Run the worst-case iteration count without checking for a fixpoint.
    #[arg(long)]
    no_convergence_check: bool,
    /// Write the JSON run report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the result matrix here.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, default_value = "apsp")]
    problem: String,
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',', default_values_t = [16usize, 32, 64, 128])]
    sizes: Vec<usize>,
    /// Graph family for the sweep.
    #[arg(long, default_value = "path")]
    kind: String,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value = "int:1:10")]
    weights: String,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', default_values_t = ["bf".to_string(), "leyzorek".to_string()])]
    algos: Vec<String>,
    #[arg(long, default_value = "exact32")]
    precision: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_convergence_check: bool,
    /// Write the JSON array of run reports here.
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Bench(a) => bench(a),
        Command::Selftest => Ok(run_selftest()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(p) => io::write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gen(a: GenArgs) -> Result<i32> {
    let precision: PrecisionMode = a.precision.parse()?;
    let weights: WeightDist = a.weights.parse()?;
    if a.kind == "points" {
        let pts = generate_points(a.n, a.dim, weights, a.seed, precision)?;
        emit(a.output.as_ref(), &io::format_dense_matrix(&pts))?;
        return Ok(0);
    }
    let spec = GraphSpec {
        kind: a.kind.parse()?,
        n: a.n,
        density: a.density,
        weights,
        seed: a.seed,
        directed: !a.undirected,
        connected: a.connected,
        precision,
    };
    let g = generate_graph(&spec)?;
    emit(a.output.as_ref(), &io::format_edge_list(&g))?;
    Ok(0)
}

fn solve_cmd(a: SolveArgs) -> Result<i32> {
    let problem: Problem = a.problem.parse()?;
    let req = SolveRequest {
        algorithm: a.algo.parse()?,
        precision: a.precision.parse()?,
        validate: a.validate,
        max_iter: a.max_iter,
        convergence_check: !a.no_convergence_check,
        mmo: MmoConfig::default(),
    };
    let input = if problem == Problem::Knn {
        let points = io::parse_dense_matrix(&a.input, req.precision)?;
        let refs = match &a.refs {
            Some(p) => io::parse_dense_matrix(p, req.precision)?,
            None => points.clone(),
        };
        ProblemInput::Points { points, refs, k: a.k }
    } else {
        ProblemInput::Graph(io::parse_edge_list(&a.input)?)
    };
    let out = solve(problem, &input, &req)?;
    let json = out.report.to_json();
    if let Some(p) = &a.report {
        io::write_file(p, &format!("{json}\n"))?;
    }
    if let Some(p) = &a.output {
        io::write_dense_matrix(p, &out.matrix)?;
    }
    println!("{json}");
    if let Some(idx) = &out.indices {
        for (q, row) in idx.iter().enumerate() {
            let row: Vec<String> = row.iter().map(usize::to_string).collect();
            println!("{q}: {}", row.join(" "));
        }
    }
    match out.report.validation {
        Some(v) if !v.matched => {
            eprintln!("validation mismatch: max_abs_diff = {}", v.max_abs_diff);
            Ok(2)
        }
        _ => Ok(0),
    }
}

fn bench(a: BenchArgs) -> Result<i32> {
    let problem: Problem = a.problem.parse()?;
    if problem == Problem::Knn {
        return Err(Error::Config(
            "bench sweeps graph problems; use solve for knn".into(),
        ));
    }
    let kind: GraphKind = a.kind.parse()?;
    let weights: WeightDist = a.weights.parse()?;
    let precision: PrecisionMode = a.precision.parse()?;
    let algos = a
        .algos
        .iter()
        .map(|s| s.parse::<Algorithm>())
        .collect::<Result<Vec<_>>>()?;

    let mut reports: Vec<RunReport> = Vec::new();
    println!(
        "{:<8} {:>6} {:<13} {:>10} {:>7} {:>12} {:>16} {:>12}",
        "problem", "n", "algorithm", "converged", "iters", "tile_ops", "iters*tiles(n)", "wall_s"
    );
    for &n in &a.sizes {
        let spec = GraphSpec {
            density: a.density,
            weights,
            precision,
            directed: problem != Problem::Mst,
            connected: true,
            ..GraphSpec::new(kind, n, a.seed)
        };
        let g = generate_graph(&spec)?;
        for &algorithm in &algos {
            let req = SolveRequest {
                algorithm,
                precision,
                validate: false,
                max_iter: None,
                convergence_check: !a.no_convergence_check,
                mmo: MmoConfig::bench(),
            };
            let r = solve(problem, &ProblemInput::Graph(g.clone()), &req)?.report;
            println!(
                "{:<8} {:>6} {:<13} {:>10} {:>7} {:>12} {:>16} {:>12.6}",
                problem.name(),
                n,
                format!("{algorithm:?}"),
                r.converged,
                r.iterations,
                r.tile_ops,
                r.iterations * tile_count(n, n, n),
                r.wall_time_seconds
            );
            reports.push(r);
        }
        println!("{:<8} {:>6} ceil(log2 n) + 1 = {}", "", n, ceil_log2(n) + 1);
    }
    if let Some(p) = &a.report {
        let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
        io::write_file(p, &format!("{json}\n"))?;
    }
    Ok(0)
}

fn run_selftest() -> i32 {
    let mut failed = 0;
    for check in selftest::run() {
        match check.outcome {
            Ok(()) => println!("PASS {}", check.name),
            Err(msg) => {
                failed += 1;
                println!("FAIL {}: {msg}", check.name);
            }
        }
    }
    if failed == 0 {
        0
    } else {
        2
    }
}
