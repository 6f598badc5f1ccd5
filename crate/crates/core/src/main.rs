use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rap_core::io::{bench, generate, read_instance, write_bench_csv, write_instance, GenMode, GeneratorSpec, Suite};
use rap_core::oracle::brute_force_optimum;
use rap_core::solver::{prepare, walk_back, SolveOptions, Strategy};
use rap_core::RapError;

/// Exact redundancy allocation for series-parallel systems.
#[derive(Parser, Debug)]
#[command(name = "rap", version, about, long_about = None)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance file and print the report as JSON.
    Solve {
        file: PathBuf,
        #[arg(long, default_value = "bestfirst")]
        strategy: Strategy,
        /// Worker threads used to expand search nodes.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        /// Stop at the first reliable point found (no optimality proof).
        #[arg(long)]
        early_stop: bool,
    },
    /// Generate a random instance.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.99)]
        rmin: f64,
        #[arg(long, default_value_t = 0.998)]
        rmax: f64,
        #[arg(long, default_value_t = 10)]
        cmin: i64,
        #[arg(long, default_value_t = 20)]
        cmax: i64,
        #[arg(long, default_value_t = 4)]
        umax: i64,
        #[arg(long, default_value_t = 0.90)]
        r0: f64,
        #[arg(long, default_value = "uniform")]
        mode: GenMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Brute-force optimum of a small instance, as JSON.
    Oracle { file: PathBuf },
    /// Print the test set of an instance, one move per line.
    Testset { file: PathBuf },
    /// Run a benchmark suite and write CSV.
    Bench {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "bestfirst")]
        strategy: Strategy,
        /// Restrict to rows given as `n:k`; may be repeated.
        #[arg(long = "row", value_parser = parse_row)]
        rows: Vec<(usize, usize)>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

fn parse_row(s: &str) -> Result<(usize, usize), String> {
    let (n, k) = s.split_once(':').ok_or("expected n:k")?;
    Ok((n.parse().map_err(|e| format!("{e}"))?, k.parse().map_err(|e| format!("{e}"))?))
}

fn exit_code(e: &RapError) -> u8 {
    match e {
        RapError::Parse(_) | RapError::Io(_) | RapError::InvalidInstance(_) => 2,
        RapError::Infeasible { .. } | RapError::EmptySubsystemBound { .. } => 3,
        RapError::BudgetTooSmall { .. } | RapError::EnumerationTooLarge { .. } => 4,
        _ => 1,
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, RapError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(command: Command) -> Result<(), RapError> {
    match command {
        Command::Solve { file, strategy, parallel, early_stop } => {
            let inst = read_instance(&file)?;
            let p = prepare(&inst)?;
            let report = walk_back(&p.ninst, &p.testset, &p.y0, &SolveOptions { strategy, parallel, early_stop })?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        }
        Command::Generate { n, k, rmin, rmax, cmin, cmax, umax, r0, mode, seed, output: out } => {
            let spec = GeneratorSpec { n, k, rmin, rmax, cmin, cmax, umax, r0, mode, seed };
            let inst = generate(&spec)?;
            let mut w = output(out.as_deref())?;
            writeln!(w, "{}", write_instance(&inst))?;
        }
        Command::Oracle { file } => {
            let result = brute_force_optimum(&read_instance(&file)?)?;
            println!("{}", serde_json::to_string_pretty(&result).expect("result serializes"));
        }
        Command::Testset { file } => {
            let p = prepare(&read_instance(&file)?)?;
            print!("{}", p.testset.dump());
        }
        Command::Bench { suite, reps, seed, strategy, rows, output: out } => {
            let only = (!rows.is_empty()).then_some(rows.as_slice());
            let result = bench(suite, reps, seed, &SolveOptions::with_strategy(strategy), only)?;
            write_bench_csv(output(out.as_deref())?, suite, seed, &result)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
