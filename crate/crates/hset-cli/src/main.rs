use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hset_cli::bench::{run_case, to_csv, BenchCase, BenchKind, BenchRow};
use hset_cli::eval::eval_str;
use hset_cli::mcmc_cmd::{run_job, McmcJob};
use hset_core::operations::{OpName, Semantic};

#[derive(Parser)]
#[command(name = "hset", version, about = "Set and multiset toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a set expression or relation and print the result.
    ///
    /// Literals: {1,2,{3}} or {1[2],2.5[0.5]} with multiplicities.
    /// Operators: & | + - ^ (left-associative; suffix ~ copies, as in
    /// "-~"). Relations: <= < == =<= =< and "2 in {1,2}".
    Eval { expr: String },
    /// Time membership queries or operations over a size grid, CSV to
    /// stdout.
    Bench(BenchArgs),
    /// Sample the random-graph model from three starts and write
    /// traces to a directory.
    Mcmc(McmcArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Inclusion,
    Operation,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OpArg {
    Intersection,
    Union,
    Sum,
    Difference,
    Symmdiff,
}

impl From<OpArg> for OpName {
    fn from(op: OpArg) -> OpName {
        match op {
            OpArg::Intersection => OpName::Intersection,
            OpArg::Union => OpName::Union,
            OpArg::Sum => OpName::Sum,
            OpArg::Difference => OpName::Difference,
            OpArg::Symmdiff => OpName::SymmDiff,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SemanticArg {
    Refer,
    Value,
}

#[derive(Args)]
struct BenchArgs {
    /// What to time.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Operation to time; required with --kind operation.
    #[arg(long, value_enum)]
    op: Option<OpArg>,
    /// Copy semantics for operation cases.
    #[arg(long, value_enum, default_value = "refer")]
    semantic: SemanticArg,
    /// Comma-separated first-operand sizes.
    #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000,8000")]
    grid: Vec<usize>,
    /// Second-operand size for operation cases.
    #[arg(long, default_value_t = 100)]
    size2: usize,
    /// Queries per timed batch for inclusion cases.
    #[arg(long, default_value_t = 100)]
    batch: usize,
    /// Timing samples per case; the median is reported.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Use multiset operands instead of sets.
    #[arg(long)]
    multiset: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct McmcArgs {
    /// Number of vertices (at least 2).
    #[arg(long)]
    n: usize,
    /// Iterations per chain (at least 1).
    #[arg(long)]
    iters: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Read model parameters from a file, one per line, instead of
    /// sampling them.
    #[arg(long)]
    beta_file: Option<PathBuf>,
    /// Moving-average window for the acceptance trace.
    #[arg(long, default_value_t = 150)]
    window: usize,
    /// Iterations between degree-distribution snapshots.
    #[arg(long, default_value_t = 1000)]
    snapshot_every: u64,
    /// Output directory, created if missing.
    #[arg(long, default_value = "mcmc_out")]
    out_dir: PathBuf,
}

fn run_bench(args: &BenchArgs) -> Result<(), String> {
    if args.repeats < 3 {
        return Err("--repeats must be at least 3".into());
    }
    if args.grid.is_empty() || args.grid.contains(&0) {
        return Err("--grid needs positive sizes".into());
    }
    let (kind, op) = match args.kind {
        KindArg::Inclusion => (BenchKind::Inclusion, None),
        KindArg::Operation => {
            let op = args.op.ok_or("--kind operation requires --op")?;
            (BenchKind::Operation, Some(OpName::from(op)))
        }
    };
    if kind == BenchKind::Inclusion && args.batch == 0 {
        return Err("--batch must be positive".into());
    }
    let semantic = match args.semantic {
        SemanticArg::Refer => Semantic::Refer,
        SemanticArg::Value => Semantic::Value,
    };
    let rows: Vec<BenchRow> = args
        .grid
        .iter()
        .enumerate()
        .map(|(idx, &size1)| {
            run_case(&BenchCase {
                kind,
                op,
                semantic,
                size1,
                size2: args.size2,
                batch: args.batch,
                repeats: args.repeats,
                generalized: args.multiset,
                seed: args.seed + idx as u64,
            })
        })
        .collect();
    print!("{}", to_csv(&rows));
    Ok(())
}

fn run_mcmc(args: &McmcArgs) -> Result<(), String> {
    let job = McmcJob {
        n: args.n,
        iterations: args.iters,
        seed: args.seed,
        beta_file: args.beta_file.clone(),
        window: args.window,
        snapshot_every: args.snapshot_every,
        out_dir: args.out_dir.clone(),
    };
    let report = run_job(&job).map_err(|e| e.to_string())?;
    println!("parameters: {}", report.beta_path.display());
    for chain in &report.chains {
        println!(
            "{}: acceptance {:.4}, final ties {} ({}, {})",
            chain.start.label(),
            chain.acceptance_rate,
            chain.final_ties,
            chain.trace_path.display(),
            chain.ecdf_path.display()
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Eval { expr } => {
            let out = eval_str(&expr)?;
            println!("{out}");
            Ok(())
        }
        Command::Bench(args) => run_bench(&args),
        Command::Mcmc(args) => run_mcmc(&args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
