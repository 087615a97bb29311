use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Exact counts, asymptotic estimates and Gibbs-model diagnostics for
/// bipartite partitions.
#[derive(Debug, Parser)]
#[command(name = "bipart", version)]
struct Cli {
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Maximum number of table cells the exact counter may allocate.
    #[arg(long, global = true, env = "BIPART_CELL_BUDGET")]
    cell_budget: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact number of partitions of (n1, n2).
    Count(CountArgs),
    /// Exact coefficients of the small-n1 expansions.
    Coeffs(CoeffsArgs),
    /// Exact counts against the asymptotic formula along n1 = t·√n2.
    Compare(CompareArgs),
    /// Rate functions h and hbar on a linear grid.
    Rates(RatesArgs),
    /// Boltzmann samples at the calibrated parameters.
    Sample(SampleArgs),
    /// Local limit check at a single target.
    Llt(LltArgs),
}

#[derive(Debug, Args)]
struct CountArgs {
    #[arg(long)]
    n1: usize,
    #[arg(long)]
    n2: usize,
    #[arg(long, default_value = "strict")]
    parts: bipart_core::PartSet,
    /// Dump the whole table up to (n1, n2) as CSV.
    #[arg(long)]
    table: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Variant {
    C,
    Cbar,
}

#[derive(Debug, Args)]
struct CoeffsArgs {
    #[arg(long, value_enum)]
    variant: Variant,
    #[arg(long)]
    order: usize,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long, default_value = "strict")]
    parts: bipart_core::PartSet,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, value_delimiter = ',', default_value = "100,225,400,625,900")]
    n2_grid: Vec<usize>,
}

#[derive(Debug, Args)]
struct RatesArgs {
    #[arg(long, default_value_t = 0.01)]
    t_min: f64,
    #[arg(long, default_value_t = 4.0)]
    t_max: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    n1: usize,
    #[arg(long)]
    n2: usize,
    #[arg(long, default_value = "strict")]
    parts: bipart_core::PartSet,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Total-variation budget for truncating the part set.
    #[arg(long, default_value_t = 1e-4)]
    tv_budget: f64,
}

#[derive(Debug, Args)]
struct LltArgs {
    #[arg(long)]
    n1: usize,
    #[arg(long)]
    n2: usize,
    #[arg(long, default_value = "strict")]
    parts: bipart_core::PartSet,
}

fn run(cli: Cli, stdout: &mut dyn Write) -> bipart_core::Result<()> {
    let budget = cli.cell_budget.unwrap_or(bipart_core::count::DEFAULT_CELL_BUDGET);
    let mut out: Box<dyn Write + '_> = match &cli.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(stdout)),
    };
    match cli.command {
        Command::Count(a) => commands::count(&mut out, a.n1, a.n2, a.parts, a.table, budget)?,
        Command::Coeffs(a) => commands::coeffs(&mut out, matches!(a.variant, Variant::Cbar), a.order)?,
        Command::Compare(a) => commands::compare(&mut out, a.parts, a.t, &a.n2_grid, budget)?,
        Command::Rates(a) => commands::rates(&mut out, a.t_min, a.t_max, a.steps)?,
        Command::Sample(a) => commands::sample(&mut out, a.n1, a.n2, a.parts, a.reps, a.seed, a.tv_budget)?,
        Command::Llt(a) => commands::llt(&mut out, a.n1, a.n2, a.parts, budget)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse(), &mut io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
