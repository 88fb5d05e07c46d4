mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

/// Additive attribution of a function's value to its arguments.
#[derive(Debug, Parser)]
#[command(name = "axdecomp", version, about, long_about = None)]
#[command(after_help = "Exit codes: 0 ok, 1 residual above tolerance or axiom failure, \
2 usage/parse/malformed input, 3 incomplete table or game, 4 F(0) != 0 or v(empty) != 0 \
for a method that requires zero, 5 evaluation or I/O error.\n\
Set DECOMP_LOG (error|warn|info|debug|trace) for diagnostics on stderr.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose F(x) into per-argument contributions.
    Decompose(DecomposeArgs),
    /// Shapley value of a game given as JSON.
    Shapley(ShapleyArgs),
    /// Run the axiom checks over a function corpus; JSON lines on stdout.
    Axioms(AxiomsArgs),
    /// Foreign-stock P&L split into stock and currency effects.
    Example1(Example1Args),
    /// Shared utility bill split between households.
    Example2(Example2Args),
    /// VaR movement of a toy claims model split between risk factors.
    Example3(Example3Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Exact subset sum for d ≤ 20, Monte Carlo above.
    Auto,
    Sequential,
    /// Averaged sequential by the subset sum.
    As,
    /// Averaged sequential by enumerating all d! orders (d ≤ 10).
    AsPermutation,
    DeltaStar,
    Pointwise,
    Mc,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(short = 'o', long)]
    pub output: Option<String>,
    /// Relative tolerance for residual checks.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Number of arguments.
    #[arg(short = 'd', long = "dim")]
    pub dim: usize,
    /// Expression in x1..xd, e.g. "(x1+2)*(x2+3)-6".
    #[arg(short = 'f', long = "function", conflicts_with = "table_csv", allow_hyphen_values = true)]
    pub function: Option<String>,
    /// Point as comma-separated coordinates; repeatable.
    #[arg(short = 'x', long = "point", allow_hyphen_values = true)]
    pub points: Vec<String>,
    /// CSV of points with header x1..xd.
    #[arg(long)]
    pub points_csv: Option<String>,
    /// Masked-point table (header mask,value) instead of an expression.
    #[arg(long)]
    pub table_csv: Option<String>,
    /// Write the 2^d masked evaluations of the expression at the point.
    #[arg(long, requires = "function")]
    pub export_table: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    /// Activation ranks for --method sequential, 1-based, e.g. 2,3,1.
    #[arg(long)]
    pub order: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampled orders for Monte Carlo.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ShapleyArgs {
    /// Game JSON: {"d": 2, "values": {"1": 1, "2": 2, "1,2": 4}}.
    pub game: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AxiomsArgs {
    /// Corpus spec JSON; the built-in 20-function corpus when omitted.
    #[arg(long)]
    pub corpus: Option<String>,
    /// delta-star, as, as-permutation, pointwise, sequential, first-takes-all, drop-last.
    #[arg(long, default_value = "delta-star")]
    pub principle: String,
    /// Activation ranks for --principle sequential.
    #[arg(long)]
    pub order: Option<String>,
    /// Also check S1-S3 and T1-T4 on this many random games.
    #[arg(long, default_value_t = 0)]
    pub games: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(short = 'o', long)]
    pub output: Option<String>,
}

#[derive(Debug, Args)]
pub struct Example1Args {
    /// Initial stock price.
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub s0: f64,
    /// Initial exchange rate.
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub c0: f64,
    /// Changes (stock, currency); repeatable.
    #[arg(short = 'x', long = "point", allow_hyphen_values = true)]
    pub points: Vec<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Example2Args {
    /// Number of households.
    #[arg(short = 'd', long = "dim", default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 10.0)]
    pub fixed: f64,
    #[arg(long, default_value_t = 2.0)]
    pub rate: f64,
    /// Consumption above which --discount-rate applies.
    #[arg(long, requires = "discount_rate")]
    pub threshold: Option<f64>,
    #[arg(long, requires = "threshold")]
    pub discount_rate: Option<f64>,
    /// Consumptions; defaults to 1, 2, …, d.
    #[arg(short = 'x', long = "point", allow_hyphen_values = true)]
    pub points: Vec<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Example3Args {
    /// Number of risk factors.
    #[arg(short = 'd', long = "dim", default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub positions: usize,
    #[arg(long, default_value_t = 5000)]
    pub scenarios: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Two factors with mirrored positions (d is ignored).
    #[arg(long)]
    pub symmetric: bool,
    /// Risk-factor changes; defaults to 0.1 in every factor.
    #[arg(short = 'x', long = "point", allow_hyphen_values = true)]
    pub points: Vec<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DECOMP_LOG", "warn")).init();
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
