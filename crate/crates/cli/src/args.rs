use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "diverse-match", version, about = "Matching under diversity constraints: solvers, generators, sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance file and print a summary line.
    Solve(SolveArgs),
    /// Generate a seeded instance file.
    Gen(GenArgs),
    /// Generate, solve and score instances over a degree range.
    Sweep(SweepArgs),
    /// Run an acceptance suite and report pass/fail.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Lb,
    Fair,
    Tree,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Lb => "lb",
            Problem::Fair => "fair",
            Problem::Tree => "tree",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Base,
    MinDegree,
    Augment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FairAlgorithm {
    /// Disjoint blocks of size `lb` within widened windows.
    Block,
    /// One subset per platform meeting the exact windows.
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Expected problem kind; inferred from the file when omitted.
    #[arg(long, value_enum)]
    pub problem: Option<Problem>,
    #[arg(long)]
    pub input: PathBuf,
    /// Solution file (JSON; gzip when ending in .gz).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "base")]
    pub strategy: Strategy,
    #[arg(long, value_enum, default_value = "block")]
    pub algorithm: FairAlgorithm,
    /// Tie-break seed for the min-degree strategy.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated `name=value` caps: cells, items, candidates, states, nodes, covers.
    #[arg(long)]
    pub limits: Option<String>,
    /// Also compute the exact optimum (small instances only).
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub problem: Problem,
    /// lb: er | synthetic | real-like | small; fair: synthetic | small; tree: random.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Target mean item degree (degree-capped presets).
    #[arg(long)]
    pub avg_degree: Option<usize>,
    /// Maximum item degree; overrides --avg-degree.
    #[arg(long)]
    pub max_degree: Option<usize>,
    #[arg(long)]
    pub items: Option<usize>,
    #[arg(long)]
    pub platforms: Option<usize>,
    #[arg(long)]
    pub groups: Option<usize>,
    #[arg(long)]
    pub group_lb: Option<usize>,
    /// Edge probability (er preset).
    #[arg(long)]
    pub rho: Option<f64>,
    /// Items per group (er preset).
    #[arg(long)]
    pub n_per_group: Option<usize>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub max_budget: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "lb")]
    pub problem: Problem,
    /// synthetic | real-like (lb only).
    #[arg(long, default_value = "synthetic")]
    pub preset: String,
    /// Mean item degrees as `start..end:step` (inclusive) or a comma list.
    #[arg(long, default_value = "5..125:10")]
    pub degrees: String,
    /// Number of seeds per degree.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    /// First seed; seeds run `seed..seed+seeds`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Strategies to run (repeatable). lb: base, min-degree, augment; fair: naive, block, block-mult.
    #[arg(long = "strategy")]
    pub strategies: Vec<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Use the exact optimum when the instance fits the oracle limits.
    #[arg(long)]
    pub oracle: bool,
    /// Fill the millis column with the median of 3 timed runs.
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub limits: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Suite name, or `all`.
    pub suite: String,
}
