use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "gsp",
    version,
    about = "Generalized stochastic preference choice models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a model on a list of assortments or on every subset
    Eval(EvalArgs),
    /// Fit a sparse model to observed choice shares
    Fit(FitArgs),
    /// Run structural diagnostics on a choice table
    Check(CheckArgs),
    /// Optimise the offered assortment for given revenues
    Assort(AssortArgs),
    /// List, export or verify the built-in examples
    Examples(ExamplesArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct Output {
    /// Stdout format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write the JSON result to this file
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Model JSON file
    #[arg(long)]
    pub model: PathBuf,
    /// JSON array of assortments, e.g. [[1,2],[1,2,3]]
    #[arg(
        long,
        conflicts_with = "all_subsets",
        required_unless_present = "all_subsets"
    )]
    pub assortments: Option<PathBuf>,
    /// Evaluate every non-empty subset of 1..=N
    #[arg(long, value_name = "N")]
    pub all_subsets: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Dataset JSON file
    #[arg(long)]
    pub data: PathBuf,
    /// Largest number of consumer types in the fitted model
    #[arg(long)]
    pub max_atoms: usize,
    /// Selection handicap for irrational types; `inf` excludes them
    #[arg(long, default_value_t = 0.0)]
    pub irrational_penalty: f64,
    /// Only consider sequences up to this length
    #[arg(long, value_name = "L")]
    pub cap_seq_len: Option<usize>,
    /// Residual below which the fit counts as exact
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Exit with status 3 unless the residual is at most --tol
    #[arg(long)]
    pub require_exact: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Choice table JSON file
    #[arg(long)]
    pub table: PathBuf,
    /// Regularity violations
    #[arg(long)]
    pub regularity: bool,
    /// Purchase probability monotonicity
    #[arg(long)]
    pub monotone: bool,
    /// Random attention representability
    #[arg(long)]
    pub ram: bool,
    /// Exact GSP membership with a Farkas certificate on failure
    #[arg(long)]
    pub gsp_membership: bool,
    #[command(flatten)]
    pub output: Output,
}

impl CheckArgs {
    /// No selection means every check.
    pub fn selected(&self) -> [bool; 4] {
        let flags = [
            self.regularity,
            self.monotone,
            self.ram,
            self.gsp_membership,
        ];
        if flags.iter().any(|&f| f) {
            flags
        } else {
            [true; 4]
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    RevenueOrdered,
    Both,
}

#[derive(Args, Debug)]
pub struct AssortArgs {
    /// Model JSON file
    #[arg(long)]
    pub model: PathBuf,
    /// Revenue JSON file, e.g. {"1": 170, "2": 240}
    #[arg(long)]
    pub revenues: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct ExamplesArgs {
    /// Print the example names
    #[arg(long)]
    pub list: bool,
    /// Write every example as JSON files into DIR
    #[arg(long, value_name = "DIR")]
    pub export: Option<PathBuf>,
    /// Re-derive the documented numbers of every example
    #[arg(long)]
    pub verify: bool,
}
