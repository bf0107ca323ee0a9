//! Command-line surface. Every value is optional here: anything not given on
//! the command line is looked up in the config file, then defaulted (see
//! [`crate::config`]).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "gls-tailbound", version, about = "Tail bounds from L^p-norm profiles")]
pub struct Cli {
    /// Flat `key = value` config file; takes precedence over $GLS_TAILBOUND_CONFIG.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// L^p norms of a model (or a tabulated tail) over a p-grid.
    Norm(NormArgs),
    /// Exact and asymptotic tails over a t-grid.
    Tail(TailArgs),
    /// Young-Fenchel tail envelope for a generating function.
    Bound(BoundArgs),
    /// Tail bound for an operator with a Riesz-type growth profile.
    OperatorBound(OperatorBoundArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Norm(_) => "norm",
            Command::Tail(_) => "tail",
            Command::Bound(_) => "bound",
            Command::OperatorBound(_) => "operator-bound",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Outer,
    Inner,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PsiChoice {
    Natural,
    Parametric,
    Power,
    Iwaniec,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OpChoice {
    None,
    RieszType,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Classic,
    Corrected,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub d: Option<u32>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub grid_min: Option<f64>,
    #[arg(long)]
    pub grid_max: Option<f64>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Log spacing (`--grid-log` or `--grid-log=false`).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub grid_log: Option<bool>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SearchArgs {
    /// Relative margin kept away from open ends of exponent intervals.
    #[arg(long)]
    pub clip: Option<f64>,
    /// Cap replacing an infinite upper exponent.
    #[arg(long)]
    pub pmax: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PsiArgs {
    #[arg(long, value_enum)]
    pub psi: Option<PsiChoice>,
    /// Parametric ψ: left end of (a, b).
    #[arg(long)]
    pub psi_a: Option<f64>,
    /// Parametric ψ: right end of (a, b); `inf` allowed when beta = 0.
    #[arg(long)]
    pub psi_b: Option<f64>,
    #[arg(long)]
    pub psi_alpha: Option<f64>,
    #[arg(long)]
    pub psi_beta: Option<f64>,
    #[arg(long)]
    pub psi_scale: Option<f64>,
    /// Power ψ(p) = p^{1/m}.
    #[arg(long)]
    pub m: Option<f64>,
    /// Iwaniec-Sbordone ψ on (1, p0).
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// `p,psi` CSV for `--psi table`.
    #[arg(long)]
    pub psi_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OpArgs {
    #[arg(long, value_enum)]
    pub op: Option<OpChoice>,
    #[arg(long = "C")]
    pub c: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub b1: Option<f64>,
    /// Constant of the classical Riesz profile C_d max{p, p/(p-1)}.
    #[arg(long = "Cd")]
    pub cd: Option<f64>,
    /// Comparison constant: ‖f‖_p <= c_high ‖model‖_p.
    #[arg(long)]
    pub c_high: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct NormArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub psi: PsiArgs,
    /// Explicit exponents (comma-separated); replaces the grid.
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    /// `t,T` CSV: norms by quadrature of this tail instead of the model.
    #[arg(long)]
    pub tail_file: Option<PathBuf>,
    /// Relative tolerance of the tail quadrature.
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct TailArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Explicit levels (comma-separated); replaces the grid.
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub variant: Option<Variant>,
    /// Count the outer level set between both roots instead of the shell
    /// up to the outer root.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub exact_levelset: Option<bool>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub psi: PsiArgs,
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    /// Norm u in R[ψ](u; t); defaults to the model's GLS norm under ψ.
    #[arg(long)]
    pub u: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OperatorBoundArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub op: OpArgs,
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Suites to run (comma-separated); all when absent.
    #[arg(long, value_delimiter = ',')]
    pub suite: Option<Vec<String>>,
    /// Replace every check's tolerance (0 makes any discrepancy fail).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub search: SearchArgs,
}
