use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

fn bounded(s: &str, lo: usize, hi: usize) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if (lo..=hi).contains(&v) {
        Ok(v)
    } else if hi == usize::MAX {
        Err(format!("must be at least {lo}"))
    } else {
        Err(format!("must lie in {lo}..={hi}"))
    }
}

fn positive(s: &str) -> Result<usize, String> {
    bounded(s, 1, usize::MAX)
}

fn at_least_two(s: &str) -> Result<usize, String> {
    bounded(s, 2, usize::MAX)
}

fn string_length(s: &str) -> Result<usize, String> {
    bounded(s, 1, 6)
}

#[derive(Debug, Parser)]
#[command(
    name = "xorlab",
    version,
    about = "XOR-hiding encodings, CHSH_n games and OT bounds"
)]
pub struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Solver tolerance.
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol: f64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep random sequential measurements against the two-sided bound.
    VerifySandwich(SandwichArgs),
    /// Sweep random encodings against the learning relations.
    VerifyLearning(LearningArgs),
    /// Compare bounds on the CHSH_n value for n = 1..n_max.
    Table(TableArgs),
    /// Oblivious transfer.
    #[command(subcommand)]
    Ot(OtCommand),
    /// Coin flipping.
    #[command(subcommand)]
    Cf(CfCommand),
    /// Run every suite with default settings.
    All,
}

#[derive(Debug, Args)]
pub struct SandwichArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8],
          value_parser = at_least_two)]
    pub dims: Vec<usize>,
    /// Accepted samples per dimension.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 16, value_parser = positive)]
    pub shards: usize,
}

#[derive(Debug, Args)]
pub struct LearningArgs {
    #[arg(long, default_value_t = 200)]
    pub bits: usize,
    #[arg(long, default_value_t = 50)]
    pub strings: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3],
          value_parser = string_length)]
    pub lengths: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 5, value_parser = positive)]
    pub n_max: usize,
    #[arg(long, default_value_t = 20, value_parser = positive)]
    pub restarts: usize,
    #[arg(long, default_value_t = 300, value_parser = positive)]
    pub iters: usize,
    #[arg(long, default_value_t = 8, value_parser = at_least_two)]
    pub max_local_dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Bit,
    String,
    Tensor,
}

#[derive(Debug, Subcommand)]
pub enum OtCommand {
    /// Build a masked OT from an encoding and report honest success.
    Demo(EncodingArgs),
    /// Cheating probabilities of a masked OT.
    Cheats(EncodingArgs),
    /// Minimax tradeoff between Alice's and Bob's cheating.
    Bound {
        #[arg(long, value_enum, default_value_t = BoundArg::Bit)]
        mode: BoundArg,
    },
    /// Largest correctness a secure OT can reach.
    Ceiling {
        #[arg(long, value_parser = positive)]
        n: usize,
        #[arg(long, value_enum, default_value_t = CeilingArg::String)]
        mode: CeilingArg,
    },
    /// All OT checks.
    Suite {
        /// Random bit transfers checked in addition to BBBW.
        #[arg(long, default_value_t = 20)]
        instances: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CfCommand {
    /// Coin flip built on a bit OT.
    Demo(EncodingArgs),
}

#[derive(Debug, Args)]
pub struct EncodingArgs {
    /// `bbbw` or a path to an encoding JSON file.
    #[arg(long, default_value = "bbbw")]
    pub encoding: String,
    /// Defaults to `bit` for one-bit encodings and `string` otherwise.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundArg {
    Bit,
    String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CeilingArg {
    String,
    Tensor,
}
