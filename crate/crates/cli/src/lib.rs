//! Command-line harness for `teamcoord`: generate games, convert them,
//! solve the result and check it against the original.

pub mod commands;
pub mod error;
pub mod format;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "teamcoord", version, about = "Adversarial team games as two-player zero-sum games")]
pub struct Cli {
    /// Print summaries as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a game instance.
    Gen(GenArgs),
    /// Convert a team game into a coordinator-vs-opponent game.
    Convert(ConvertArgs),
    /// Run a CFR-family solver on a two-player zero-sum game.
    Solve(SolveArgs),
    /// Compute the team's TMECor value of an original game.
    Oracle(OracleArgs),
    /// Check that a converted game preserves the original payoffs.
    Verify(VerifyArgs),
    /// Count the nodes of a converted game.
    Census(CensusArgs),
    /// Closed-form node counts of the toy family, as CSV.
    Count(CountArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub kind: GenKind,
    /// Output file; standard output when absent.
    #[arg(short, long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenKind {
    /// Toy family: C private chance outcomes, A actions, H decision levels.
    Toy {
        #[arg(long)]
        chance: usize,
        #[arg(long)]
        actions: usize,
        #[arg(long)]
        depth: usize,
        /// Give the second team member a private state too.
        #[arg(long)]
        both_private: bool,
        /// Seed for pseudo-random terminal payoffs; all zero when absent.
        #[arg(long)]
        payoff_seed: Option<u64>,
    },
    /// Three-player Kuhn poker.
    Kuhn {
        #[arg(long, default_value_t = 3)]
        ranks: usize,
        #[arg(long, default_value_t = 0)]
        adv_pos: usize,
    },
    /// Three-player Leduc poker.
    Leduc {
        #[arg(long, default_value_t = 3)]
        ranks: usize,
        #[arg(long, default_value_t = 1)]
        raises: usize,
        #[arg(long, default_value_t = 0)]
        adv_pos: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Basic,
    Pruned,
    Folded,
}

impl From<ModeArg> for teamcoord::convert::Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Basic => teamcoord::convert::Mode::Basic,
            ModeArg::Pruned => teamcoord::convert::Mode::Pruned,
            ModeArg::Folded => teamcoord::convert::Mode::Folded,
        }
    }
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Folded)]
    pub mode: ModeArg,
    /// Merge coordinator infosets that differ only on excluded states.
    #[arg(long)]
    pub safe_ir: bool,
    /// Report the census with single-outcome prescription chance nodes merged away.
    #[arg(long)]
    pub compact: bool,
    /// Largest number of prescriptions allowed at one coordinator node.
    #[arg(long, default_value_t = teamcoord::convert::PRESCRIPTION_LIMIT)]
    pub prescription_limit: u128,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Cfr,
    #[value(name = "cfr+")]
    CfrPlus,
    #[value(name = "lcfr+")]
    LinearCfrPlus,
}

impl From<AlgoArg> for teamcoord::solve::Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Cfr => teamcoord::solve::Algorithm::Cfr,
            AlgoArg::CfrPlus => teamcoord::solve::Algorithm::CfrPlus,
            AlgoArg::LinearCfrPlus => teamcoord::solve::Algorithm::LinearCfrPlus,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Converted game, or any two-player zero-sum game file.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgoArg::LinearCfrPlus)]
    pub algo: AlgoArg,
    #[arg(long, default_value_t = 1000)]
    pub iterations: u64,
    /// Log value and exploitability every this many iterations (0: never).
    #[arg(long, default_value_t = 100)]
    pub log_every: u64,
    /// Convergence log destination.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Average strategy destination, as JSON.
    #[arg(long)]
    pub strategy: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleMethod {
    /// Brute force when the payoff matrix fits, double oracle otherwise.
    Auto,
    Bruteforce,
    DoubleOracle,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = OracleMethod::Auto)]
    pub method: OracleMethod,
    /// Largest joint payoff matrix for brute force.
    #[arg(long, default_value_t = 10_000_000)]
    pub max_entries: u64,
    /// Largest number of enumerated plan combinations for double oracle.
    #[arg(long, default_value_t = 100_000)]
    pub max_member_plans: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Original game.
    pub input: PathBuf,
    /// Converted game produced from it.
    pub converted: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    /// Converted game, or an original game together with `--mode`.
    pub input: PathBuf,
    /// Convert on the fly without building the tree.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub safe_ir: bool,
    #[arg(long)]
    pub compact: bool,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long, default_value_t = 3)]
    pub chance: usize,
    #[arg(long, default_value_t = 2)]
    pub actions: usize,
    #[arg(long, default_value_t = 14)]
    pub max_depth: usize,
    /// Second team member also holds a private state.
    #[arg(long)]
    pub both_private: bool,
    /// Exact integers instead of three significant digits.
    #[arg(long)]
    pub exact: bool,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

/// Runs one parsed invocation.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let json = cli.json;
    match cli.command {
        Command::Gen(a) => commands::gen(a, json),
        Command::Convert(a) => commands::convert(a, json),
        Command::Solve(a) => commands::solve(a, json),
        Command::Oracle(a) => commands::oracle(a, json),
        Command::Verify(a) => commands::verify(a, json),
        Command::Census(a) => commands::census(a),
        Command::Count(a) => commands::count(a),
    }
}
