//! Command-line front end: grammar induction, the two-stage parsing
//! pipeline, and crossing-brackets evaluation.

mod eval_cmd;
mod induce;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

pub const CONFIG_ENV: &str = "LEP_CONFIG";

#[derive(Parser)]
#[command(name = "lep", version, about = "Least-errors parsing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Induce a grammar with frequencies from a bracketed treebank.
    Induce {
        /// Treebank file of bracketed trees.
        treebank: PathBuf,
        /// Output grammar file.
        out: PathBuf,
        /// Remove rules occurring fewer times than the average frequency.
        #[arg(long)]
        prune: bool,
    },
    /// Parse tagged sentences: normal pass first, recovery on failure.
    Parse {
        /// Grammar file.
        grammar: PathBuf,
        /// Tagged sentences, one per line, `word/tag` tokens.
        input: PathBuf,
        /// Configuration file (`key = value`); defaults apply when absent.
        /// The LEP_CONFIG environment variable supplies the path when the
        /// flag is not given.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Maximum analyses to report per sentence.
        #[arg(long, default_value_t = 1)]
        max_trees: usize,
        /// Error budget override (decimal, e.g. 60.0).
        #[arg(long)]
        budget: Option<String>,
        /// Recovery policy: run on failure only (auto), never (off), or
        /// always (on).
        #[arg(long, value_enum, default_value_t = RobustMode::Auto)]
        robust: RobustMode,
        /// Worker threads for sentence-level parallelism.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Dump admitted chart states to stderr (debug).
        #[arg(long)]
        dump_chart: bool,
    },
    /// Score candidate analyses against a gold treebank.
    Eval {
        /// Gold treebank file.
        gold: PathBuf,
        /// Candidate file as produced by `lep parse`.
        candidate: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RobustMode {
    Auto,
    Off,
    On,
}

/// Errors mapped to process exit codes: I/O problems exit 2, invalid
/// configuration exits 3, data errors exit 1.
pub enum CliError {
    Io { path: PathBuf, error: std::io::Error },
    Config(String),
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 2,
            CliError::Config(_) => 3,
            CliError::Data(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io { path, error } => format!("{}: {error}", path.display()),
            CliError::Config(m) => format!("invalid configuration: {m}"),
            CliError::Data(m) => m.clone(),
        }
    }
}

pub fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|error| CliError::Io { path: path.clone(), error })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Induce { treebank, out, prune } => induce::run(&treebank, &out, prune),
        Command::Parse {
            grammar,
            input,
            config,
            max_trees,
            budget,
            robust,
            jobs,
            dump_chart,
        } => parse::run(&parse::ParseArgs {
            grammar,
            input,
            config,
            max_trees,
            budget,
            robust,
            jobs,
            dump_chart,
        }),
        Command::Eval { gold, candidate } => eval_cmd::run(&gold, &candidate),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
