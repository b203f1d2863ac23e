//! `xword`: solve, score and generate crossword fixtures.
//!
//! Exit codes: 0 on success (or a satisfiable fill), 1 on input errors, 2 when the
//! solver reports nosat.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "xword", version, about = "Crossword constraint solver and evaluation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fill a puzzle from ranked predictions and score the fill.
    Solve(SolveArgs),
    /// Score ranked predictions against clue answers (EM / In at top-1/10/20).
    EvalQa(EvalQaArgs),
    /// Score saved fills against their puzzles' answer keys.
    EvalPuzzle(EvalPuzzleArgs),
    /// Generate a synthetic puzzle with an answer key and noisy predictions.
    Gen(GenArgs),
    /// Split a merged answer into dictionary words.
    Split(SplitArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DenominatorArg {
    Original,
    Retained,
}

impl From<DenominatorArg> for xword_core::Denominator {
    fn from(d: DenominatorArg) -> Self {
        match d {
            DenominatorArg::Original => xword_core::Denominator::Original,
            DenominatorArg::Retained => xword_core::Denominator::Retained,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SymmetryArg {
    None,
    Rot180,
}

#[derive(Debug, Args)]
struct Common {
    /// Emit JSON only on stdout.
    #[arg(long)]
    json: bool,
    /// Write the JSON result to this file as well.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    puzzle: PathBuf,
    #[arg(long)]
    predictions: PathBuf,
    /// Number of top-ranked predictions used per slot.
    #[arg(long, default_value_t = 20)]
    k: usize,
    /// Drop slots whose candidates miss the ground-truth answer before solving.
    #[arg(long)]
    oracle: bool,
    #[arg(long, value_enum, default_value = "original")]
    denominator: DenominatorArg,
    #[arg(long, default_value_t = 2)]
    min_slot_length: usize,
    /// Number of solutions to enumerate.
    #[arg(long, default_value_t = 1)]
    limit: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct EvalQaArgs {
    /// Puzzle file with answers, or a JSON array of {"id", "answer"} records.
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long, default_value_t = 20)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    min_slot_length: usize,
    /// Worker threads for per-clue scoring.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct EvalPuzzleArgs {
    /// Puzzle files; paired in order with --solution.
    #[arg(long, required = true)]
    puzzle: Vec<PathBuf>,
    /// Solution files written by `solve --output`.
    #[arg(long, required = true)]
    solution: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "original")]
    denominator: DenominatorArg,
    #[arg(long, default_value_t = 2)]
    min_slot_length: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 15)]
    rows: usize,
    #[arg(long, default_value_t = 15)]
    cols: usize,
    #[arg(long, default_value_t = 0.18)]
    block_fraction: f64,
    #[arg(long, value_enum, default_value = "rot180")]
    symmetry: SymmetryArg,
    #[arg(long, default_value_t = 3)]
    min_slot_length: usize,
    /// Probability that a slot's prediction list contains its answer.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 5)]
    distractors: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// WORD<TAB>frequency file; a seeded synthetic lexicon is used when omitted.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Number of puzzles; seeds are seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Directory receiving puzzle and predictions files.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct SplitArgs {
    /// Merged answer string, e.g. VERYFAST.
    answer: String,
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => commands::solve(args),
        Command::EvalQa(args) => commands::eval_qa(args),
        Command::EvalPuzzle(args) => commands::eval_puzzle(args),
        Command::Gen(args) => commands::gen(args),
        Command::Split(args) => commands::split(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
