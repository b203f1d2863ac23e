use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use xword_core::candidates::parse_prediction_records;
use xword_core::datagen::{self, GenSpec, Symmetry};
use xword_core::metrics::{aggregate, ClueResult, PuzzleScore};
use xword_core::relaxation::solve_relaxed_with;
use xword_core::solver::SolveOptions;
use xword_core::{
    derive_all, load_predictions, normalize, oracle_filter, parse_puzzle, score_puzzle, split_answer, Coord, Lexicon,
    Puzzle, RelaxedPuzzle, Solution, SlotId, Status,
};

use crate::{Common, EvalPuzzleArgs, EvalQaArgs, GenArgs, SolveArgs, SplitArgs, SymmetryArg};

const NOSAT: u8 = 2;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_puzzle(path: &Path, min_slot_length: usize) -> Result<Puzzle> {
    parse_puzzle(&read(path)?, min_slot_length).with_context(|| format!("{}", path.display()))
}

fn emit(common: &Common, json: &str, human: impl FnOnce() -> String) -> Result<()> {
    if let Some(path) = &common.output {
        fs::write(path, format!("{json}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    if common.json {
        println!("{json}");
    } else {
        print!("{}", human());
    }
    Ok(())
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?)
}

/// On-disk form of a fill, as written by `solve`.
#[derive(Debug, Serialize, Deserialize)]
struct SolutionFile {
    status: String,
    /// `#` black, `_` removed by relaxation, `.` unfilled, otherwise the symbol.
    grid: Vec<String>,
    chosen: BTreeMap<String, String>,
    removed_slots: Vec<String>,
    removed_cells: Vec<Coord>,
    solution_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    alternatives: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    score: Option<PuzzleScore>,
}

fn render(relaxed: &RelaxedPuzzle<'_>, solution: &Solution) -> Vec<String> {
    let g = relaxed.base.geometry();
    (0..g.rows())
        .map(|r| {
            (0..g.cols())
                .map(|c| {
                    let cell = (r, c);
                    if !g.is_white(cell) {
                        '#'
                    } else if relaxed.removed_cells.contains(&cell) {
                        '_'
                    } else {
                        solution.assignment.get(&cell).copied().unwrap_or('.')
                    }
                })
                .collect()
        })
        .collect()
}

pub fn solve(args: SolveArgs) -> Result<ExitCode> {
    let puzzle = load_puzzle(&args.puzzle, args.min_slot_length)?;
    let predictions = load_predictions(&read(&args.predictions)?, args.k, Some(&puzzle))
        .with_context(|| format!("{}", args.predictions.display()))?;
    if args.oracle && !puzzle.has_answer_key() {
        bail!("--oracle needs a puzzle with a complete answer key");
    }
    let candidates = derive_all(&puzzle, &predictions);
    let relaxed = if args.oracle { oracle_filter(&puzzle, &candidates)? } else { RelaxedPuzzle::unrelaxed(&puzzle) };
    let solutions = solve_relaxed_with(
        &relaxed,
        &candidates,
        SolveOptions { limit: Some(args.limit.max(1)), node_budget: None },
    )?;
    let best = &solutions[0];

    let score = match puzzle.answer_grid() {
        Ok(truth) => Some(score_puzzle(&truth, best, &relaxed, args.denominator.into())?),
        Err(_) => None,
    };
    let sat = best.status == Status::Sat;
    let file = SolutionFile {
        status: if sat { "sat" } else { "nosat" }.into(),
        grid: render(&relaxed, best),
        chosen: best.chosen.iter().map(|(id, w)| (id.to_string(), w.clone())).collect(),
        removed_slots: relaxed.removed_slots.iter().map(SlotId::to_string).collect(),
        removed_cells: relaxed.removed_cells.iter().copied().collect(),
        solution_count: if sat { solutions.len() } else { 0 },
        alternatives: solutions.iter().skip(1).map(|s| render(&relaxed, s)).collect(),
        score,
    };
    let json = serde_json::to_string_pretty(&file)?;
    emit(&args.common, &json, || {
        let mut out = format!("status: {}\n", file.status);
        for row in &file.grid {
            out.push_str(row);
            out.push('\n');
        }
        if let Some(s) = &file.score {
            out.push_str(&format!(
                "acc_word {:.4}  acc_char {:.4}  rem_word {:.4}  rem_char {:.4}\n",
                s.acc_word, s.acc_char, s.rem_word, s.rem_char
            ));
        }
        out
    })?;
    Ok(if sat { ExitCode::SUCCESS } else { ExitCode::from(NOSAT) })
}

#[derive(Debug, Deserialize)]
struct TruthRecord {
    #[serde(alias = "slot")]
    id: String,
    answer: String,
}

/// Clue id -> answer, from a puzzle file or a list of records.
fn load_truth(path: &Path, min_slot_length: usize) -> Result<Vec<(String, String)>> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("{}", path.display()))?;
    if value.get("grid").is_some() {
        let puzzle = parse_puzzle(&text, min_slot_length).with_context(|| format!("{}", path.display()))?;
        return Ok(puzzle
            .clues()
            .values()
            .filter_map(|c| c.answer.clone().map(|a| (c.slot_id.to_string(), a)))
            .collect());
    }
    let records: Vec<TruthRecord> = serde_json::from_value(value).with_context(|| format!("{}", path.display()))?;
    let mut seen = BTreeSet::new();
    for r in &records {
        if !seen.insert(r.id.as_str()) {
            bail!("{}: duplicate clue id {}", path.display(), r.id);
        }
    }
    Ok(records.into_iter().map(|r| (r.id, r.answer)).collect())
}

pub fn eval_qa(args: EvalQaArgs) -> Result<ExitCode> {
    let truth = load_truth(&args.truth, args.min_slot_length)?;
    let records = parse_prediction_records(&read(&args.predictions)?)
        .with_context(|| format!("{}", args.predictions.display()))?;
    let mut by_id: BTreeMap<String, Vec<String>> = records.into_iter().map(|r| (r.slot, r.predictions)).collect();
    let items: Vec<(String, Vec<String>)> = truth
        .into_iter()
        .map(|(id, answer)| {
            let mut preds = by_id.remove(&id).unwrap_or_else(|| {
                eprintln!("warning: no predictions for {id}; scored as a miss");
                Vec::new()
            });
            preds.truncate(args.k);
            (answer, preds)
        })
        .collect();
    for id in by_id.keys() {
        eprintln!("warning: predictions for {id} have no ground truth; ignored");
    }
    let results: Vec<ClueResult> =
        pool(args.jobs)?.install(|| items.into_par_iter().map(|(a, p)| ClueResult::new(&a, p)).collect());
    let report = aggregate(&results, &[])?;
    let json = report.to_json();
    emit(&args.common, &json, || {
        let qa = report.qa.expect("qa section present");
        let mut out = format!("{:<8} {:>7} {:>7} {:>7}\n", "metric", "top-1", "top-10", "top-20");
        for (name, row) in [("EM", qa.em), ("EM_norm", qa.em_norm), ("In", qa.in_), ("In_norm", qa.in_norm)] {
            out.push_str(&format!("{name:<8} {:>7.4} {:>7.4} {:>7.4}\n", row.top1, row.top10, row.top20));
        }
        out
    })?;
    Ok(ExitCode::SUCCESS)
}

fn parse_solution_file(puzzle: &Puzzle, file: &SolutionFile) -> Result<(BTreeSet<SlotId>, Solution)> {
    let removed: BTreeSet<SlotId> = file
        .removed_slots
        .iter()
        .map(|s| s.parse::<SlotId>().map_err(|e| anyhow!(e)))
        .collect::<Result<_>>()?;
    if let Some(id) = removed.iter().find(|id| puzzle.slot(**id).is_none()) {
        bail!("removed slot {id} is not in the puzzle");
    }
    let g = puzzle.geometry();
    if file.grid.len() != g.rows() {
        bail!("solution grid has {} rows, puzzle has {}", file.grid.len(), g.rows());
    }
    let mut assignment = BTreeMap::new();
    for (r, row) in file.grid.iter().enumerate() {
        let cells: Vec<char> = row.chars().collect();
        if cells.len() != g.cols() {
            bail!("solution row {r} has {} cells, puzzle has {}", cells.len(), g.cols());
        }
        for (c, ch) in cells.into_iter().enumerate() {
            match ch {
                '#' | '_' | '.' => {}
                'A'..='Z' | '0'..='9' if g.is_white((r, c)) => {
                    assignment.insert((r, c), ch);
                }
                _ => bail!("unexpected {ch:?} at row {r}, col {c} of the solution grid"),
            }
        }
    }
    let chosen = file
        .chosen
        .iter()
        .map(|(id, w)| Ok((id.parse::<SlotId>().map_err(|e| anyhow!(e))?, w.clone())))
        .collect::<Result<_>>()?;
    let status = match file.status.as_str() {
        "sat" => Status::Sat,
        "nosat" => Status::Nosat,
        other => bail!("unknown status {other:?}"),
    };
    Ok((removed, Solution { assignment, chosen, status }))
}

pub fn eval_puzzle(args: EvalPuzzleArgs) -> Result<ExitCode> {
    if args.puzzle.len() != args.solution.len() {
        bail!("{} puzzles but {} solutions; pass them in pairs", args.puzzle.len(), args.solution.len());
    }
    let mut inputs = Vec::new();
    for (pp, sp) in args.puzzle.iter().zip(&args.solution) {
        let puzzle = load_puzzle(pp, args.min_slot_length)?;
        let file: SolutionFile =
            serde_json::from_str(&read(sp)?).with_context(|| format!("{}", sp.display()))?;
        let (removed, solution) = parse_solution_file(&puzzle, &file).with_context(|| format!("{}", sp.display()))?;
        let truth = puzzle.answer_grid().with_context(|| format!("{}", pp.display()))?;
        inputs.push((puzzle, removed, solution, truth));
    }
    let denominator = args.denominator.into();
    let scores: Vec<PuzzleScore> = pool(args.jobs)?.install(|| {
        inputs
            .par_iter()
            .map(|(puzzle, removed, solution, truth)| {
                let relaxed = RelaxedPuzzle::with_removed(puzzle, removed.clone());
                score_puzzle(truth, solution, &relaxed, denominator)
            })
            .collect::<Result<_, _>>()
    })?;
    let report = aggregate(&[], &scores)?;
    let json = report.to_json();
    emit(&args.common, &json, || {
        let s = report.puzzle.expect("puzzle section present");
        format!(
            "puzzles {}  acc_word {:.4}  acc_char {:.4}  rem_word {:.4}  rem_char {:.4}\n",
            scores.len(),
            s.acc_word,
            s.acc_char,
            s.rem_word,
            s.rem_char
        )
    })?;
    Ok(ExitCode::SUCCESS)
}

pub fn gen(args: GenArgs) -> Result<ExitCode> {
    let lexicon = match &args.lexicon {
        Some(path) => Lexicon::parse(&read(path)?).with_context(|| format!("{}", path.display()))?,
        None => datagen::default_lexicon(args.seed, args.min_slot_length, args.rows.max(args.cols)),
    };
    let base = GenSpec {
        rows: args.rows,
        cols: args.cols,
        block_fraction: args.block_fraction,
        symmetry: match args.symmetry {
            SymmetryArg::None => Symmetry::None,
            SymmetryArg::Rot180 => Symmetry::Rotational180,
        },
        min_slot_length: args.min_slot_length,
        lexicon,
        truth_inclusion_p: args.p,
        distractors_per_slot: args.distractors,
        seed: args.seed,
    };
    base.validate()?;
    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let fixtures = pool(args.jobs)?.install(|| {
        (0..args.count)
            .into_par_iter()
            .map(|i| datagen::generate(&GenSpec { seed: args.seed.wrapping_add(i), ..base.clone() }))
            .collect::<Result<Vec<_>, _>>()
    })?;
    for (i, fixture) in fixtures.iter().enumerate() {
        let suffix = if args.count == 1 { String::new() } else { format!("-{i:03}") };
        let puzzle_path = args.out_dir.join(format!("puzzle{suffix}.json"));
        let predictions_path = args.out_dir.join(format!("predictions{suffix}.json"));
        fs::write(&puzzle_path, format!("{}\n", fixture.puzzle.to_json()))?;
        fs::write(&predictions_path, format!("{}\n", fixture.predictions.to_json()))?;
        println!(
            "{} ({} slots, {:.1}% filled) + {}",
            puzzle_path.display(),
            fixture.puzzle.slots().len(),
            100.0 * fixture.puzzle.geometry().fill_fraction(),
            predictions_path.display()
        );
    }
    Ok(ExitCode::SUCCESS)
}

pub fn split(args: SplitArgs) -> Result<ExitCode> {
    let lexicon = Lexicon::parse(&read(&args.lexicon)?).with_context(|| format!("{}", args.lexicon.display()))?;
    let seg = split_answer(&normalize(&args.answer), &lexicon);
    if args.json {
        println!("{}", serde_json::json!({ "words": seg.words, "segmented": seg.segmented }));
    } else {
        println!("{}", seg.joined());
    }
    Ok(ExitCode::SUCCESS)
}
