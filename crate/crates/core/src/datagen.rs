//! Seeded synthetic puzzles, answer keys and noisy prediction lists.
//!
//! Each stage draws from its own ChaCha stream of the spec seed, so changing, say,
//! the inclusion probability does not change the generated grid.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::candidates::{derive_candidates, CandidateMap, PredictionSet};
use crate::grid::{extract_slots, ClueEntry, Coord, Direction, GridGeometry, Puzzle, PuzzleError, SlotId};
use crate::solver::{solve_with, verify_solution, ConstraintModel, SolveOptions};
use crate::text_norm::Lexicon;

const GEOMETRY_STREAM: u64 = 1;
const FILL_STREAM: u64 = 2;
const CANDIDATE_STREAM: u64 = 3;

const GEOMETRY_ATTEMPTS: usize = 500;
const FIXTURE_ATTEMPTS: u64 = 20;
const FILL_NODE_BUDGET: u64 = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Symmetry {
    None,
    #[default]
    Rotational180,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid generation spec: {0}")]
    InvalidSpec(String),
    #[error("no block layout found after {0} attempts")]
    GeometryFailed(usize),
    #[error("lexicon has no words of length {0}")]
    LexiconGap(usize),
    #[error("grid could not be filled from the lexicon")]
    Unfillable,
    #[error("slot {slot} needs {needed} distractors, lexicon has {available} other words of length {len}")]
    NotEnoughDistractors { slot: SlotId, len: usize, needed: usize, available: usize },
    #[error("puzzle has no answer for {0}")]
    MissingAnswer(SlotId),
    #[error(transparent)]
    Puzzle(#[from] PuzzleError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub rows: usize,
    pub cols: usize,
    pub block_fraction: f64,
    pub symmetry: Symmetry,
    pub min_slot_length: usize,
    pub lexicon: Lexicon,
    pub truth_inclusion_p: f64,
    pub distractors_per_slot: usize,
    pub seed: u64,
}

impl GenSpec {
    /// 15x15, 18% blocks, 180-degree symmetry, no slots under three letters.
    pub fn nyt_style(lexicon: Lexicon, seed: u64) -> Self {
        GenSpec {
            rows: 15,
            cols: 15,
            block_fraction: 0.18,
            symmetry: Symmetry::Rotational180,
            min_slot_length: 3,
            lexicon,
            truth_inclusion_p: 1.0,
            distractors_per_slot: 5,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(GenError::InvalidSpec(format!("grid {}x{} is empty", self.rows, self.cols)));
        }
        if !(0.0..1.0).contains(&self.block_fraction) {
            return Err(GenError::InvalidSpec(format!("block_fraction {} not in [0, 1)", self.block_fraction)));
        }
        if !(0.0..=1.0).contains(&self.truth_inclusion_p) {
            return Err(GenError::InvalidSpec(format!("truth_inclusion_p {} not in [0, 1]", self.truth_inclusion_p)));
        }
        Ok(())
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random uppercase words over `alphabet` with frequencies in (0, 1]. For each length,
/// `per_length` distinct words, or every string of that length if there are fewer.
pub fn synthetic_lexicon(seed: u64, alphabet: &str, per_length: usize, lengths: RangeInclusive<usize>) -> Lexicon {
    let symbols: Vec<char> = alphabet.chars().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries: Vec<(String, f64)> = Vec::new();
    for len in lengths {
        let space = (symbols.len() as f64).powi(len as i32);
        let target = per_length.min(space as usize);
        let mut words = BTreeSet::new();
        if space <= 2.0 * target as f64 {
            // Dense: enumerate everything and sample.
            let mut all: Vec<String> = vec![String::new()];
            for _ in 0..len {
                all = all.iter().flat_map(|p| symbols.iter().map(move |&c| format!("{p}{c}"))).collect();
            }
            all.shuffle(&mut rng);
            words.extend(all.into_iter().take(target));
        } else {
            while words.len() < target {
                words.insert((0..len).map(|_| symbols[rng.gen_range(0..symbols.len())]).collect::<String>());
            }
        }
        for w in words {
            let f = 1.0 - rng.gen::<f64>();
            entries.push((w, f));
        }
    }
    Lexicon::new(entries).expect("synthetic frequencies are valid")
}

/// Lexicon used when none is supplied: 3000 random words per length over eight
/// common letters, lengths `min_len..=max_len`.
pub fn default_lexicon(seed: u64, min_len: usize, max_len: usize) -> Lexicon {
    synthetic_lexicon(seed, "AEINORST", 3000, min_len.max(1)..=max_len)
}

fn partner(geometry: (usize, usize), (r, c): Coord, symmetry: Symmetry) -> Coord {
    match symmetry {
        Symmetry::None => (r, c),
        Symmetry::Rotational180 => (geometry.0 - 1 - r, geometry.1 - 1 - c),
    }
}

/// Every maximal white run in both directions is at least `min_len` long.
fn runs_ok(g: &GridGeometry, min_len: usize) -> bool {
    for dir in [Direction::Across, Direction::Down] {
        let (outer, inner) = match dir {
            Direction::Across => (g.rows(), g.cols()),
            Direction::Down => (g.cols(), g.rows()),
        };
        for o in 0..outer {
            let mut run = 0;
            for i in 0..=inner {
                let cell = match dir {
                    Direction::Across => (o, i),
                    Direction::Down => (i, o),
                };
                if i < inner && g.is_white(cell) {
                    run += 1;
                } else {
                    if run > 0 && run < min_len {
                        return false;
                    }
                    run = 0;
                }
            }
        }
    }
    true
}

fn connected(g: &GridGeometry) -> bool {
    let Some(start) = g.white_cells().next() else { return false };
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((r, c)) = queue.pop_front() {
        let neighbours = [(r.wrapping_sub(1), c), (r + 1, c), (r, c.wrapping_sub(1)), (r, c + 1)];
        for n in neighbours {
            if g.is_white(n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == g.white_count()
}

/// Places black cells at random (in symmetric pairs when requested) until the target
/// block count is reached, refusing any block that would disconnect the white cells
/// or leave a white run shorter than `min_slot_length`.
pub fn generate_geometry(spec: &GenSpec) -> Result<GridGeometry, GenError> {
    spec.validate()?;
    let (rows, cols) = (spec.rows, spec.cols);
    let target = (spec.block_fraction * (rows * cols) as f64).round() as usize;
    let mut rng = rng(spec.seed, GEOMETRY_STREAM);
    let orbits: Vec<Vec<Coord>> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .filter_map(|cell| {
            let p = partner((rows, cols), cell, spec.symmetry);
            (cell <= p).then(|| if p == cell { vec![cell] } else { vec![cell, p] })
        })
        .collect();
    // Grids too thin for fully checked layouts (e.g. a single row) only need every
    // white cell to sit in some slot.
    let strict = runs_ok(&GridGeometry::open(rows, cols)?, spec.min_slot_length);
    let acceptable = |g: &GridGeometry| {
        connected(g)
            && if strict {
                runs_ok(g, spec.min_slot_length)
            } else {
                let covered: BTreeSet<Coord> =
                    extract_slots(g, spec.min_slot_length).into_iter().flat_map(|s| s.cells).collect();
                g.white_cells().all(|c| covered.contains(&c))
            }
    };

    for _ in 0..GEOMETRY_ATTEMPTS {
        let mut order = orbits.clone();
        order.shuffle(&mut rng);
        let mut blocked: BTreeSet<Coord> = BTreeSet::new();
        for orbit in order {
            if blocked.len() >= target {
                break;
            }
            if blocked.len() + orbit.len() > target + 1 {
                continue;
            }
            let mut trial = blocked.clone();
            trial.extend(orbit.iter().copied());
            let g = GridGeometry::new(rows, cols, trial.iter().copied())?;
            if acceptable(&g) {
                blocked = trial;
            }
        }
        if blocked.len() + 1 >= target {
            let g = GridGeometry::new(rows, cols, blocked)?;
            if acceptable(&g) {
                return Ok(g);
            }
        }
    }
    Err(GenError::GeometryFailed(GEOMETRY_ATTEMPTS))
}

/// Fills `geometry` with lexicon words by running the solver with each slot's
/// candidates set to every lexicon word of its length, shuffled by `seed`.
pub fn fill_grid(geometry: &GridGeometry, lexicon: &Lexicon, seed: u64, min_slot_length: usize) -> Result<Puzzle, GenError> {
    let blank = Puzzle::new(geometry.clone(), min_slot_length, [])?;
    let mut rng = rng(seed, FILL_STREAM);
    let mut by_len: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    let mut candidates = CandidateMap::new();
    for slot in blank.slots() {
        let words = by_len.entry(slot.len()).or_insert_with(|| lexicon.words_of_len(slot.len()));
        if words.is_empty() {
            return Err(GenError::LexiconGap(slot.len()));
        }
        let mut shuffled = words.clone();
        shuffled.shuffle(&mut rng);
        candidates.insert(slot.id, derive_candidates(slot, &shuffled));
    }
    let scope: Vec<SlotId> = blank.slots().iter().map(|s| s.id).collect();
    let model = ConstraintModel::for_slots(&blank, &candidates, &scope).map_err(|_| GenError::Unfillable)?;
    let outcome = solve_with(&model, SolveOptions { limit: Some(1), node_budget: Some(FILL_NODE_BUDGET) });
    let solution = outcome.solutions.into_iter().next().ok_or(GenError::Unfillable)?;
    debug_assert!(verify_solution(&blank, &candidates, &scope, &solution).is_ok());
    let clues = solution
        .chosen
        .iter()
        .map(|(&id, word)| ClueEntry::new(id, format!("Clue for {id}")).with_answer(word));
    Ok(Puzzle::new(geometry.clone(), min_slot_length, clues)?)
}

/// For each slot: with probability `truth_inclusion_p` the truth, plus
/// `distractors_per_slot` distinct same-length lexicon words other than the truth.
/// The truth, when included, sits at a uniformly random rank.
pub fn emit_candidates(puzzle: &Puzzle, spec: &GenSpec) -> Result<(CandidateMap, PredictionSet), GenError> {
    spec.validate()?;
    let mut rng = rng(spec.seed, CANDIDATE_STREAM);
    let mut by_len: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    let mut predictions = PredictionSet::default();
    let mut candidates = CandidateMap::new();
    for slot in puzzle.slots() {
        let truth = puzzle.answer(slot.id).ok_or(GenError::MissingAnswer(slot.id))?;
        let pool = by_len.entry(slot.len()).or_insert_with(|| spec.lexicon.words_of_len(slot.len()));
        let others: Vec<&str> = pool.iter().copied().filter(|w| *w != truth).collect();
        let needed = spec.distractors_per_slot;
        if others.len() < needed {
            return Err(GenError::NotEnoughDistractors { slot: slot.id, len: slot.len(), needed, available: others.len() });
        }
        let include = rng.gen_bool(spec.truth_inclusion_p);
        let mut list: Vec<String> =
            rand::seq::index::sample(&mut rng, others.len(), needed).into_iter().map(|i| others[i].to_string()).collect();
        if include {
            let rank = rng.gen_range(0..=list.len());
            list.insert(rank, truth.to_string());
        }
        candidates.insert(slot.id, derive_candidates(slot, &list));
        predictions.entries.insert(slot.id, list);
    }
    Ok((candidates, predictions))
}

/// A generated puzzle with its predictions.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub puzzle: Puzzle,
    pub predictions: PredictionSet,
    pub candidates: CandidateMap,
    /// Seed actually used; differs from the spec seed when earlier attempts failed.
    pub seed: u64,
}

/// Geometry, fill and predictions in one go. Failed geometry or fill attempts are
/// retried with derived seeds.
pub fn generate(spec: &GenSpec) -> Result<Fixture, GenError> {
    spec.validate()?;
    let mut last = GenError::Unfillable;
    for attempt in 0..FIXTURE_ATTEMPTS {
        let seed = spec.seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let attempt_spec = GenSpec { seed, ..spec.clone() };
        let geometry = match generate_geometry(&attempt_spec) {
            Ok(g) => g,
            Err(e) => {
                last = e;
                continue;
            }
        };
        match fill_grid(&geometry, &spec.lexicon, seed, spec.min_slot_length) {
            Ok(puzzle) => {
                let (candidates, predictions) = emit_candidates(&puzzle, &attempt_spec)?;
                return Ok(Fixture { puzzle, predictions, candidates, seed });
            }
            Err(e @ (GenError::LexiconGap(_) | GenError::Puzzle(_))) => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Number of slots `geometry` yields.
pub fn slot_count(geometry: &GridGeometry, min_slot_length: usize) -> usize {
    extract_slots(geometry, min_slot_length).len()
}
