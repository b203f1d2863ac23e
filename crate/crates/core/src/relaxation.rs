//! Oracle pre-filter: slots whose candidate lists miss the ground truth are taken
//! out of the puzzle so that the remaining constraints can be satisfied.
//!
//! A removed slot's cells are removed too, except cells that a retained slot also
//! covers. Retained slots therefore keep all their cells, and one pass suffices.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::candidates::CandidateMap;
use crate::grid::{Coord, Puzzle, PuzzleError, SlotId};
use crate::solver::{solve_with, ConstraintModel, ModelError, Solution, SolveOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelaxError {
    #[error("oracle filter needs a complete answer key: {0}")]
    MissingAnswer(#[from] PuzzleError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxedPuzzle<'p> {
    pub base: &'p Puzzle,
    pub removed_slots: BTreeSet<SlotId>,
    pub removed_cells: BTreeSet<Coord>,
    pub retained_slots: BTreeSet<SlotId>,
}

impl<'p> RelaxedPuzzle<'p> {
    /// Nothing removed; used when solving without the oracle.
    pub fn unrelaxed(base: &'p Puzzle) -> Self {
        RelaxedPuzzle::with_removed(base, BTreeSet::new())
    }

    /// Removes exactly `removed_slots` and the cells only they cover.
    pub fn with_removed(base: &'p Puzzle, removed_slots: BTreeSet<SlotId>) -> Self {
        let retained_slots: BTreeSet<SlotId> =
            base.slots().iter().map(|s| s.id).filter(|id| !removed_slots.contains(id)).collect();
        let kept: BTreeSet<Coord> = base
            .slots()
            .iter()
            .filter(|s| retained_slots.contains(&s.id))
            .flat_map(|s| s.cells.iter().copied())
            .collect();
        let removed_cells = base.geometry().white_cells().filter(|c| !kept.contains(c)).collect();
        RelaxedPuzzle { base, removed_slots, removed_cells, retained_slots }
    }

    /// White cells still in play.
    pub fn retained_cells(&self) -> BTreeSet<Coord> {
        self.base.geometry().white_cells().filter(|c| !self.removed_cells.contains(c)).collect()
    }
}

/// Keeps a slot iff its normalized ground-truth answer is among its candidates.
pub fn oracle_filter<'p>(puzzle: &'p Puzzle, candidates: &CandidateMap) -> Result<RelaxedPuzzle<'p>, RelaxError> {
    let mut removed = BTreeSet::new();
    for slot in puzzle.slots() {
        let answer = puzzle.answer(slot.id).ok_or(PuzzleError::MissingAnswer(slot.id))?;
        if !candidates.get(&slot.id).is_some_and(|c| c.contains(answer)) {
            removed.insert(slot.id);
        }
    }
    Ok(RelaxedPuzzle::with_removed(puzzle, removed))
}

/// Solves the retained slots only. Nosat is returned as a [`Solution`] with
/// [`Status::Nosat`](crate::solver::Status::Nosat), never masked.
pub fn solve_relaxed(relaxed: &RelaxedPuzzle<'_>, candidates: &CandidateMap) -> Result<Solution, RelaxError> {
    solve_relaxed_with(relaxed, candidates, SolveOptions::default()).map(|mut s| s.swap_remove(0))
}

/// Like [`solve_relaxed`] with explicit search options. Always returns at least one
/// element; a lone Nosat solution when nothing was found.
pub fn solve_relaxed_with(
    relaxed: &RelaxedPuzzle<'_>,
    candidates: &CandidateMap,
    options: SolveOptions,
) -> Result<Vec<Solution>, RelaxError> {
    let scope: Vec<SlotId> = relaxed.retained_slots.iter().copied().collect();
    let model = ConstraintModel::for_slots(relaxed.base, candidates, &scope)?;
    let solutions = solve_with(&model, options).solutions;
    Ok(if solutions.is_empty() { vec![Solution::nosat()] } else { solutions })
}
