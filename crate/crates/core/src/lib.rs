//! Crossword constraint-satisfaction engine and evaluation harness.
//!
//! The crate is organised around the pipeline a puzzle goes through:
//!
//! - [`grid`] parses puzzle files and derives slots and crossings from the geometry.
//! - [`text_norm`] canonicalises answer strings and splits merged answers into words.
//! - [`candidates`] turns ranked model predictions into per-slot candidate lists.
//! - [`solver`] fills the grid by search over slot candidates with propagation.
//! - [`relaxation`] removes slots whose candidates miss the ground truth so a partial
//!   fill exists.
//! - [`metrics`] scores clue answering (EM / In and their normalised variants) and
//!   whole-puzzle fills (character/word accuracy and removal).
//! - [`datagen`] produces seeded synthetic puzzles and noisy prediction lists.

pub mod candidates;
pub mod datagen;
pub mod grid;
pub mod metrics;
pub mod relaxation;
pub mod solver;
pub mod text_norm;

pub use candidates::{derive_all, derive_candidates, load_predictions, CandidateMap, CandidateSet, PredictionSet};
pub use grid::{
    compute_crossings, extract_slots, parse_puzzle, ClueEntry, Coord, Crossing, Direction, GridGeometry, Puzzle,
    Slot, SlotId,
};
pub use metrics::{aggregate, em_at_k, in_at_k, score_puzzle, Denominator, MetricsReport, PuzzleScore};
pub use relaxation::{oracle_filter, solve_relaxed, RelaxedPuzzle};
pub use solver::{build_model, solve, ConstraintModel, Solution, Status};
pub use text_norm::{normalize, split_answer, Lexicon};
