mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use xword_core::grid::{compute_crossings, extract_slots, parse_puzzle, Direction, GridGeometry, Puzzle, PuzzleError, SlotId};

fn geometry() -> impl Strategy<Value = GridGeometry> {
    (1usize..=7, 1usize..=7).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(prop::bool::weighted(0.25), rows * cols).prop_map(move |black| {
            let blocked = black.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| (i / cols, i % cols));
            GridGeometry::new(rows, cols, blocked).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn slots_match_run_scan(g in geometry(), min in 1usize..=3) {
        let slots = extract_slots(&g, min);
        let found: BTreeSet<_> = slots.iter().map(|s| (s.id.direction, s.cells.clone())).collect();
        prop_assert_eq!(found.len(), slots.len());
        prop_assert_eq!(found, common::brute_force_runs(&g, min));
    }

    #[test]
    fn numbering_is_row_major_and_shared(g in geometry()) {
        let slots = extract_slots(&g, 2);
        let mut starts: Vec<_> = slots.iter().map(|s| (s.start(), s.id.number)).collect();
        starts.sort();
        starts.dedup();
        // One number per start cell, increasing in row-major order from 1.
        let numbers: Vec<u32> = starts.iter().map(|&(_, n)| n).collect();
        let expected: Vec<u32> = (1..=numbers.len() as u32).collect();
        prop_assert_eq!(numbers, expected);
    }

    #[test]
    fn crossings_match_nested_loops(g in geometry()) {
        let slots = extract_slots(&g, 2);
        let found: BTreeSet<_> = compute_crossings(&slots)
            .iter()
            .map(|c| (c.cell, c.across, c.across_offset, c.down, c.down_offset))
            .collect();
        prop_assert_eq!(found, common::brute_force_crossings(&slots));
    }

    #[test]
    fn min_length_one_covers_every_white_cell(g in geometry()) {
        let covered: BTreeSet<_> = extract_slots(&g, 1).into_iter().flat_map(|s| s.cells).collect();
        let white: BTreeSet<_> = g.white_cells().collect();
        prop_assert_eq!(covered, white);
    }

    #[test]
    fn puzzle_round_trips_through_json(seed in any::<u64>()) {
        let inst = common::random_instance(seed, 5, 5, 3);
        let answers = inst
            .puzzle
            .slots()
            .iter()
            .map(|s| (s.id, s.cells.iter().map(|c| inst.truth[c]).collect::<String>()))
            .collect();
        let filled = inst.puzzle.with_answers(&answers).unwrap();
        let back = parse_puzzle(&filled.to_json(), 2).unwrap();
        prop_assert_eq!(back.slots(), filled.slots());
        prop_assert_eq!(back.answer_grid().unwrap(), inst.truth);
    }
}

#[test]
fn uncovered_cell_rejected() {
    // The lone cell at the end of row 0 has no run of length 2 through it.
    let g = GridGeometry::new(2, 3, [(1, 1), (1, 2), (0, 1)]).unwrap();
    assert!(matches!(Puzzle::new(g, 2, []), Err(PuzzleError::UncoveredCell { .. })));
}

#[test]
fn all_black_grid_has_no_slots() {
    let g = GridGeometry::new(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
    assert!(extract_slots(&g, 1).is_empty());
    assert_eq!(Puzzle::new(g, 1, []).unwrap_err(), PuzzleError::NoWhiteCells);
}

#[test]
fn rebus_rejected() {
    let doc = r#"{"rows":1,"cols":3,"grid":["A[BC]D"],"clues":[]}"#;
    assert!(matches!(parse_puzzle(doc, 2), Err(PuzzleError::Rebus { .. })));
}

#[test]
fn conflicting_answers_rejected() {
    let doc = r#"{"rows":2,"cols":2,"grid":["..",".."],"clues":[
        {"number":1,"direction":"across","text":"a","answer":"AB"},
        {"number":1,"direction":"down","text":"b","answer":"XY"}]}"#;
    assert!(matches!(parse_puzzle(doc, 2), Err(PuzzleError::Conflict { .. })));
}

#[test]
fn slot_id_text_form() {
    let id: SlotId = "17-across".parse().unwrap();
    assert_eq!(id, SlotId::new(17, Direction::Across));
    assert_eq!(id.to_string(), "17-Across");
    assert!("17".parse::<SlotId>().is_err());
}
