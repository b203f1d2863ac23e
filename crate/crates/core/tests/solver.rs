mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::Rng;
use xword_core::candidates::{derive_candidates, CandidateMap};
use xword_core::grid::{parse_puzzle, SlotId};
use xword_core::solver::{build_model, solve, solve_with, verify_solution, SolveOptions, ALPHABET};

fn chosen_set(sols: &[xword_core::Solution]) -> BTreeSet<BTreeMap<SlotId, String>> {
    sols.iter().map(|s| s.chosen.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn enumeration_equals_cross_product(seed in any::<u64>()) {
        let inst = common::random_instance(seed, 4, 4, 6);
        let model = build_model(&inst.puzzle, &inst.candidates).unwrap();
        let all = solve(&model, None);
        let set = chosen_set(&all);
        prop_assert_eq!(set.len(), all.len(), "duplicate solutions");
        let scope = common::all_slot_ids(&inst.puzzle);
        prop_assert_eq!(&set, &common::cross_product_solutions(&inst.puzzle, &inst.candidates, &scope));
        for s in &all {
            prop_assert!(s.is_sat());
            prop_assert!(verify_solution(&inst.puzzle, &inst.candidates, &scope, s).is_ok());
        }
    }

    #[test]
    fn propagation_keeps_every_solution(seed in any::<u64>()) {
        let inst = common::random_instance(seed, 4, 4, 6);
        let model = build_model(&inst.puzzle, &inst.candidates).unwrap();
        let scope = common::all_slot_ids(&inst.puzzle);
        let brute = common::cross_product_solutions(&inst.puzzle, &inst.candidates, &scope);
        match model.propagate() {
            Err(_) => prop_assert!(brute.is_empty()),
            Ok(pruned) => {
                for sol in &brute {
                    for (id, word) in sol {
                        prop_assert!(pruned.surviving(*id).unwrap().contains(&word.as_str()));
                        let slot = inst.puzzle.slot(*id).unwrap();
                        for (cell, ch) in slot.cells.iter().zip(word.chars()) {
                            prop_assert!(pruned.domain(*cell).unwrap().chars().any(|c| c == ch));
                        }
                    }
                }
                // Propagation reaches a fixpoint.
                let again = pruned.propagate().unwrap();
                for id in &scope {
                    prop_assert_eq!(again.surviving(*id), pruned.surviving(*id));
                }
            }
        }
    }

    #[test]
    fn limited_runs_are_prefixes(seed in any::<u64>(), limit in 1usize..4) {
        let inst = common::random_instance(seed, 4, 4, 6);
        let model = build_model(&inst.puzzle, &inst.candidates).unwrap();
        let all = solve(&model, None);
        let some = solve(&model, Some(limit));
        prop_assert_eq!(&some[..], &all[..limit.min(all.len())]);
        prop_assert_eq!(solve(&model, None), all);
    }
}

#[test]
fn worked_example() {
    let p = parse_puzzle(r#"{"rows":1,"cols":3,"grid":["..."],"clues":[]}"#, 2).unwrap();
    let slot = &p.slots()[0];
    let cands: CandidateMap = [(slot.id, derive_candidates(slot, &["ESC", "DEL", "CMD"]))].into();
    let model = build_model(&p, &cands).unwrap();
    let words: Vec<String> = solve(&model, None).into_iter().map(|s| s.chosen[&slot.id].clone()).collect();
    assert_eq!(words, ["ESC", "DEL", "CMD"]);
    assert_eq!(solve(&model, Some(1))[0].chosen[&slot.id], "ESC");
}

#[test]
fn node_budget_marks_incomplete() {
    let inst = common::random_instance(11, 5, 5, 8);
    let model = build_model(&inst.puzzle, &inst.candidates).unwrap();
    let out = solve_with(&model, SolveOptions { limit: None, node_budget: Some(1) });
    assert!(!out.complete || out.nodes <= 1);
}

/// Open 2x2 grid over the full symbol alphabet, checked against all 36^4 fills.
#[test]
fn two_by_two_against_every_fill() {
    let p = parse_puzzle(r#"{"rows":2,"cols":2,"grid":["..",".."],"clues":[]}"#, 2).unwrap();
    let symbols: Vec<char> = ALPHABET.chars().collect();
    for seed in 0..3u64 {
        let mut rng = common::rng(seed);
        let mut cands = CandidateMap::new();
        for slot in p.slots() {
            let words: Vec<String> = (0..12)
                .map(|_| (0..2).map(|_| symbols[rng.gen_range(0..6)]).collect())
                .collect();
            cands.insert(slot.id, derive_candidates(slot, &words));
        }
        let model = build_model(&p, &cands).unwrap();
        let found = chosen_set(&solve(&model, None));
        let mut expected = BTreeSet::new();
        for code in 0..36usize.pow(4) {
            let g: Vec<char> = (0..4).map(|i| symbols[code / 36usize.pow(i) % 36]).collect();
            let words = [
                (SlotId::across(1), [g[0], g[1]]),
                (SlotId::down(1), [g[0], g[2]]),
                (SlotId::down(2), [g[1], g[3]]),
                (SlotId::across(3), [g[2], g[3]]),
            ];
            if words.iter().all(|(id, w)| cands[id].contains(&w.iter().collect::<String>())) {
                expected.insert(words.iter().map(|(id, w)| (*id, w.iter().collect())).collect());
            }
        }
        assert_eq!(found, expected, "seed {seed}");
    }
}
