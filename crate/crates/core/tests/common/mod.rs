//! Brute-force oracles and seeded instance builders shared by the integration tests.
//! Nothing here calls the search, propagation or DP code under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xword_core::candidates::{derive_candidates, CandidateMap};
use xword_core::grid::{Coord, Direction, GridGeometry, Puzzle, Slot, SlotId};
use xword_core::text_norm::Lexicon;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- grids

/// All maximal runs of white cells with length >= `min_len`, found by scanning every
/// cell independently.
pub fn brute_force_runs(g: &GridGeometry, min_len: usize) -> BTreeSet<(Direction, Vec<Coord>)> {
    let mut out = BTreeSet::new();
    for r in 0..g.rows() {
        for c in 0..g.cols() {
            if !g.is_white((r, c)) {
                continue;
            }
            // Across run starting here?
            if c == 0 || !g.is_white((r, c - 1)) {
                let cells: Vec<Coord> = (c..g.cols()).take_while(|&cc| g.is_white((r, cc))).map(|cc| (r, cc)).collect();
                if cells.len() >= min_len.max(1) {
                    out.insert((Direction::Across, cells));
                }
            }
            if r == 0 || !g.is_white((r - 1, c)) {
                let cells: Vec<Coord> = (r..g.rows()).take_while(|&rr| g.is_white((rr, c))).map(|rr| (rr, c)).collect();
                if cells.len() >= min_len.max(1) {
                    out.insert((Direction::Down, cells));
                }
            }
        }
    }
    out
}

/// (cell, across id, across offset, down id, down offset) for every pair of slots
/// sharing a cell, by nested loops.
pub fn brute_force_crossings(slots: &[Slot]) -> BTreeSet<(Coord, SlotId, usize, SlotId, usize)> {
    let mut out = BTreeSet::new();
    for a in slots {
        for b in slots {
            if a.id == b.id || a.id.direction != Direction::Across || b.id.direction != Direction::Down {
                continue;
            }
            for (i, ca) in a.cells.iter().enumerate() {
                for (j, cb) in b.cells.iter().enumerate() {
                    if ca == cb {
                        out.insert((*ca, a.id, i, b.id, j));
                    }
                }
            }
        }
    }
    out
}

pub fn random_geometry(rng: &mut ChaCha8Rng, max_rows: usize, max_cols: usize, block_p: f64) -> GridGeometry {
    let rows = rng.gen_range(1..=max_rows);
    let cols = rng.gen_range(1..=max_cols);
    let mut blocked = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if rng.gen_bool(block_p) {
                blocked.push((r, c));
            }
        }
    }
    GridGeometry::new(rows, cols, blocked).unwrap()
}

/// A random valid puzzle (every white cell in a slot) with `min_slot_length` 2.
pub fn random_puzzle(rng: &mut ChaCha8Rng, max_rows: usize, max_cols: usize) -> Puzzle {
    loop {
        let g = random_geometry(rng, max_rows, max_cols, 0.2);
        if let Ok(p) = Puzzle::new(g, 2, []) {
            if !p.slots().is_empty() {
                return p;
            }
        }
    }
}

// ---------------------------------------------------------------- solver

pub struct Instance {
    pub puzzle: Puzzle,
    pub truth: BTreeMap<Coord, char>,
    pub candidates: CandidateMap,
}

fn random_word(rng: &mut ChaCha8Rng, alphabet: &[u8], len: usize) -> String {
    (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())] as char).collect()
}

/// Random puzzle with a hidden letter fill over a small alphabet. Each slot gets
/// 1..=`max_candidates` candidates: usually the hidden word, plus random words.
pub fn random_instance(seed: u64, max_rows: usize, max_cols: usize, max_candidates: usize) -> Instance {
    let mut rng = rng(seed);
    let alphabet = b"ABC";
    let puzzle = random_puzzle(&mut rng, max_rows, max_cols);
    let truth: BTreeMap<Coord, char> = puzzle
        .geometry()
        .white_cells()
        .map(|c| (c, alphabet[rng.gen_range(0..alphabet.len())] as char))
        .collect();
    let candidates = puzzle
        .slots()
        .iter()
        .map(|slot| {
            let n = rng.gen_range(1..=max_candidates);
            let mut words: Vec<String> = (0..n).map(|_| random_word(&mut rng, alphabet, slot.len())).collect();
            if rng.gen_bool(0.8) {
                let hidden: String = slot.cells.iter().map(|c| truth[c]).collect();
                let at = rng.gen_range(0..words.len());
                words[at] = hidden;
            }
            (slot.id, derive_candidates(slot, &words))
        })
        .collect();
    Instance { puzzle, truth, candidates }
}

/// Every combination of one candidate per slot in `scope` whose letters agree on
/// shared cells. Enumerates the cross-product in slot order and abandons a prefix as
/// soon as two chosen words disagree on a cell.
pub fn cross_product_solutions(
    puzzle: &Puzzle,
    candidates: &CandidateMap,
    scope: &[SlotId],
) -> BTreeSet<BTreeMap<SlotId, String>> {
    fn go(
        puzzle: &Puzzle,
        candidates: &CandidateMap,
        scope: &[SlotId],
        grid: &mut BTreeMap<Coord, Vec<char>>,
        chosen: &mut BTreeMap<SlotId, String>,
        out: &mut BTreeSet<BTreeMap<SlotId, String>>,
    ) {
        let Some((&id, rest)) = scope.split_first() else {
            out.insert(chosen.clone());
            return;
        };
        let slot = puzzle.slot(id).unwrap();
        let Some(set) = candidates.get(&id) else { return };
        for word in set.texts() {
            if word.len() != slot.len() {
                continue;
            }
            let fits = slot
                .cells
                .iter()
                .zip(word.chars())
                .all(|(c, ch)| grid.get(c).and_then(|v| v.last()).is_none_or(|&x| x == ch));
            if !fits {
                continue;
            }
            for (c, ch) in slot.cells.iter().zip(word.chars()) {
                grid.entry(*c).or_default().push(ch);
            }
            chosen.insert(id, word.to_string());
            go(puzzle, candidates, rest, grid, chosen, out);
            chosen.remove(&id);
            for c in &slot.cells {
                let v = grid.get_mut(c).unwrap();
                v.pop();
                if v.is_empty() {
                    grid.remove(c);
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    go(puzzle, candidates, scope, &mut BTreeMap::new(), &mut BTreeMap::new(), &mut out);
    out
}

pub fn all_slot_ids(puzzle: &Puzzle) -> Vec<SlotId> {
    puzzle.slots().iter().map(|s| s.id).collect()
}

// ---------------------------------------------------------------- text

/// Every way of writing `s` as a concatenation of lexicon words.
pub fn all_segmentations(s: &str, lexicon: &Lexicon) -> Vec<Vec<String>> {
    if s.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for end in 1..=s.len() {
        let head = &s[..end];
        if lexicon.contains(head) {
            for mut tail in all_segmentations(&s[end..], lexicon) {
                tail.insert(0, head.to_string());
                out.push(tail);
            }
        }
    }
    out
}

/// Fewest words, then highest mean frequency, then lexicographically first; the
/// input itself when nothing segments it.
pub fn best_segmentation(s: &str, lexicon: &Lexicon) -> Vec<String> {
    let mean = |seg: &Vec<String>| {
        seg.iter().map(|w| lexicon.frequency(w).unwrap()).sum::<f64>() / seg.len().max(1) as f64
    };
    all_segmentations(s, lexicon)
        .into_iter()
        .min_by(|a, b| {
            a.len()
                .cmp(&b.len())
                .then_with(|| mean(b).partial_cmp(&mean(a)).unwrap())
                .then_with(|| a.cmp(b))
        })
        .unwrap_or_else(|| vec![s.to_string()])
}

/// 50 words over A-D of length 1..=4 with small integer frequencies, so that ties
/// in mean frequency actually happen.
pub fn fixture_lexicon() -> Lexicon {
    let mut rng = rng(50);
    let mut words = BTreeSet::new();
    while words.len() < 50 {
        let len = rng.gen_range(1..=4);
        words.insert(random_word(&mut rng, b"ABCD", len));
    }
    Lexicon::new(words.into_iter().map(|w| {
        let f = rng.gen_range(1..=4) as f64;
        (w, f)
    }))
    .unwrap()
}

// ---------------------------------------------------------------- metrics

pub fn naive_contains(hay: &str, needle: &str) -> bool {
    let h: Vec<char> = hay.chars().collect();
    let n: Vec<char> = needle.chars().collect();
    if n.is_empty() {
        return true;
    }
    if n.len() > h.len() {
        return false;
    }
    (0..=h.len() - n.len()).any(|i| (0..n.len()).all(|j| h[i + j] == n[j]))
}

/// Character-by-character normalization written out independently of the library.
pub fn naive_normalize(s: &str) -> String {
    use unicode_normalization::char::{decompose_canonical, is_combining_mark};
    let mut out = String::new();
    for ch in s.chars() {
        let mut parts = Vec::new();
        decompose_canonical(ch, |c| parts.push(c));
        for p in parts {
            if is_combining_mark(p) {
                continue;
            }
            for u in p.to_uppercase() {
                if u.is_ascii_uppercase() || u.is_ascii_digit() {
                    out.push(u);
                }
            }
        }
    }
    out
}

/// Flags (em, em_norm, in, in_norm) at cutoff `k`, by direct scanning.
pub fn naive_flags(truth: &str, predictions: &[String], k: usize) -> [bool; 4] {
    let mut flags = [false; 4];
    for p in predictions.iter().take(k) {
        let n = naive_normalize(p);
        flags[0] |= p == truth;
        flags[1] |= n == truth;
        flags[2] |= naive_contains(p, truth);
        flags[3] |= naive_contains(&n, truth);
    }
    flags
}

/// Random (truth, predictions) pair mixing exact hits, decorated hits, embeddings
/// and noise.
pub fn random_qa_pair(rng: &mut ChaCha8Rng) -> (String, Vec<String>) {
    let len = rng.gen_range(1..=6);
    let truth = random_word(rng, b"ABCDE12", len);
    let n = rng.gen_range(0..=25);
    let preds = (0..n)
        .map(|_| match rng.gen_range(0..7) {
            0 => truth.clone(),
            1 => truth.to_lowercase(),
            2 => truth.chars().flat_map(|c| [c, ' ']).collect(),
            3 => format!("x{}y", truth),
            4 => truth.chars().map(|c| if c == 'E' { 'É' } else { c }).collect(),
            5 => format!("{}-{}", random_word(rng, b"ab", 2), truth),
            _ => {
                let len = rng.gen_range(0..=8);
                random_word(rng, b"ABCDE12 -", len)
            }
        })
        .collect();
    (truth, preds)
}

// ---------------------------------------------------------------- statistics

/// Central 99% interval [lo, hi] of Binomial(n, p) counts.
pub fn binomial_interval_99(n: usize, p: f64) -> (usize, usize) {
    if p <= 0.0 {
        return (0, 0);
    }
    if p >= 1.0 {
        return (n, n);
    }
    let ln_choose = |k: usize| -> f64 {
        (1..=k).map(|i| ((n - k + i) as f64).ln() - (i as f64).ln()).sum()
    };
    let pmf: Vec<f64> =
        (0..=n).map(|k| (ln_choose(k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()).collect();
    let mut cdf = 0.0;
    let mut lo = None;
    let mut hi = n;
    for (k, m) in pmf.iter().enumerate() {
        cdf += m;
        if lo.is_none() && cdf >= 0.005 {
            lo = Some(k);
        }
        if cdf >= 0.995 {
            hi = k;
            break;
        }
    }
    (lo.unwrap_or(0), hi)
}
