//! Ranked model predictions and the per-slot candidate lists derived from them.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Puzzle, Slot, SlotId};
use crate::text_norm::normalize;

pub const DEFAULT_K: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CandidateError {
    #[error("malformed predictions document: {0}")]
    Malformed(String),
    #[error("predictions reference unknown slot {0}")]
    UnknownSlot(String),
    #[error("duplicate predictions for {0}")]
    Duplicate(String),
}

/// One record of the predictions file, with the id left as written.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub slot: String,
    pub predictions: Vec<String>,
}

/// Parses the predictions file without interpreting ids. Duplicate ids are an error.
pub fn parse_prediction_records(document: &str) -> Result<Vec<PredictionRecord>, CandidateError> {
    let records: Vec<PredictionRecord> =
        serde_json::from_str(document).map_err(|e| CandidateError::Malformed(e.to_string()))?;
    let mut seen = HashSet::new();
    for r in &records {
        if !seen.insert(r.slot.as_str()) {
            return Err(CandidateError::Duplicate(r.slot.clone()));
        }
    }
    Ok(records)
}

/// Raw ranked predictions per slot, rank 1 first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PredictionSet {
    pub entries: BTreeMap<SlotId, Vec<String>>,
}

impl PredictionSet {
    pub fn get(&self, id: SlotId) -> Option<&[String]> {
        self.entries.get(&id).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Serializes to the predictions file format, in slot order.
    pub fn to_json(&self) -> String {
        let records: Vec<PredictionRecord> = self
            .entries
            .iter()
            .map(|(id, p)| PredictionRecord { slot: id.to_string(), predictions: p.clone() })
            .collect();
        serde_json::to_string_pretty(&records).expect("predictions serialize")
    }
}

/// Loads the predictions file, keeping at most `k` predictions per slot.
///
/// With a `puzzle`, every slot id must name one of its slots.
pub fn load_predictions(document: &str, k: usize, puzzle: Option<&Puzzle>) -> Result<PredictionSet, CandidateError> {
    let mut entries = BTreeMap::new();
    for record in parse_prediction_records(document)? {
        let id: SlotId = record.slot.parse().map_err(|_| CandidateError::UnknownSlot(record.slot.clone()))?;
        if puzzle.is_some_and(|p| p.slot(id).is_none()) {
            return Err(CandidateError::UnknownSlot(record.slot));
        }
        let mut predictions = record.predictions;
        predictions.truncate(k);
        if entries.insert(id, predictions).is_some() {
            return Err(CandidateError::Duplicate(id.to_string()));
        }
    }
    Ok(PredictionSet { entries })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub text: String,
    /// 1-based rank of the prediction it came from.
    pub rank: usize,
    /// Offset into the normalized prediction.
    pub offset: usize,
}

/// Distinct, slot-length candidates in preference order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub slot_id: SlotId,
    pub length: usize,
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    pub fn empty(slot_id: SlotId, length: usize) -> Self {
        CandidateSet { slot_id, length, candidates: Vec::new() }
    }

    pub fn contains(&self, text: &str) -> bool {
        self.candidates.iter().any(|c| c.text == text)
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.candidates.iter().map(|c| c.text.as_str())
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

pub type CandidateMap = BTreeMap<SlotId, CandidateSet>;

/// Normalizes each prediction and emits every contiguous substring of the slot's
/// length, ordered by (rank, offset). Repeats keep their first occurrence.
pub fn derive_candidates<S: AsRef<str>>(slot: &Slot, predictions: &[S]) -> CandidateSet {
    let length = slot.len();
    let mut seen = HashSet::new();
    let mut candidates = Vec::new();
    for (i, raw) in predictions.iter().enumerate() {
        let norm = normalize(raw.as_ref());
        if length == 0 || norm.len() < length {
            continue;
        }
        for offset in 0..=(norm.len() - length) {
            let text = &norm[offset..offset + length];
            if seen.insert(text.to_string()) {
                candidates.push(Candidate { text: text.to_string(), rank: i + 1, offset });
            }
        }
    }
    CandidateSet { slot_id: slot.id, length, candidates }
}

/// Candidate sets for every slot of `puzzle`; slots without predictions get an empty set.
pub fn derive_all(puzzle: &Puzzle, predictions: &PredictionSet) -> CandidateMap {
    puzzle
        .slots()
        .iter()
        .map(|slot| {
            let set = match predictions.get(slot.id) {
                Some(p) => derive_candidates(slot, p),
                None => CandidateSet::empty(slot.id, slot.len()),
            };
            (slot.id, set)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Direction, SlotId};

    fn slot(len: usize) -> Slot {
        Slot { id: SlotId::new(1, Direction::Across), cells: (0..len).map(|c| (0, c)).collect() }
    }

    fn texts(set: &CandidateSet) -> Vec<&str> {
        set.texts().collect()
    }

    #[test]
    fn exact_length_prediction() {
        assert_eq!(texts(&derive_candidates(&slot(5), &["LAUDE"])), ["LAUDE"]);
    }

    #[test]
    fn substrings_of_longer_prediction() {
        assert_eq!(texts(&derive_candidates(&slot(3), &["ABCD"])), ["ABC", "BCD"]);
    }

    #[test]
    fn normalizes_before_substrings_and_dedups() {
        let set = derive_candidates(&slot(3), &["VERY FAST", "FAST"]);
        assert_eq!(texts(&set), ["VER", "ERY", "RYF", "YFA", "FAS", "AST"]);
        assert!(set.candidates.iter().all(|c| c.rank == 1));
        assert_eq!(set.candidates[5].offset, 5);
    }

    #[test]
    fn short_predictions_yield_nothing() {
        assert!(derive_candidates(&slot(4), &["ABC", ""]).is_empty());
    }

    #[test]
    fn load_keeps_rank_order_and_truncates() {
        let doc = r#"[{"slot": "1-Across", "predictions": ["LAUDE", "LOUD", "X"]},
                      {"slot": "2-Down", "predictions": []}]"#;
        let set = load_predictions(doc, 2, None).unwrap();
        assert_eq!(set.get(SlotId::across(1)).unwrap(), ["LAUDE", "LOUD"]);
        assert_eq!(set.get(SlotId::down(2)).unwrap(), &[] as &[String]);
        let back = load_predictions(&set.to_json(), 20, None).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn load_errors() {
        let dup = r#"[{"slot": "1-Across", "predictions": []}, {"slot": "1-Across", "predictions": []}]"#;
        assert_eq!(load_predictions(dup, 20, None), Err(CandidateError::Duplicate("1-Across".into())));
        let bad = r#"[{"slot": "1A", "predictions": []}]"#;
        assert!(matches!(load_predictions(bad, 20, None), Err(CandidateError::UnknownSlot(_))));
        assert!(matches!(load_predictions("{", 20, None), Err(CandidateError::Malformed(_))));
        let puzzle = crate::grid::parse_puzzle(r#"{"rows":1,"cols":3,"grid":["..."],"clues":[]}"#, 2).unwrap();
        let other = r#"[{"slot": "1-Down", "predictions": []}]"#;
        assert!(matches!(load_predictions(other, 20, Some(&puzzle)), Err(CandidateError::UnknownSlot(_))));
    }
}
