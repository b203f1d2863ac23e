//! Clue-answering and whole-puzzle evaluation metrics.
//!
//! Clue answering: Exact Match and Contains at top-k, each raw or after
//! [`normalize`]. Puzzles: character and word accuracy plus the word and character
//! removal rates introduced by the oracle filter.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use thiserror::Error;

use crate::grid::Coord;
use crate::relaxation::RelaxedPuzzle;
use crate::solver::Solution;
use crate::text_norm::normalize;

/// Cutoffs reported in [`QaReport`].
pub const REPORT_KS: [usize; 3] = [1, 10, 20];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("predicted assignment covers {found} cells, relaxed puzzle retains {expected}")]
    Coverage { found: usize, expected: usize },
    #[error("nothing to aggregate")]
    Empty,
}

fn prepared<'a>(pred: &'a str, normalized: bool) -> std::borrow::Cow<'a, str> {
    if normalized {
        normalize(pred).into()
    } else {
        pred.into()
    }
}

/// True iff one of the first `k` predictions equals the truth.
///
/// The truth is compared in normalized form; predictions are normalized only when
/// `normalized` is set. `k = 0` looks at nothing and returns false.
pub fn em_at_k<S: AsRef<str>>(truth: &str, predictions: &[S], k: usize, normalized: bool) -> bool {
    let truth = normalize(truth);
    predictions.iter().take(k).any(|p| prepared(p.as_ref(), normalized) == truth)
}

/// True iff the truth is a contiguous substring of one of the first `k` predictions.
pub fn in_at_k<S: AsRef<str>>(truth: &str, predictions: &[S], k: usize, normalized: bool) -> bool {
    let truth = normalize(truth);
    predictions.iter().take(k).any(|p| prepared(p.as_ref(), normalized).contains(truth.as_str()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QaMetric {
    Em,
    EmNorm,
    In,
    InNorm,
}

impl QaMetric {
    pub const ALL: [QaMetric; 4] = [QaMetric::Em, QaMetric::EmNorm, QaMetric::In, QaMetric::InNorm];
}

/// Per-clue outcome, stored as the first rank at which each metric hits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClueResult {
    pub truth: String,
    pub predictions: Vec<String>,
    em: Option<usize>,
    em_norm: Option<usize>,
    in_: Option<usize>,
    in_norm: Option<usize>,
}

impl ClueResult {
    pub fn new(truth: &str, predictions: Vec<String>) -> Self {
        let truth = normalize(truth);
        let first = |hit: &dyn Fn(&str) -> bool| predictions.iter().position(|p| hit(p)).map(|i| i + 1);
        let em = first(&|p| p == truth);
        let em_norm = first(&|p| normalize(p) == truth);
        let in_ = first(&|p| p.contains(truth.as_str()));
        let in_norm = first(&|p| normalize(p).contains(truth.as_str()));
        ClueResult { truth, predictions, em, em_norm, in_, in_norm }
    }

    /// First 1-based rank at which `metric` is satisfied.
    pub fn first_hit(&self, metric: QaMetric) -> Option<usize> {
        match metric {
            QaMetric::Em => self.em,
            QaMetric::EmNorm => self.em_norm,
            QaMetric::In => self.in_,
            QaMetric::InNorm => self.in_norm,
        }
    }

    pub fn flag(&self, metric: QaMetric, k: usize) -> bool {
        self.first_hit(metric).is_some_and(|r| r <= k)
    }
}

/// Writes a fraction with exactly four decimals.
fn fixed4<S: Serializer>(x: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(format!("{x:.4}")).map_err(serde::ser::Error::custom)?;
    raw.serialize(serializer)
}

/// Fractions at top-1, top-10 and top-20.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopK {
    #[serde(rename = "1", serialize_with = "fixed4")]
    pub top1: f64,
    #[serde(rename = "10", serialize_with = "fixed4")]
    pub top10: f64,
    #[serde(rename = "20", serialize_with = "fixed4")]
    pub top20: f64,
}

impl TopK {
    pub fn get(&self, k: usize) -> Option<f64> {
        match k {
            1 => Some(self.top1),
            10 => Some(self.top10),
            20 => Some(self.top20),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QaReport {
    pub em: TopK,
    pub em_norm: TopK,
    #[serde(rename = "in")]
    pub in_: TopK,
    pub in_norm: TopK,
}

impl QaReport {
    pub fn metric(&self, metric: QaMetric) -> &TopK {
        match metric {
            QaMetric::Em => &self.em,
            QaMetric::EmNorm => &self.em_norm,
            QaMetric::In => &self.in_,
            QaMetric::InNorm => &self.in_norm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PuzzleScore {
    #[serde(serialize_with = "fixed4")]
    pub acc_word: f64,
    #[serde(serialize_with = "fixed4")]
    pub acc_char: f64,
    #[serde(serialize_with = "fixed4")]
    pub rem_word: f64,
    #[serde(serialize_with = "fixed4")]
    pub rem_char: f64,
}

impl PuzzleScore {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("score serializes")
    }
}

/// Which puzzle content the accuracy fractions are taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Denominator {
    /// All white cells and slots of the original puzzle; removed content counts as wrong.
    #[default]
    Original,
    /// Only cells and slots retained after relaxation.
    Retained,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores a (possibly partial) fill against the ground truth.
///
/// A Sat `predicted` must assign exactly the retained cells. A Nosat prediction fills
/// nothing and scores zero accuracy. Removed slots never count as correct words.
pub fn score_puzzle(
    truth: &BTreeMap<Coord, char>,
    predicted: &Solution,
    relaxed: &RelaxedPuzzle<'_>,
    denominator: Denominator,
) -> Result<PuzzleScore, MetricsError> {
    let puzzle = relaxed.base;
    let retained_cells = relaxed.retained_cells();
    let empty = BTreeMap::new();
    let assignment = if predicted.is_sat() { &predicted.assignment } else { &empty };
    if predicted.is_sat() {
        let keys: BTreeSet<Coord> = assignment.keys().copied().collect();
        if keys != retained_cells {
            return Err(MetricsError::Coverage { found: keys.len(), expected: retained_cells.len() });
        }
    }

    let correct_cells = assignment.iter().filter(|(c, s)| truth.get(c) == Some(s)).count();
    let correct_words = puzzle
        .slots()
        .iter()
        .filter(|s| relaxed.retained_slots.contains(&s.id))
        .filter(|s| s.cells.iter().all(|c| assignment.get(c).is_some_and(|v| truth.get(c) == Some(v))))
        .count();

    let total_cells = puzzle.white_count();
    let total_slots = puzzle.slots().len();
    let (cell_den, slot_den) = match denominator {
        Denominator::Original => (total_cells, total_slots),
        Denominator::Retained => (retained_cells.len(), relaxed.retained_slots.len()),
    };
    Ok(PuzzleScore {
        acc_word: ratio(correct_words, slot_den),
        acc_char: ratio(correct_cells, cell_den),
        rem_word: ratio(relaxed.removed_slots.len(), total_slots),
        rem_char: ratio(relaxed.removed_cells.len(), total_cells),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qa: Option<QaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub puzzle: Option<PuzzleScore>,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Micro average over clues: fraction of clues hit at each reported cutoff.
pub fn aggregate_qa(clues: &[ClueResult]) -> Result<QaReport, MetricsError> {
    if clues.is_empty() {
        return Err(MetricsError::Empty);
    }
    let frac = |metric, k| ratio(clues.iter().filter(|c| c.flag(metric, k)).count(), clues.len());
    let row = |metric| TopK { top1: frac(metric, 1), top10: frac(metric, 10), top20: frac(metric, 20) };
    Ok(QaReport {
        em: row(QaMetric::Em),
        em_norm: row(QaMetric::EmNorm),
        in_: row(QaMetric::In),
        in_norm: row(QaMetric::InNorm),
    })
}

/// Macro average over puzzles: unweighted mean of per-puzzle scores.
pub fn aggregate_puzzles(scores: &[PuzzleScore]) -> Result<PuzzleScore, MetricsError> {
    if scores.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = scores.len() as f64;
    let mean = |f: fn(&PuzzleScore) -> f64| scores.iter().map(f).sum::<f64>() / n;
    Ok(PuzzleScore {
        acc_word: mean(|s| s.acc_word),
        acc_char: mean(|s| s.acc_char),
        rem_word: mean(|s| s.rem_word),
        rem_char: mean(|s| s.rem_char),
    })
}

/// Combines whichever parts are present; at least one item overall is required.
pub fn aggregate(clues: &[ClueResult], puzzles: &[PuzzleScore]) -> Result<MetricsReport, MetricsError> {
    if clues.is_empty() && puzzles.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(MetricsReport {
        qa: (!clues.is_empty()).then(|| aggregate_qa(clues)).transpose()?,
        puzzle: (!puzzles.is_empty()).then(|| aggregate_puzzles(puzzles)).transpose()?,
    })
}
