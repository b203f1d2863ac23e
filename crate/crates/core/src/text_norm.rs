//! Answer-string normalization and dictionary-based splitting of merged answers.

use std::collections::BTreeMap;

use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Reduces `text` to the answer alphabet: canonical decomposition, combining marks
/// dropped, uppercased, then everything outside `A-Z0-9` removed.
///
/// The result is never longer (in UTF-8 bytes) than the input, and
/// `normalize(normalize(s)) == normalize(s)`.
pub fn normalize(text: &str) -> String {
    text.nfd()
        .filter(|&c| !is_combining_mark(c))
        .flat_map(char::to_uppercase)
        .filter(|c| c.is_ascii_uppercase() || c.is_ascii_digit())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LexiconError {
    #[error("line {line}: expected WORD<TAB>frequency")]
    BadLine { line: usize },
    #[error("line {line}: invalid frequency {value:?}")]
    BadFrequency { line: usize, value: String },
    #[error("frequency for {word} must be a finite non-negative number, got {frequency}")]
    NegativeFrequency { word: String, frequency: f64 },
}

/// Normalized words with relative corpus frequencies.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, f64>,
    max_len: usize,
}

impl Lexicon {
    /// Words are normalized on insertion; words that normalize to nothing are dropped.
    /// When two spellings collide, the larger frequency wins.
    pub fn new<W: AsRef<str>>(entries: impl IntoIterator<Item = (W, f64)>) -> Result<Self, LexiconError> {
        let mut lexicon = Lexicon::default();
        for (word, frequency) in entries {
            lexicon.insert(word.as_ref(), frequency)?;
        }
        Ok(lexicon)
    }

    /// Parses `WORD<TAB>frequency` lines. Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lexicon = Lexicon::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, freq) = line.split_once('\t').ok_or(LexiconError::BadLine { line: line_no })?;
            let frequency: f64 = freq
                .trim()
                .parse()
                .map_err(|_| LexiconError::BadFrequency { line: line_no, value: freq.to_string() })?;
            lexicon.insert(word, frequency)?;
        }
        Ok(lexicon)
    }

    fn insert(&mut self, word: &str, frequency: f64) -> Result<(), LexiconError> {
        let word = normalize(word);
        if !(frequency.is_finite() && frequency >= 0.0) {
            return Err(LexiconError::NegativeFrequency { word, frequency });
        }
        if word.is_empty() {
            return Ok(());
        }
        self.max_len = self.max_len.max(word.len());
        let slot = self.entries.entry(word).or_insert(frequency);
        *slot = slot.max(frequency);
        Ok(())
    }

    /// Writes the lexicon back out in the `WORD<TAB>frequency` format.
    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(w, f)| format!("{w}\t{f}\n")).collect()
    }

    pub fn frequency(&self, word: &str) -> Option<f64> {
        self.entries.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_word_len(&self) -> usize {
        self.max_len
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(w, &f)| (w.as_str(), f))
    }

    /// Words of exactly `len` symbols, in lexicographic order.
    pub fn words_of_len(&self, len: usize) -> Vec<&str> {
        self.entries.keys().filter(|w| w.len() == len).map(String::as_str).collect()
    }
}

/// Output of [`split_answer`].
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub words: Vec<String>,
    /// False when no full segmentation exists and `words` is the unsplit input.
    pub segmented: bool,
}

impl Segmentation {
    pub fn joined(&self) -> String {
        self.words.join(" ")
    }
}

#[derive(Clone)]
struct Best<'a> {
    count: usize,
    total: f64,
    words: Vec<&'a str>,
}

impl Best<'_> {
    // Fewer words, then higher mean frequency, then the lexicographically earliest
    // word sequence. Counts are equal when totals are compared, so comparing totals
    // is the same as comparing means.
    fn beats(&self, other: &Best<'_>) -> bool {
        self.count
            .cmp(&other.count)
            .then_with(|| other.total.total_cmp(&self.total))
            .then_with(|| self.words.cmp(&other.words))
            .is_lt()
    }
}

/// Splits a merged answer (e.g. `VERYFAST`) into lexicon words.
///
/// Picks the segmentation with the fewest words, breaking ties by highest average
/// word frequency and then by lexicographic order of the word sequence. Falls back
/// to the unsplit input when no full segmentation exists.
pub fn split_answer(merged: &str, lexicon: &Lexicon) -> Segmentation {
    let bytes = merged.as_bytes();
    let n = bytes.len();
    // best[i]: optimal segmentation of merged[i..]
    let mut best: Vec<Option<Best<'_>>> = vec![None; n + 1];
    best[n] = Some(Best { count: 0, total: 0.0, words: Vec::new() });
    for i in (0..n).rev() {
        let mut here: Option<Best<'_>> = None;
        for j in (i + 1)..=n.min(i + lexicon.max_word_len()) {
            let Some(rest) = &best[j] else { continue };
            let Some((word, freq)) = std::str::from_utf8(&bytes[i..j])
                .ok()
                .and_then(|w| lexicon.entries.get_key_value(w))
            else {
                continue;
            };
            let mut words = Vec::with_capacity(rest.words.len() + 1);
            words.push(word.as_str());
            words.extend_from_slice(&rest.words);
            let cand = Best { count: rest.count + 1, total: freq + rest.total, words };
            if here.as_ref().is_none_or(|h| cand.beats(h)) {
                here = Some(cand);
            }
        }
        best[i] = here;
    }
    match best.swap_remove(0) {
        Some(b) => Segmentation { words: b.words.into_iter().map(str::to_string).collect(), segmented: true },
        None => Segmentation { words: vec![merged.to_string()], segmented: false },
    }
}
