//! Grid geometry, slot extraction and the JSON puzzle format.
//!
//! Slots and crossings are always derived from the grid. Clue numbers in an input
//! file are only used to attach clue text and answers to the derived slots.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text_norm::normalize;

/// `(row, col)`, zero based.
pub type Coord = (usize, usize);

pub const DEFAULT_MIN_SLOT_LENGTH: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Across,
    Down,
}

impl Direction {
    fn step(self, (row, col): Coord) -> Coord {
        match self {
            Direction::Across => (row, col + 1),
            Direction::Down => (row + 1, col),
        }
    }

    fn before(self, (row, col): Coord) -> Option<Coord> {
        match self {
            Direction::Across => col.checked_sub(1).map(|c| (row, c)),
            Direction::Down => row.checked_sub(1).map(|r| (r, col)),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Across => f.write_str("Across"),
            Direction::Down => f.write_str("Down"),
        }
    }
}

/// Clue number plus direction, written `17-Across`.
///
/// Ordering is by number, then Across before Down, which is the same as the
/// row-major order of slot start cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotId {
    pub number: u32,
    pub direction: Direction,
}

impl SlotId {
    pub fn new(number: u32, direction: Direction) -> Self {
        SlotId { number, direction }
    }

    pub fn across(number: u32) -> Self {
        SlotId::new(number, Direction::Across)
    }

    pub fn down(number: u32) -> Self {
        SlotId::new(number, Direction::Down)
    }
}

impl fmt::Display for SlotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.number, self.direction)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid slot id {0:?}, expected e.g. \"17-Across\"")]
pub struct SlotIdParseError(pub String);

impl FromStr for SlotId {
    type Err = SlotIdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SlotIdParseError(s.to_string());
        let (number, direction) = s.trim().split_once('-').ok_or_else(err)?;
        let number = number.parse().map_err(|_| err())?;
        let direction = match direction.to_ascii_lowercase().as_str() {
            "across" => Direction::Across,
            "down" => Direction::Down,
            _ => return Err(err()),
        };
        Ok(SlotId { number, direction })
    }
}

impl Serialize for SlotId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SlotId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PuzzleError {
    #[error("malformed puzzle document: {0}")]
    Malformed(String),
    #[error("grid dimensions must be positive, got {rows}x{cols}")]
    EmptyGrid { rows: usize, cols: usize },
    #[error("grid has {found} rows, expected {expected}")]
    RowCount { found: usize, expected: usize },
    #[error("grid row {row} has {found} cells, expected {expected}")]
    RowLength { row: usize, found: usize, expected: usize },
    #[error("invalid grid character {ch:?} at row {row}, col {col}")]
    InvalidCell { row: usize, col: usize, ch: char },
    #[error("rebus cell at row {row}, col {col}: every cell holds exactly one symbol")]
    Rebus { row: usize, col: usize },
    #[error("blocked cell ({row}, {col}) lies outside the grid")]
    OutOfBounds { row: usize, col: usize },
    #[error("grid has no white cells")]
    NoWhiteCells,
    #[error("white cell ({row}, {col}) is not covered by any slot of length >= {min_slot_length}")]
    UncoveredCell { row: usize, col: usize, min_slot_length: usize },
    #[error("clue {0} does not match any slot in the grid")]
    UnknownSlot(SlotId),
    #[error("duplicate clue {0}")]
    DuplicateClue(SlotId),
    #[error("answer for {slot} has {found} symbols, slot length is {expected}")]
    LengthMismatch { slot: SlotId, found: usize, expected: usize },
    #[error("conflicting symbols {first:?} and {second:?} at cell ({row}, {col})")]
    Conflict { row: usize, col: usize, first: char, second: char },
    #[error("no answer for {0}")]
    MissingAnswer(SlotId),
}

/// Rectangular grid with a set of black cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridGeometry {
    rows: usize,
    cols: usize,
    blocked: BTreeSet<Coord>,
}

impl GridGeometry {
    /// Checks dimensions and block bounds. A grid without white cells is accepted
    /// here (it simply has no slots) and rejected when a [`Puzzle`] is built.
    pub fn new(rows: usize, cols: usize, blocked: impl IntoIterator<Item = Coord>) -> Result<Self, PuzzleError> {
        if rows == 0 || cols == 0 {
            return Err(PuzzleError::EmptyGrid { rows, cols });
        }
        let blocked: BTreeSet<Coord> = blocked.into_iter().collect();
        if let Some(&(row, col)) = blocked.iter().find(|&&(r, c)| r >= rows || c >= cols) {
            return Err(PuzzleError::OutOfBounds { row, col });
        }
        Ok(GridGeometry { rows, cols, blocked })
    }

    pub fn open(rows: usize, cols: usize) -> Result<Self, PuzzleError> {
        GridGeometry::new(rows, cols, [])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn blocked(&self) -> &BTreeSet<Coord> {
        &self.blocked
    }

    pub fn contains(&self, (row, col): Coord) -> bool {
        row < self.rows && col < self.cols
    }

    pub fn is_white(&self, cell: Coord) -> bool {
        self.contains(cell) && !self.blocked.contains(&cell)
    }

    /// White cells in row-major order.
    pub fn white_cells(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.rows)
            .flat_map(move |r| (0..self.cols).map(move |c| (r, c)))
            .filter(move |&cell| !self.blocked.contains(&cell))
    }

    pub fn white_count(&self) -> usize {
        self.rows * self.cols - self.blocked.len()
    }

    /// Fraction of cells that are white.
    pub fn fill_fraction(&self) -> f64 {
        self.white_count() as f64 / (self.rows * self.cols) as f64
    }

    /// Length of the maximal white run through `cell` in `direction` (0 for black cells).
    pub fn run_length(&self, cell: Coord, direction: Direction) -> usize {
        if !self.is_white(cell) {
            return 0;
        }
        let mut start = cell;
        while let Some(prev) = direction.before(start).filter(|&p| self.is_white(p)) {
            start = prev;
        }
        let mut len = 0;
        let mut cur = start;
        while self.is_white(cur) {
            len += 1;
            cur = direction.step(cur);
        }
        len
    }
}

/// One maximal Across or Down run of white cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub id: SlotId,
    pub cells: Vec<Coord>,
}

impl Slot {
    pub fn direction(&self) -> Direction {
        self.id.direction
    }

    pub fn start(&self) -> Coord {
        self.cells[0]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn offset_of(&self, cell: Coord) -> Option<usize> {
        self.cells.iter().position(|&c| c == cell)
    }
}

/// Derives the slots of `geometry`, numbered the usual way: every cell that starts a
/// slot gets the next number in row-major order. Output is sorted by
/// `(row, col, direction)`, which coincides with [`SlotId`] order.
pub fn extract_slots(geometry: &GridGeometry, min_slot_length: usize) -> Vec<Slot> {
    let min_len = min_slot_length.max(1);
    let mut slots = Vec::new();
    let mut number = 0;
    for cell in geometry.white_cells() {
        let mut started = Vec::with_capacity(2);
        for direction in [Direction::Across, Direction::Down] {
            let opens = direction.before(cell).is_none_or(|p| !geometry.is_white(p));
            if !opens {
                continue;
            }
            let mut cells = Vec::new();
            let mut cur = cell;
            while geometry.is_white(cur) {
                cells.push(cur);
                cur = direction.step(cur);
            }
            if cells.len() >= min_len {
                started.push((direction, cells));
            }
        }
        if started.is_empty() {
            continue;
        }
        number += 1;
        for (direction, cells) in started {
            slots.push(Slot { id: SlotId::new(number, direction), cells });
        }
    }
    slots
}

/// A cell shared by an Across and a Down slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Crossing {
    pub cell: Coord,
    pub across: SlotId,
    pub across_offset: usize,
    pub down: SlotId,
    pub down_offset: usize,
}

/// One entry per shared cell, in row-major cell order.
///
/// Maximal runs in one direction are disjoint, so a shared cell always pairs
/// exactly one Across slot with one Down slot.
pub fn compute_crossings(slots: &[Slot]) -> Vec<Crossing> {
    let mut across_at: BTreeMap<Coord, (SlotId, usize)> = BTreeMap::new();
    for slot in slots.iter().filter(|s| s.direction() == Direction::Across) {
        for (offset, &cell) in slot.cells.iter().enumerate() {
            across_at.insert(cell, (slot.id, offset));
        }
    }
    let mut crossings = Vec::new();
    for slot in slots.iter().filter(|s| s.direction() == Direction::Down) {
        for (down_offset, &cell) in slot.cells.iter().enumerate() {
            if let Some(&(across, across_offset)) = across_at.get(&cell) {
                crossings.push(Crossing { cell, across, across_offset, down: slot.id, down_offset });
            }
        }
    }
    crossings.sort();
    crossings
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClueEntry {
    pub slot_id: SlotId,
    pub text: String,
    /// Normalized (uppercase A-Z/0-9) ground truth.
    pub answer: Option<String>,
    pub category: Option<String>,
}

impl ClueEntry {
    pub fn new(slot_id: SlotId, text: impl Into<String>) -> Self {
        ClueEntry { slot_id, text: text.into(), answer: None, category: None }
    }

    pub fn with_answer(mut self, answer: impl AsRef<str>) -> Self {
        self.answer = Some(normalize(answer.as_ref()));
        self
    }
}

/// A validated puzzle. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Puzzle {
    geometry: GridGeometry,
    min_slot_length: usize,
    slots: Vec<Slot>,
    clues: BTreeMap<SlotId, ClueEntry>,
    crossings: Vec<Crossing>,
}

impl Puzzle {
    /// Derives slots and crossings from `geometry` and attaches `clues`.
    ///
    /// Answers are normalized; answers of crossing slots must agree on shared cells.
    pub fn new(
        geometry: GridGeometry,
        min_slot_length: usize,
        clues: impl IntoIterator<Item = ClueEntry>,
    ) -> Result<Self, PuzzleError> {
        Puzzle::with_letters(geometry, min_slot_length, clues, BTreeMap::new())
    }

    /// Like [`Puzzle::new`], with pre-filled grid letters. Slots whose cells are all
    /// lettered receive the letters as their answer.
    fn with_letters(
        geometry: GridGeometry,
        min_slot_length: usize,
        clues: impl IntoIterator<Item = ClueEntry>,
        mut letters: BTreeMap<Coord, char>,
    ) -> Result<Self, PuzzleError> {
        if geometry.white_count() == 0 {
            return Err(PuzzleError::NoWhiteCells);
        }
        let min_slot_length = min_slot_length.max(1);
        let slots = extract_slots(&geometry, min_slot_length);
        let covered: BTreeSet<Coord> = slots.iter().flat_map(|s| s.cells.iter().copied()).collect();
        if let Some((row, col)) = geometry.white_cells().find(|c| !covered.contains(c)) {
            return Err(PuzzleError::UncoveredCell { row, col, min_slot_length });
        }
        let by_id: BTreeMap<SlotId, &Slot> = slots.iter().map(|s| (s.id, s)).collect();

        let mut entries = BTreeMap::new();
        for mut clue in clues {
            let slot = by_id.get(&clue.slot_id).ok_or(PuzzleError::UnknownSlot(clue.slot_id))?;
            if let Some(answer) = clue.answer.take() {
                let answer = normalize(&answer);
                if answer.len() != slot.len() {
                    return Err(PuzzleError::LengthMismatch {
                        slot: slot.id,
                        found: answer.len(),
                        expected: slot.len(),
                    });
                }
                for (&cell, ch) in slot.cells.iter().zip(answer.chars()) {
                    place_letter(&mut letters, cell, ch)?;
                }
                clue.answer = Some(answer);
            }
            if entries.insert(clue.slot_id, clue.clone()).is_some() {
                return Err(PuzzleError::DuplicateClue(clue.slot_id));
            }
        }

        for slot in &slots {
            let answer: Option<String> = slot.cells.iter().map(|c| letters.get(c).copied()).collect();
            if let Some(answer) = answer {
                entries.entry(slot.id).or_insert_with(|| ClueEntry::new(slot.id, "")).answer = Some(answer);
            }
        }

        let crossings = compute_crossings(&slots);
        Ok(Puzzle { geometry, min_slot_length, slots, clues: entries, crossings })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn min_slot_length(&self) -> usize {
        self.min_slot_length
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot(&self, id: SlotId) -> Option<&Slot> {
        self.slots.binary_search_by(|s| s.id.cmp(&id)).ok().map(|i| &self.slots[i])
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn clues(&self) -> &BTreeMap<SlotId, ClueEntry> {
        &self.clues
    }

    pub fn clue(&self, id: SlotId) -> Option<&ClueEntry> {
        self.clues.get(&id)
    }

    pub fn answer(&self, id: SlotId) -> Option<&str> {
        self.clues.get(&id).and_then(|c| c.answer.as_deref())
    }

    pub fn white_count(&self) -> usize {
        self.geometry.white_count()
    }

    pub fn has_answer_key(&self) -> bool {
        self.slots.iter().all(|s| self.answer(s.id).is_some())
    }

    /// The ground-truth symbol of every white cell.
    pub fn answer_grid(&self) -> Result<BTreeMap<Coord, char>, PuzzleError> {
        let mut grid = BTreeMap::new();
        for slot in &self.slots {
            let answer = self.answer(slot.id).ok_or(PuzzleError::MissingAnswer(slot.id))?;
            grid.extend(slot.cells.iter().copied().zip(answer.chars()));
        }
        Ok(grid)
    }

    /// True when every white cell lies in both an Across and a Down slot.
    pub fn is_fully_checked(&self) -> bool {
        self.crossings.len() == self.white_count()
    }

    /// Returns a copy with the given answers attached (placeholder clue text for
    /// slots that had no clue).
    pub fn with_answers(&self, answers: &BTreeMap<SlotId, String>) -> Result<Puzzle, PuzzleError> {
        let mut clues = self.clues.clone();
        for (&id, answer) in answers {
            clues.entry(id).or_insert_with(|| ClueEntry::new(id, "")).answer = Some(answer.clone());
        }
        Puzzle::new(self.geometry.clone(), self.min_slot_length, clues.into_values())
    }

    /// Serializes to the JSON puzzle format. Known answers are written into the grid.
    pub fn to_json(&self) -> String {
        let letters = self.known_letters();
        let grid = (0..self.geometry.rows)
            .map(|r| {
                (0..self.geometry.cols)
                    .map(|c| {
                        if !self.geometry.is_white((r, c)) {
                            '#'
                        } else {
                            letters.get(&(r, c)).copied().unwrap_or('.')
                        }
                    })
                    .collect()
            })
            .collect();
        let clues = self
            .clues
            .values()
            .map(|c| ClueRecord {
                number: c.slot_id.number,
                direction: c.slot_id.direction,
                text: c.text.clone(),
                answer: c.answer.clone(),
                category: c.category.clone(),
            })
            .collect();
        let file = PuzzleFile { rows: self.geometry.rows, cols: self.geometry.cols, grid, clues };
        serde_json::to_string_pretty(&file).expect("puzzle file serializes")
    }

    fn known_letters(&self) -> BTreeMap<Coord, char> {
        let mut letters = BTreeMap::new();
        for slot in &self.slots {
            if let Some(answer) = self.answer(slot.id) {
                letters.extend(slot.cells.iter().copied().zip(answer.chars()));
            }
        }
        letters
    }
}

fn place_letter(letters: &mut BTreeMap<Coord, char>, cell: Coord, ch: char) -> Result<(), PuzzleError> {
    match letters.insert(cell, ch) {
        Some(prev) if prev != ch => Err(PuzzleError::Conflict { row: cell.0, col: cell.1, first: prev, second: ch }),
        _ => Ok(()),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct PuzzleFile {
    rows: usize,
    cols: usize,
    grid: Vec<String>,
    #[serde(default)]
    clues: Vec<ClueRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ClueRecord {
    number: u32,
    direction: Direction,
    #[serde(default)]
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    answer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    category: Option<String>,
}

enum GridCell {
    Black,
    White(Option<char>),
}

/// Splits one grid row into cells. `[...]` denotes a multi-symbol (rebus) cell and
/// is rejected.
fn parse_row(row: usize, text: &str) -> Result<Vec<GridCell>, PuzzleError> {
    let mut cells = Vec::new();
    for ch in text.chars() {
        let col = cells.len();
        let cell = match ch {
            '#' => GridCell::Black,
            '.' => GridCell::White(None),
            'A'..='Z' | '0'..='9' => GridCell::White(Some(ch)),
            '[' => return Err(PuzzleError::Rebus { row, col }),
            _ => return Err(PuzzleError::InvalidCell { row, col, ch }),
        };
        cells.push(cell);
    }
    Ok(cells)
}

/// Parses the JSON puzzle format and validates it against the derived slots.
pub fn parse_puzzle(document: &str, min_slot_length: usize) -> Result<Puzzle, PuzzleError> {
    let file: PuzzleFile = serde_json::from_str(document).map_err(|e| PuzzleError::Malformed(e.to_string()))?;
    if file.rows == 0 || file.cols == 0 {
        return Err(PuzzleError::EmptyGrid { rows: file.rows, cols: file.cols });
    }
    if file.grid.len() != file.rows {
        return Err(PuzzleError::RowCount { found: file.grid.len(), expected: file.rows });
    }
    let mut blocked = Vec::new();
    let mut letters = BTreeMap::new();
    for (r, text) in file.grid.iter().enumerate() {
        let cells = parse_row(r, text)?;
        if cells.len() != file.cols {
            return Err(PuzzleError::RowLength { row: r, found: cells.len(), expected: file.cols });
        }
        for (c, cell) in cells.into_iter().enumerate() {
            match cell {
                GridCell::Black => blocked.push((r, c)),
                GridCell::White(Some(ch)) => {
                    letters.insert((r, c), ch);
                }
                GridCell::White(None) => {}
            }
        }
    }
    let geometry = GridGeometry::new(file.rows, file.cols, blocked)?;
    let clues = file.clues.into_iter().map(|c| ClueEntry {
        slot_id: SlotId::new(c.number, c.direction),
        text: c.text,
        answer: c.answer,
        category: c.category,
    });
    Puzzle::with_letters(geometry, min_slot_length, clues, letters)
}
