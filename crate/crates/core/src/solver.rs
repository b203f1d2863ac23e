//! Finite-domain model of a crossword fill and a search engine for it.
//!
//! Every white cell in scope is a variable over the 36 symbols `A-Z0-9`. Each slot
//! contributes one disjunctive constraint: the slot's cells spell one of its
//! candidates. Crossings need no separate constraint because crossing slots share
//! the same variable.
//!
//! Search branches on whole slots. At each node the unassigned slot with the fewest
//! surviving candidates is chosen (ties go to the lowest [`SlotId`]), its candidates
//! are tried in stored order, and propagation runs after every choice.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::candidates::CandidateMap;
use crate::grid::{Coord, Puzzle, SlotId};

pub const ALPHABET: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

pub fn symbol_index(ch: char) -> Option<u8> {
    match ch {
        'A'..='Z' => Some(ch as u8 - b'A'),
        '0'..='9' => Some(ch as u8 - b'0' + 26),
        _ => None,
    }
}

pub fn symbol_char(index: u8) -> char {
    ALPHABET.as_bytes()[index as usize] as char
}

/// Set of symbols, one bit per alphabet entry.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Domain(u64);

impl Domain {
    pub const FULL: Domain = Domain((1 << 36) - 1);
    pub const EMPTY: Domain = Domain(0);

    pub fn contains(self, symbol: u8) -> bool {
        self.0 >> symbol & 1 == 1
    }

    pub fn insert(&mut self, symbol: u8) {
        self.0 |= 1 << symbol;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn chars(self) -> impl Iterator<Item = char> {
        (0..36u8).filter(move |&s| self.contains(s)).map(symbol_char)
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.chars().collect::<String>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellVariable {
    pub coord: Coord,
    pub domain: Domain,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("slot {0} has no candidates; apply the oracle filter before building the model")]
    EmptyCandidates(SlotId),
    #[error("candidate {text:?} for {slot} does not fit the slot")]
    InvalidCandidate { slot: SlotId, text: String },
    #[error("slot {0} is not part of the puzzle")]
    UnknownSlot(SlotId),
}

/// Propagation emptied a candidate list or a cell domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("inconsistent at {slot}")]
pub struct Inconsistency {
    pub slot: SlotId,
}

#[derive(Debug, Clone)]
struct SlotConstraint {
    id: SlotId,
    vars: Vec<usize>,
    texts: Vec<String>,
    words: Vec<Vec<u8>>,
}

/// Mutable part of the model: surviving candidates and cell domains.
#[derive(Debug, Clone, PartialEq, Eq)]
struct SearchState {
    domains: Vec<Domain>,
    alive: Vec<Vec<u32>>,
}

#[derive(Debug, Clone)]
pub struct ConstraintModel {
    cells: Vec<Coord>,
    slots: Vec<SlotConstraint>,
    /// For each variable, the (slot index, offset) pairs that use it.
    occurrences: Vec<Vec<(usize, usize)>>,
    state: SearchState,
}

/// Builds the model over every slot of `puzzle`.
pub fn build_model(puzzle: &Puzzle, candidates: &CandidateMap) -> Result<ConstraintModel, ModelError> {
    let scope: Vec<SlotId> = puzzle.slots().iter().map(|s| s.id).collect();
    ConstraintModel::for_slots(puzzle, candidates, &scope)
}

impl ConstraintModel {
    /// Builds the model over the given slots only. Cells outside those slots get no
    /// variable. Repeated candidate strings are kept once.
    pub fn for_slots(puzzle: &Puzzle, candidates: &CandidateMap, scope: &[SlotId]) -> Result<Self, ModelError> {
        let scope: BTreeSet<SlotId> = scope.iter().copied().collect();
        let mut var_of: BTreeMap<Coord, usize> = BTreeMap::new();
        let mut cells = Vec::new();
        let mut slots = Vec::new();
        for &id in &scope {
            let slot = puzzle.slot(id).ok_or(ModelError::UnknownSlot(id))?;
            let set = candidates.get(&id).filter(|s| !s.is_empty()).ok_or(ModelError::EmptyCandidates(id))?;
            let vars = slot
                .cells
                .iter()
                .map(|&c| {
                    *var_of.entry(c).or_insert_with(|| {
                        cells.push(c);
                        cells.len() - 1
                    })
                })
                .collect();
            let mut texts = Vec::new();
            let mut words = Vec::new();
            let mut seen = BTreeSet::new();
            for text in set.texts() {
                let word: Option<Vec<u8>> = text.chars().map(symbol_index).collect();
                match word {
                    Some(w) if w.len() == slot.len() => {
                        if seen.insert(text) {
                            texts.push(text.to_string());
                            words.push(w);
                        }
                    }
                    _ => return Err(ModelError::InvalidCandidate { slot: id, text: text.to_string() }),
                }
            }
            slots.push(SlotConstraint { id, vars, texts, words });
        }
        let mut occurrences = vec![Vec::new(); cells.len()];
        for (si, s) in slots.iter().enumerate() {
            for (offset, &v) in s.vars.iter().enumerate() {
                occurrences[v].push((si, offset));
            }
        }
        let state = SearchState {
            domains: vec![Domain::FULL; cells.len()],
            alive: slots.iter().map(|s| (0..s.words.len() as u32).collect()).collect(),
        };
        Ok(ConstraintModel { cells, slots, occurrences, state })
    }

    pub fn variables(&self) -> Vec<CellVariable> {
        self.cells
            .iter()
            .zip(&self.state.domains)
            .map(|(&coord, &domain)| CellVariable { coord, domain })
            .collect()
    }

    pub fn domain(&self, cell: Coord) -> Option<Domain> {
        self.cells.iter().position(|&c| c == cell).map(|i| self.state.domains[i])
    }

    pub fn slot_ids(&self) -> impl Iterator<Item = SlotId> + '_ {
        self.slots.iter().map(|s| s.id)
    }

    /// Candidates of `slot` that are still consistent, in stored order.
    pub fn surviving(&self, slot: SlotId) -> Option<Vec<&str>> {
        let si = self.slots.iter().position(|s| s.id == slot)?;
        Some(self.state.alive[si].iter().map(|&w| self.slots[si].texts[w as usize].as_str()).collect())
    }

    /// Returns the model at its propagation fixpoint.
    pub fn propagate(&self) -> Result<ConstraintModel, Inconsistency> {
        let mut pruned = self.clone();
        let all: Vec<usize> = (0..self.slots.len()).collect();
        pruned.propagate_state_from(&all)?;
        Ok(pruned)
    }

    fn propagate_state_from(&mut self, start: &[usize]) -> Result<(), Inconsistency> {
        let mut state = std::mem::replace(
            &mut self.state,
            SearchState { domains: Vec::new(), alive: Vec::new() },
        );
        let result = self.propagate_into(&mut state, start);
        self.state = state;
        result
    }

    /// Fixpoint of: drop candidates using a symbol missing from a cell domain, then
    /// shrink each cell domain to the symbols surviving candidates put there.
    fn propagate_into(&self, state: &mut SearchState, start: &[usize]) -> Result<(), Inconsistency> {
        let mut queued = vec![false; self.slots.len()];
        let mut queue = VecDeque::with_capacity(self.slots.len());
        for &s in start {
            if !queued[s] {
                queued[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(si) = queue.pop_front() {
            queued[si] = false;
            let slot = &self.slots[si];
            let domains = &state.domains;
            state.alive[si].retain(|&w| {
                slot.words[w as usize].iter().zip(&slot.vars).all(|(&sym, &v)| domains[v].contains(sym))
            });
            if state.alive[si].is_empty() {
                return Err(Inconsistency { slot: slot.id });
            }
            for (offset, &v) in slot.vars.iter().enumerate() {
                let mut support = Domain::EMPTY;
                for &w in &state.alive[si] {
                    support.insert(slot.words[w as usize][offset]);
                }
                let narrowed = Domain(state.domains[v].0 & support.0);
                if narrowed == state.domains[v] {
                    continue;
                }
                if narrowed.is_empty() {
                    return Err(Inconsistency { slot: slot.id });
                }
                state.domains[v] = narrowed;
                for &(other, _) in &self.occurrences[v] {
                    if other != si && !queued[other] {
                        queued[other] = true;
                        queue.push_back(other);
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Sat,
    Nosat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub assignment: BTreeMap<Coord, char>,
    pub chosen: BTreeMap<SlotId, String>,
    pub status: Status,
}

impl Solution {
    pub fn nosat() -> Self {
        Solution { assignment: BTreeMap::new(), chosen: BTreeMap::new(), status: Status::Nosat }
    }

    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Stop after this many solutions; `None` enumerates all.
    pub limit: Option<usize>,
    /// Give up after expanding this many search nodes.
    pub node_budget: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { limit: Some(1), node_budget: None }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub solutions: Vec<Solution>,
    pub nodes: u64,
    /// False when the node budget ran out before the search finished.
    pub complete: bool,
}

impl SearchOutcome {
    pub fn status(&self) -> Status {
        if self.solutions.is_empty() {
            Status::Nosat
        } else {
            Status::Sat
        }
    }
}

/// Returns up to `limit` solutions (`None` for all) in search order. An empty result
/// means the model is unsatisfiable.
pub fn solve(model: &ConstraintModel, limit: Option<usize>) -> Vec<Solution> {
    solve_with(model, SolveOptions { limit, node_budget: None }).solutions
}

pub fn solve_with(model: &ConstraintModel, options: SolveOptions) -> SearchOutcome {
    let mut search = Search {
        model,
        options,
        assigned: vec![false; model.slots.len()],
        solutions: Vec::new(),
        nodes: 0,
        out_of_budget: false,
    };
    if options.limit != Some(0) {
        let mut root = model.state.clone();
        let all: Vec<usize> = (0..model.slots.len()).collect();
        if model.propagate_into(&mut root, &all).is_ok() {
            search.descend(root);
        }
    }
    SearchOutcome { solutions: search.solutions, nodes: search.nodes, complete: !search.out_of_budget }
}

struct Search<'m> {
    model: &'m ConstraintModel,
    options: SolveOptions,
    assigned: Vec<bool>,
    solutions: Vec<Solution>,
    nodes: u64,
    out_of_budget: bool,
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.out_of_budget || self.options.limit.is_some_and(|l| self.solutions.len() >= l)
    }

    fn descend(&mut self, state: SearchState) {
        self.nodes += 1;
        if self.options.node_budget.is_some_and(|b| self.nodes > b) {
            self.out_of_budget = true;
            return;
        }
        // Slots are stored in id order, so the first minimum is the lowest id.
        let next = (0..self.model.slots.len()).filter(|&s| !self.assigned[s]).min_by_key(|&s| state.alive[s].len());
        let Some(si) = next else {
            self.record(&state);
            return;
        };
        self.assigned[si] = true;
        for &w in &state.alive[si] {
            let mut child = state.clone();
            child.alive[si] = vec![w];
            if self.model.propagate_into(&mut child, &[si]).is_ok() {
                self.descend(child);
            }
            if self.done() {
                break;
            }
        }
        self.assigned[si] = false;
    }

    fn record(&mut self, state: &SearchState) {
        let model = self.model;
        let mut assignment = BTreeMap::new();
        let mut chosen = BTreeMap::new();
        for (si, slot) in model.slots.iter().enumerate() {
            let w = state.alive[si][0] as usize;
            chosen.insert(slot.id, slot.texts[w].clone());
            for (&v, &sym) in slot.vars.iter().zip(&slot.words[w]) {
                assignment.insert(model.cells[v], symbol_char(sym));
            }
        }
        self.solutions.push(Solution { assignment, chosen, status: Status::Sat });
    }
}

/// Checks a Sat solution against the three fill conditions for the given slots:
/// each chosen string is one of the slot's candidates, has the slot's length, and is
/// spelled by the assigned cells (which makes crossing slots agree).
pub fn verify_solution(
    puzzle: &Puzzle,
    candidates: &CandidateMap,
    scope: &[SlotId],
    solution: &Solution,
) -> Result<(), String> {
    for &id in scope {
        let slot = puzzle.slot(id).ok_or_else(|| format!("unknown slot {id}"))?;
        let chosen = solution.chosen.get(&id).ok_or_else(|| format!("no choice for {id}"))?;
        if chosen.len() != slot.len() {
            return Err(format!("{id}: {chosen:?} has the wrong length"));
        }
        if !candidates.get(&id).is_some_and(|c| c.contains(chosen)) {
            return Err(format!("{id}: {chosen:?} is not a candidate"));
        }
        let spelled: Option<String> = slot.cells.iter().map(|c| solution.assignment.get(c).copied()).collect();
        if spelled.as_deref() != Some(chosen.as_str()) {
            return Err(format!("{id}: cells spell {spelled:?}, chosen {chosen:?}"));
        }
    }
    Ok(())
}
