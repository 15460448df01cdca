//! Sums of Fibonacci nim heaps where every heap keeps its own removal cap.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{mex, EngineError, GrundyTable, Position};

/// Largest total token count `brute_force_value` accepts.
pub const BRUTE_FORCE_MAX_TOKENS: u32 = 36;
/// Largest heap count `brute_force_value` accepts.
pub const BRUTE_FORCE_MAX_HEAPS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultiHeapError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("no heap {heap_index}; the game has {heaps} heaps")]
    NoSuchHeap { heap_index: usize, heaps: usize },
    #[error("cannot take {take} from heap {heap_index}: the cap is {cap}")]
    IllegalMove { heap_index: usize, take: u32, cap: u32 },
    #[error("state too large for exhaustive search ({heaps} heaps, {tokens} tokens)")]
    TooLarge { heaps: usize, tokens: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid heap `{token}`: {reason}")]
pub struct HeapListError {
    pub token: String,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    First,
    Second,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::First => Player::Second,
            Player::Second => Player::First,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::First => write!(f, "first"),
            Player::Second => write!(f, "second"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveRecord {
    pub heap_index: usize,
    pub take: u32,
    pub resulting_position: Position,
}

/// Parses a heap list such as `12,7:6,5:5`. Each entry is `tokens` or
/// `tokens:cap`; a missing cap means a fresh heap (`tokens - 1`). Caps above
/// the heap size are clamped.
pub fn parse_heaps(text: &str) -> Result<Vec<Position>, HeapListError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(parse_heap).collect()
}

fn parse_heap(token: &str) -> Result<Position, HeapListError> {
    let err = |reason| HeapListError { token: token.trim().to_string(), reason };
    let mut parts = token.trim().splitn(2, ':');
    let tokens = parts.next().unwrap_or("");
    let tokens: u32 = tokens.trim().parse().map_err(|_| err("tokens must be a nonnegative integer"))?;
    match parts.next() {
        None => Ok(Position::start(tokens)),
        Some(cap) => {
            let cap: u32 = cap.trim().parse().map_err(|_| err("cap must be a nonnegative integer"))?;
            Ok(Position::new(tokens, cap))
        }
    }
}

/// Renders heaps in the `tokens:cap` list format.
pub fn format_heaps(heaps: &[Position]) -> String {
    heaps
        .iter()
        .map(|p| format!("{}:{}", p.tokens(), p.cap()))
        .collect::<Vec<_>>()
        .join(",")
}

/// A multi-heap game in progress.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiHeapState {
    heaps: Vec<Position>,
    to_move: Player,
    history: Vec<MoveRecord>,
}

impl MultiHeapState {
    /// A state with the given heaps and the first player to move.
    pub fn new(heaps: Vec<Position>) -> Self {
        MultiHeapState { heaps, to_move: Player::First, history: Vec::new() }
    }

    /// Fresh heaps, each starting at `(n, n - 1)`.
    pub fn fresh(sizes: &[u32]) -> Self {
        Self::new(sizes.iter().map(|&n| Position::start(n)).collect())
    }

    pub fn heaps(&self) -> &[Position] {
        &self.heaps
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn history(&self) -> &[MoveRecord] {
        &self.history
    }

    /// No heap admits a move.
    pub fn is_terminal(&self) -> bool {
        self.heaps.iter().all(|p| p.is_terminal())
    }

    /// Under normal play the player to move at a terminal state has lost.
    pub fn winner(&self) -> Option<Player> {
        self.is_terminal().then(|| self.to_move.other())
    }

    pub fn total_tokens(&self) -> u32 {
        self.heaps.iter().map(|p| p.tokens()).sum()
    }

    /// Every legal move, by heap index and then ascending take.
    pub fn legal_moves(&self) -> Vec<MoveRecord> {
        self.heaps
            .iter()
            .enumerate()
            .flat_map(|(i, p)| {
                p.options().map(move |(take, q)| MoveRecord {
                    heap_index: i,
                    take,
                    resulting_position: q,
                })
            })
            .collect()
    }

    /// Applies `take` tokens from `heap_index`, returning the new state.
    pub fn play(&self, heap_index: usize, take: u32) -> Result<MultiHeapState, MultiHeapError> {
        let heap = *self.heaps.get(heap_index).ok_or(MultiHeapError::NoSuchHeap {
            heap_index,
            heaps: self.heaps.len(),
        })?;
        if take == 0 || take > heap.cap() {
            return Err(MultiHeapError::IllegalMove { heap_index, take, cap: heap.cap() });
        }
        let next = heap.after(take);
        let mut heaps = self.heaps.clone();
        heaps[heap_index] = next;
        let mut history = self.history.clone();
        history.push(MoveRecord { heap_index, take, resulting_position: next });
        Ok(MultiHeapState { heaps, to_move: self.to_move.other(), history })
    }

    /// Applies a move; the recorded resulting position must match the rules.
    pub fn apply_move(&self, m: &MoveRecord) -> Result<MultiHeapState, MultiHeapError> {
        let next = self.play(m.heap_index, m.take)?;
        let expected = next.heaps[m.heap_index];
        if expected != m.resulting_position {
            let cap = self.heaps[m.heap_index].cap();
            return Err(MultiHeapError::IllegalMove { heap_index: m.heap_index, take: m.take, cap });
        }
        Ok(next)
    }

    /// Nim-sum of the per-heap Grundy values.
    pub fn game_value(&self, t: &GrundyTable) -> Result<u32, EngineError> {
        self.heaps
            .iter()
            .try_fold(0, |acc, &p| Ok(acc ^ t.grundy(p)?))
    }

    /// Legal moves that leave the sum with value 0.
    pub fn winning_moves(&self, t: &GrundyTable) -> Result<Vec<MoveRecord>, EngineError> {
        let values = self
            .heaps
            .iter()
            .map(|&p| t.grundy(p))
            .collect::<Result<Vec<_>, _>>()?;
        let total = values.iter().fold(0, |a, &v| a ^ v);
        if total == 0 {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for m in self.legal_moves() {
            // After the move the heap must carry exactly the value that
            // cancels the rest of the sum.
            let target = total ^ values[m.heap_index];
            if t.grundy(m.resulting_position)? == target {
                out.push(m);
            }
        }
        Ok(out)
    }

    /// Value of the whole sum by exhaustive search, without decomposing it
    /// into heaps. Only for small states.
    pub fn brute_force_value(&self) -> Result<u32, MultiHeapError> {
        BruteForce::new().value(&self.heaps)
    }
}

impl fmt::Display for MultiHeapState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", format_heaps(&self.heaps))
    }
}

impl FromStr for MultiHeapState {
    type Err = HeapListError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_heaps(s).map(MultiHeapState::new)
    }
}

/// Memoized exhaustive evaluator over whole multi-heap states.
///
/// One instance may evaluate many states; the memo is never shared between
/// instances.
#[derive(Debug, Default)]
pub struct BruteForce {
    memo: HashMap<Vec<Position>, u32>,
}

impl BruteForce {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&mut self, heaps: &[Position]) -> Result<u32, MultiHeapError> {
        let tokens: u32 = heaps.iter().map(|p| p.tokens()).sum();
        if heaps.len() > BRUTE_FORCE_MAX_HEAPS || tokens > BRUTE_FORCE_MAX_TOKENS {
            return Err(MultiHeapError::TooLarge { heaps: heaps.len(), tokens });
        }
        Ok(self.eval(heaps.to_vec()))
    }

    fn eval(&mut self, heaps: Vec<Position>) -> u32 {
        if let Some(&v) = self.memo.get(&heaps) {
            return v;
        }
        let mut values = Vec::new();
        for i in 0..heaps.len() {
            for (_, q) in heaps[i].options() {
                let mut next = heaps.clone();
                next[i] = q;
                values.push(self.eval(next));
            }
        }
        let v = mex(values);
        self.memo.insert(heaps, v);
        v
    }
}
