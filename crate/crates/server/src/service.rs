//! Game logic behind the HTTP routes: creating sessions, applying moves with
//! engine replies, and analysing heap lists.

use std::fs;
use std::io;
use std::path::Path;
use std::sync::{Arc, Mutex, MutexGuard};

use fibnim_core::engine::{EngineError, GrundyTable, Position};
use fibnim_core::multiheap::{format_heaps, parse_heaps, HeapListError, MoveRecord, MultiHeapError};
use fibnim_core::zeckendorf::{z_part, zeckendorf};
use fibnim_core::{MultiHeapState, Player};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::session::{EngineRole, GameSession, GameStatus, SessionStore};

pub const DEFAULT_SERVICE_HORIZON: u32 = 5_000;
pub const DEFAULT_CAPACITY: usize = 1_024;
pub const MAX_HEAPS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Parse(#[from] HeapListError),
    #[error("a game needs between 1 and {max} heaps, got {got}", max = MAX_HEAPS)]
    HeapCount { got: usize },
    #[error("heap {heap} is empty")]
    EmptyHeap { heap: usize },
    #[error("heap {heap} has {tokens} tokens; the service horizon is {horizon}")]
    OutOfHorizon { heap: usize, tokens: u32, horizon: u32 },
    #[error("no heap admits a move")]
    NoPlayableHeap,
    #[error("no game with id {0}")]
    NotFound(String),
    #[error("cannot take {take} from heap {heap}: the cap is {cap}")]
    IllegalMove { heap: usize, take: u32, cap: u32 },
    #[error("no heap {heap}; the game has {heaps} heaps")]
    NoSuchHeap { heap: usize, heaps: usize },
    #[error("it is not your turn: {0}")]
    OutOfTurn(&'static str),
    #[error("the session store is full")]
    StoreFull,
}

impl ServiceError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::Parse(_) => "invalid_heaps",
            ServiceError::HeapCount { .. } => "invalid_heap_count",
            ServiceError::EmptyHeap { .. } => "empty_heap",
            ServiceError::OutOfHorizon { .. } => "out_of_horizon",
            ServiceError::NoPlayableHeap => "no_playable_heap",
            ServiceError::NotFound(_) => "not_found",
            ServiceError::IllegalMove { .. } => "illegal_move",
            ServiceError::NoSuchHeap { .. } => "no_such_heap",
            ServiceError::OutOfTurn(_) => "out_of_turn",
            ServiceError::StoreFull => "store_full",
        }
    }

    /// The legal cap of the heap a rejected move targeted.
    pub fn cap(&self) -> Option<u32> {
        match self {
            ServiceError::IllegalMove { cap, .. } => Some(*cap),
            _ => None,
        }
    }
}

impl From<MultiHeapError> for ServiceError {
    fn from(e: MultiHeapError) -> Self {
        match e {
            MultiHeapError::IllegalMove { heap_index, take, cap } => {
                ServiceError::IllegalMove { heap: heap_index, take, cap }
            }
            MultiHeapError::NoSuchHeap { heap_index, heaps } => {
                ServiceError::NoSuchHeap { heap: heap_index, heaps }
            }
            // Validated heaps never leave the horizon and the service never
            // brute-forces; these are internal faults.
            MultiHeapError::Engine(e) => panic!("engine fault on a validated state: {e}"),
            MultiHeapError::TooLarge { .. } => unreachable!("the service does not brute-force"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeapView {
    pub tokens: u32,
    pub cap: u32,
    pub grundy: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub player: Player,
    pub heap: usize,
    pub take: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionDocument {
    pub id: String,
    pub engine_role: EngineRole,
    pub heaps: Vec<HeapView>,
    pub nim_sum: u32,
    pub to_move: Player,
    pub status: GameStatus,
    pub history: Vec<HistoryEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveView {
    pub heap: usize,
    pub take: u32,
}

impl From<&MoveRecord> for MoveView {
    fn from(m: &MoveRecord) -> Self {
        MoveView { heap: m.heap_index, take: m.take }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeapAnalysis {
    pub tokens: u32,
    pub cap: u32,
    pub grundy: u32,
    /// Zeckendorf parts of `tokens`, ascending.
    pub zeckendorf: Vec<u64>,
    /// Removing this many tokens wins the heap on its own (`z1(tokens)`,
    /// when the cap allows it).
    pub z1_move: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisDocument {
    pub heaps: Vec<HeapAnalysis>,
    pub nim_sum: u32,
    pub p_position: bool,
    pub winning_moves: Vec<MoveView>,
    pub hint: Option<String>,
}

/// Per-heap values and Zeckendorf parts, the nim-sum, every winning move,
/// and a strategy hint for an N-position.
pub fn analyze_heaps(table: &GrundyTable, heaps: Vec<Position>) -> Result<AnalysisDocument, EngineError> {
    let state = MultiHeapState::new(heaps);
    let mut per_heap = Vec::with_capacity(state.heaps().len());
    for &p in state.heaps() {
        let z1 = z_part(1, p.tokens() as u64).finite().map(|v| v as u32);
        per_heap.push(HeapAnalysis {
            tokens: p.tokens(),
            cap: p.cap(),
            grundy: table.grundy(p)?,
            zeckendorf: zeckendorf(p.tokens() as u64).values().collect(),
            z1_move: z1.filter(|&z| z <= p.cap()),
        });
    }
    let nim_sum = per_heap.iter().fold(0, |acc, h| acc ^ h.grundy);
    let winning: Vec<MoveView> = state.winning_moves(table)?.iter().map(MoveView::from).collect();
    let hint = if nim_sum == 0 {
        None
    } else {
        // Prefer the classical single-heap move when it also wins the sum.
        let canonical = per_heap.iter().enumerate().find_map(|(i, h)| {
            h.z1_move
                .filter(|&z| winning.contains(&MoveView { heap: i, take: z }))
                .map(|z| format!("remove z_1({}) = {} tokens from heap {}", h.tokens, z, i))
        });
        canonical.or_else(|| winning.first().map(|m| format!("remove {} tokens from heap {}", m.take, m.heap)))
    };
    Ok(AnalysisDocument {
        heaps: per_heap,
        nim_sum,
        p_position: nim_sum == 0,
        winning_moves: winning,
        hint,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServiceConfig {
    pub horizon: u32,
    pub capacity: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            horizon: DEFAULT_SERVICE_HORIZON,
            capacity: DEFAULT_CAPACITY,
        }
    }
}

/// Serialized form of the store: each session as its creation parameters
/// plus the moves played.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub sessions: Vec<SessionRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: String,
    pub heaps: String,
    pub engine_role: EngineRole,
    pub moves: Vec<MoveView>,
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot io: {0}")]
    Io(#[from] io::Error),
    #[error("snapshot format: {0}")]
    Format(#[from] serde_json::Error),
    #[error("session {id}: {source}")]
    Replay { id: String, source: ServiceError },
}

/// The shared service state: one read-only table and the session store.
#[derive(Debug)]
pub struct GameService {
    table: Arc<GrundyTable>,
    store: Mutex<SessionStore>,
    config: ServiceConfig,
}

impl GameService {
    /// Builds the table up to the configured horizon.
    pub fn new(config: ServiceConfig) -> Result<Self, EngineError> {
        let table = GrundyTable::build(config.horizon)?;
        Ok(Self::with_table(Arc::new(table), config))
    }

    /// Uses an existing table; its horizon must cover `config.horizon`.
    pub fn with_table(table: Arc<GrundyTable>, config: ServiceConfig) -> Self {
        assert!(table.max_n() >= config.horizon, "table does not cover the service horizon");
        GameService {
            table,
            store: Mutex::new(SessionStore::new(config.capacity)),
            config,
        }
    }

    pub fn horizon(&self) -> u32 {
        self.config.horizon
    }

    pub fn table(&self) -> &GrundyTable {
        &self.table
    }

    fn store(&self) -> MutexGuard<'_, SessionStore> {
        self.store.lock().expect("store lock poisoned")
    }

    fn validate(&self, heaps: &[Position]) -> Result<(), ServiceError> {
        if heaps.is_empty() || heaps.len() > MAX_HEAPS {
            return Err(ServiceError::HeapCount { got: heaps.len() });
        }
        for (i, p) in heaps.iter().enumerate() {
            if p.tokens() > self.config.horizon {
                return Err(ServiceError::OutOfHorizon {
                    heap: i,
                    tokens: p.tokens(),
                    horizon: self.config.horizon,
                });
            }
        }
        Ok(())
    }

    pub fn create_game(&self, heaps: &str, role: EngineRole) -> Result<SessionDocument, ServiceError> {
        let heaps = parse_heaps(heaps)?;
        self.validate(&heaps)?;
        if let Some(i) = heaps.iter().position(|p| p.tokens() == 0) {
            return Err(ServiceError::EmptyHeap { heap: i });
        }
        let mut session = GameSession::new(uuid::Uuid::new_v4().simple().to_string(), heaps, role);
        if session.state.is_terminal() {
            return Err(ServiceError::NoPlayableHeap);
        }
        if session.engine_to_move() {
            self.engine_reply(&mut session);
        }
        let doc = self.document(&session);
        self.store().insert(session).map_err(|_| ServiceError::StoreFull)?;
        Ok(doc)
    }

    pub fn get_game(&self, id: &str) -> Result<SessionDocument, ServiceError> {
        let shared = self.store().get(id).ok_or_else(|| ServiceError::NotFound(id.to_string()))?;
        let session = shared.lock().expect("session lock poisoned");
        Ok(self.document(&session))
    }

    /// Applies a human move and, when the engine plays the other side, its
    /// reply. Both happen under the session's lock.
    pub fn submit_move(&self, id: &str, heap: usize, take: u32) -> Result<SessionDocument, ServiceError> {
        let shared = self.store().get(id).ok_or_else(|| ServiceError::NotFound(id.to_string()))?;
        let mut session = shared.lock().expect("session lock poisoned");
        if session.status().is_finished() {
            return Err(ServiceError::OutOfTurn("the game is over"));
        }
        if session.engine_to_move() {
            return Err(ServiceError::OutOfTurn("the engine is to move"));
        }
        session.state = session.state.play(heap, take)?;
        if session.engine_to_move() {
            self.engine_reply(&mut session);
        }
        Ok(self.document(&session))
    }

    /// The engine's choice: the first winning move if there is one,
    /// otherwise a single token from the lowest-index heap that can move.
    pub fn engine_choice(&self, state: &MultiHeapState) -> Option<MoveView> {
        let winning = state
            .winning_moves(&self.table)
            .expect("validated states stay within the horizon");
        if let Some(m) = winning.first() {
            return Some(m.into());
        }
        state
            .heaps()
            .iter()
            .position(|p| !p.is_terminal())
            .map(|heap| MoveView { heap, take: 1 })
    }

    fn engine_reply(&self, session: &mut GameSession) {
        if let Some(m) = self.engine_choice(&session.state) {
            session.state = session
                .state
                .play(m.heap, m.take)
                .expect("engine chooses legal moves");
            tracing::debug!(id = %session.id, heap = m.heap, take = m.take, "engine reply");
        }
    }

    pub fn document(&self, session: &GameSession) -> SessionDocument {
        let state = &session.state;
        let heaps: Vec<HeapView> = state
            .heaps()
            .iter()
            .map(|&p| HeapView {
                tokens: p.tokens(),
                cap: p.cap(),
                grundy: self.grundy(p),
            })
            .collect();
        let mut player = Player::First;
        let history = state
            .history()
            .iter()
            .map(|m| {
                let entry = HistoryEntry { player, heap: m.heap_index, take: m.take };
                player = player.other();
                entry
            })
            .collect();
        SessionDocument {
            id: session.id.clone(),
            engine_role: session.engine_role,
            nim_sum: heaps.iter().fold(0, |acc, h| acc ^ h.grundy),
            heaps,
            to_move: state.to_move(),
            status: session.status(),
            history,
        }
    }

    fn grundy(&self, p: Position) -> u32 {
        self.table.grundy(p).expect("validated heaps stay within the horizon")
    }

    pub fn analyze(&self, heaps: &str) -> Result<AnalysisDocument, ServiceError> {
        let heaps = parse_heaps(heaps)?;
        self.validate(&heaps)?;
        Ok(analyze_heaps(&self.table, heaps).expect("validated heaps stay within the horizon"))
    }

    pub fn snapshot(&self) -> Snapshot {
        let store = self.store();
        let sessions = store
            .iter()
            .map(|shared| {
                let s = shared.lock().expect("session lock poisoned");
                SessionRecord {
                    id: s.id.clone(),
                    heaps: format_heaps(&s.initial),
                    engine_role: s.engine_role,
                    moves: s.state.history().iter().map(MoveView::from).collect(),
                }
            })
            .collect();
        Snapshot { sessions }
    }

    /// Rebuilds sessions by replaying their recorded moves.
    pub fn restore(&self, snapshot: &Snapshot) -> Result<usize, SnapshotError> {
        let mut restored = 0;
        for rec in &snapshot.sessions {
            let replay = |rec: &SessionRecord| -> Result<GameSession, ServiceError> {
                let heaps = parse_heaps(&rec.heaps)?;
                self.validate(&heaps)?;
                let mut session = GameSession::new(rec.id.clone(), heaps, rec.engine_role);
                for m in &rec.moves {
                    session.state = session.state.play(m.heap, m.take)?;
                }
                Ok(session)
            };
            let session = replay(rec).map_err(|source| SnapshotError::Replay { id: rec.id.clone(), source })?;
            let mut store = self.store();
            if store.contains(&session.id) {
                continue;
            }
            store.insert(session).map_err(|s| SnapshotError::Replay {
                id: s.id,
                source: ServiceError::StoreFull,
            })?;
            restored += 1;
        }
        Ok(restored)
    }

    pub fn save_snapshot(&self, path: &Path) -> Result<(), SnapshotError> {
        let json = serde_json::to_string_pretty(&self.snapshot())?;
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load_snapshot(&self, path: &Path) -> Result<usize, SnapshotError> {
        let snapshot: Snapshot = serde_json::from_str(&fs::read_to_string(path)?)?;
        self.restore(&snapshot)
    }
}
