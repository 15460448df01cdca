//! Game sessions and the in-memory store that holds them.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use fibnim_core::{MultiHeapState, Player, Position};
use serde::{Deserialize, Serialize};

/// Which side, if any, the engine plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineRole {
    #[default]
    None,
    PlaysFirst,
    PlaysSecond,
}

impl EngineRole {
    pub fn player(self) -> Option<Player> {
        match self {
            EngineRole::None => None,
            EngineRole::PlaysFirst => Some(Player::First),
            EngineRole::PlaysSecond => Some(Player::Second),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameStatus {
    InProgress,
    FirstWon,
    SecondWon,
}

impl GameStatus {
    pub fn of(state: &MultiHeapState) -> GameStatus {
        match state.winner() {
            None => GameStatus::InProgress,
            Some(Player::First) => GameStatus::FirstWon,
            Some(Player::Second) => GameStatus::SecondWon,
        }
    }

    pub fn is_finished(self) -> bool {
        self != GameStatus::InProgress
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSession {
    pub id: String,
    /// Heaps as created; the current state is these plus `state.history()`.
    pub initial: Vec<Position>,
    pub state: MultiHeapState,
    pub engine_role: EngineRole,
}

impl GameSession {
    pub fn new(id: String, heaps: Vec<Position>, engine_role: EngineRole) -> Self {
        GameSession {
            id,
            state: MultiHeapState::new(heaps.clone()),
            initial: heaps,
            engine_role,
        }
    }

    pub fn status(&self) -> GameStatus {
        GameStatus::of(&self.state)
    }

    /// Whether the engine is the player to move in an unfinished game.
    pub fn engine_to_move(&self) -> bool {
        !self.status().is_finished() && self.engine_role.player() == Some(self.state.to_move())
    }
}

pub type SharedSession = Arc<Mutex<GameSession>>;

/// Live sessions keyed by id, bounded by `capacity`. When full, the oldest
/// finished session makes room; unfinished sessions are never evicted.
#[derive(Debug)]
pub struct SessionStore {
    sessions: HashMap<String, SharedSession>,
    order: VecDeque<String>,
    capacity: usize,
}

impl SessionStore {
    pub fn new(capacity: usize) -> Self {
        SessionStore {
            sessions: HashMap::new(),
            order: VecDeque::new(),
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, id: &str) -> Option<SharedSession> {
        self.sessions.get(id).cloned()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.sessions.contains_key(id)
    }

    /// Inserts a session, evicting the oldest finished one if the store is
    /// full. Returns the session back if no room can be made.
    pub fn insert(&mut self, session: GameSession) -> Result<SharedSession, GameSession> {
        if self.sessions.len() >= self.capacity && !self.evict_one() {
            return Err(session);
        }
        let id = session.id.clone();
        let shared = Arc::new(Mutex::new(session));
        self.sessions.insert(id.clone(), shared.clone());
        self.order.push_back(id);
        Ok(shared)
    }

    fn evict_one(&mut self) -> bool {
        let victim = self.order.iter().position(|id| {
            self.sessions
                .get(id)
                .is_some_and(|s| s.lock().expect("session lock poisoned").status().is_finished())
        });
        match victim {
            Some(i) => {
                let id = self.order.remove(i).expect("index from position");
                self.sessions.remove(&id);
                true
            }
            None => false,
        }
    }

    /// Sessions in creation order.
    pub fn iter(&self) -> impl Iterator<Item = &SharedSession> {
        self.order.iter().filter_map(|id| self.sessions.get(id))
    }
}
