//! HTTP game service for Fibonacci nim.
//!
//! Sessions live in memory; every session is guarded by its own lock, and
//! the Grundy table is built once at startup and shared read-only.

pub mod http;
pub mod service;
pub mod session;

pub use http::{router, serve};
pub use service::{GameService, ServiceConfig, ServiceError, SessionDocument};
pub use session::{EngineRole, GameStatus};
