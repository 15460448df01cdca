//! Exact analysis of Fibonacci nim.
//!
//! A heap of `n` tokens is played with a removal cap `r`: the mover takes
//! between 1 and `r` tokens, and the next cap is twice the amount taken. The
//! crate computes Grundy values of such positions, checks the closed-form
//! descriptions of the small values against them, and plays sums of heaps
//! perfectly.

pub mod analysis;
pub mod engine;
pub mod multiheap;
pub mod zeckendorf;

pub use analysis::{classify_small, ScanReport, SmallValueClass};
pub use engine::{mex, GrundyTable, Position};
pub use multiheap::{parse_heaps, MoveRecord, MultiHeapState, Player};
pub use zeckendorf::{fib, is_fibonacci, z_part, zeckendorf, ZPart, ZeckendorfRep};
