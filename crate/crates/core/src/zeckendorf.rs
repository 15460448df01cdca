//! Fibonacci numbers and Zeckendorf decompositions.
//!
//! Indexing follows the usual convention `F_0 = 0`, `F_1 = 1`. In a
//! decomposition the part `1` is always stored as index 2, so every part
//! index is at least 2 and no two indices are adjacent.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest index whose Fibonacci number fits in a `u64` (`F_93 ≈ 1.2e19`).
pub const MAX_FIB_INDEX: u32 = 93;

const FIBS: [u64; MAX_FIB_INDEX as usize + 1] = {
    let mut table = [0u64; MAX_FIB_INDEX as usize + 1];
    table[1] = 1;
    let mut i = 2;
    while i <= MAX_FIB_INDEX as usize {
        table[i] = table[i - 1] + table[i - 2];
        i += 1;
    }
    table
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("Fibonacci index {index} is out of range (supported: 0..={max})", max = MAX_FIB_INDEX)]
pub struct FibRangeError {
    pub index: u32,
}

/// `F_t`, exact for every `t <= MAX_FIB_INDEX`.
pub fn fib(t: u32) -> Result<u64, FibRangeError> {
    FIBS.get(t as usize)
        .copied()
        .ok_or(FibRangeError { index: t })
}

/// Largest index `t >= 2` with `F_t <= n`. `n` must be positive.
fn largest_index_at_most(n: u64) -> u32 {
    debug_assert!(n > 0);
    // FIBS[2..] is strictly increasing.
    let above = FIBS[2..].partition_point(|&f| f <= n);
    (above + 1) as u32
}

pub fn is_fibonacci(n: u64) -> bool {
    FIBS.binary_search(&n).is_ok()
}

/// The unique representation of `n` as a sum of non-consecutive Fibonacci
/// numbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZeckendorfRep {
    parts: Vec<u32>,
    n: u64,
}

impl ZeckendorfRep {
    /// Part indices, ascending.
    pub fn indices(&self) -> &[u32] {
        &self.parts
    }

    /// Part values, ascending.
    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.parts.iter().map(|&t| FIBS[t as usize])
    }

    pub fn value(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The `i`-th smallest part (1-based).
    pub fn part(&self, i: usize) -> ZPart {
        assert!(i >= 1, "Zeckendorf parts are numbered from 1");
        match self.parts.get(i - 1) {
            Some(&t) => ZPart::Finite(FIBS[t as usize]),
            None => ZPart::Infinity,
        }
    }
}

impl fmt::Display for ZeckendorfRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for v in self.values() {
            if !first {
                write!(f, "+")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// Greedy decomposition: repeatedly take the largest Fibonacci number that
/// still fits.
pub fn zeckendorf(n: u64) -> ZeckendorfRep {
    let mut parts = Vec::new();
    let mut rest = n;
    while rest > 0 {
        let t = largest_index_at_most(rest);
        parts.push(t);
        rest -= FIBS[t as usize];
    }
    parts.reverse();
    ZeckendorfRep { parts, n }
}

/// A Zeckendorf part, or the sentinel for a part that does not exist.
///
/// `Infinity` compares greater than every finite part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ZPart {
    Finite(u64),
    Infinity,
}

impl ZPart {
    pub fn finite(self) -> Option<u64> {
        match self {
            ZPart::Finite(v) => Some(v),
            ZPart::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == ZPart::Infinity
    }
}

impl PartialEq<u64> for ZPart {
    fn eq(&self, other: &u64) -> bool {
        *self == ZPart::Finite(*other)
    }
}

impl PartialOrd<u64> for ZPart {
    fn partial_cmp(&self, other: &u64) -> Option<Ordering> {
        Some(self.cmp(&ZPart::Finite(*other)))
    }
}

impl fmt::Display for ZPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZPart::Finite(v) => write!(f, "{v}"),
            ZPart::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for ZPart {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ZPart::Finite(v) => serializer.serialize_u64(*v),
            ZPart::Infinity => serializer.serialize_str("inf"),
        }
    }
}

/// `z_i(n)`: the `i`-th smallest Zeckendorf part of `n` (`i >= 1`).
pub fn z_part(i: usize, n: u64) -> ZPart {
    assert!(i >= 1, "Zeckendorf parts are numbered from 1");
    let mut rest = n;
    let mut seen = 0;
    // Peel parts off from the small end: the smallest part of `rest` is the
    // smallest Fibonacci number in its greedy decomposition.
    while rest > 0 {
        let smallest = smallest_part(rest);
        seen += 1;
        if seen == i {
            return ZPart::Finite(smallest);
        }
        rest -= smallest;
    }
    ZPart::Infinity
}

fn smallest_part(n: u64) -> u64 {
    let mut rest = n;
    loop {
        let f = FIBS[largest_index_at_most(rest) as usize];
        if f == rest {
            return f;
        }
        rest -= f;
    }
}

/// Shorthand for `z_part(1, n)`.
pub fn z1(n: u64) -> ZPart {
    z_part(1, n)
}
