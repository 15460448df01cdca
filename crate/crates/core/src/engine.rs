//! Exact Grundy values of single-heap positions.
//!
//! A position `(n, r)` holds `n` tokens; the mover may take `1..=r` of them,
//! and after taking `k` the opponent faces `(n - k, min(2k, n - k))`. Row `n`
//! of the table is built from the rows below it by sweeping `k` upwards and
//! maintaining the mex of the options seen so far, so every prefix `r` of the
//! row is available in one pass.

use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Horizon used when nothing else is configured.
pub const DEFAULT_HORIZON: u32 = 20_000;

/// Largest horizon `GrundyTable::build` accepts unless overridden.
pub const DEFAULT_CEILING: u32 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("heap size {n} is beyond the table horizon {max_n}")]
    OutOfHorizon { n: u32, max_n: u32 },
    #[error("table horizon {requested} exceeds the ceiling {ceiling}")]
    CeilingExceeded { requested: u32, ceiling: u32 },
    #[error("a starting position needs at least one token")]
    EmptyStart,
}

/// A single-heap position: `n` tokens with removal cap `r <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    n: u32,
    r: u32,
}

impl Position {
    /// Builds a position, clamping the cap to the heap size.
    pub fn new(n: u32, r: u32) -> Self {
        Position { n, r: r.min(n) }
    }

    /// The opening position `(n, n - 1)` of a fresh heap.
    pub fn start(n: u32) -> Self {
        Position::new(n, n.saturating_sub(1))
    }

    pub fn tokens(self) -> u32 {
        self.n
    }

    pub fn cap(self) -> u32 {
        self.r
    }

    pub fn is_terminal(self) -> bool {
        self.r == 0
    }

    /// The position reached by removing `take` tokens. `take` must be legal.
    pub fn after(self, take: u32) -> Position {
        debug_assert!(take >= 1 && take <= self.r);
        let rest = self.n - take;
        Position::new(rest, take.saturating_mul(2))
    }

    /// Every move as `(take, successor)`, ascending in `take`.
    pub fn options(self) -> impl Iterator<Item = (u32, Position)> {
        (1..=self.r).map(move |k| (k, self.after(k)))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n, self.r)
    }
}

/// Least nonnegative integer not in `values`.
pub fn mex<I>(values: I) -> u32
where
    I: IntoIterator<Item = u32>,
{
    let mut seen = Vec::new();
    for v in values {
        let v = v as usize;
        if v >= seen.len() {
            seen.resize(v + 1, false);
        }
        seen[v] = true;
    }
    seen.iter().position(|&s| !s).unwrap_or(seen.len()) as u32
}

/// A maximal run of equal values in a row: `value` holds for every cap from
/// `start` up to the next segment's start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: u32,
    pub value: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowEncoding {
    /// Run-length segments; a row costs one entry per distinct value.
    #[default]
    Segments,
    /// One value per cap. Only useful for differential testing.
    Dense,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum RowData {
    Segments(Vec<Segment>),
    Dense(Vec<u32>),
}

/// Grundy values `G(n, r)` for a fixed `n` and all `0 <= r <= n`.
///
/// Values never decrease along a row (raising the cap only adds options), so
/// the segment values are strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrundyRow {
    n: u32,
    data: RowData,
}

impl GrundyRow {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `G(n, r)` with `r` clamped to `n`.
    pub fn lookup(&self, r: u32) -> u32 {
        let r = r.min(self.n);
        match &self.data {
            RowData::Segments(segs) => {
                let idx = segs.partition_point(|s| s.start <= r);
                segs[idx - 1].value
            }
            RowData::Dense(values) => values[r as usize],
        }
    }

    pub fn segments(&self) -> Vec<Segment> {
        match &self.data {
            RowData::Segments(segs) => segs.clone(),
            RowData::Dense(values) => compress(values),
        }
    }

    /// Value at `r = n`.
    pub fn last(&self) -> u32 {
        self.lookup(self.n)
    }

    /// Least cap at which `value` occurs in this row.
    pub fn first_cap_with(&self, value: u32) -> Option<u32> {
        self.segments()
            .iter()
            .find(|s| s.value == value)
            .map(|s| s.start)
    }

    pub fn to_dense(&self) -> Vec<u32> {
        (0..=self.n).map(|r| self.lookup(r)).collect()
    }
}

fn compress(values: &[u32]) -> Vec<Segment> {
    let mut segs: Vec<Segment> = Vec::new();
    for (r, &v) in values.iter().enumerate() {
        if segs.last().is_none_or(|s| s.value != v) {
            segs.push(Segment { start: r as u32, value: v });
        }
    }
    segs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableConfig {
    pub ceiling: u32,
    pub encoding: RowEncoding,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig {
            ceiling: DEFAULT_CEILING,
            encoding: RowEncoding::Segments,
        }
    }
}

/// Grundy values of every position with at most `max_n` tokens.
///
/// Immutable once built; share it freely across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrundyTable {
    rows: Vec<GrundyRow>,
}

impl GrundyTable {
    pub fn build(max_n: u32) -> Result<Self, EngineError> {
        Self::build_with(max_n, TableConfig::default())
    }

    pub fn build_with(max_n: u32, config: TableConfig) -> Result<Self, EngineError> {
        if max_n > config.ceiling {
            return Err(EngineError::CeilingExceeded {
                requested: max_n,
                ceiling: config.ceiling,
            });
        }
        let mut rows: Vec<GrundyRow> = Vec::with_capacity(max_n as usize + 1);
        // Scratch space shared across rows: presence flags for option values.
        let mut seen: Vec<bool> = Vec::new();
        let mut dense: Vec<u32> = Vec::new();
        for n in 0..=max_n {
            seen.clear();
            dense.clear();
            let mut cursor = 0u32;
            dense.push(0);
            for k in 1..=n {
                let rest = n - k;
                let v = rows[rest as usize].lookup(2 * k);
                let vi = v as usize;
                if vi >= seen.len() {
                    seen.resize(vi + 1, false);
                }
                seen[vi] = true;
                while seen.get(cursor as usize).copied().unwrap_or(false) {
                    cursor += 1;
                }
                dense.push(cursor);
            }
            let data = match config.encoding {
                RowEncoding::Segments => RowData::Segments(compress(&dense)),
                RowEncoding::Dense => RowData::Dense(dense.clone()),
            };
            rows.push(GrundyRow { n, data });
        }
        Ok(GrundyTable { rows })
    }

    pub fn max_n(&self) -> u32 {
        self.rows.len() as u32 - 1
    }

    pub fn row(&self, n: u32) -> Result<&GrundyRow, EngineError> {
        self.rows.get(n as usize).ok_or(EngineError::OutOfHorizon {
            n,
            max_n: self.max_n(),
        })
    }

    pub fn rows(&self) -> &[GrundyRow] {
        &self.rows
    }

    pub fn grundy(&self, p: Position) -> Result<u32, EngineError> {
        Ok(self.row(p.tokens())?.lookup(p.cap()))
    }

    /// Value of the opening position `(n, n - 1)`.
    pub fn grundy_start(&self, n: u32) -> Result<u32, EngineError> {
        if n == 0 {
            return Err(EngineError::EmptyStart);
        }
        self.grundy(Position::start(n))
    }

    /// `G(n) = G(n, n)`.
    pub fn grundy_full(&self, n: u32) -> Result<u32, EngineError> {
        Ok(self.row(n)?.last())
    }

    /// Every removal that leaves a position of value 0, ascending.
    pub fn winning_removals(&self, p: Position) -> Result<Vec<u32>, EngineError> {
        self.row(p.tokens())?;
        let mut out = Vec::new();
        for (k, q) in p.options() {
            if self.grundy(q)? == 0 {
                out.push(k);
            }
        }
        Ok(out)
    }

    /// Writes `n,r,g` lines for every `(n, r <= n)` in lexicographic order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,r,g")?;
        for row in &self.rows {
            for (r, g) in row.to_dense().into_iter().enumerate() {
                writeln!(out, "{},{},{}", row.n(), r, g)?;
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        self.rows.iter().map(GrundyRow::to_dense).collect()
    }

    /// Total number of stored segments over all rows.
    pub fn segment_count(&self) -> usize {
        self.rows.iter().map(|r| r.segments().len()).sum()
    }
}
