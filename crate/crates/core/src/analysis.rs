//! Closed-form classification of small Grundy values, first-appearance
//! statistics, and sweeps that confront the closed forms and growth laws with
//! the exact table.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{EngineError, GrundyTable, Position};
use crate::zeckendorf::{fib, is_fibonacci, z_part, zeckendorf, ZPart};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("Grundy value {value} does not occur for heaps up to {max_n}")]
    NotRealized { value: u32, max_n: u32 },
}

/// Which closed form, if any, describes a position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SmallValueClass {
    V0,
    V1,
    V2,
    V3,
    /// None of the closed forms applies; the value is at least 4.
    GE4,
}

impl SmallValueClass {
    /// The exact value for `V0..V3`, `None` for `GE4`.
    pub fn value(self) -> Option<u32> {
        match self {
            SmallValueClass::V0 => Some(0),
            SmallValueClass::V1 => Some(1),
            SmallValueClass::V2 => Some(2),
            SmallValueClass::V3 => Some(3),
            SmallValueClass::GE4 => None,
        }
    }

    /// Whether a Grundy value is consistent with this class.
    pub fn admits(self, g: u32) -> bool {
        match self.value() {
            Some(v) => v == g,
            None => g >= 4,
        }
    }
}

impl fmt::Display for SmallValueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmallValueClass::GE4 => write!(f, ">=4"),
            c => write!(f, "{}", c.value().unwrap()),
        }
    }
}

/// The three smallest Zeckendorf parts of a heap size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SmallParts {
    z1: ZPart,
    z2: ZPart,
    z3: ZPart,
}

impl SmallParts {
    fn of(n: u64) -> Self {
        let rep = zeckendorf(n);
        SmallParts { z1: rep.part(1), z2: rep.part(2), z3: rep.part(3) }
    }

    fn conditions(self, r: u64) -> [bool; 4] {
        let SmallParts { z1, z2, z3 } = self;
        let zero = z1 > r;
        let one = z1 == 1 && r >= 1 && z2 > r;
        let two = z1 == 2 && r >= 2 && z2 > r;
        // r < z2 - 1, written without arithmetic on the sentinel.
        let three = (z1 == 1 && z2 == 3 && r >= 3 && z3 > r) || (z1 == 3 && r >= 3 && z2 > r + 1);
        [zero, one, two, three]
    }
}

/// The four closed-form conditions, in order of the value they assert.
pub fn small_value_conditions(n: u64, r: u64) -> [bool; 4] {
    SmallParts::of(n).conditions(r.min(n))
}

fn class_of(conds: [bool; 4]) -> SmallValueClass {
    match conds.iter().position(|&c| c) {
        Some(0) => SmallValueClass::V0,
        Some(1) => SmallValueClass::V1,
        Some(2) => SmallValueClass::V2,
        Some(3) => SmallValueClass::V3,
        _ => SmallValueClass::GE4,
    }
}

/// Classifies `(n, r)` (cap clamped to `n`) by the closed forms for values
/// 0 through 3.
pub fn classify_small(n: u64, r: u64) -> SmallValueClass {
    let conds = small_value_conditions(n, r);
    assert!(
        conds.iter().filter(|&&c| c).count() <= 1,
        "closed-form conditions overlap at ({n}, {r})"
    );
    class_of(conds)
}

/// Identifies the claim a sweep violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// The closed forms for values 0..=3 agree with the table.
    SmallValues,
    /// At most one closed-form condition holds.
    ClassifierExclusive,
    /// `z1(n-k)` is the Fibonacci neighbour of `z1(k)`.
    SmallFibsNeighbour,
    SmallFibsDouble,
    SmallFibsDoubleMinusTwo,
    /// `G(n) <= G(n+1) <= G(n) + 1`.
    Increasing,
    /// Starting values over non-Fibonacci heaps rise by steps of 0 or 1.
    StartMonotone,
    /// `G(n, n-1) = G(n, n)` off the Fibonacci numbers.
    StartEqualsFull,
    RatioStep,
    MSequenceBound,
    UpperBound,
    HLowerBound,
    HGap,
    HIncreasing,
    JFloor,
    /// Removing `z1(n)` from a starting position reaches value 0.
    Strategy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub claim: Claim,
    pub position: Position,
    pub expected: String,
    pub observed: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckSummary {
    pub claim: Claim,
    pub cases: u64,
    pub violations: u64,
}

/// A witness against `G(⌈3n/2⌉) <= G(n) + 2`. Informational only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureCounterexample {
    pub n: u32,
    pub g_n: u32,
    pub n_prime: u32,
    pub g_n_prime: u32,
}

/// A heap where `G(n) < log_{3/2}(n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogBoundDiscrepancy {
    pub n: u32,
    pub g: u32,
    pub log_bound: f64,
}

/// The bounds evaluated at the top of a growth sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndpointBounds {
    pub n: u32,
    pub g: u32,
    pub m_sequence_bound: u32,
    pub upper_bound: u32,
    pub log_bound: f64,
}

/// Result of a verification sweep.
///
/// `j_prefix_seq` holds upper estimates of `j(g)`: the least cap seen for
/// value `g` among the scanned heaps. Every entry is at least `g`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub range: (u32, u32),
    pub checks: Vec<CheckSummary>,
    pub violations: Vec<Violation>,
    pub h_seq: Vec<(u32, u32)>,
    pub j_prefix_seq: Vec<(u32, u32)>,
    pub conjecture_counterexamples: Vec<ConjectureCounterexample>,
    pub log_bound_discrepancies: Vec<LogBoundDiscrepancy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<EndpointBounds>,
    pub elapsed_ms: u64,
}

impl ScanReport {
    fn empty(range: (u32, u32)) -> Self {
        ScanReport {
            range,
            checks: Vec::new(),
            violations: Vec::new(),
            h_seq: Vec::new(),
            j_prefix_seq: Vec::new(),
            conjecture_counterexamples: Vec::new(),
            log_bound_discrepancies: Vec::new(),
            endpoint: None,
            elapsed_ms: 0,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations_of(&self, claim: Claim) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.claim == claim)
    }

    pub fn cases_of(&self, claim: Claim) -> u64 {
        self.checks
            .iter()
            .filter(|c| c.claim == claim)
            .map(|c| c.cases)
            .sum()
    }

    /// Combines two reports, e.g. from sweeps over adjacent ranges. The
    /// operation is associative: counts add, lists concatenate, and the
    /// first-appearance sequences keep the smaller heap or cap per value.
    pub fn merge(mut self, other: ScanReport) -> ScanReport {
        self.range = (self.range.0.min(other.range.0), self.range.1.max(other.range.1));
        let mut checks: BTreeMap<Claim, (u64, u64)> = BTreeMap::new();
        for c in self.checks.iter().chain(&other.checks) {
            let e = checks.entry(c.claim).or_default();
            e.0 += c.cases;
            e.1 += c.violations;
        }
        self.checks = checks
            .into_iter()
            .map(|(claim, (cases, violations))| CheckSummary { claim, cases, violations })
            .collect();
        self.violations.extend(other.violations);
        self.h_seq = merge_min(&self.h_seq, &other.h_seq);
        self.j_prefix_seq = merge_min(&self.j_prefix_seq, &other.j_prefix_seq);
        self.conjecture_counterexamples.extend(other.conjecture_counterexamples);
        self.log_bound_discrepancies.extend(other.log_bound_discrepancies);
        self.endpoint = match (self.endpoint, other.endpoint) {
            (Some(a), Some(b)) => Some(if b.n >= a.n { b } else { a }),
            (a, b) => a.or(b),
        };
        self.elapsed_ms += other.elapsed_ms;
        self
    }
}

fn merge_min(a: &[(u32, u32)], b: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let mut m: BTreeMap<u32, u32> = BTreeMap::new();
    for &(g, v) in a.iter().chain(b) {
        m.entry(g).and_modify(|x| *x = (*x).min(v)).or_insert(v);
    }
    m.into_iter().collect()
}

/// Accumulates per-claim case counts and violations.
struct Recorder {
    counts: BTreeMap<Claim, (u64, u64)>,
    violations: Vec<Violation>,
}

impl Recorder {
    fn new() -> Self {
        Recorder { counts: BTreeMap::new(), violations: Vec::new() }
    }

    fn check<E, O>(&mut self, claim: Claim, ok: bool, position: Position, expected: E, observed: O)
    where
        E: FnOnce() -> String,
        O: FnOnce() -> String,
    {
        let e = self.counts.entry(claim).or_default();
        e.0 += 1;
        if !ok {
            e.1 += 1;
            self.violations.push(Violation {
                claim,
                position,
                expected: expected(),
                observed: observed(),
            });
        }
    }

    fn finish(self, range: (u32, u32), started: Instant) -> ScanReport {
        let mut report = ScanReport::empty(range);
        report.checks = self
            .counts
            .into_iter()
            .map(|(claim, (cases, violations))| CheckSummary { claim, cases, violations })
            .collect();
        report.violations = self.violations;
        report.elapsed_ms = started.elapsed().as_millis() as u64;
        report
    }
}

fn check_horizon(t: &GrundyTable, n_hi: u32) -> Result<(), EngineError> {
    if n_hi > t.max_n() {
        return Err(EngineError::OutOfHorizon { n: n_hi, max_n: t.max_n() });
    }
    Ok(())
}

/// `(g, h(g))` for every value occurring among heaps `n <= n_hi`, where
/// `h(g)` is the least heap size admitting value `g` for some cap.
pub fn h_seq_upto(t: &GrundyTable, n_hi: u32) -> Result<Vec<(u32, u32)>, EngineError> {
    check_horizon(t, n_hi)?;
    let mut first: BTreeMap<u32, u32> = BTreeMap::new();
    for row in &t.rows()[..=n_hi as usize] {
        for seg in row.segments() {
            first.entry(seg.value).or_insert(row.n());
        }
    }
    Ok(first.into_iter().collect())
}

/// First appearances over the whole table.
pub fn h_of(t: &GrundyTable) -> Vec<(u32, u32)> {
    h_seq_upto(t, t.max_n()).expect("max_n is within the horizon")
}

/// `(g, least cap)` over heaps `n <= n_hi`. A finite scan only gives an
/// upper estimate of `j(g)`.
pub fn j_prefix_upto(t: &GrundyTable, n_hi: u32) -> Result<Vec<(u32, u32)>, EngineError> {
    check_horizon(t, n_hi)?;
    let mut least: BTreeMap<u32, u32> = BTreeMap::new();
    for row in &t.rows()[..=n_hi as usize] {
        for seg in row.segments() {
            least
                .entry(seg.value)
                .and_modify(|r| *r = (*r).min(seg.start))
                .or_insert(seg.start);
        }
    }
    Ok(least.into_iter().collect())
}

pub fn j_prefix(t: &GrundyTable) -> Vec<(u32, u32)> {
    let seq = j_prefix_upto(t, t.max_n()).expect("max_n is within the horizon");
    // A position of value g needs moves to values 0..g, hence at least g moves.
    debug_assert!(seq.iter().all(|&(g, r)| r >= g));
    seq
}

/// Sweeps every `(n, r)` with `n <= n_hi` and compares the closed forms
/// against the table.
pub fn verify_small_values(t: &GrundyTable, n_hi: u32) -> Result<ScanReport, EngineError> {
    check_horizon(t, n_hi)?;
    let started = Instant::now();
    let mut rec = Recorder::new();
    for n in 0..=n_hi {
        let row = t.row(n)?;
        let parts = SmallParts::of(n as u64);
        for r in 0..=n {
            let pos = Position::new(n, r);
            let conds = parts.conditions(r as u64);
            let active = conds.iter().filter(|&&c| c).count();
            rec.check(
                Claim::ClassifierExclusive,
                active <= 1,
                pos,
                || "at most one condition".to_string(),
                || format!("{active} conditions"),
            );
            let class = class_of(conds);
            let g = row.lookup(r);
            rec.check(Claim::SmallValues, class.admits(g), pos, || class.to_string(), || g.to_string());
        }
    }
    Ok(rec.finish((0, n_hi), started))
}

/// Checks the Fibonacci-neighbour lemma on smallest parts: for
/// `2 <= n <= n_hi` and `1 <= k < z1(n)`, with `z1(k) = F_t`,
/// `z1(n - k)` is `F_{t-1}` or `F_{t+1}`, at most `2k`, and at most `2k - 2`
/// once `k >= 4`.
pub fn verify_smallfibs(n_hi: u32) -> ScanReport {
    let started = Instant::now();
    let mut rec = Recorder::new();
    for n in 2..=n_hi as u64 {
        let z1n = z_part(1, n).finite().expect("n > 0 has a part");
        for k in 1..z1n {
            let t = zeckendorf(k).indices()[0];
            let below = fib(t - 1).expect("index in range");
            let above = fib(t + 1).expect("index in range");
            let z = z_part(1, n - k);
            let pos = Position::new(n as u32, k as u32);
            rec.check(
                Claim::SmallFibsNeighbour,
                z == below || z == above,
                pos,
                || format!("{below} or {above}"),
                || z.to_string(),
            );
            rec.check(Claim::SmallFibsDouble, z <= 2 * k, pos, || format!("<= {}", 2 * k), || z.to_string());
            if k >= 4 {
                rec.check(
                    Claim::SmallFibsDoubleMinusTwo,
                    z <= 2 * k - 2,
                    pos,
                    || format!("<= {}", 2 * k - 2),
                    || z.to_string(),
                );
            }
        }
    }
    rec.finish((2.min(n_hi), n_hi), started)
}

/// Checks that removing `z1(n)` from every non-Fibonacci starting position
/// `(n, n - 1)`, `1 <= n <= n_hi`, leaves a position of value 0. The
/// successor does not depend on the cap, so this covers every N-position.
pub fn verify_strategy(t: &GrundyTable, n_hi: u32) -> Result<ScanReport, EngineError> {
    check_horizon(t, n_hi)?;
    let started = Instant::now();
    let mut rec = Recorder::new();
    for n in 1..=n_hi {
        if is_fibonacci(n as u64) {
            continue;
        }
        let start = Position::start(n);
        let take = z_part(1, n as u64).finite().expect("n > 0 has a part") as u32;
        let after = start.after(take);
        let g = t.grundy(after)?;
        rec.check(Claim::Strategy, g == 0, start, || format!("take {take} reaches value 0"), || format!("{after} has value {g}"));
    }
    Ok(rec.finish((1.min(n_hi), n_hi), started))
}

/// `m_1 = 1`, `m_{g+1} = ⌈3 m_g / 2⌉`, for all terms up to `limit`.
pub fn m_sequence(limit: u32) -> Vec<u32> {
    let mut seq = Vec::new();
    let mut m = 1u64;
    while m <= limit as u64 {
        seq.push(m as u32);
        m = (3 * m).div_ceil(2);
    }
    seq
}

/// `⌈2√n⌉ + 1`, in exact integer arithmetic.
pub fn sqrt_upper_bound(n: u32) -> u32 {
    // Least c with c^2 >= 4n.
    let target = 4 * n as u64;
    let mut c = (target as f64).sqrt() as u64;
    while c * c < target {
        c += 1;
    }
    while c > 0 && (c - 1) * (c - 1) >= target {
        c -= 1;
    }
    c as u32 + 1
}

pub fn log_three_halves(n: u32) -> f64 {
    (n as f64).ln() / 1.5f64.ln()
}

/// Sweeps the growth laws of `G(n) = G(n, n)` over `0 <= n <= n_hi`.
///
/// Conjecture counterexamples and heaps below the closed-form logarithmic
/// bound are reported but never count as violations.
pub fn verify_growth(t: &GrundyTable, n_hi: u32) -> Result<ScanReport, EngineError> {
    check_horizon(t, n_hi)?;
    let started = Instant::now();
    let mut rec = Recorder::new();
    let g: Vec<u32> = t.rows()[..=n_hi as usize].iter().map(|row| row.last()).collect();
    let full = |n: u32| Position::new(n, n);

    for n in 0..n_hi {
        let (a, b) = (g[n as usize], g[n as usize + 1]);
        rec.check(
            Claim::Increasing,
            a <= b && b <= a + 1,
            full(n + 1),
            || format!("in [{a}, {}]", a + 1),
            || b.to_string(),
        );
    }

    let mut prev_start: Option<(u32, u32)> = None;
    for n in 1..=n_hi {
        if is_fibonacci(n as u64) {
            continue;
        }
        let s = t.grundy_start(n)?;
        rec.check(
            Claim::StartEqualsFull,
            s == g[n as usize],
            Position::start(n),
            || g[n as usize].to_string(),
            || s.to_string(),
        );
        if let Some((pn, ps)) = prev_start {
            rec.check(
                Claim::StartMonotone,
                ps <= s && s <= ps + 1,
                Position::start(n),
                || format!("in [{ps}, {}] (after n = {pn})", ps + 1),
                || s.to_string(),
            );
        }
        prev_start = Some((n, s));
    }

    let mut conjecture = Vec::new();
    for n in 1..=n_hi {
        let np = (3 * n as u64).div_ceil(2);
        if np > n_hi as u64 {
            break;
        }
        let np = np as u32;
        let (gn, gnp) = (g[n as usize], g[np as usize]);
        rec.check(
            Claim::RatioStep,
            gnp > gn,
            full(np),
            || format!(">= {} (G({n}) + 1)", gn + 1),
            || gnp.to_string(),
        );
        if gnp > gn + 2 {
            conjecture.push(ConjectureCounterexample { n, g_n: gn, n_prime: np, g_n_prime: gnp });
        }
    }

    let m_seq = m_sequence(n_hi);
    let m_bound = |n: u32| m_seq.partition_point(|&m| m <= n) as u32;
    let mut log_discrepancies = Vec::new();
    for n in 0..=n_hi {
        let gn = g[n as usize];
        let lower = m_bound(n);
        rec.check(Claim::MSequenceBound, gn >= lower, full(n), || format!(">= {lower}"), || gn.to_string());
        let upper = sqrt_upper_bound(n);
        rec.check(Claim::UpperBound, gn <= upper, full(n), || format!("<= {upper}"), || gn.to_string());
        if n >= 1 {
            let lb = log_three_halves(n);
            if (gn as f64) < lb {
                log_discrepancies.push(LogBoundDiscrepancy { n, g: gn, log_bound: lb });
            }
        }
    }

    let h_seq = h_seq_upto(t, n_hi)?;
    for &(value, h) in &h_seq {
        let need = value as u64 * (value as u64).saturating_sub(1);
        rec.check(
            Claim::HLowerBound,
            4 * h as u64 >= need,
            full(h),
            || format!("h({value}) >= {value}({value}-1)/4"),
            || h.to_string(),
        );
    }
    for w in h_seq.windows(2) {
        let ((g0, h0), (g1, h1)) = (w[0], w[1]);
        rec.check(
            Claim::HIncreasing,
            g1 == g0 + 1 && h1 > h0,
            full(h1),
            || format!("h({g1}) > h({g0}) = {h0}"),
            || h1.to_string(),
        );
        if g1 == g0 + 1 && h1 > h0 {
            rec.check(
                Claim::HGap,
                2 * (h1 - h0) as u64 >= g0 as u64,
                full(h1),
                || format!("h({g1}) - h({g0}) >= {g0}/2"),
                || (h1 - h0).to_string(),
            );
        }
    }

    let j_seq = j_prefix_upto(t, n_hi)?;
    for &(value, r) in &j_seq {
        rec.check(
            Claim::JFloor,
            r >= value,
            Position::new(n_hi, r),
            || format!("j({value}) >= {value}"),
            || r.to_string(),
        );
    }

    let mut report = rec.finish((0, n_hi), started);
    report.h_seq = h_seq;
    report.j_prefix_seq = j_seq;
    report.conjecture_counterexamples = conjecture;
    report.log_bound_discrepancies = log_discrepancies;
    report.endpoint = Some(EndpointBounds {
        n: n_hi,
        g: g[n_hi as usize],
        m_sequence_bound: m_bound(n_hi),
        upper_bound: sqrt_upper_bound(n_hi),
        log_bound: if n_hi >= 1 { log_three_halves(n_hi) } else { 0.0 },
    });
    report.elapsed_ms = started.elapsed().as_millis() as u64;
    Ok(report)
}

/// Positions of value `g` below the first appearance of `g + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FirstBlockWitness {
    pub g: u32,
    /// `h(g + 1)`; every member has fewer tokens.
    pub bound: u32,
    pub members: Vec<Position>,
}

impl FirstBlockWitness {
    pub fn contains(&self, p: Position) -> bool {
        self.members.binary_search(&p).is_ok()
    }

    /// Whether `(n, r)` in the block implies `(n, r')` in the block for all
    /// `r < r' <= n`.
    pub fn is_upward_closed(&self) -> bool {
        self.members
            .iter()
            .all(|p| (p.cap() + 1..=p.tokens()).all(|r| self.contains(Position::new(p.tokens(), r))))
    }
}

pub fn first_block(t: &GrundyTable, g: u32) -> Result<FirstBlockWitness, AnalysisError> {
    let next = g.checked_add(1).ok_or(AnalysisError::NotRealized { value: u32::MAX, max_n: t.max_n() })?;
    let bound = h_of(t)
        .into_iter()
        .find(|&(v, _)| v == next)
        .map(|(_, h)| h)
        .ok_or(AnalysisError::NotRealized { value: next, max_n: t.max_n() })?;
    let mut members = Vec::new();
    for row in &t.rows()[..bound as usize] {
        let segs = row.segments();
        for (i, seg) in segs.iter().enumerate() {
            if seg.value == g {
                let end = segs.get(i + 1).map_or(row.n() + 1, |s| s.start);
                members.extend((seg.start..end).map(|r| Position::new(row.n(), r)));
            }
        }
    }
    let block = FirstBlockWitness { g, bound, members };
    debug_assert!(block.is_upward_closed());
    Ok(block)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: u32) -> GrundyTable {
        GrundyTable::build(n).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_small(11, 3), SmallValueClass::V3);
        assert_eq!(classify_small(18, 4), SmallValueClass::V0);
        assert_eq!(classify_small(9, 5), SmallValueClass::V1);
        assert_eq!(classify_small(20, 13), SmallValueClass::GE4);
        assert_eq!(classify_small(0, 0), SmallValueClass::V0);
        assert_eq!(classify_small(4, 3), SmallValueClass::V3);
        assert_eq!(classify_small(7, 2), SmallValueClass::V2);
        // cap above the heap is clamped
        assert_eq!(classify_small(3, 9), SmallValueClass::V3);
    }

    #[test]
    fn conditions_never_overlap() {
        for n in 0..3000u64 {
            for r in 0..=n {
                let c = small_value_conditions(n, r);
                assert!(c.iter().filter(|&&x| x).count() <= 1, "({n}, {r})");
            }
        }
    }

    #[test]
    fn classification_matches_small_table() {
        let report = verify_small_values(&table(20), 20).unwrap();
        assert!(report.is_clean(), "{:?}", report.violations);
        assert_eq!(report.cases_of(Claim::SmallValues), 231);
        let report = verify_small_values(&table(0), 0).unwrap();
        assert!(report.is_clean());
        assert_eq!(report.cases_of(Claim::SmallValues), 1);
    }

    #[test]
    fn h_and_j_from_table_one() {
        let t = table(20);
        let h = h_of(&t);
        assert_eq!(&h[..8], &[(0, 0), (1, 1), (2, 2), (3, 3), (4, 5), (5, 8), (6, 12), (7, 16)]);
        let j = j_prefix(&t);
        assert_eq!(j[0], (0, 0));
        assert_eq!(j[3], (3, 3));
        assert_eq!(j[5], (5, 7));
        assert!(j.iter().all(|&(g, r)| r >= g));
    }

    #[test]
    fn growth_on_table_one() {
        let report = verify_growth(&table(20), 20).unwrap();
        assert!(report.is_clean(), "{:?}", report.violations);
        let end = report.endpoint.clone().unwrap();
        assert_eq!((end.g, end.upper_bound), (7, 10));
        assert_eq!(m_sequence(20), vec![1, 2, 3, 5, 8, 12, 18]);
        assert_eq!(end.m_sequence_bound, 7);
        // The closed-form logarithm overshoots at n = 8 and n = 20.
        let ns: Vec<u32> = report.log_bound_discrepancies.iter().map(|d| d.n).collect();
        assert!(ns.contains(&8) && ns.contains(&20), "{ns:?}");
    }

    #[test]
    fn sqrt_bound_is_exact() {
        assert_eq!(sqrt_upper_bound(0), 1);
        assert_eq!(sqrt_upper_bound(1), 3);
        assert_eq!(sqrt_upper_bound(4), 5);
        assert_eq!(sqrt_upper_bound(20), 10);
        for n in 0..100_000u32 {
            let c = sqrt_upper_bound(n) as u64 - 1;
            assert!(c * c >= 4 * n as u64);
            assert!(c == 0 || (c - 1) * (c - 1) < 4 * n as u64);
        }
    }

    #[test]
    fn first_blocks() {
        let t = table(40);
        let b0 = first_block(&t, 0).unwrap();
        assert_eq!(b0.members, vec![Position::new(0, 0)]);
        let b3 = first_block(&t, 3).unwrap();
        assert_eq!(b3.bound, 5);
        assert_eq!(b3.members, vec![Position::new(3, 3), Position::new(4, 3), Position::new(4, 4)]);
        let b6 = first_block(&t, 6).unwrap();
        assert_eq!(b6.bound, 16);
        assert!(b6.members.iter().all(|p| p.tokens() < 16));
        for g in 0..8 {
            assert!(first_block(&t, g).unwrap().is_upward_closed());
        }
        assert!(matches!(
            first_block(&table(20), 7),
            Err(AnalysisError::NotRealized { value: 8, max_n: 20 })
        ));
    }

    #[test]
    fn smallfibs_small_range() {
        let report = verify_smallfibs(500);
        assert!(report.is_clean(), "{:?}", &report.violations[..report.violations.len().min(5)]);
        assert!(report.cases_of(Claim::SmallFibsDoubleMinusTwo) > 0);
    }

    #[test]
    fn strategy_small_range() {
        assert!(verify_strategy(&table(300), 300).unwrap().is_clean());
    }

    #[test]
    fn horizon_is_checked() {
        assert!(verify_growth(&table(10), 11).is_err());
        assert!(verify_small_values(&table(10), 11).is_err());
    }

    #[test]
    fn merge_of_partitions_matches_whole() {
        let t = table(60);
        let a = verify_small_values(&t, 60).unwrap();
        let b = verify_growth(&t, 60).unwrap();
        let c = verify_strategy(&t, 60).unwrap();
        let left = a.clone().merge(b.clone()).merge(c.clone());
        let right = a.merge(b.merge(c));
        let strip = |mut r: ScanReport| {
            r.elapsed_ms = 0;
            r
        };
        assert_eq!(strip(left), strip(right));
    }

    #[test]
    fn report_serializes_with_stable_fields() {
        let report = verify_growth(&table(20), 20).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        for key in ["range", "violations", "h_seq", "j_prefix_seq", "conjecture_counterexamples", "elapsed_ms"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["h_seq"][4], serde_json::json!([4, 5]));
    }
}
