//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion, and exits non-zero if any fails.

use std::collections::HashMap;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fibnim_core::analysis::{h_of, verify_growth, verify_small_values, verify_smallfibs, verify_strategy, Claim};
use fibnim_core::engine::{mex, GrundyTable, Position};
use fibnim_core::multiheap::{BruteForce, MultiHeapState};
use fibnim_core::Player;
use fibnim_server::service::{MoveView, ServiceConfig, SessionDocument};
use fibnim_server::{EngineRole, GameService, GameStatus};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::json;

const TABLE1: &str = include_str!("../../core/tests/fixtures/table1.csv");

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn golden_table() -> Outcome {
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_fibnim"))
        .args(["table", "--max-n", "20", "--format", "csv"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure(out.status.success(), || format!("exit status {}", out.status))?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let cells = text.lines().skip(1).count();
    ensure(cells == 231, || format!("{cells} cells, expected 231"))?;
    let mismatched: Vec<(&str, &str)> = text
        .lines()
        .zip(TABLE1.lines())
        .filter(|(a, b)| a != b)
        .take(5)
        .collect();
    ensure(text == TABLE1, || format!("differs from fixture: {mismatched:?}"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("231 cells byte-identical in {elapsed:?}"))
}

// Direct recursive definition with its own memo and a fresh mex per position.
fn naive_grundy(n: u32, r: u32, memo: &mut HashMap<(u32, u32), u32>) -> u32 {
    let r = r.min(n);
    if let Some(&v) = memo.get(&(n, r)) {
        return v;
    }
    let options: Vec<u32> = (1..=r).map(|k| naive_grundy(n - k, 2 * k, memo)).collect();
    let v = mex(options);
    memo.insert((n, r), v);
    v
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let table = GrundyTable::build(500).map_err(|e| e.to_string())?;
    let mut memo = HashMap::new();
    let mut cells = 0u64;
    let mut mismatches = Vec::new();
    for n in 0..=500u32 {
        for r in 0..=n {
            cells += 1;
            let fast = table.grundy(Position::new(n, r)).map_err(|e| e.to_string())?;
            let slow = naive_grundy(n, r, &mut memo);
            if fast != slow {
                mismatches.push((n, r, fast, slow));
            }
        }
    }
    let elapsed = started.elapsed();
    ensure(mismatches.is_empty(), || format!("{} mismatches, first {:?}", mismatches.len(), mismatches.first()))?;
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!("{cells} cells agree in {elapsed:?}"))
}

fn small_value_classification() -> Outcome {
    let started = Instant::now();
    let table = GrundyTable::build(2000).map_err(|e| e.to_string())?;
    let report = verify_small_values(&table, 2000).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure(report.is_clean(), || format!("{} violations, first {:?}", report.violations.len(), report.violations.first()))?;
    let cases = report.cases_of(Claim::SmallValues);
    ensure(cases == 2001 * 2002 / 2, || format!("{cases} cells checked"))?;
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!("{cases} cells, zero violations in {elapsed:?}"))
}

fn smallfibs_lemma() -> Outcome {
    let started = Instant::now();
    let report = verify_smallfibs(5000);
    let elapsed = started.elapsed();
    ensure(report.is_clean(), || format!("{} violations, first {:?}", report.violations.len(), report.violations.first()))?;
    let cases = [Claim::SmallFibsNeighbour, Claim::SmallFibsDouble, Claim::SmallFibsDoubleMinusTwo]
        .map(|c| report.cases_of(c));
    ensure(cases.iter().all(|&c| c > 0), || format!("empty clause coverage {cases:?}"))?;
    Ok(format!(
        "neighbour/2k/2k-2 clauses over {}/{}/{} (n, k) pairs, zero violations in {elapsed:?}",
        cases[0], cases[1], cases[2]
    ))
}

fn growth_laws(table: &GrundyTable, build_time: Duration) -> Outcome {
    let started = Instant::now();
    let report = verify_growth(table, 20_000).map_err(|e| e.to_string())?;
    let elapsed = build_time + started.elapsed();
    ensure(report.is_clean(), || format!("{} violations, first {:?}", report.violations.len(), report.violations.first()))?;
    let gated = [
        Claim::Increasing,
        Claim::StartMonotone,
        Claim::RatioStep,
        Claim::MSequenceBound,
        Claim::UpperBound,
        Claim::HLowerBound,
        Claim::HGap,
    ];
    for claim in gated {
        ensure(report.cases_of(claim) > 0, || format!("{claim:?} was never exercised"))?;
    }
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "all growth checks clean in {elapsed:?}; informational: {} heaps below log_1.5(n), {} conjecture counterexamples",
        report.log_bound_discrepancies.len(),
        report.conjecture_counterexamples.len()
    ))
}

fn first_appearances(table: &GrundyTable) -> Outcome {
    let h = h_of(table);
    let expected = [(0, 0), (1, 1), (2, 2), (3, 3), (4, 5), (5, 8), (6, 12), (7, 16)];
    ensure(h.len() >= expected.len() && h[..expected.len()] == expected, || {
        format!("h-sequence starts {:?}", &h[..h.len().min(8)])
    })?;
    Ok(format!("h-sequence starts {:?}", &h[..8]))
}

fn sum_theorem() -> Outcome {
    let started = Instant::now();
    let table = GrundyTable::build(12).map_err(|e| e.to_string())?;
    let singles: Vec<Position> = (0..=12u32).flat_map(|n| (0..=n).map(move |r| Position::new(n, r))).collect();
    let mut states: Vec<Vec<Position>> = vec![vec![]];
    for &a in &singles {
        states.push(vec![a]);
        for &b in &singles {
            states.push(vec![a, b]);
            for &c in &singles {
                states.push(vec![a, b, c]);
            }
        }
    }
    let mut bf = BruteForce::new();
    for heaps in &states {
        let state = MultiHeapState::new(heaps.clone());
        let brute = bf.value(heaps).map_err(|e| e.to_string())?;
        let xor = state.game_value(&table).map_err(|e| e.to_string())?;
        ensure(brute == xor, || format!("{state}: brute force {brute}, nim-sum {xor}"))?;
        let winning = state.winning_moves(&table).map_err(|e| e.to_string())?;
        ensure(winning.is_empty() == (xor == 0), || format!("{state}: value {xor} with {} winning moves", winning.len()))?;
        if xor == 0 {
            for m in state.legal_moves() {
                let next = state.apply_move(&m).map_err(|e| e.to_string())?;
                let v = next.game_value(&table).map_err(|e| e.to_string())?;
                ensure(v != 0, || format!("{state}: P-position moves to zero-value {next}"))?;
            }
        }
    }
    let elapsed = started.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("{} states agree in {elapsed:?}", states.len()))
}

fn strategy_soundness() -> Outcome {
    let table = GrundyTable::build(2000).map_err(|e| e.to_string())?;
    let report = verify_strategy(&table, 2000).map_err(|e| e.to_string())?;
    ensure(report.is_clean(), || format!("{} violations, first {:?}", report.violations.len(), report.violations.first()))?;
    Ok(format!("{} non-Fibonacci starts, zero violations", report.cases_of(Claim::Strategy)))
}

struct Client {
    http: reqwest::Client,
    base: String,
}

impl Client {
    async fn create(&self, heaps: &str, role: EngineRole) -> Result<SessionDocument, String> {
        let resp = self
            .http
            .post(format!("{}/games", self.base))
            .json(&json!({"heaps": heaps, "engine_role": role}))
            .send()
            .await
            .map_err(|e| e.to_string())?;
        ensure(resp.status() == 201, || format!("create {heaps}: status {}", resp.status()))?;
        resp.json().await.map_err(|e| e.to_string())
    }

    async fn play(&self, id: &str, heap: usize, take: u32) -> Result<SessionDocument, String> {
        let resp = self
            .http
            .post(format!("{}/games/{id}/moves", self.base))
            .json(&json!({"heap": heap, "take": take}))
            .send()
            .await
            .map_err(|e| e.to_string())?;
        ensure(resp.status() == 200, || format!("move: status {}", resp.status()))?;
        resp.json().await.map_err(|e| e.to_string())
    }

    async fn fetch(&self, id: &str) -> Result<SessionDocument, String> {
        let resp = self
            .http
            .get(format!("{}/games/{id}", self.base))
            .send()
            .await
            .map_err(|e| e.to_string())?;
        resp.json().await.map_err(|e| e.to_string())
    }
}

fn random_heaps(rng: &mut StdRng) -> String {
    let count = rng.random_range(1..=3);
    (0..count)
        .map(|_| {
            let tokens: u32 = rng.random_range(2..=40);
            if rng.random_bool(0.5) {
                tokens.to_string()
            } else {
                format!("{tokens}:{}", rng.random_range(1..=tokens))
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

/// Replays a session from its creation parameters and history, checking the
/// engine's choices on the way.
fn replay(heaps: &str, role: EngineRole, doc: &SessionDocument, table: &GrundyTable) -> Result<u32, String> {
    let mut state: MultiHeapState = heaps.parse().map_err(|e| format!("{e}"))?;
    let mut engine_moves = 0;
    for entry in &doc.history {
        ensure(entry.player == state.to_move(), || "history out of turn order".to_string())?;
        if role.player() == Some(entry.player) {
            engine_moves += 1;
            let played = MoveView { heap: entry.heap, take: entry.take };
            let winning: Vec<MoveView> = state
                .winning_moves(table)
                .map_err(|e| e.to_string())?
                .iter()
                .map(MoveView::from)
                .collect();
            if winning.is_empty() {
                let lowest = state.heaps().iter().position(|p| !p.is_terminal());
                ensure(lowest == Some(entry.heap) && entry.take == 1, || {
                    format!("losing engine played {played:?} in {state}")
                })?;
            } else {
                ensure(winning.contains(&played), || format!("engine played {played:?}, winning {winning:?} in {state}"))?;
            }
        }
        state = state.play(entry.heap, entry.take).map_err(|e| e.to_string())?;
    }
    let heaps_now: Vec<(u32, u32)> = state.heaps().iter().map(|p| (p.tokens(), p.cap())).collect();
    let heaps_doc: Vec<(u32, u32)> = doc.heaps.iter().map(|h| (h.tokens, h.cap)).collect();
    ensure(heaps_now == heaps_doc, || format!("replayed heaps {heaps_now:?}, service {heaps_doc:?}"))?;
    ensure(state.to_move() == doc.to_move, || "to_move differs after replay".to_string())?;
    let status = match state.winner() {
        None => GameStatus::InProgress,
        Some(Player::First) => GameStatus::FirstWon,
        Some(Player::Second) => GameStatus::SecondWon,
    };
    ensure(status == doc.status, || format!("replayed status {status:?}, service {:?}", doc.status))?;
    let value = state.game_value(table).map_err(|e| e.to_string())?;
    ensure(value == doc.nim_sum, || "nim-sum differs after replay".to_string())?;
    Ok(engine_moves)
}

fn service_replay() -> Outcome {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime.block_on(async {
        let service = Arc::new(GameService::new(ServiceConfig { horizon: 100, capacity: 256 }).map_err(|e| e.to_string())?);
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.map_err(|e| e.to_string())?;
        let addr = listener.local_addr().map_err(|e| e.to_string())?;
        let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
        let server = tokio::spawn(fibnim_server::serve(listener, service, async {
            let _ = stopped.await;
        }));
        let client = Client { http: reqwest::Client::new(), base: format!("http://{addr}/api") };
        let table = GrundyTable::build(100).map_err(|e| e.to_string())?;
        let mut rng = StdRng::seed_from_u64(0x5eed_f1b0);
        let roles = [EngineRole::None, EngineRole::PlaysFirst, EngineRole::PlaysSecond];
        let (mut engine_moves, mut total_moves) = (0, 0);
        for _ in 0..100 {
            let heaps = random_heaps(&mut rng);
            let role = roles[rng.random_range(0..roles.len())];
            let mut doc = client.create(&heaps, role).await?;
            while doc.status == GameStatus::InProgress {
                let live: Vec<usize> = (0..doc.heaps.len()).filter(|&i| doc.heaps[i].cap > 0).collect();
                let heap = live[rng.random_range(0..live.len())];
                let take = rng.random_range(1..=doc.heaps[heap].cap);
                doc = client.play(&doc.id, heap, take).await?;
            }
            let fetched = client.fetch(&doc.id).await?;
            ensure(fetched == doc, || "fetched document differs from last response".to_string())?;
            engine_moves += replay(&heaps, role, &doc, &table)?;
            total_moves += doc.history.len();
        }
        let _ = stop.send(());
        let _ = server.await;
        Ok(format!("100 sessions ({total_moves} moves, {engine_moves} engine replies) replay identically"))
    })
}

fn main() {
    let mut failures = 0;
    let mut report = |name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("[PASS] {name}: {detail}"),
        Err(detail) => {
            failures += 1;
            println!("[FAIL] {name}: {detail}");
        }
    };

    report("golden-table", golden_table());
    report("oracle-equivalence", oracle_equivalence());
    report("small-value-classification", small_value_classification());
    report("smallfibs-lemma", smallfibs_lemma());

    let started = Instant::now();
    match GrundyTable::build(20_000) {
        Ok(table) => {
            let build_time = started.elapsed();
            report("growth-laws", growth_laws(&table, build_time));
            report("first-appearances", first_appearances(&table));
        }
        Err(e) => {
            report("growth-laws", Err(e.to_string()));
            report("first-appearances", Err(e.to_string()));
        }
    }

    report("sum-theorem", sum_theorem());
    report("strategy-soundness", strategy_soundness());
    report("service-replay", service_replay());

    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
