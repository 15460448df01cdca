//! Configuration and rendering shared by the `fibnim` binary.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use fibnim_core::analysis::ScanReport;
use fibnim_core::GrundyTable;
use fibnim_server::service::AnalysisDocument;

/// Environment variable that overrides the default table horizon.
pub const MAX_N_ENV: &str = "FIBNIM_MAX_N";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Pretty,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CliConfig {
    pub max_n: u32,
    pub output_format: OutputFormat,
    pub port: u16,
}

/// Resolves the horizon: an explicit flag wins, then the environment, then
/// the command's default.
pub fn resolve_max_n(flag: Option<u32>, env: Option<&str>, default: u32) -> Result<u32> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{MAX_N_ENV}={v:?} is not a nonnegative integer")),
        None => Ok(default),
    }
}

/// The triangular table in the layout of the classic Grundy table: one line
/// per heap size, one column per cap.
pub fn render_pretty_table(table: &GrundyTable) -> String {
    let dense = table.to_dense();
    let max_value = dense.iter().flatten().copied().max().unwrap_or(0);
    let width = max_value.to_string().len().max(table.max_n().to_string().len());
    let label = table.max_n().to_string().len().max(3);
    let mut out = String::new();
    let _ = write!(out, "{:>label$} |", "n\\r");
    for r in 0..=table.max_n() {
        let _ = write!(out, " {r:>width$}");
    }
    out.push('\n');
    let _ = writeln!(out, "{}-+{}", "-".repeat(label), "-".repeat((width + 1) * dense.len()));
    for (n, row) in dense.iter().enumerate() {
        let _ = write!(out, "{n:>label$} |");
        for v in row {
            let _ = write!(out, " {v:>width$}");
        }
        out.push('\n');
    }
    out
}

pub fn render_json_table(table: &GrundyTable) -> String {
    let doc = serde_json::json!({
        "max_n": table.max_n(),
        "rows": table.to_dense(),
    });
    let mut s = serde_json::to_string(&doc).expect("table serializes");
    s.push('\n');
    s
}

pub fn render_table(table: &GrundyTable, format: OutputFormat) -> String {
    match format {
        OutputFormat::Pretty => render_pretty_table(table),
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => render_json_table(table),
    }
}

pub fn render_analysis(doc: &AnalysisDocument) -> String {
    let mut out = String::new();
    for (i, h) in doc.heaps.iter().enumerate() {
        let parts = if h.zeckendorf.is_empty() {
            "0".to_string()
        } else {
            h.zeckendorf.iter().map(u64::to_string).collect::<Vec<_>>().join("+")
        };
        let _ = writeln!(
            out,
            "heap {i}: {} tokens, cap {}, grundy {}, zeckendorf {parts}",
            h.tokens, h.cap, h.grundy
        );
    }
    let _ = writeln!(out, "nim-sum: {}", doc.nim_sum);
    if doc.p_position {
        let _ = writeln!(out, "P-position: no winning move");
    } else {
        let _ = writeln!(out, "N-position; winning moves:");
        for m in &doc.winning_moves {
            let _ = writeln!(out, "  heap {}: take {}", m.heap, m.take);
        }
        if let Some(hint) = &doc.hint {
            let _ = writeln!(out, "hint: {hint}");
        }
    }
    out
}

pub fn render_report_summary(report: &ScanReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "range: {}..={}", report.range.0, report.range.1);
    for c in &report.checks {
        let claim = serde_json::to_value(c.claim).expect("claim serializes");
        let _ = writeln!(
            out,
            "  {:<28} {:>10} cases  {:>4} violations",
            claim.as_str().unwrap_or("?"),
            c.cases,
            c.violations
        );
    }
    for v in report.violations.iter().take(20) {
        let _ = writeln!(out, "  violation {:?} at {}: expected {}, observed {}", v.claim, v.position, v.expected, v.observed);
    }
    if !report.h_seq.is_empty() {
        let h: Vec<String> = report.h_seq.iter().map(|(g, h)| format!("({g},{h})")).collect();
        let _ = writeln!(out, "h: {}", h.join(" "));
    }
    if let Some(e) = &report.endpoint {
        let _ = writeln!(
            out,
            "G({n}) = {g}: m-sequence bound {lo}, upper bound {hi}, log_1.5 = {log:.3}",
            n = e.n,
            g = e.g,
            lo = e.m_sequence_bound,
            hi = e.upper_bound,
            log = e.log_bound
        );
    }
    if !report.log_bound_discrepancies.is_empty() {
        let _ = writeln!(out, "heaps below log_1.5(n): {}", report.log_bound_discrepancies.len());
    }
    let _ = writeln!(out, "conjecture counterexamples: {}", report.conjecture_counterexamples.len());
    let _ = writeln!(out, "{}", if report.is_clean() { "OK" } else { "VIOLATIONS FOUND" });
    out
}

/// Refuses horizons above the engine ceiling with a readable message.
pub fn check_ceiling(max_n: u32) -> Result<()> {
    if max_n > fibnim_core::engine::DEFAULT_CEILING {
        bail!(
            "--max-n {max_n} exceeds the ceiling of {}",
            fibnim_core::engine::DEFAULT_CEILING
        );
    }
    Ok(())
}
