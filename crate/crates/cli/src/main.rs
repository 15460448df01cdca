use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use fibnim::{
    check_ceiling, render_analysis, render_report_summary, render_table, resolve_max_n, CliConfig, OutputFormat,
    MAX_N_ENV,
};
use fibnim_core::analysis::{verify_growth, verify_small_values, verify_smallfibs, verify_strategy, ScanReport};
use fibnim_core::engine::DEFAULT_HORIZON;
use fibnim_core::{parse_heaps, GrundyTable};
use fibnim_server::service::{analyze_heaps, DEFAULT_CAPACITY, DEFAULT_SERVICE_HORIZON};
use fibnim_server::{GameService, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "fibnim", version, about = "Grundy values and perfect play for Fibonacci nim")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Output format
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Write output to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the Grundy table G(n, r) for all r <= n <= max-n
    Table {
        /// Largest heap size (default 20000, or $FIBNIM_MAX_N)
        #[arg(long)]
        max_n: Option<u32>,
        #[command(flatten)]
        output: Output,
    },
    /// Analyse a heap list such as `12,7:6` (exit 0: N-position, 2: P-position)
    Analyze {
        /// Comma-separated `tokens[:cap]` entries; the cap defaults to tokens - 1
        heaps: String,
        #[command(flatten)]
        output: Output,
    },
    /// Check the closed forms and growth laws against the exact table
    Verify {
        /// Largest heap size swept (default 20000, or $FIBNIM_MAX_N)
        #[arg(long)]
        max_n: Option<u32>,
        /// Closed forms for Grundy values 0 through 3
        #[arg(long)]
        small_values: bool,
        /// Monotonicity, ratio step, bounds and first appearances
        #[arg(long)]
        growth: bool,
        /// Smallest-part lemma on Zeckendorf representations
        #[arg(long)]
        lemma: bool,
        /// The z1 strategy from every starting position
        #[arg(long)]
        strategy: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Run the HTTP game service
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Largest heap size the service accepts (default 5000, or $FIBNIM_MAX_N)
        #[arg(long)]
        max_n: Option<u32>,
        /// Maximum number of live sessions
        #[arg(long, default_value_t = DEFAULT_CAPACITY)]
        capacity: usize,
        /// Load sessions from this file at startup and save them on shutdown
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
}

fn env_max_n() -> Option<String> {
    std::env::var(MAX_N_ENV).ok()
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn cmd_table(max_n: Option<u32>, output: &Output) -> Result<ExitCode> {
    let config = CliConfig {
        max_n: resolve_max_n(max_n, env_max_n().as_deref(), DEFAULT_HORIZON)?,
        output_format: output.format.unwrap_or_default(),
        port: 0,
    };
    check_ceiling(config.max_n)?;
    let table = GrundyTable::build(config.max_n)?;
    emit(output, &render_table(&table, config.output_format))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_analyze(heaps: &str, output: &Output) -> Result<ExitCode> {
    let heaps = match parse_heaps(heaps) {
        Ok(h) if !h.is_empty() => h,
        Ok(_) => {
            eprintln!("error: empty heap list");
            return Ok(ExitCode::from(1));
        }
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(1));
        }
    };
    let horizon = heaps.iter().map(|p| p.tokens()).max().unwrap_or(0);
    check_ceiling(horizon)?;
    let table = GrundyTable::build(horizon)?;
    let doc = analyze_heaps(&table, heaps)?;
    let text = match output.format.unwrap_or_default() {
        OutputFormat::Json => format!("{}\n", serde_json::to_string_pretty(&doc)?),
        _ => render_analysis(&doc),
    };
    emit(output, &text)?;
    Ok(if doc.p_position { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

struct VerifySelection {
    small_values: bool,
    growth: bool,
    lemma: bool,
    strategy: bool,
}

fn cmd_verify(max_n: Option<u32>, mut sel: VerifySelection, output: &Output) -> Result<ExitCode> {
    let n_hi = resolve_max_n(max_n, env_max_n().as_deref(), DEFAULT_HORIZON)?;
    check_ceiling(n_hi)?;
    if !(sel.small_values || sel.growth || sel.lemma || sel.strategy) {
        sel = VerifySelection { small_values: true, growth: true, lemma: true, strategy: true };
    }
    let table = GrundyTable::build(n_hi)?;
    let mut reports: Vec<ScanReport> = Vec::new();
    if sel.small_values {
        reports.push(verify_small_values(&table, n_hi)?);
    }
    if sel.growth {
        reports.push(verify_growth(&table, n_hi)?);
    }
    if sel.lemma {
        reports.push(verify_smallfibs(n_hi));
    }
    if sel.strategy {
        reports.push(verify_strategy(&table, n_hi)?);
    }
    let report = reports
        .into_iter()
        .reduce(ScanReport::merge)
        .expect("at least one check selected");
    let text = match output.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Pretty => render_report_summary(&report),
        _ => format!("{}\n", serde_json::to_string_pretty(&report)?),
    };
    emit(output, &text)?;
    Ok(if report.is_clean() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_serve(port: u16, bind: &str, max_n: Option<u32>, capacity: usize, snapshot: Option<PathBuf>) -> Result<ExitCode> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(io::stderr)
        .init();
    let horizon = resolve_max_n(max_n, env_max_n().as_deref(), DEFAULT_SERVICE_HORIZON)?;
    check_ceiling(horizon)?;
    let service = Arc::new(GameService::new(ServiceConfig { horizon, capacity })?);
    if let Some(path) = snapshot.as_ref().filter(|p| p.exists()) {
        let restored = service.load_snapshot(path)?;
        eprintln!("restored {restored} sessions from {}", path.display());
    }
    let addr: SocketAddr = format!("{bind}:{port}").parse().context("invalid bind address")?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("cannot bind {addr}"))?;
        println!("listening on http://{}", listener.local_addr()?);
        io::stdout().flush()?;
        fibnim_server::serve(listener, service.clone(), async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
        anyhow::Ok(())
    })?;
    if let Some(path) = &snapshot {
        service.save_snapshot(path)?;
        eprintln!("saved sessions to {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Table { max_n, output } => cmd_table(max_n, &output),
        Command::Analyze { heaps, output } => cmd_analyze(&heaps, &output),
        Command::Verify { max_n, small_values, growth, lemma, strategy, output } => cmd_verify(
            max_n,
            VerifySelection { small_values, growth, lemma, strategy },
            &output,
        ),
        Command::Serve { port, bind, max_n, capacity, snapshot } => cmd_serve(port, &bind, max_n, capacity, snapshot),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
