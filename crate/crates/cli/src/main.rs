//! Command-line front end for the verification harness.
//!
//! Exit status: 0 when every identity passed, 1 when any verification
//! failed, 2 on configuration or IO problems.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use dy_verify::config::{Format, Suite, SuiteConfig};
use dy_verify::report::emit;
use dy_verify::runner;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

/// Verifies the defining identities of the truncated double Yangian of
/// gl(m|n): RTT relations, Gauss decomposition, morphisms, the quantum
/// Berezinian and the centrality of its coefficients, and the classical
/// limit — exactly, over the rationals.
#[derive(Parser, Debug)]
#[command(name = "dy-verify", version)]
struct Cli {
    /// Even block size m of gl(m|n).
    #[arg(long, default_value_t = 1)]
    m: u32,

    /// Odd block size n of gl(m|n).
    #[arg(long, default_value_t = 1)]
    n: u32,

    /// Highest retained series exponent N.
    #[arg(long = "series-order", value_name = "N", default_value_t = 2)]
    series_order: u32,

    /// Highest retained power of h.
    #[arg(long = "h-order", value_name = "H", default_value_t = 2)]
    h_order: u32,

    /// Generator level cap L (default: derived from the two orders).
    #[arg(long = "cap", value_name = "L")]
    cap: Option<u32>,

    /// Suite to run (repeatable; default: every applicable suite).
    #[arg(long = "suite", value_name = "NAME")]
    suite: Vec<String>,

    /// Seed for the randomized probes.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Worker threads (0 = one per logical CPU).
    #[arg(long, default_value_t = 0)]
    jobs: usize,

    /// Directory for rule-table caches.
    #[arg(long = "cache-dir", value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// Report encoding.
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// Write the report to this file instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Measure wall times (timed reports are not byte-reproducible).
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let suites = if cli.suite.is_empty() {
        SuiteConfig::default_suites(cli.m, cli.n)
    } else {
        let mut suites = Vec::with_capacity(cli.suite.len());
        for name in &cli.suite {
            match Suite::from_name(name) {
                Some(suite) => suites.push(suite),
                None => {
                    let known: Vec<&str> = Suite::REGISTRY.iter().map(|s| s.name()).collect();
                    eprintln!(
                        "error: unknown suite {name:?}; known suites: {}",
                        known.join(", ")
                    );
                    return ExitCode::from(2);
                }
            }
        }
        suites
    };

    let config = SuiteConfig {
        m: cli.m,
        n: cli.n,
        series_order: cli.series_order,
        h_order: cli.h_order,
        level_cap: cli.cap,
        suites,
        seed: cli.seed,
        jobs: cli.jobs,
        cache_dir: cli.cache_dir,
        format: match cli.format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        },
        timings: cli.timings,
    };

    let report = match runner::run(&config) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };

    let bytes = emit(&report, config.format);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &bytes),
        None => std::io::stdout().write_all(&bytes),
    };
    if let Err(err) = written {
        eprintln!("error: cannot write the report: {err}");
        return ExitCode::from(2);
    }

    if report.summary.all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
