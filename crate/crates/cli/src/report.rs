//! Deterministic report assembly and encoding.
//!
//! A report is a plain data structure; encoding it as JSON or text is pure,
//! so for a fixed configuration and seed the emitted bytes are identical
//! across runs and worker counts. Wall times are recorded only when timing
//! is requested (they are zero otherwise), because real measurements are the
//! one thing that can never be reproducible.

use serde::Serialize;

use crate::config::{Format, SuiteConfig};

/// Version stamp embedded in reports and cache headers.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Echo of the configuration that produced a report.
///
/// The worker count, cache directory, and timing switch steer execution
/// strategy only, never verification content, so they are skipped during
/// serialization: emitted reports stay byte-identical across those knobs.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub m: u32,
    pub n: u32,
    pub series_order: u32,
    pub h_order: u32,
    pub level_cap: u32,
    pub suites: Vec<String>,
    pub seed: u64,
    pub format: String,
    #[serde(skip)]
    pub jobs: usize,
    #[serde(skip)]
    pub cache_dir: Option<String>,
    #[serde(skip)]
    pub timings: bool,
}

/// One checked identity instance.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityRecord {
    /// Label of the concrete instance, unique within its suite.
    pub identity: String,
    /// Machine name of the identity family being checked.
    pub reference: String,
    /// Echo of the instance parameters.
    pub params: String,
    pub pass: bool,
    /// Serialized nonzero residue in the element grammar; present exactly
    /// when the check failed.
    pub counterexample: Option<String>,
    /// Wall time of the producing batch in milliseconds; 0 unless timing
    /// was requested.
    pub wall_ms: u64,
}

/// All records of one suite, sorted by identity label then parameters.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub identities: Vec<IdentityRecord>,
    pub passed: usize,
    pub failed: usize,
    /// Cumulative batch wall time in milliseconds; 0 unless timing was
    /// requested.
    pub wall_ms: u64,
}

/// Aggregate counts over every suite in the report.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub suites: usize,
    pub identities: usize,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
}

/// The complete outcome of one run.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub engine_version: String,
    pub config: ConfigEcho,
    pub suites: Vec<SuiteReport>,
    pub summary: Summary,
}

impl Report {
    /// Assembles the final report from finished suite reports.
    pub fn assemble(config: &SuiteConfig, level_cap: u32, suites: Vec<SuiteReport>) -> Report {
        let identities: usize = suites.iter().map(|s| s.identities.len()).sum();
        let passed: usize = suites.iter().map(|s| s.passed).sum();
        let failed = identities - passed;
        Report {
            engine_version: ENGINE_VERSION.to_string(),
            config: ConfigEcho {
                m: config.m,
                n: config.n,
                series_order: config.series_order,
                h_order: config.h_order,
                level_cap,
                suites: config
                    .ordered_suites()
                    .iter()
                    .map(|s| s.name().to_string())
                    .collect(),
                seed: config.seed,
                format: config.format.name().to_string(),
                jobs: config.jobs,
                cache_dir: config.cache_dir.as_ref().map(|p| p.display().to_string()),
                timings: config.timings,
            },
            summary: Summary {
                suites: suites.len(),
                identities,
                passed,
                failed,
                all_pass: failed == 0,
            },
            suites,
        }
    }
}

/// Encodes a report. Both formats are deterministic functions of the report.
pub fn emit(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut bytes =
                serde_json::to_vec_pretty(report).expect("report serialization cannot fail");
            bytes.push(b'\n');
            bytes
        }
        Format::Text => emit_text(report).into_bytes(),
    }
}

fn emit_text(report: &Report) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    let config = &report.config;
    let _ = writeln!(out, "dy-verify {}", report.engine_version);
    let _ = writeln!(
        out,
        "algebra gl({}|{})  series order {}  h order {}  level cap {}  seed {}",
        config.m, config.n, config.series_order, config.h_order, config.level_cap, config.seed
    );
    let _ = writeln!(out, "suites: {}", config.suites.join(", "));
    let _ = writeln!(out);
    let width = report
        .suites
        .iter()
        .map(|s| s.suite.len())
        .max()
        .unwrap_or(0)
        .max("suite".len());
    let _ = writeln!(
        out,
        "{:width$}  {:>8}  {:>8}  {:>8}",
        "suite", "checked", "passed", "failed"
    );
    for suite in &report.suites {
        let _ = write!(
            out,
            "{:width$}  {:>8}  {:>8}  {:>8}",
            suite.suite,
            suite.identities.len(),
            suite.passed,
            suite.failed
        );
        if config.timings {
            let _ = write!(out, "  {:>8} ms", suite.wall_ms);
        }
        let _ = writeln!(out);
        for record in suite.identities.iter().filter(|r| !r.pass) {
            let _ = writeln!(out, "    FAIL {}  ({})", record.identity, record.reference);
            let _ = writeln!(out, "         params: {}", record.params);
            if let Some(counterexample) = &record.counterexample {
                let _ = writeln!(out, "         counterexample: {counterexample}");
            }
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "summary: {} suites, {} identities, {} passed, {} failed -> {}",
        report.summary.suites,
        report.summary.identities,
        report.summary.passed,
        report.summary.failed,
        if report.summary.all_pass {
            "PASS"
        } else {
            "FAIL"
        }
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Format;

    fn sample_report(pass: bool) -> Report {
        let config = SuiteConfig::new(1, 1, 2, 2);
        let record = IdentityRecord {
            identity: "sample-identity".into(),
            reference: "sample-family".into(),
            params: "shape=1|1; N=2; H=2".into(),
            pass,
            counterexample: if pass {
                None
            } else {
                Some("h^1 t[-1;1,2]".into())
            },
            wall_ms: 0,
        };
        let suite = SuiteReport {
            suite: "gauss".into(),
            passed: usize::from(pass),
            failed: usize::from(!pass),
            wall_ms: 0,
            identities: vec![record],
        };
        Report::assemble(&config, 16, vec![suite])
    }

    #[test]
    fn json_reports_carry_the_stable_fields() {
        let bytes = emit(&sample_report(true), Format::Json);
        let value: serde_json::Value = serde_json::from_slice(&bytes).expect("valid json");
        for field in ["engine_version", "config", "suites", "summary"] {
            assert!(value.get(field).is_some(), "missing field {field}");
        }
        let config = &value["config"];
        for field in [
            "m",
            "n",
            "series_order",
            "h_order",
            "level_cap",
            "suites",
            "seed",
            "format",
        ] {
            assert!(config.get(field).is_some(), "missing config field {field}");
        }
        assert!(
            config.get("jobs").is_none(),
            "worker count must stay out of the serialized echo"
        );
        let record = &value["suites"][0]["identities"][0];
        for field in [
            "identity",
            "reference",
            "params",
            "pass",
            "counterexample",
            "wall_ms",
        ] {
            assert!(record.get(field).is_some(), "missing record field {field}");
        }
    }

    #[test]
    fn failures_carry_their_counterexample_into_the_encodings() {
        let report = sample_report(false);
        let json = String::from_utf8(emit(&report, Format::Json)).expect("utf-8");
        assert!(json.contains("h^1 t[-1;1,2]"));
        let text = String::from_utf8(emit(&report, Format::Text)).expect("utf-8");
        assert!(text.contains("FAIL sample-identity"));
        assert!(text.contains("counterexample: h^1 t[-1;1,2]"));
        assert!(!report.summary.all_pass);
    }

    #[test]
    fn emission_is_a_pure_function_of_the_report() {
        let report = sample_report(true);
        assert_eq!(emit(&report, Format::Json), emit(&report, Format::Json));
        assert_eq!(emit(&report, Format::Text), emit(&report, Format::Text));
    }

    #[test]
    fn empty_suite_selection_yields_an_empty_passing_summary() {
        let mut config = SuiteConfig::new(1, 1, 2, 2);
        config.suites.clear();
        let report = Report::assemble(&config, 16, Vec::new());
        assert_eq!(report.summary.suites, 0);
        assert_eq!(report.summary.identities, 0);
        assert_eq!(report.summary.passed, 0);
        assert_eq!(report.summary.failed, 0);
        assert!(report.summary.all_pass);
    }
}
