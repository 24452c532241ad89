//! Suite execution: task construction, the worker pool, deterministic merge.
//!
//! Each suite is broken into independent batches of identity checks. The
//! batches run on a worker pool sized by the configuration, sharing one rule
//! table (its memoization is internally synchronized, and a derived rule is
//! the same whichever worker derives it first). The merge step groups
//! records by suite in registry order and sorts them by identity label and
//! parameters, so the report never depends on scheduling.
//!
//! Engine errors inside a batch — a level cap too tight for a cascade, say —
//! become failing records rather than crashes, so a run always produces a
//! report for every selected suite.

use std::time::Instant;

use rayon::prelude::*;

use dy_core::berezinian::{
    verify_berezinian_agreement, verify_centrality, verify_centrality_gauss,
    verify_centrality_proof_steps, verify_classical_limit, verify_delta_series,
    verify_independence, verify_quantum_determinant, verify_reflection_shift,
};
use dy_core::classical::{verify_classical_diagram, verify_identity_sum_centrality};
use dy_core::gauss::{gauss_decompose, verify_d_commute, verify_gauss_identities};
use dy_core::morphism::{
    build_psi, build_zeta, verify_psi_images, verify_relation_preservation, verify_round_trips,
    verify_zeta_images,
};
use dy_core::{AlgebraContext, RuleTable, Sign, Verification};

use crate::cache::{self, CacheError};
use crate::config::{Suite, SuiteConfig, UsageError};
use crate::report::{IdentityRecord, Report, SuiteReport};

/// How many pseudo-random words the confluence suite checks.
pub const CONFLUENCE_TRIALS: u32 = 200;

type BatchFn<'a> = Box<dyn Fn() -> dy_core::Result<Vec<Verification>> + Send + Sync + 'a>;

struct Batch<'a> {
    suite: Suite,
    index: usize,
    run: BatchFn<'a>,
}

/// Executes the configured suites and assembles the report.
///
/// Only configuration problems are errors; verification failures and engine
/// errors inside suites are reported in the returned [`Report`].
pub fn run(config: &SuiteConfig) -> Result<Report, UsageError> {
    let ctx = config.validate()?;
    let suites = config.ordered_suites();

    let mut cache_file = None;
    let table = match &config.cache_dir {
        Some(dir) => {
            let path = cache::cache_path(dir, &ctx);
            let table = match cache::load_rules(&path, ctx) {
                Ok(table) => table,
                // Nothing usable on disk: derive fresh rules and overwrite
                // the file after the run.
                Err(CacheError::NotFound(_) | CacheError::Stale(_)) => RuleTable::new(ctx),
                Err(err) => {
                    return Err(UsageError(format!("unusable rule cache: {err}")));
                }
            };
            cache_file = Some(path);
            table
        }
        None => RuleTable::new(ctx),
    };

    let mut batches = Vec::new();
    for &suite in &suites {
        push_batches(&mut batches, suite, ctx, &table, config);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|err| UsageError(format!("cannot build worker pool: {err}")))?;
    let timed = config.timings;
    let outputs: Vec<(Suite, Vec<Verification>, u64)> = pool.install(|| {
        batches
            .par_iter()
            .map(|batch| {
                let start = Instant::now();
                let records = match (batch.run)() {
                    Ok(records) => records,
                    Err(err) => vec![Verification::from_outcome(
                        format!("{}-batch-{:02}-error", batch.suite.name(), batch.index),
                        "engine-error",
                        ctx.to_string(),
                        false,
                        Some(err.to_string()),
                    )],
                };
                let wall = if timed {
                    start.elapsed().as_millis() as u64
                } else {
                    0
                };
                (batch.suite, records, wall)
            })
            .collect()
    });

    let mut suite_reports = Vec::with_capacity(suites.len());
    for &suite in &suites {
        let mut identities = Vec::new();
        let mut wall_total = 0;
        for (batch_suite, records, wall) in &outputs {
            if *batch_suite != suite {
                continue;
            }
            wall_total += wall;
            for record in records {
                identities.push(IdentityRecord {
                    identity: record.identity.clone(),
                    reference: record.reference.clone(),
                    params: record.params.clone(),
                    pass: record.pass,
                    counterexample: record.counterexample.clone(),
                    wall_ms: *wall,
                });
            }
        }
        identities.sort_by(|a, b| {
            a.identity
                .cmp(&b.identity)
                .then_with(|| a.params.cmp(&b.params))
        });
        let passed = identities.iter().filter(|r| r.pass).count();
        let failed = identities.len() - passed;
        suite_reports.push(SuiteReport {
            suite: suite.name().to_string(),
            identities,
            passed,
            failed,
            wall_ms: wall_total,
        });
    }

    if let Some(path) = cache_file {
        cache::cache_rules(&table, &path)
            .map_err(|err| UsageError(format!("cannot write rule cache: {err}")))?;
    }

    Ok(Report::assemble(config, ctx.level_cap(), suite_reports))
}

fn push_batches<'a>(
    batches: &mut Vec<Batch<'a>>,
    suite: Suite,
    ctx: AlgebraContext,
    table: &'a RuleTable,
    config: &SuiteConfig,
) {
    let mut batch: Vec<BatchFn<'a>> = Vec::new();
    match suite {
        Suite::RelationsOracle => {
            batch.push(Box::new(move || table.oracle_match_inverse_relations()));
        }
        Suite::Confluence => {
            let seed = config.seed;
            batch.push(Box::new(move || {
                table.confluence_probe(seed, CONFLUENCE_TRIALS)
            }));
        }
        Suite::Gauss => {
            for sign in [Sign::Minus, Sign::Plus] {
                batch.push(Box::new(move || {
                    let g = gauss_decompose(ctx, sign)?;
                    verify_gauss_identities(&g, table)
                }));
            }
        }
        Suite::DCommute => {
            batch.push(Box::new(move || {
                let minus = gauss_decompose(ctx, Sign::Minus)?;
                let plus = gauss_decompose(ctx, Sign::Plus)?;
                verify_d_commute(&minus, &plus, table)
            }));
        }
        Suite::Zeta => {
            batch.push(Box::new(move || {
                let zeta = build_zeta(ctx)?;
                let target = RuleTable::new(*zeta.target());
                let mut records = verify_zeta_images(ctx, &target)?;
                records.extend(verify_relation_preservation(&zeta, &target)?);
                Ok(records)
            }));
            batch.push(Box::new(move || verify_round_trips(ctx)));
        }
        Suite::Psi => {
            batch.push(Box::new(move || {
                let psi = build_psi(ctx, 1)?;
                let target = RuleTable::new(*psi.target());
                let mut records = verify_psi_images(ctx, 1, &target)?;
                records.extend(verify_relation_preservation(&psi, &target)?);
                Ok(records)
            }));
        }
        Suite::BerezinianEquality => {
            batch.push(Box::new(move || verify_quantum_determinant(ctx, table)));
            batch.push(Box::new(move || verify_berezinian_agreement(ctx, table)));
            batch.push(Box::new(move || {
                let zeta = build_zeta(ctx)?;
                let target = RuleTable::new(*zeta.target());
                verify_reflection_shift(ctx, &target)
            }));
        }
        Suite::Centrality => {
            // The upward series has one more coefficient than the series
            // order; the generator window is capped by the order itself.
            let r_max = ctx.series_order() + 1;
            let s_max = ctx.series_order();
            batch.push(Box::new(move || {
                verify_centrality(ctx, table, r_max, s_max)
            }));
            batch.push(Box::new(move || verify_centrality_gauss(ctx, table, r_max)));
        }
        Suite::ProofSteps => {
            batch.push(Box::new(move || verify_centrality_proof_steps(ctx, table)));
        }
        Suite::ClassicalLimit => {
            let window = ctx.series_order() as i64;
            let r_max = ctx.series_order() + 1;
            batch.push(Box::new(move || verify_classical_diagram(table)));
            batch.push(Box::new(move || {
                verify_identity_sum_centrality(ctx.m(), ctx.n(), window)
            }));
            batch.push(Box::new(move || verify_classical_limit(ctx, r_max, window)));
        }
        Suite::Independence => {
            let r_max = 2.min(ctx.series_order());
            batch.push(Box::new(move || verify_independence(ctx, table, r_max)));
        }
        Suite::DeltaSl => {
            let r_max = ctx.series_order();
            batch.push(Box::new(move || verify_delta_series(ctx, table, r_max)));
        }
    }
    for (index, run) in batch.into_iter().enumerate() {
        batches.push(Batch { suite, index, run });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Format;
    use crate::report::emit;

    fn small_config(suites: Vec<Suite>) -> SuiteConfig {
        let mut config = SuiteConfig::new(1, 1, 2, 2);
        config.suites = suites;
        config
    }

    #[test]
    fn empty_selection_produces_an_empty_report() {
        let config = small_config(Vec::new());
        let report = run(&config).expect("run");
        assert!(report.suites.is_empty());
        assert_eq!(report.summary.identities, 0);
        assert_eq!(report.summary.passed, 0);
        assert!(report.summary.all_pass);
    }

    #[test]
    fn reports_are_byte_identical_across_worker_counts() {
        let suites = vec![Suite::RelationsOracle, Suite::Confluence, Suite::Gauss];
        let mut one = small_config(suites.clone());
        one.jobs = 1;
        let mut many = small_config(suites);
        many.jobs = 4;
        let first = run(&one).expect("run");
        let second = run(&many).expect("run");
        assert_eq!(
            emit(&first, Format::Json),
            emit(&second, Format::Json),
            "worker count leaked into the serialized report"
        );
        assert_eq!(emit(&first, Format::Text), emit(&second, Format::Text));
        assert!(first.summary.all_pass, "{first:?}");
    }

    #[test]
    fn suite_order_follows_the_registry_not_the_request() {
        let mut config = small_config(vec![Suite::Gauss, Suite::RelationsOracle]);
        config.jobs = 2;
        let report = run(&config).expect("run");
        let names: Vec<&str> = report.suites.iter().map(|s| s.suite.as_str()).collect();
        assert_eq!(names, ["relations-oracle", "gauss"]);
        assert!(report.summary.all_pass);
    }

    #[test]
    fn engine_errors_become_suite_failures_not_crashes() {
        // A level cap this tight cannot hold the rule cascades, so the
        // oracle suite must fail through a reported record.
        let mut config = small_config(vec![Suite::RelationsOracle]);
        config.level_cap = Some(3);
        let report = run(&config).expect("run");
        assert!(!report.summary.all_pass);
        let suite = &report.suites[0];
        assert_eq!(suite.suite, "relations-oracle");
        assert!(suite.failed >= 1);
        let failing = suite
            .identities
            .iter()
            .find(|r| !r.pass)
            .expect("a failing record");
        assert!(
            failing.counterexample.is_some(),
            "failures must carry a payload"
        );
    }

    #[test]
    fn identities_arrive_sorted_by_label_then_params() {
        let mut config = small_config(vec![Suite::Gauss]);
        config.jobs = 3;
        let report = run(&config).expect("run");
        let records = &report.suites[0].identities;
        assert!(!records.is_empty());
        let mut sorted = records.clone();
        sorted.sort_by(|a, b| {
            a.identity
                .cmp(&b.identity)
                .then_with(|| a.params.cmp(&b.params))
        });
        for (have, want) in records.iter().zip(&sorted) {
            assert_eq!(have.identity, want.identity);
            assert_eq!(have.params, want.params);
        }
    }

    #[test]
    fn cached_and_fresh_runs_agree() {
        let dir = tempfile::tempdir().expect("tempdir");
        let mut cold = small_config(vec![Suite::RelationsOracle, Suite::DCommute]);
        cold.cache_dir = Some(dir.path().to_path_buf());
        let fresh = run(&cold).expect("cold run");
        let path = cache::cache_path(dir.path(), &cold.validate().expect("valid config"));
        assert!(path.exists(), "run should have written the cache");

        let warm = run(&cold).expect("warm run");
        assert_eq!(
            emit(&fresh, Format::Json),
            emit(&warm, Format::Json),
            "cache reuse changed the report"
        );
    }
}
