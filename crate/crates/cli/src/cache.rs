//! Rule-table caching: persist derived rewrite rules and reload them.
//!
//! Deriving the rewrite rule for a generator pair is the expensive part of a
//! cold run, and the result depends only on the algebra parameters. The
//! cache is a plain text file: a header binding the shape, both truncation
//! orders, the level cap, and the engine version, followed by one line per
//! memoized rule in generator order. Rule corrections silently depend on
//! every one of those knobs, so loading refuses any header mismatch instead
//! of guessing which entries might still be valid.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use dy_core::{AlgebraContext, Element, Generator, RuleTable};

use crate::report::ENGINE_VERSION;

const MAGIC: &str = "dy-rule-cache format=1";

/// Failure modes of cache IO. A missing or stale file just means the rules
/// must be derived fresh; corruption and IO errors are worth reporting.
#[derive(Debug)]
pub enum CacheError {
    /// No cache file at the path.
    NotFound(PathBuf),
    /// The file was written for different parameters or another engine
    /// version; regenerate it.
    Stale(String),
    /// The file exists but its header or body does not parse.
    Corrupt(String),
    Io(io::Error),
}

impl fmt::Display for CacheError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CacheError::NotFound(path) => write!(f, "no rule cache at {}", path.display()),
            CacheError::Stale(msg) => write!(f, "stale rule cache: {msg}"),
            CacheError::Corrupt(msg) => write!(f, "corrupt rule cache: {msg}"),
            CacheError::Io(err) => write!(f, "rule cache io error: {err}"),
        }
    }
}

impl std::error::Error for CacheError {}

/// Canonical cache file name for a shape inside a cache directory. Only the
/// shape is encoded in the name; changing any other knob overwrites the file
/// after the next run instead of accumulating variants.
pub fn cache_path(dir: &Path, ctx: &AlgebraContext) -> PathBuf {
    dir.join(format!("rules-gl{}x{}.cache", ctx.m(), ctx.n()))
}

fn header(ctx: &AlgebraContext) -> [String; 2] {
    [
        format!("{MAGIC} engine={ENGINE_VERSION}"),
        format!(
            "shape m={} n={} N={} H={} L={}",
            ctx.m(),
            ctx.n(),
            ctx.series_order(),
            ctx.h_order(),
            ctx.level_cap()
        ),
    ]
}

/// Writes every memoized rule of `table` to `path`, creating parent
/// directories as needed. Returns the number of rules written.
pub fn cache_rules(table: &RuleTable, path: &Path) -> Result<usize, CacheError> {
    let rules = table.export_rules();
    let mut body = String::new();
    for line in header(table.context()) {
        body.push_str(&line);
        body.push('\n');
    }
    body.push_str(&format!("rules {}\n", rules.len()));
    for (x, y, correction) in &rules {
        body.push_str(&format!("{x} {y} := {correction}\n"));
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(CacheError::Io)?;
    }
    fs::write(path, body).map_err(CacheError::Io)?;
    Ok(rules.len())
}

/// Loads a cache written by [`cache_rules`] into a fresh table for `ctx`.
///
/// The header must match `ctx` and the running engine version exactly;
/// otherwise the file is reported stale and the caller should regenerate it.
pub fn load_rules(path: &Path, ctx: AlgebraContext) -> Result<RuleTable, CacheError> {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(err) if err.kind() == io::ErrorKind::NotFound => {
            return Err(CacheError::NotFound(path.to_path_buf()));
        }
        Err(err) => return Err(CacheError::Io(err)),
    };
    let mut lines = text.lines();
    for want in header(&ctx) {
        match lines.next() {
            Some(got) if got == want => {}
            Some(got) => {
                return Err(CacheError::Stale(format!(
                    "header says {got:?}, this run needs {want:?}"
                )));
            }
            None => return Err(CacheError::Corrupt("truncated header".into())),
        }
    }
    let count_line = lines
        .next()
        .ok_or_else(|| CacheError::Corrupt("missing rule count".into()))?;
    let count: usize = count_line
        .strip_prefix("rules ")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CacheError::Corrupt(format!("bad rule count line {count_line:?}")))?;
    let table = RuleTable::new(ctx);
    let mut seen = 0usize;
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (pair, correction) = line
            .split_once(" := ")
            .ok_or_else(|| CacheError::Corrupt(format!("bad rule line {line:?}")))?;
        let (left, right) = pair
            .split_once(' ')
            .ok_or_else(|| CacheError::Corrupt(format!("bad generator pair {pair:?}")))?;
        let x = parse_generator(ctx, left)?;
        let y = parse_generator(ctx, right)?;
        let correction = Element::parse(ctx, correction)
            .map_err(|err| CacheError::Corrupt(format!("bad correction in {line:?}: {err}")))?;
        table
            .import_rule(x, y, correction)
            .map_err(|err| CacheError::Corrupt(format!("rejected rule {pair:?}: {err}")))?;
        seen += 1;
    }
    if seen != count {
        return Err(CacheError::Corrupt(format!(
            "header promises {count} rules, file holds {seen}"
        )));
    }
    Ok(table)
}

/// Parses one generator in the element grammar, e.g. `t[-2;1,3]`.
fn parse_generator(ctx: AlgebraContext, text: &str) -> Result<Generator, CacheError> {
    let element = Element::parse(ctx, text)
        .map_err(|err| CacheError::Corrupt(format!("bad generator {text:?}: {err}")))?;
    let mut terms = element.terms();
    if let Some(term) = terms.next() {
        if terms.next().is_none() && term.hpow == 0 && term.word.len() == 1 {
            return Ok(term.word[0]);
        }
    }
    Err(CacheError::Corrupt(format!(
        "expected a single generator, got {text:?}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use dy_core::{Scalar, Sign};

    fn ctx() -> AlgebraContext {
        AlgebraContext::new(1, 1, 2, 2).expect("valid context")
    }

    fn probe_words(ctx: AlgebraContext) -> Vec<Element> {
        // Deterministic products covering mixed signs, levels, and parities.
        let mut gens = Vec::new();
        for sign in [Sign::Minus, Sign::Plus] {
            for level in 1..=2 {
                for row in 1..=2u32 {
                    for col in 1..=2u32 {
                        gens.push(
                            Element::generator(ctx, sign, level, row, col).expect("generator"),
                        );
                    }
                }
            }
        }
        let mut words = Vec::new();
        for (i, a) in gens.iter().enumerate() {
            let b = &gens[(i * 7 + 3) % gens.len()];
            let c = &gens[(i * 5 + 11) % gens.len()];
            let product = a.try_mul(b).and_then(|ab| ab.try_mul(c)).expect("product");
            words.push(product.scale(&Scalar::from_integer((i as i64 + 1).into())));
        }
        words
    }

    #[test]
    fn cache_round_trip_preserves_normal_forms() {
        let ctx = ctx();
        let table = RuleTable::new(ctx);
        let probes = probe_words(ctx);
        // Warm the table so there is something worth exporting.
        for probe in &probes {
            table.normalize(probe).expect("normalize");
        }
        let dir = tempfile::tempdir().expect("tempdir");
        let path = cache_path(dir.path(), &ctx);
        let written = cache_rules(&table, &path).expect("cache write");
        assert!(written > 0, "warm table should hold rules");

        let loaded = load_rules(&path, ctx).expect("cache read");
        for probe in &probes {
            assert_eq!(
                table.normalize(probe).expect("normalize"),
                loaded.normalize(probe).expect("normalize"),
                "normal forms diverge after a cache round trip"
            );
        }
    }

    #[test]
    fn mismatched_parameters_are_reported_stale() {
        let ctx = ctx();
        let table = RuleTable::new(ctx);
        let dir = tempfile::tempdir().expect("tempdir");
        let path = cache_path(dir.path(), &ctx);
        cache_rules(&table, &path).expect("cache write");

        let other = AlgebraContext::new(1, 1, 2, 3).expect("valid context");
        match load_rules(&path, other) {
            Err(CacheError::Stale(msg)) => assert!(msg.contains("H=3"), "{msg}"),
            other => panic!("expected a stale-cache error, got {other:?}"),
        }
    }

    #[test]
    fn missing_files_are_reported_not_found() {
        let dir = tempfile::tempdir().expect("tempdir");
        let path = dir.path().join("absent.cache");
        match load_rules(&path, ctx()) {
            Err(CacheError::NotFound(reported)) => assert_eq!(reported, path),
            other => panic!("expected a not-found error, got {other:?}"),
        }
    }

    #[test]
    fn corrupted_bodies_are_rejected() {
        let ctx = ctx();
        let table = RuleTable::new(ctx);
        table
            .normalize(
                &Element::generator(ctx, Sign::Minus, 1, 2, 1)
                    .expect("generator")
                    .try_mul(&Element::generator(ctx, Sign::Minus, 1, 1, 1).expect("generator"))
                    .expect("product"),
            )
            .expect("normalize");
        let dir = tempfile::tempdir().expect("tempdir");
        let path = cache_path(dir.path(), &ctx);
        cache_rules(&table, &path).expect("cache write");

        let mut text = fs::read_to_string(&path).expect("read back");
        text.push_str("not a rule line\n");
        fs::write(&path, text).expect("rewrite");
        assert!(matches!(
            load_rules(&path, ctx),
            Err(CacheError::Corrupt(_))
        ));
    }
}
