//! Batch verification harness for the truncated double Yangian engine.
//!
//! The library side of the `dy-verify` binary: a [`config::SuiteConfig`]
//! selects an algebra gl(m|n), truncation orders, and a set of verification
//! suites; [`runner::run`] executes them on a worker pool against the
//! engine in `dy-core` and returns a [`report::Report`]; [`report::emit`]
//! encodes the report as deterministic JSON or text. Rewrite-rule tables can
//! be persisted between runs through [`cache`].
//!
//! Reports are byte-reproducible: for a fixed configuration and seed the
//! emitted bytes do not depend on the worker count, the cache state, or
//! scheduling.

pub mod cache;
pub mod config;
pub mod report;
pub mod runner;
