//! Run configuration: which algebra, which suites, and how to execute them.

use std::fmt;
use std::path::PathBuf;

use dy_core::AlgebraContext;

/// One verification suite. [`Suite::REGISTRY`] below fixes the execution
/// order; a run always walks its selection in that order, whatever order the
/// suites were requested in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    /// Exchange identities between generator matrices and their inverses,
    /// checked against the rewrite rules on the exactly known window.
    RelationsOracle,
    /// Normal forms of pseudo-random words agree between reduction
    /// strategies.
    Confluence,
    /// Gauss decomposition: the triangular factors reassemble the generator
    /// matrix, and all quasideterminant expansions hold.
    Gauss,
    /// The diagonal Gauss series commute with each other, all sign pairs.
    DCommute,
    /// The reflection morphism: images of the Gauss series, round trips, and
    /// preservation of the defining relations.
    Zeta,
    /// The corner-embedding morphism: images of the Gauss series, including
    /// the bordered quasideterminant form, and relation preservation.
    Psi,
    /// The three constructions of the Berezinian agree; the quantum
    /// determinant factors through the diagonal series; the reflection
    /// morphism shifts the Berezinian as expected.
    BerezinianEquality,
    /// Berezinian coefficients supercommute with every generator and with
    /// every Gauss series coefficient.
    Centrality,
    /// The chain of exchange identities from which centrality follows.
    ProofSteps,
    /// The h-free layer maps onto the loop superalgebra: brackets, identity
    /// loop sums, and the images of the Berezinian coefficients.
    ClassicalLimit,
    /// Degree-two monomials in the Berezinian coefficients stay linearly
    /// independent in normal form.
    Independence,
    /// Balanced shapes only: the Berezinian factors through the diagonal
    /// ratio series and its coefficients behave as the quotient construction
    /// predicts.
    DeltaSl,
}

impl Suite {
    /// Every suite, in the fixed execution order.
    pub const REGISTRY: [Suite; 12] = [
        Suite::RelationsOracle,
        Suite::Confluence,
        Suite::Gauss,
        Suite::DCommute,
        Suite::Zeta,
        Suite::Psi,
        Suite::BerezinianEquality,
        Suite::Centrality,
        Suite::ProofSteps,
        Suite::ClassicalLimit,
        Suite::Independence,
        Suite::DeltaSl,
    ];

    /// The registry name, as used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            Suite::RelationsOracle => "relations-oracle",
            Suite::Confluence => "confluence",
            Suite::Gauss => "gauss",
            Suite::DCommute => "d-commute",
            Suite::Zeta => "zeta",
            Suite::Psi => "psi",
            Suite::BerezinianEquality => "berezinian-equality",
            Suite::Centrality => "centrality",
            Suite::ProofSteps => "proof-steps",
            Suite::ClassicalLimit => "classical-limit",
            Suite::Independence => "independence",
            Suite::DeltaSl => "delta-sl",
        }
    }

    /// Looks a suite up by its registry name.
    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::REGISTRY.iter().copied().find(|s| s.name() == name)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Output encoding of the final report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Json => "json",
        }
    }
}

/// A rejected configuration. The command-line front end reports these on
/// stderr and exits with the usage status (2), without producing a report.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Everything one verification run needs.
///
/// The worker count, cache directory, and timing switch steer execution
/// only; the verification content — and therefore the emitted report — is a
/// function of the remaining fields plus the seed.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Even block size of gl(m|n).
    pub m: u32,
    /// Odd block size of gl(m|n).
    pub n: u32,
    /// Highest retained series exponent.
    pub series_order: u32,
    /// Highest retained power of h.
    pub h_order: u32,
    /// Optional override for the generator level cap; `None` lets the
    /// algebra pick its default from the two orders.
    pub level_cap: Option<u32>,
    /// Suites to execute. Duplicates are ignored and the registry order
    /// always wins; an empty list yields an empty report.
    pub suites: Vec<Suite>,
    /// Seed for the randomized probes.
    pub seed: u64,
    /// Worker threads; 0 means one per logical CPU.
    pub jobs: usize,
    /// Where rule-table caches live; `None` disables caching.
    pub cache_dir: Option<PathBuf>,
    /// Report encoding.
    pub format: Format,
    /// Measure wall times. Timed reports are not byte-reproducible.
    pub timings: bool,
}

impl SuiteConfig {
    /// A configuration with every applicable suite selected and neutral
    /// execution settings.
    pub fn new(m: u32, n: u32, series_order: u32, h_order: u32) -> Self {
        Self {
            m,
            n,
            series_order,
            h_order,
            level_cap: None,
            suites: Self::default_suites(m, n),
            seed: 0,
            jobs: 0,
            cache_dir: None,
            format: Format::Text,
            timings: false,
        }
    }

    /// The full registry, minus the balanced-shape suite when `m != n`.
    pub fn default_suites(m: u32, n: u32) -> Vec<Suite> {
        Suite::REGISTRY
            .iter()
            .copied()
            .filter(|s| *s != Suite::DeltaSl || m == n)
            .collect()
    }

    /// Checks the invariants and builds the algebra context.
    ///
    /// Both truncation orders must be at least 1, an explicit level cap must
    /// exceed the series order, the balanced-shape suite may only be
    /// selected when `m == n`, and the shape itself must be one the algebra
    /// accepts.
    pub fn validate(&self) -> Result<AlgebraContext, UsageError> {
        if self.series_order < 1 {
            return Err(UsageError("series order must be at least 1".into()));
        }
        if self.h_order < 1 {
            return Err(UsageError("h order must be at least 1".into()));
        }
        if let Some(cap) = self.level_cap {
            if cap < self.series_order + 1 {
                return Err(UsageError(format!(
                    "level cap {cap} is below the minimum {} (series order + 1)",
                    self.series_order + 1
                )));
            }
        }
        if self.suites.contains(&Suite::DeltaSl) && self.m != self.n {
            return Err(UsageError(format!(
                "suite delta-sl needs a balanced shape, got gl({}|{})",
                self.m, self.n
            )));
        }
        let ctx = match self.level_cap {
            Some(cap) => {
                AlgebraContext::with_level_cap(self.m, self.n, self.series_order, self.h_order, cap)
            }
            None => AlgebraContext::new(self.m, self.n, self.series_order, self.h_order),
        };
        ctx.map_err(|err| UsageError(format!("invalid algebra shape: {err}")))
    }

    /// The selected suites, deduplicated and in registry order.
    pub fn ordered_suites(&self) -> Vec<Suite> {
        Suite::REGISTRY
            .iter()
            .copied()
            .filter(|s| self.suites.contains(s))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_round_trip() {
        for suite in Suite::REGISTRY {
            assert_eq!(Suite::from_name(suite.name()), Some(suite));
        }
        assert_eq!(Suite::from_name("no-such-suite"), None);
    }

    #[test]
    fn selection_is_deduplicated_and_reordered() {
        let mut config = SuiteConfig::new(1, 1, 2, 2);
        config.suites = vec![
            Suite::Gauss,
            Suite::RelationsOracle,
            Suite::Gauss,
            Suite::Confluence,
        ];
        assert_eq!(
            config.ordered_suites(),
            vec![Suite::RelationsOracle, Suite::Confluence, Suite::Gauss]
        );
    }

    #[test]
    fn default_suites_drop_the_balanced_one_off_the_diagonal() {
        assert!(SuiteConfig::default_suites(1, 1).contains(&Suite::DeltaSl));
        assert!(!SuiteConfig::default_suites(2, 1).contains(&Suite::DeltaSl));
        assert_eq!(SuiteConfig::default_suites(1, 1).len(), 12);
        assert_eq!(SuiteConfig::default_suites(2, 1).len(), 11);
    }

    #[test]
    fn validation_rejects_bad_orders_and_caps() {
        let mut config = SuiteConfig::new(1, 1, 0, 2);
        assert!(config.validate().is_err());
        config.series_order = 2;
        config.h_order = 0;
        assert!(config.validate().is_err());
        config.h_order = 2;
        config.level_cap = Some(2);
        assert!(config.validate().is_err());
        config.level_cap = Some(3);
        assert!(config.validate().is_ok());
    }

    #[test]
    fn validation_rejects_the_balanced_suite_off_the_diagonal() {
        let mut config = SuiteConfig::new(2, 1, 2, 2);
        assert!(config.validate().is_ok());
        config.suites = vec![Suite::DeltaSl];
        let err = config.validate().unwrap_err();
        assert!(err.0.contains("delta-sl"), "{err}");
    }

    #[test]
    fn validation_builds_the_requested_context() {
        let config = SuiteConfig::new(2, 1, 3, 2);
        let ctx = config.validate().expect("valid config");
        assert_eq!((ctx.m(), ctx.n()), (2, 1));
        assert_eq!(ctx.series_order(), 3);
        assert_eq!(ctx.h_order(), 2);

        let mut custom = config.clone();
        custom.level_cap = Some(9);
        assert_eq!(custom.validate().expect("valid config").level_cap(), 9);
    }
}
