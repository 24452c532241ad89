//! Exact symbolic engine for the double Yangian of the Lie superalgebra
//! gl(m|n) at finite truncation.
//!
//! The algebra is presented by generator matrices satisfying RTT exchange
//! relations with the super R-matrix `R(u) = 1 − h P u^{-1}`. This crate
//! implements, over exact rationals and truncated in both the series variable
//! and the parameter h:
//!
//! * free superalgebra arithmetic and rewriting to a normal form derived from
//!   the exchange relations ([`element`], [`rtt`]);
//! * truncated series, supermatrices, quasideterminants, and graded two-leg
//!   tensor operators ([`series`], [`matrix`]);
//! * the Gauss decomposition and Drinfeld-style generating series ([`gauss`]);
//! * the standard algebra morphisms between different gl(m|n) instances
//!   ([`morphism`]);
//! * the quantum Berezinian, its factorizations, centrality of its
//!   coefficients, and the classical-limit oracle ([`berezinian`],
//!   [`classical`]).
//!
//! Every verification routine returns [`verify::Verification`] records that a
//! caller can assemble into reports.

pub mod berezinian;
pub mod classical;
pub mod context;
pub mod element;
pub mod error;
pub mod gauss;
pub mod matrix;
pub mod morphism;
pub mod rtt;
pub mod series;
pub mod twoleg;
pub mod verify;

pub use context::AlgebraContext;
pub use element::{Element, Generator, Scalar, Sign};
pub use error::{Error, Result};
pub use rtt::RuleTable;
pub use verify::Verification;
