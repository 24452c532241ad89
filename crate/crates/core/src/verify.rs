//! Shared record type for verification outcomes.
//!
//! Every verification routine in this crate returns a list of these records;
//! the CLI assembles them into reports. A failing record always carries a
//! serialized counterexample in the element text grammar.

use crate::element::Element;

/// Outcome of one checked identity instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    /// Label of the concrete instance, unique within a suite run.
    pub identity: String,
    /// Machine name of the identity family being checked.
    pub reference: String,
    /// Echo of the instance parameters.
    pub params: String,
    pub pass: bool,
    /// Serialized nonzero residue, present exactly when `pass` is false.
    pub counterexample: Option<String>,
}

impl Verification {
    /// Records a pass/fail from a residue that should normalize to zero.
    pub fn from_residue(
        identity: impl Into<String>,
        reference: impl Into<String>,
        params: impl Into<String>,
        residue: &Element,
    ) -> Self {
        Self {
            identity: identity.into(),
            reference: reference.into(),
            params: params.into(),
            pass: residue.is_zero(),
            counterexample: if residue.is_zero() {
                None
            } else {
                Some(residue.to_string())
            },
        }
    }

    /// Records an outcome with an explicit counterexample payload.
    pub fn from_outcome(
        identity: impl Into<String>,
        reference: impl Into<String>,
        params: impl Into<String>,
        pass: bool,
        counterexample: Option<String>,
    ) -> Self {
        Self {
            identity: identity.into(),
            reference: reference.into(),
            params: params.into(),
            pass,
            counterexample: if pass { None } else { counterexample },
        }
    }
}

/// True when every record passes.
pub fn all_pass(records: &[Verification]) -> bool {
    records.iter().all(|r| r.pass)
}
