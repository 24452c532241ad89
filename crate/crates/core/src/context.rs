//! Algebra contexts: the global truncation parameters that every symbolic
//! value in this crate is relative to.

use std::fmt;

use crate::error::{Error, Result};

/// Global parameters of one truncated algebra instance.
///
/// A context fixes the superalgebra shape and both truncations:
///
/// * `m`, `n` — matrix indices `1..=m` are even, `m+1..=m+n` are odd;
/// * `series_order` (`N`) — series keep the coefficients of `u^0 .. u^{±N}`;
/// * `h_order` (`H`) — monomials carrying more than `H` powers of the central
///   parameter h are identified with zero;
/// * `level_cap` (`L`) — the largest generator level rewriting may produce.
///
/// Contexts are plain values: cheap to copy, compared field-wise. Every
/// element, series, and matrix records the context it lives in, and mixing
/// contexts is an error.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct AlgebraContext {
    m: u32,
    n: u32,
    series_order: u32,
    h_order: u32,
    level_cap: u32,
}

/// Largest supported matrix size `m + n`.
pub const MAX_SIZE: u32 = 128;

/// Largest supported generator level.
pub const MAX_LEVEL: u32 = u16::MAX as u32;

fn default_level_cap(series_order: u32, h_order: u32) -> u32 {
    // Rewriting may merge generator levels (at most one merge per power of h
    // spent), so live levels stay well below (N + 2)(H + 2) for any word that
    // arises from truncated series arithmetic. The classical bound N + H + 2
    // is kept as a floor for tiny configurations.
    ((series_order + 2) * (h_order + 2)).max(series_order + h_order + 2)
}

impl AlgebraContext {
    /// Creates a context with the default level cap.
    pub fn new(m: u32, n: u32, series_order: u32, h_order: u32) -> Result<Self> {
        Self::with_level_cap(
            m,
            n,
            series_order,
            h_order,
            default_level_cap(series_order, h_order),
        )
    }

    /// Creates a context with an explicit level cap.
    pub fn with_level_cap(
        m: u32,
        n: u32,
        series_order: u32,
        h_order: u32,
        level_cap: u32,
    ) -> Result<Self> {
        if m + n == 0 || m + n > MAX_SIZE {
            return Err(Error::SizeMismatch {
                left: (m + n) as usize,
                right: MAX_SIZE as usize,
            });
        }
        if level_cap < series_order + 1 || level_cap > MAX_LEVEL {
            return Err(Error::LevelOutOfRange {
                level: level_cap,
                cap: MAX_LEVEL,
            });
        }
        Ok(Self {
            m,
            n,
            series_order,
            h_order,
            level_cap,
        })
    }

    /// Number of even indices.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of odd indices.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Matrix size `m + n`.
    pub fn size(&self) -> u32 {
        self.m + self.n
    }

    /// Series truncation order `N`.
    pub fn series_order(&self) -> u32 {
        self.series_order
    }

    /// h-adic truncation order `H`.
    pub fn h_order(&self) -> u32 {
        self.h_order
    }

    /// Generator level cap `L`.
    pub fn level_cap(&self) -> u32 {
        self.level_cap
    }

    /// Parity of a 1-based matrix index: 0 for `1..=m`, 1 for `m+1..=m+n`.
    pub fn parity(&self, index: u32) -> u8 {
        debug_assert!(index >= 1 && index <= self.size());
        u8::from(index > self.m)
    }

    /// The same context with the h-truncation raised by `extra`.
    ///
    /// Used internally to compute quantities that are later divided by a
    /// power of h exactly and re-truncated to the working order.
    pub fn elevated(&self, extra: u32) -> Self {
        Self {
            h_order: self.h_order + extra,
            ..*self
        }
    }

    /// The same context with a different series order.
    pub fn with_series_order(&self, series_order: u32) -> Result<Self> {
        Self::with_level_cap(
            self.m,
            self.n,
            series_order,
            self.h_order,
            self.level_cap
                .max(default_level_cap(series_order, self.h_order)),
        )
    }

    /// True when the other context has the same `m` and `n`.
    pub fn same_shape(&self, other: &Self) -> bool {
        self.m == other.m && self.n == other.n
    }
}

impl fmt::Display for AlgebraContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "gl({}|{}) N={} H={} L={}",
            self.m, self.n, self.series_order, self.h_order, self.level_cap
        )
    }
}
