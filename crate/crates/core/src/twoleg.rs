//! Operators on two graded matrix legs with algebra-valued coefficients:
//! finite sums `Σ e_{ij} ⊗ e_{kl} ⊗ x` with `x` an [`Element`].
//!
//! Multiplication follows the Koszul sign rule of the graded tensor product
//!
//! `(x ⊗ y ⊗ a)(z ⊗ w ⊗ b) = (−1)^{|y||z| + |a|(|z|+|w|)} xz ⊗ yw ⊗ ab`,
//!
//! with matrix-unit composition `e_{ij} e_{pq} = δ_{jp} e_{iq}`. This is the
//! one place in the engine where graded signs are carried explicitly; plain
//! matrices absorb them (see [`crate::matrix`]), and the relation oracle pins
//! the two conventions against each other.

use std::collections::BTreeMap;
use std::fmt;

use crate::context::AlgebraContext;
use crate::element::{word_parity, Element};
use crate::error::{Error, Result};
use crate::matrix::CoeffMatrix;

/// Which tensor leg a matrix is embedded into.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Leg {
    First,
    Second,
}

/// A finite sum `Σ e_{ij} ⊗ e_{kl} ⊗ coeff`, keyed by `(i, j, k, l)`.
#[derive(Clone, PartialEq)]
pub struct TwoLegOperator {
    ctx: AlgebraContext,
    terms: BTreeMap<(u32, u32, u32, u32), Element>,
}

impl TwoLegOperator {
    pub fn zero(ctx: AlgebraContext) -> Self {
        Self {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    /// The identity operator `Σ_{i,k} e_{ii} ⊗ e_{kk} ⊗ 1`.
    pub fn identity(ctx: AlgebraContext) -> Self {
        let mut out = Self::zero(ctx);
        for i in 1..=ctx.size() {
            for k in 1..=ctx.size() {
                out.add_entry((i, i, k, k), Element::one(ctx));
            }
        }
        out
    }

    /// The graded permutation `P = Σ_{i,j} e_{ij} ⊗ e_{ji} (−1)^{j̄}`, an
    /// involution: `P · P = 1`.
    pub fn permutation(ctx: AlgebraContext) -> Self {
        let mut out = Self::zero(ctx);
        for i in 1..=ctx.size() {
            for j in 1..=ctx.size() {
                let sign = if ctx.parity(j) == 1 { -1 } else { 1 };
                out.add_entry((i, j, j, i), Element::from_int(ctx, sign));
            }
        }
        out
    }

    /// Embeds a one-leg matrix of elements into the chosen leg with the
    /// identity on the other, applying the graded prefactor of the generator
    /// matrices: the `(i, j)` entry enters as `(−1)^{ī j̄ + j̄} e_{ij} ⊗ m_{ij}`.
    pub fn embed(m: &CoeffMatrix, leg: Leg) -> Self {
        let ctx = *m.context();
        let size = ctx.size();
        let mut out = Self::zero(ctx);
        for i in 1..=size {
            for j in 1..=size {
                let entry = m.get(i as usize, j as usize);
                if entry.is_zero() {
                    continue;
                }
                let exponent = (ctx.parity(i) & ctx.parity(j)) ^ ctx.parity(j);
                let signed = if exponent == 1 {
                    entry.scale_int(-1)
                } else {
                    entry.clone()
                };
                for k in 1..=size {
                    let key = match leg {
                        Leg::First => (i, j, k, k),
                        Leg::Second => (k, k, i, j),
                    };
                    out.add_entry(key, signed.clone());
                }
            }
        }
        out
    }

    pub fn context(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of `e_{ij} ⊗ e_{kl}` (zero if absent).
    pub fn entry(&self, i: u32, j: u32, k: u32, l: u32) -> Element {
        self.terms
            .get(&(i, j, k, l))
            .cloned()
            .unwrap_or_else(|| Element::zero(self.ctx))
    }

    /// Iterates the nonzero entries as `((i, j, k, l), coefficient)`.
    pub fn entries(&self) -> impl Iterator<Item = (&(u32, u32, u32, u32), &Element)> {
        self.terms.iter()
    }

    fn add_entry(&mut self, key: (u32, u32, u32, u32), value: Element) {
        if value.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(slot) => {
                slot.insert(value);
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get().try_add(&value).expect("same context");
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    fn ensure_same_context(&self, other: &Self) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                left: self.ctx,
                right: other.ctx,
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ensure_same_context(other)?;
        let mut out = self.clone();
        for (key, value) in &other.terms {
            out.add_entry(*key, value.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.ensure_same_context(other)?;
        let mut out = self.clone();
        for (key, value) in &other.terms {
            out.add_entry(*key, value.scale_int(-1));
        }
        Ok(out)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let mut out = Self::zero(self.ctx);
        for (key, value) in &self.terms {
            out.add_entry(*key, value.scale_int(k));
        }
        out
    }

    /// Multiplies every coefficient by `h^k`.
    pub fn mul_h(&self, k: u32) -> Self {
        let mut out = Self::zero(self.ctx);
        for (key, value) in &self.terms {
            out.add_entry(*key, value.mul_h(k));
        }
        out
    }

    /// Koszul-signed product. For each pair of terms with `j = p`, `l = r`:
    ///
    /// `(e_{ij} ⊗ e_{kl} ⊗ x)(e_{pq} ⊗ e_{rs} ⊗ y)
    ///    = (−1)^{(k̄+l̄)(p̄+q̄) + |x|(p̄+q̄+r̄+s̄)} e_{iq} ⊗ e_{ks} ⊗ xy`,
    ///
    /// applied per monomial of `x` so that inhomogeneous coefficients are
    /// handled bilinearly.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.ensure_same_context(other)?;
        let ctx = self.ctx;
        let mut out = Self::zero(ctx);
        for ((i, j, k, l), x) in &self.terms {
            let left_leg2_parity = ctx.parity(*k) ^ ctx.parity(*l);
            for ((p, q, r, s), y) in &other.terms {
                if j != p || l != r {
                    continue;
                }
                let right_leg1_parity = ctx.parity(*p) ^ ctx.parity(*q);
                let right_total_parity = right_leg1_parity ^ ctx.parity(*r) ^ ctx.parity(*s);
                let mut product = Element::zero(ctx);
                for term in x.terms() {
                    let px = word_parity(&ctx, term.word);
                    let exponent =
                        (left_leg2_parity & right_leg1_parity) ^ (px & right_total_parity);
                    let monomial = Element::from_term(
                        ctx,
                        term.hpow,
                        term.word.into(),
                        if exponent == 1 {
                            -term.coeff.clone()
                        } else {
                            term.coeff.clone()
                        },
                    );
                    product = product.try_add(&monomial.try_mul(y)?)?;
                }
                out.add_entry((*i, *q, *k, *s), product);
            }
        }
        Ok(out)
    }

    /// Applies a fallible transform to every coefficient (dropping zeros).
    pub fn map(&self, f: impl Fn(&Element) -> Result<Element>) -> Result<Self> {
        let mut out = Self::zero(self.ctx);
        for (key, value) in &self.terms {
            out.add_entry(*key, f(value)?);
        }
        Ok(out)
    }
}

impl fmt::Debug for TwoLegOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TwoLegOperator {}", self.ctx)?;
        for ((i, j, k, l), coeff) in &self.terms {
            writeln!(f, "  e[{i},{j}]⊗e[{k},{l}]: {coeff}")?;
        }
        Ok(())
    }
}
