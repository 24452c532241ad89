//! Square matrices of truncated series over the free superalgebra, with
//! Neumann inversion and quasideterminants.
//!
//! Matrices here follow one uniform convention: the graded prefactor
//! `(-1)^{ī j̄ + j̄}` in the definition of the generator matrices is absorbed,
//! so that the operator product corresponds to the *plain* noncommutative
//! matrix product of entries. This works because every matrix in scope has
//! entries of parity `ī + j̄` at position `(i, j)`, and under that parity
//! pattern all Koszul signs cancel telescopically. The two-leg tensor
//! operators in [`crate::twoleg`] carry the signs explicitly instead, and the
//! relation oracle pins the two conventions against each other.

use std::fmt;

use crate::context::AlgebraContext;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::series::{Direction, TruncSeries};

/// A square matrix of truncated series, all of one direction, with 1-based
/// indices `1..=m+n`.
#[derive(Clone, PartialEq)]
pub struct SuperMatrix {
    ctx: AlgebraContext,
    direction: Direction,
    size: usize,
    entries: Vec<TruncSeries<Element>>,
}

impl SuperMatrix {
    /// The identity matrix at the context's size and series order.
    pub fn identity(ctx: AlgebraContext, direction: Direction) -> Self {
        Self::identity_sized(
            ctx,
            direction,
            ctx.size() as usize,
            ctx.series_order() as usize,
        )
    }

    fn identity_sized(
        ctx: AlgebraContext,
        direction: Direction,
        size: usize,
        order: usize,
    ) -> Self {
        let entries = (0..size * size)
            .map(|idx| {
                let value = if idx / size == idx % size {
                    Element::one(ctx)
                } else {
                    Element::zero(ctx)
                };
                TruncSeries::constant(direction, order, value)
            })
            .collect();
        Self {
            ctx,
            direction,
            size,
            entries,
        }
    }

    /// The identity matrix matching this matrix's size and order.
    pub fn identity_like(&self) -> Self {
        Self::identity_sized(self.ctx, self.direction, self.size, self.order())
    }

    /// Series order shared by all entries.
    pub fn order(&self) -> usize {
        self.entries[0].order()
    }

    /// Builds a matrix entry by entry from a fallible function of the
    /// 1-based `(row, col)` position.
    pub fn from_fn(
        ctx: AlgebraContext,
        direction: Direction,
        f: impl Fn(u32, u32) -> Result<TruncSeries<Element>>,
    ) -> Result<Self> {
        let size = ctx.size() as usize;
        let order = ctx.series_order() as usize;
        let mut entries = Vec::with_capacity(size * size);
        for i in 1..=size as u32 {
            for j in 1..=size as u32 {
                let entry = f(i, j)?;
                if entry.direction() != direction {
                    return Err(Error::DirectionMismatch);
                }
                if entry.order() != order {
                    return Err(Error::SizeMismatch {
                        left: entry.order(),
                        right: order,
                    });
                }
                entries.push(entry);
            }
        }
        Ok(Self {
            ctx,
            direction,
            size,
            entries,
        })
    }

    pub fn context(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry at 1-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> &TruncSeries<Element> {
        debug_assert!(row >= 1 && row <= self.size && col >= 1 && col <= self.size);
        &self.entries[(row - 1) * self.size + (col - 1)]
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.direction != other.direction {
            return Err(Error::DirectionMismatch);
        }
        if self.size != other.size {
            return Err(Error::SizeMismatch {
                left: self.size,
                right: other.size,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(Self {
            entries,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(Self {
            entries,
            ..self.clone()
        })
    }

    /// Plain noncommutative matrix product (see the module notes on why no
    /// Koszul signs appear here).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut entries = Vec::with_capacity(self.size * self.size);
        for i in 1..=self.size {
            for j in 1..=self.size {
                let mut acc =
                    TruncSeries::constant(self.direction, self.order(), Element::zero(self.ctx));
                for k in 1..=self.size {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Ok(Self {
            entries,
            ..self.clone()
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(TruncSeries::is_zero)
    }

    /// True when the matrix is the identity.
    pub fn is_identity(&self) -> bool {
        self == &self.identity_like()
    }

    /// Neumann inverse: requires `M = 1 − K` with every monomial of every
    /// entry of `K` carrying at least one power of h; then
    /// `M^{-1} = Σ_{t≥0} K^t`, a finite sum under h-truncation.
    pub fn inverse(&self) -> Result<Self> {
        let identity = self.identity_like();
        let k = identity.sub(self)?;
        for entry in &k.entries {
            for coeff in entry.coeffs() {
                if coeff.h_valuation() == Some(0) {
                    return Err(Error::NotInvertible {
                        reason: "matrix is not of the form 1 + O(h)".into(),
                    });
                }
            }
        }
        let mut result = identity;
        let mut power = k.clone();
        while !power.is_zero() {
            result = result.add(&power)?;
            power = power.mul(&k)?;
        }
        Ok(result)
    }

    /// The square submatrix picking the given original 1-based rows and
    /// columns, in the order given.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.len() != cols.len() || rows.is_empty() {
            return Err(Error::SizeMismatch {
                left: rows.len(),
                right: cols.len(),
            });
        }
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                if r < 1 || r > self.size {
                    return Err(Error::IndexOutOfRange {
                        index: r,
                        size: self.size,
                    });
                }
                if c < 1 || c > self.size {
                    return Err(Error::IndexOutOfRange {
                        index: c,
                        size: self.size,
                    });
                }
                entries.push(self.get(r, c).clone());
            }
        }
        Ok(Self {
            ctx: self.ctx,
            direction: self.direction,
            size: rows.len(),
            entries,
        })
    }

    /// Extracts the `k`-th series coefficient of every entry as a plain
    /// element matrix.
    pub fn coeff_matrix(&self, k: usize) -> CoeffMatrix {
        let entries = self
            .entries
            .iter()
            .map(|series| series.coeff(k).clone())
            .collect();
        CoeffMatrix {
            ctx: self.ctx,
            size: self.size,
            entries,
        }
    }
}

impl fmt::Debug for SuperMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SuperMatrix {} dir={}", self.ctx, self.direction.label())?;
        for i in 1..=self.size {
            for j in 1..=self.size {
                writeln!(f, "  ({i},{j}): {}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CoeffMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CoeffMatrix {}", self.ctx)?;
        for i in 1..=self.size {
            for j in 1..=self.size {
                writeln!(f, "  ({i},{j}): {}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

/// The quasideterminant of `a` at the 1-based position `(row, col)`:
///
/// `|a|_{row,col} = a_{row,col} − r (A')^{-1} c`,
///
/// where `A'` deletes the row and column, `r` is the deleted row without the
/// `col` entry, and `c` the deleted column without the `row` entry. The
/// noncommutative factor order is exactly as written.
pub fn quasidet(a: &SuperMatrix, row: usize, col: usize) -> Result<TruncSeries<Element>> {
    let size = a.size();
    for index in [row, col] {
        if index < 1 || index > size {
            return Err(Error::IndexOutOfRange { index, size });
        }
    }
    if size == 1 {
        return Ok(a.get(1, 1).clone());
    }
    let rows: Vec<usize> = (1..=size).filter(|&r| r != row).collect();
    let cols: Vec<usize> = (1..=size).filter(|&c| c != col).collect();
    let minor_inv = a.submatrix(&rows, &cols)?.inverse()?;
    // The inverse of the deleted minor is indexed with rows by the deleted
    // matrix's columns and columns by its rows.
    let mut result = a.get(row, col).clone();
    for (ci, &c) in cols.iter().enumerate() {
        for (ri, &r) in rows.iter().enumerate() {
            let product = a
                .get(row, c)
                .mul(minor_inv.get(ci + 1, ri + 1))?
                .mul(a.get(r, col))?;
            result = result.sub(&product)?;
        }
    }
    Ok(result)
}

/// A plain square matrix of elements (one series-coefficient slice), with
/// 1-based indices.
#[derive(Clone, PartialEq)]
pub struct CoeffMatrix {
    ctx: AlgebraContext,
    size: usize,
    entries: Vec<Element>,
}

impl CoeffMatrix {
    pub fn zero(ctx: AlgebraContext) -> Self {
        let size = ctx.size() as usize;
        Self {
            ctx,
            size,
            entries: vec![Element::zero(ctx); size * size],
        }
    }

    pub fn identity(ctx: AlgebraContext) -> Self {
        let mut out = Self::zero(ctx);
        for i in 1..=out.size {
            *out.get_mut(i, i) = Element::one(ctx);
        }
        out
    }

    pub fn from_fn(ctx: AlgebraContext, f: impl Fn(u32, u32) -> Result<Element>) -> Result<Self> {
        let size = ctx.size() as usize;
        let mut entries = Vec::with_capacity(size * size);
        for i in 1..=size as u32 {
            for j in 1..=size as u32 {
                entries.push(f(i, j)?);
            }
        }
        Ok(Self { ctx, size, entries })
    }

    pub fn context(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> &Element {
        debug_assert!(row >= 1 && row <= self.size && col >= 1 && col <= self.size);
        &self.entries[(row - 1) * self.size + (col - 1)]
    }

    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut Element {
        debug_assert!(row >= 1 && row <= self.size && col >= 1 && col <= self.size);
        &mut self.entries[(row - 1) * self.size + (col - 1)]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Element::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Sign;

    fn ctx() -> AlgebraContext {
        AlgebraContext::new(1, 1, 2, 2).unwrap()
    }

    /// The descending generator matrix `T = (δ_{ij} + h Σ_r t[-r;i,j] u^{-r})`.
    fn gen_matrix(c: AlgebraContext) -> SuperMatrix {
        SuperMatrix::from_fn(c, Direction::Down, |i, j| {
            let mut coeffs = vec![if i == j {
                Element::one(c)
            } else {
                Element::zero(c)
            }];
            for r in 1..=c.series_order() {
                coeffs.push(Element::generator(c, Sign::Minus, r, i, j)?.mul_h(1));
            }
            TruncSeries::from_coeffs(Direction::Down, coeffs)
        })
        .unwrap()
    }

    /// The ascending generator matrix
    /// `T = (δ_{ij} − h Σ_r t[+r;i,j] u^{r-1})`.
    fn gen_matrix_up(c: AlgebraContext) -> SuperMatrix {
        SuperMatrix::from_fn(c, Direction::Up, |i, j| {
            let mut coeffs = Vec::new();
            for r in 1..=c.series_order() + 1 {
                let mut coeff = Element::generator(c, Sign::Plus, r, i, j)?
                    .mul_h(1)
                    .scale_int(-1);
                if r == 1 && i == j {
                    coeff = coeff + Element::one(c);
                }
                coeffs.push(coeff);
            }
            TruncSeries::from_coeffs(Direction::Up, coeffs)
        })
        .unwrap()
    }

    #[test]
    fn identity_inverts_to_itself() {
        let id = SuperMatrix::identity(ctx(), Direction::Down);
        assert_eq!(id.inverse().unwrap(), id);
    }

    #[test]
    fn generator_matrix_inverts_both_ways() {
        for m in [gen_matrix(ctx()), gen_matrix_up(ctx())] {
            let inv = m.inverse().unwrap();
            let id = SuperMatrix::identity(*m.context(), m.direction());
            assert_eq!(m.mul(&inv).unwrap(), id);
            assert_eq!(inv.mul(&m).unwrap(), id);
        }
    }

    #[test]
    fn scalar_geometric_inverse_matches_series() {
        // For a 1×1 matrix the Neumann sum is the scalar geometric series.
        let c = AlgebraContext::new(1, 0, 3, 3).unwrap();
        let m = gen_matrix(c);
        let inv = m.inverse().unwrap();
        let k = SuperMatrix::identity(c, Direction::Down).sub(&m).unwrap();
        let k1 = k.get(1, 1);
        let mut expected =
            TruncSeries::constant(Direction::Down, c.series_order() as usize, Element::one(c));
        let mut power = k1.clone();
        while !power.is_zero() {
            expected = expected.add(&power).unwrap();
            power = power.mul(k1).unwrap();
        }
        assert_eq!(inv.get(1, 1), &expected);
    }

    #[test]
    fn inverse_requires_one_plus_h() {
        let c = ctx();
        let m = SuperMatrix::from_fn(c, Direction::Down, |i, j| {
            Ok(TruncSeries::constant(
                Direction::Down,
                c.series_order() as usize,
                if i == j {
                    Element::from_int(c, 2)
                } else {
                    Element::zero(c)
                },
            ))
        })
        .unwrap();
        assert!(matches!(m.inverse(), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn quasidet_of_1x1_is_the_entry() {
        let c = AlgebraContext::new(1, 0, 2, 2).unwrap();
        let m = gen_matrix(c);
        assert_eq!(quasidet(&m, 1, 1).unwrap(), *m.get(1, 1));
    }

    #[test]
    fn quasidet_matches_numeric_example() {
        // [[1, 2], [3, 4]] at (2,2): the deleted minor is [[1]], so the
        // quasideterminant is 4 − 3·1·2 = −2 (the det/minor ratio).
        let c = AlgebraContext::new(2, 0, 0, 3).unwrap();
        let values = [[1i64, 2], [3, 4]];
        let m = SuperMatrix::from_fn(c, Direction::Down, |i, j| {
            Ok(TruncSeries::constant(
                Direction::Down,
                0,
                Element::from_int(c, values[(i - 1) as usize][(j - 1) as usize]),
            ))
        })
        .unwrap();
        let q = quasidet(&m, 2, 2).unwrap();
        assert_eq!(q.coeff(0), &Element::from_int(c, -2));
    }

    #[test]
    fn quasidet_at_top_corner_is_leading_entry() {
        let c = ctx();
        let m = gen_matrix(c);
        // The (1,1) quasideterminant of the full matrix subtracts the
        // Schur-type correction; for the 1×1 leading submatrix it is just the
        // entry itself.
        let sub = m.submatrix(&[1], &[1]).unwrap();
        assert_eq!(quasidet(&sub, 1, 1).unwrap(), *m.get(1, 1));
    }

    #[test]
    fn coeff_matrix_slices() {
        let c = ctx();
        let m = gen_matrix(c);
        let slice0 = m.coeff_matrix(0);
        assert_eq!(slice0.get(1, 1), &Element::one(c));
        assert_eq!(slice0.get(1, 2), &Element::zero(c));
        let slice1 = m.coeff_matrix(1);
        assert_eq!(
            slice1.get(1, 2),
            &Element::generator(c, Sign::Minus, 1, 1, 2)
                .unwrap()
                .mul_h(1)
        );
    }

    #[test]
    fn quasidet_matches_determinant_ratio_on_commuting_entries() {
        // On matrices 1 + h·C with numeric C, the (s,s) quasideterminant must
        // equal det(A) / det(A without row s, col s), both expanded as exact
        // power series in h. The determinant oracle is cofactor expansion
        // over the commutative subring of scalar elements.
        let c = AlgebraContext::new(3, 0, 0, 4).unwrap();
        let values = [[2i64, 7, 1], [5, 3, 8], [9, 4, 6]];
        let m = SuperMatrix::from_fn(c, Direction::Down, |i, j| {
            let base = if i == j { 1 } else { 0 };
            let value = Element::from_int(c, base)
                + Element::one(c)
                    .mul_h(1)
                    .scale_int(values[(i - 1) as usize][(j - 1) as usize]);
            Ok(TruncSeries::constant(Direction::Down, 0, value))
        })
        .unwrap();

        fn det(c: AlgebraContext, entries: &[Vec<Element>]) -> Element {
            let n = entries.len();
            if n == 1 {
                return entries[0][0].clone();
            }
            let mut acc = Element::zero(c);
            for (col, cell) in entries[0].iter().enumerate() {
                let minor: Vec<Vec<Element>> = entries[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != col)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let sign = if col % 2 == 0 { 1 } else { -1 };
                acc = acc + (cell * det(c, &minor)).scale_int(sign);
            }
            acc
        }

        let full: Vec<Vec<Element>> = (1..=3)
            .map(|i| (1..=3).map(|j| m.get(i, j).coeff(0).clone()).collect())
            .collect();
        let minor: Vec<Vec<Element>> = (1..=2)
            .map(|i| (1..=2).map(|j| m.get(i, j).coeff(0).clone()).collect())
            .collect();
        let det_full = det(c, &full);
        let det_minor = det(c, &minor);

        // Invert det_minor = 1 + O(h) by the geometric sum.
        let kappa = Element::one(c) - &det_minor;
        let mut inv = Element::one(c);
        let mut power = kappa.clone();
        while !power.is_zero() {
            inv = inv + &power;
            power = power * &kappa;
        }
        let expected = det_full * inv;
        let q = quasidet(&m, 3, 3).unwrap();
        assert_eq!(q.coeff(0), &expected);
    }
}
