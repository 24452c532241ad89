//! Truncated one-variable formal series over an exact coefficient ring.
//!
//! A series keeps the coefficients of `u^0, u^{∓1}, …, u^{∓N}` (direction
//! down or up) and is exact modulo the ideal generated by `u^{∓(N+1)}` and
//! `h^{H+1}`. Coefficients are any type implementing [`Coefficient`]; the
//! engine uses free-superalgebra [`Element`]s and, for commutative
//! certificates, polynomial rings over declared symbols.

use std::fmt;

use crate::element::Element;
use crate::error::{Error, Result};

/// Variable direction of a truncated series.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Direction {
    /// Powers `u^0, u^{-1}, …, u^{-N}`.
    Down,
    /// Powers `u^0, u^{1}, …, u^{N}`.
    Up,
}

impl Direction {
    pub fn label(&self) -> &'static str {
        match self {
            Direction::Down => "down",
            Direction::Up => "up",
        }
    }

    /// Parses "down" or "up".
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "down" => Some(Direction::Down),
            "up" => Some(Direction::Up),
            _ => None,
        }
    }
}

/// Ring operations a series coefficient type must provide.
///
/// `zero_like`/`one_like` exist because coefficient values carry their own
/// context (truncation orders, symbol tables), so constants must be built
/// from an exemplar rather than from thin air.
pub trait Coefficient: Clone + PartialEq + Sized {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Result<Self>;
    fn sub(&self, other: &Self) -> Result<Self>;
    fn mul(&self, other: &Self) -> Result<Self>;
    fn scale_int(&self, k: i64) -> Self;
    /// Multiplication by `h^k`, truncating at the coefficient's h-order.
    fn mul_h(&self, k: u32) -> Self;
    /// The h-truncation order `H` this coefficient lives under.
    fn h_cutoff(&self) -> u32;
}

impl Coefficient for Element {
    fn zero_like(&self) -> Self {
        Element::zero(*self.context())
    }

    fn one_like(&self) -> Self {
        Element::one(*self.context())
    }

    fn is_zero(&self) -> bool {
        Element::is_zero(self)
    }

    fn add(&self, other: &Self) -> Result<Self> {
        self.try_add(other)
    }

    fn sub(&self, other: &Self) -> Result<Self> {
        self.try_sub(other)
    }

    fn mul(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)
    }

    fn scale_int(&self, k: i64) -> Self {
        Element::scale_int(self, k)
    }

    fn mul_h(&self, k: u32) -> Self {
        Element::mul_h(self, k)
    }

    fn h_cutoff(&self) -> u32 {
        self.context().h_order()
    }
}

/// A truncated formal series `Σ_{k=0}^{N} c_k u^{∓k}`.
#[derive(Clone, PartialEq)]
pub struct TruncSeries<C = Element> {
    direction: Direction,
    coeffs: Vec<C>,
}

impl<C: Coefficient> TruncSeries<C> {
    /// Builds a series from explicit coefficients `c_0, …, c_N`.
    pub fn from_coeffs(direction: Direction, coeffs: Vec<C>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::SizeMismatch { left: 0, right: 1 });
        }
        Ok(Self { direction, coeffs })
    }

    /// The series whose only term is `value · u^0`.
    pub fn constant(direction: Direction, order: usize, value: C) -> Self {
        let zero = value.zero_like();
        let mut coeffs = vec![zero; order + 1];
        coeffs[0] = value;
        Self { direction, coeffs }
    }

    /// The series `value · u^{∓k}`.
    pub fn monomial(direction: Direction, order: usize, k: usize, value: C) -> Result<Self> {
        if k > order {
            return Err(Error::SizeMismatch {
                left: k,
                right: order,
            });
        }
        let zero = value.zero_like();
        let mut coeffs = vec![zero; order + 1];
        coeffs[k] = value;
        Ok(Self { direction, coeffs })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Truncation order `N`: coefficients of `u^0 .. u^{∓N}` are stored.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `u^{∓k}`.
    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coefficient::is_zero)
    }

    /// True when the series equals the constant 1.
    pub fn is_one(&self) -> bool {
        self.coeffs[0] == self.coeffs[0].one_like()
            && self.coeffs[1..].iter().all(Coefficient::is_zero)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.direction != other.direction {
            return Err(Error::DirectionMismatch);
        }
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::SizeMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(Self {
            direction: self.direction,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(Self {
            direction: self.direction,
            coeffs,
        })
    }

    /// Cauchy product, truncated at the common order. Coefficients multiply
    /// in the written order (left factors first): the coefficient ring may be
    /// noncommutative.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let zero = self.coeffs[0].zero_like();
        let mut coeffs = vec![zero; self.coeffs.len()];
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                if a + b > self.order() {
                    break;
                }
                if cb.is_zero() {
                    continue;
                }
                coeffs[a + b] = coeffs[a + b].add(&ca.mul(cb)?)?;
            }
        }
        Ok(Self {
            direction: self.direction,
            coeffs,
        })
    }

    pub fn scale_int(&self, k: i64) -> Self {
        Self {
            direction: self.direction,
            coeffs: self.coeffs.iter().map(|c| c.scale_int(k)).collect(),
        }
    }

    /// Multiplies every coefficient by `h^k`.
    pub fn mul_h(&self, k: u32) -> Self {
        Self {
            direction: self.direction,
            coeffs: self.coeffs.iter().map(|c| c.mul_h(k)).collect(),
        }
    }

    /// Multiplies by a coefficient constant on the left.
    pub fn scale_coeff_left(&self, value: &C) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| value.mul(c))
            .collect::<Result<_>>()?;
        Ok(Self {
            direction: self.direction,
            coeffs,
        })
    }

    /// Drops coefficients above `order`.
    pub fn truncated(&self, order: usize) -> Self {
        let end = (order + 1).min(self.coeffs.len());
        Self {
            direction: self.direction,
            coeffs: self.coeffs[..end].to_vec(),
        }
    }

    /// Applies a function to every coefficient.
    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> Result<D>) -> Result<TruncSeries<D>> {
        let coeffs = self.coeffs.iter().map(f).collect::<Result<_>>()?;
        Ok(TruncSeries {
            direction: self.direction,
            coeffs,
        })
    }

    /// The substitution `u ↦ u + c·h`, expanded binomially and truncated in
    /// both `u` and `h`:
    ///
    /// * down: `u^{-r} ↦ Σ_t (-1)^t C(r+t-1, t) c^t h^t u^{-r-t}`;
    /// * up:   `u^{r}  ↦ Σ_{t≤r} C(r, t) c^t h^t u^{r-t}`.
    pub fn shift(&self, c: i64) -> Self {
        if c == 0 {
            return self.clone();
        }
        let zero = self.coeffs[0].zero_like();
        let hmax = self.coeffs[0].h_cutoff() as usize;
        let order = self.order();
        let mut coeffs = vec![zero; order + 1];
        for (r, cr) in self.coeffs.iter().enumerate() {
            if cr.is_zero() {
                continue;
            }
            match self.direction {
                Direction::Down => {
                    // (u + ch)^{-r} = Σ_t (-1)^t C(r+t-1, t) c^t h^t u^{-r-t};
                    // r = 0 is untouched.
                    coeffs[r] = coeffs[r].add(cr).expect("same context");
                    let tmax = if r == 0 { 0 } else { (order - r).min(hmax) };
                    for t in 1..=tmax {
                        let binom = binomial(r + t - 1, t) * pow_i64(c, t);
                        let sign = if t % 2 == 0 { 1 } else { -1 };
                        let term = cr.mul_h(t as u32).scale_int(sign * binom);
                        coeffs[r + t] = coeffs[r + t].add(&term).expect("same context");
                    }
                }
                Direction::Up => {
                    for t in 0..=r.min(hmax) {
                        let binom = binomial(r, t) * pow_i64(c, t);
                        let term = cr.mul_h(t as u32).scale_int(binom);
                        coeffs[r - t] = coeffs[r - t].add(&term).expect("same context");
                    }
                }
            }
        }
        Self {
            direction: self.direction,
            coeffs,
        }
    }

    /// Multiplicative inverse, when the constant coefficient is `1 + O(h)`.
    ///
    /// Writes `s = c_0 (1 + X)` with `X` free of `u^0`, inverts `c_0` by the
    /// geometric sum in `1 − c_0` (finite because of h-truncation) and `1 + X`
    /// by the geometric sum in `−X` (finite because of u-truncation).
    pub fn invert(&self) -> Result<Self> {
        let one = self.coeffs[0].one_like();
        let kappa = one.sub(&self.coeffs[0])?;
        let hmax = self.coeffs[0].h_cutoff();
        let mut c0_inv = one.clone();
        let mut power = kappa.clone();
        let mut steps = 0u32;
        while !power.is_zero() {
            steps += 1;
            if steps > hmax {
                return Err(Error::NotInvertible {
                    reason: "constant series coefficient is not 1 + O(h)".into(),
                });
            }
            c0_inv = c0_inv.add(&power)?;
            power = power.mul(&kappa)?;
        }
        let mut x = self.clone();
        x.coeffs[0] = self.coeffs[0].zero_like();
        for k in 1..=self.order() {
            x.coeffs[k] = c0_inv.mul(&self.coeffs[k])?;
        }
        let mut geom = Self::constant(self.direction, self.order(), one);
        let neg_x = x.scale_int(-1);
        let mut acc = Self::constant(self.direction, self.order(), self.coeffs[0].one_like());
        for _ in 1..=self.order() {
            acc = acc.mul(&neg_x)?;
            if acc.is_zero() {
                break;
            }
            geom = geom.add(&acc)?;
        }
        // s^{-1} = (1 + X)^{-1} c_0^{-1}
        let mut result = geom;
        for coeff in result.coeffs.iter_mut() {
            *coeff = coeff.mul(&c0_inv)?;
        }
        Ok(result)
    }
}

impl fmt::Display for TruncSeries<Element> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dir={}; N={}", self.direction.label(), self.order())?;
        for (k, coeff) in self.coeffs.iter().enumerate() {
            write!(f, "; c{k}={coeff}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TruncSeries<Element> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl TruncSeries<Element> {
    /// Parses the text format produced by [`fmt::Display`]:
    /// `dir=down; N=3; c0=<Element>; …; c3=<Element>`.
    pub fn parse(ctx: crate::context::AlgebraContext, text: &str) -> Result<Self> {
        // Split on ';' at bracket depth zero only: the element grammar itself
        // uses ';' inside "t[…]".
        let mut segments: Vec<(usize, &str)> = Vec::new();
        let mut depth = 0usize;
        let mut start = 0usize;
        for (pos, byte) in text.bytes().enumerate() {
            match byte {
                b'[' => depth += 1,
                b']' => depth = depth.saturating_sub(1),
                b';' if depth == 0 => {
                    segments.push((start, &text[start..pos]));
                    start = pos + 1;
                }
                _ => {}
            }
        }
        segments.push((start, &text[start..]));

        let mut direction = None;
        let mut order = None;
        let mut coeffs: Vec<Option<Element>> = Vec::new();
        for (seg_start, segment) in segments {
            let trimmed = segment.trim();
            if trimmed.is_empty() {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or(Error::Parse {
                pos: seg_start,
                msg: "expected key=value".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            if key == "dir" {
                direction = Some(Direction::parse(value).ok_or(Error::Parse {
                    pos: seg_start,
                    msg: "direction must be 'down' or 'up'".into(),
                })?);
            } else if key == "N" {
                let n: usize = value.parse().map_err(|_| Error::Parse {
                    pos: seg_start,
                    msg: "invalid series order".into(),
                })?;
                order = Some(n);
                coeffs.resize(n + 1, None);
            } else if let Some(index) = key.strip_prefix('c') {
                let k: usize = index.parse().map_err(|_| Error::Parse {
                    pos: seg_start,
                    msg: "invalid coefficient index".into(),
                })?;
                if k >= coeffs.len() {
                    return Err(Error::Parse {
                        pos: seg_start,
                        msg: format!("coefficient index {k} exceeds declared order"),
                    });
                }
                coeffs[k] = Some(Element::parse(ctx, value)?);
            } else {
                return Err(Error::Parse {
                    pos: seg_start,
                    msg: format!("unknown key '{key}'"),
                });
            }
        }
        let direction = direction.ok_or(Error::Parse {
            pos: 0,
            msg: "missing 'dir'".into(),
        })?;
        let order = order.ok_or(Error::Parse {
            pos: 0,
            msg: "missing 'N'".into(),
        })?;
        let coeffs: Vec<Element> = coeffs
            .into_iter()
            .map(|c| c.unwrap_or_else(|| Element::zero(ctx)))
            .collect();
        debug_assert_eq!(coeffs.len(), order + 1);
        Self::from_coeffs(direction, coeffs)
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    let mut result = 1i64;
    for i in 0..k {
        result = result * (n - i) as i64 / (i + 1) as i64;
    }
    result
}

pub(crate) fn pow_i64(base: i64, exp: usize) -> i64 {
    let mut result = 1i64;
    for _ in 0..exp {
        result *= base;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::AlgebraContext;
    use crate::element::Sign;

    fn ctx() -> AlgebraContext {
        AlgebraContext::new(1, 1, 3, 3).unwrap()
    }

    /// The descending generator series for one matrix entry:
    /// `δ_{ij} + h Σ_r t[-r;i,j] u^{-r}`.
    fn gen_series(c: AlgebraContext, i: u32, j: u32) -> TruncSeries<Element> {
        let mut coeffs = vec![if i == j {
            Element::one(c)
        } else {
            Element::zero(c)
        }];
        for r in 1..=c.series_order() {
            coeffs.push(
                Element::generator(c, Sign::Minus, r, i, j)
                    .unwrap()
                    .mul_h(1),
            );
        }
        TruncSeries::from_coeffs(Direction::Down, coeffs).unwrap()
    }

    #[test]
    fn unit_series_is_neutral() {
        let c = ctx();
        let s = gen_series(c, 1, 2);
        let one = TruncSeries::constant(Direction::Down, s.order(), Element::one(c));
        assert_eq!(s.mul(&one).unwrap(), s);
        assert_eq!(one.mul(&s).unwrap(), s);
    }

    #[test]
    fn cauchy_product_collects_all_splits() {
        let c = ctx();
        let s = gen_series(c, 1, 1);
        let t = gen_series(c, 2, 2);
        let product = s.mul(&t).unwrap();
        let n = c.series_order() as usize;
        let mut expected = Element::zero(c);
        for a in 0..=n {
            expected = expected + s.coeff(a) * t.coeff(n - a);
        }
        assert_eq!(product.coeff(n), &expected);
    }

    #[test]
    fn truncation_coherence() {
        let c = ctx();
        let s = gen_series(c, 1, 2);
        let t = gen_series(c, 2, 1);
        let full = s.mul(&t).unwrap().truncated(2);
        let trimmed = s.truncated(2).mul(&t.truncated(2)).unwrap();
        assert_eq!(full, trimmed);
    }

    #[test]
    fn direction_mismatch_rejected() {
        let c = ctx();
        let down = gen_series(c, 1, 1);
        let up = TruncSeries::constant(Direction::Up, down.order(), Element::one(c));
        assert_eq!(down.mul(&up), Err(Error::DirectionMismatch));
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let s = gen_series(ctx(), 1, 2);
        assert_eq!(s.shift(0), s);
    }

    #[test]
    fn shift_expands_binomially() {
        let c = ctx();
        // u^{-1} ↦ u^{-1} − c h u^{-2} + c² h² u^{-3} − …
        let s = TruncSeries::monomial(
            Direction::Down,
            c.series_order() as usize,
            1,
            Element::one(c),
        )
        .unwrap();
        let shifted = s.shift(2);
        assert_eq!(shifted.coeff(0), &Element::zero(c));
        assert_eq!(shifted.coeff(1), &Element::one(c));
        assert_eq!(shifted.coeff(2), &Element::one(c).mul_h(1).scale_int(-2));
        assert_eq!(shifted.coeff(3), &Element::one(c).mul_h(2).scale_int(4));
    }

    #[test]
    fn shift_round_trips() {
        for direction in [Direction::Down, Direction::Up] {
            let c = ctx();
            let mut coeffs = vec![Element::one(c)];
            for r in 1..=c.series_order() {
                coeffs.push(
                    Element::generator(c, Sign::Plus, r, 1, 2)
                        .unwrap()
                        .mul_h(1)
                        .scale_int(r as i64),
                );
            }
            let s = TruncSeries::from_coeffs(direction, coeffs).unwrap();
            assert_eq!(s.shift(3).shift(-3), s, "{direction:?}");
        }
    }

    #[test]
    fn shift_is_multiplicative() {
        let c = ctx();
        let s = gen_series(c, 1, 2);
        let t = gen_series(c, 2, 2);
        let lhs = s.mul(&t).unwrap().shift(-1);
        let rhs = s.shift(-1).mul(&t.shift(-1)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_of_generator_series() {
        let c = ctx();
        for (i, j) in [(1, 1), (2, 2)] {
            let s = gen_series(c, i, j);
            let inv = s.invert().unwrap();
            let one = TruncSeries::constant(Direction::Down, s.order(), Element::one(c));
            assert_eq!(s.mul(&inv).unwrap(), one);
            assert_eq!(inv.mul(&s).unwrap(), one);
        }
    }

    #[test]
    fn inverse_requires_unit_constant_term() {
        let c = ctx();
        let s = gen_series(c, 1, 1).scale_int(2);
        assert!(matches!(s.invert(), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn display_and_parse_round_trip() {
        let c = ctx();
        let s = gen_series(c, 1, 2);
        let text = s.to_string();
        assert!(text.starts_with("dir=down; N=3; c0="));
        let parsed = TruncSeries::parse(c, &text).unwrap();
        assert_eq!(parsed, s);
    }
}
