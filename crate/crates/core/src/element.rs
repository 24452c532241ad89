//! Exact arithmetic in the free associative superalgebra over ℚ generated by
//! the symbols `t[±r; i, j]`, with a central parameter h truncated at a fixed
//! order. No algebra relations are imposed here; rewriting to normal form
//! lives in [`crate::rtt`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::context::{AlgebraContext, MAX_LEVEL, MAX_SIZE};
use crate::error::{Error, Result};

macro_rules! fmt_debug_via_display {
    () => {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            fmt::Display::fmt(self, f)
        }
    };
}

/// Exact scalar type: arbitrary-precision rationals.
pub type Scalar = BigRational;

/// Which half of the algebra a generator belongs to.
///
/// `Minus` generators `t[-r; i, j]` are the coefficients of the descending
/// series (powers `u^{-r}`), `Plus` generators `t[+r; i, j]` those of the
/// ascending one (powers `u^{r-1}`). The derived order `Plus < Minus` is the
/// normal order used by rewriting: plus-generators collect on the left.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

/// A single algebra generator `t[sign·level; row, col]`, packed into one word
/// so that the derived numeric order is exactly the normal order
/// `(sign, level, row, col)` with `Plus < Minus`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator(u32);

impl Generator {
    /// Creates a generator after validating indices and level against the
    /// context.
    pub fn new(ctx: &AlgebraContext, sign: Sign, level: u32, row: u32, col: u32) -> Result<Self> {
        let size = ctx.size();
        for index in [row, col] {
            if index < 1 || index > size {
                return Err(Error::IndexOutOfRange {
                    index: index as usize,
                    size: size as usize,
                });
            }
        }
        if level < 1 || level > ctx.level_cap() {
            return Err(Error::LevelOutOfRange {
                level,
                cap: ctx.level_cap(),
            });
        }
        Ok(Self::pack(sign, level, row, col))
    }

    pub(crate) fn pack(sign: Sign, level: u32, row: u32, col: u32) -> Self {
        debug_assert!((1..=MAX_LEVEL).contains(&level));
        debug_assert!((1..=MAX_SIZE).contains(&row) && (1..=MAX_SIZE).contains(&col));
        let sign_bit = match sign {
            Sign::Plus => 0u32,
            Sign::Minus => 1u32,
        };
        Self(sign_bit << 30 | level << 14 | (row - 1) << 7 | (col - 1))
    }

    pub fn sign(&self) -> Sign {
        if self.0 >> 30 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn level(&self) -> u32 {
        (self.0 >> 14) & 0xFFFF
    }

    pub fn row(&self) -> u32 {
        ((self.0 >> 7) & 0x7F) + 1
    }

    pub fn col(&self) -> u32 {
        (self.0 & 0x7F) + 1
    }

    /// Parity of the generator: row parity plus column parity, mod 2.
    pub fn parity(&self, ctx: &AlgebraContext) -> u8 {
        (ctx.parity(self.row()) + ctx.parity(self.col())) & 1
    }

    /// Degree grading: `level - 1` for minus generators, `-level` for plus
    /// generators.
    pub fn degree(&self) -> i64 {
        match self.sign() {
            Sign::Minus => self.level() as i64 - 1,
            Sign::Plus => -(self.level() as i64),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.sign() {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(
            f,
            "t[{}{};{},{}]",
            sign,
            self.level(),
            self.row(),
            self.col()
        )
    }
}

impl fmt::Debug for Generator {
    fmt_debug_via_display!();
}

/// A word of generators. The empty word is the algebra unit.
pub type Word = Box<[Generator]>;

/// Parity of a word: sum of generator parities mod 2.
pub fn word_parity(ctx: &AlgebraContext, word: &[Generator]) -> u8 {
    word.iter().map(|g| g.parity(ctx)).fold(0, |a, b| a ^ b)
}

/// Borrowed view of one monomial of an element.
#[derive(Copy, Clone)]
pub struct Term<'a> {
    /// Power of h carried by the monomial.
    pub hpow: u32,
    /// The generator word (empty for scalar terms).
    pub word: &'a [Generator],
    /// The rational coefficient (never zero).
    pub coeff: &'a Scalar,
}

/// An exact element of the truncated free superalgebra: a finite sum of
/// monomials `coeff · h^hpow · word`, stored deduplicated and canonically
/// ordered by `(hpow, word)`.
///
/// Elements are immutable values; all arithmetic allocates fresh results.
/// The h-truncation of the context is enforced on every operation, so a
/// monomial whose combined h-power exceeds `H` is silently zero.
#[derive(Clone, PartialEq, Eq)]
pub struct Element {
    ctx: AlgebraContext,
    terms: BTreeMap<(u32, Word), Scalar>,
}

impl Element {
    /// The zero element.
    pub fn zero(ctx: AlgebraContext) -> Self {
        Self {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    /// The multiplicative unit.
    pub fn one(ctx: AlgebraContext) -> Self {
        Self::from_scalar(ctx, Scalar::one())
    }

    /// A scalar as an element.
    pub fn from_scalar(ctx: AlgebraContext, value: Scalar) -> Self {
        let mut out = Self::zero(ctx);
        out.add_term(0, Box::from([]), value);
        out
    }

    /// An integer scalar as an element.
    pub fn from_int(ctx: AlgebraContext, value: i64) -> Self {
        Self::from_scalar(ctx, Scalar::from_integer(BigInt::from(value)))
    }

    /// A single-generator monomial with coefficient 1 and no powers of h.
    pub fn generator(
        ctx: AlgebraContext,
        sign: Sign,
        level: u32,
        row: u32,
        col: u32,
    ) -> Result<Self> {
        let g = Generator::new(&ctx, sign, level, row, col)?;
        let mut out = Self::zero(ctx);
        out.add_term(0, Box::from([g]), Scalar::one());
        Ok(out)
    }

    /// The context this element lives in.
    pub fn context(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the element equals the scalar 1.
    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|((hpow, word), coeff)| {
                    *hpow == 0 && word.is_empty() && coeff.is_one()
                })
    }

    /// Number of stored monomials.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterates the monomials in canonical `(hpow, word)` order.
    pub fn terms(&self) -> impl Iterator<Item = Term<'_>> {
        self.terms.iter().map(|((hpow, word), coeff)| Term {
            hpow: *hpow,
            word,
            coeff,
        })
    }

    /// Adds one monomial in place, keeping the canonical-form invariants:
    /// truncation at `H`, deduplication, no explicit zeros.
    pub(crate) fn add_term(&mut self, hpow: u32, word: Word, coeff: Scalar) {
        if hpow > self.ctx.h_order() || coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((hpow, word)) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub(crate) fn from_term(ctx: AlgebraContext, hpow: u32, word: Word, coeff: Scalar) -> Self {
        let mut out = Self::zero(ctx);
        out.add_term(hpow, word, coeff);
        out
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

    /// Sum, failing on a context mismatch.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.ensure_same_context(other)?;
        let mut out = self.clone();
        for ((hpow, word), coeff) in &other.terms {
            out.add_term(*hpow, word.clone(), coeff.clone());
        }
        Ok(out)
    }

    /// Difference, failing on a context mismatch.
    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.ensure_same_context(other)?;
        let mut out = self.clone();
        for ((hpow, word), coeff) in &other.terms {
            out.add_term(*hpow, word.clone(), -coeff.clone());
        }
        Ok(out)
    }

    /// Free product (word concatenation), failing on a context mismatch.
    ///
    /// No Koszul signs appear here: signs enter only through relations and
    /// two-leg tensor products, never through the free product itself.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.ensure_same_context(other)?;
        let mut out = Self::zero(self.ctx);
        for ((h1, w1), c1) in &self.terms {
            for ((h2, w2), c2) in &other.terms {
                let hpow = h1 + h2;
                if hpow > self.ctx.h_order() {
                    continue;
                }
                let word: Word = w1.iter().chain(w2.iter()).copied().collect();
                out.add_term(hpow, word, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Multiplies by a scalar.
    pub fn scale(&self, value: &Scalar) -> Self {
        if value.is_zero() {
            return Self::zero(self.ctx);
        }
        let mut out = self.clone();
        for coeff in out.terms.values_mut() {
            *coeff *= value;
        }
        out
    }

    /// Multiplies by an integer scalar.
    pub fn scale_int(&self, value: i64) -> Self {
        self.scale(&Scalar::from_integer(BigInt::from(value)))
    }

    /// Multiplies by `h^k`, truncating at the context's h-order.
    pub fn mul_h(&self, k: u32) -> Self {
        let mut out = Self::zero(self.ctx);
        for ((hpow, word), coeff) in &self.terms {
            out.add_term(hpow + k, word.clone(), coeff.clone());
        }
        out
    }

    /// Exact division by `h^k`; fails if any monomial carries fewer than `k`
    /// powers of h.
    pub fn div_h_exact(&self, k: u32) -> Result<Self> {
        let mut out = Self::zero(self.ctx);
        for ((hpow, word), coeff) in &self.terms {
            if *hpow < k {
                return Err(Error::NotDivisibleByH { power: k });
            }
            out.add_term(hpow - k, word.clone(), coeff.clone());
        }
        Ok(out)
    }

    /// The sub-sum of monomials carrying exactly `k` powers of h (with the
    /// h-power kept as `k`).
    pub fn h_part(&self, k: u32) -> Self {
        let mut out = Self::zero(self.ctx);
        for ((hpow, word), coeff) in &self.terms {
            if *hpow == k {
                out.add_term(*hpow, word.clone(), coeff.clone());
            }
        }
        out
    }

    /// Smallest h-power among the monomials, or `None` for zero.
    pub fn h_valuation(&self) -> Option<u32> {
        self.terms.keys().map(|(hpow, _)| *hpow).min()
    }

    /// Re-interprets the element in another context of the same shape,
    /// dropping monomials beyond the new h-order. Fails if a generator level
    /// exceeds the new cap while the monomial survives truncation.
    pub fn into_context(&self, ctx: AlgebraContext) -> Result<Self> {
        if !self.ctx.same_shape(&ctx) {
            return Err(Error::ContextMismatch {
                left: self.ctx,
                right: ctx,
            });
        }
        let mut out = Self::zero(ctx);
        for ((hpow, word), coeff) in &self.terms {
            if *hpow > ctx.h_order() {
                continue;
            }
            for g in word.iter() {
                if g.level() > ctx.level_cap() {
                    return Err(Error::LevelCapExceeded {
                        level: g.level(),
                        cap: ctx.level_cap(),
                    });
                }
            }
            out.add_term(*hpow, word.clone(), coeff.clone());
        }
        Ok(out)
    }

    /// Supercommutator `[a, b] = ab − (−1)^{|a||b|} ba`, extended bilinearly
    /// over the monomials of inhomogeneous arguments.
    pub fn supercomm(&self, other: &Self) -> Result<Self> {
        self.ensure_same_context(other)?;
        let ctx = self.ctx;
        let mut out = Self::zero(ctx);
        for ((h1, w1), c1) in &self.terms {
            let p1 = word_parity(&ctx, w1);
            for ((h2, w2), c2) in &other.terms {
                let hpow = h1 + h2;
                if hpow > ctx.h_order() {
                    continue;
                }
                let p2 = word_parity(&ctx, w2);
                let forward: Word = w1.iter().chain(w2.iter()).copied().collect();
                let backward: Word = w2.iter().chain(w1.iter()).copied().collect();
                let coeff = c1 * c2;
                let back_coeff = if p1 & p2 == 1 {
                    coeff.clone()
                } else {
                    -coeff.clone()
                };
                out.add_term(hpow, forward, coeff);
                out.add_term(hpow, backward, back_coeff);
            }
        }
        Ok(out)
    }

    /// Parity of the element: `Some(p)` when every word is homogeneous of
    /// parity `p` (zero counts as even), `None` when parities mix.
    pub fn parity(&self) -> Option<u8> {
        let mut parity = None;
        for (_, word) in self.terms.keys() {
            let p = word_parity(&self.ctx, word);
            match parity {
                None => parity = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(parity.unwrap_or(0))
    }

    /// Degree of the element: the maximum over monomials of the summed
    /// generator degrees. Fails on the zero element.
    pub fn degree(&self) -> Result<i64> {
        self.terms
            .keys()
            .map(|(_, word)| word.iter().map(Generator::degree).sum::<i64>())
            .max()
            .ok_or(Error::ZeroDegree)
    }

    /// Parses the canonical text form produced by [`fmt::Display`].
    ///
    /// Grammar (whitespace-insensitive):
    /// `element := sign? term (sign term)*` with `sign ∈ {+, -}`;
    /// `term := rational? ("h" ("^" digits)?)? gen*`;
    /// `gen := "t[" ("+"|"-") digits ";" digits "," digits "]"`;
    /// `rational := digits ("/" digits)?`. The zero element prints as `0`.
    pub fn parse(ctx: AlgebraContext, text: &str) -> Result<Self> {
        Parser::new(ctx, text).parse()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (index, ((hpow, word), coeff)) in self.terms.iter().enumerate() {
            if index == 0 {
                if coeff.is_negative() {
                    f.write_str("-")?;
                }
            } else if coeff.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let magnitude = coeff.abs();
            let mut wrote = false;
            if !magnitude.is_one() || (*hpow == 0 && word.is_empty()) {
                write!(f, "{magnitude}")?;
                wrote = true;
            }
            if *hpow > 0 {
                if wrote {
                    f.write_str(" ")?;
                }
                write!(f, "h^{hpow}")?;
                wrote = true;
            }
            for g in word.iter() {
                if wrote {
                    f.write_str(" ")?;
                }
                write!(f, "{g}")?;
                wrote = true;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Element {
    fmt_debug_via_display!();
}

struct Parser<'a> {
    ctx: AlgebraContext,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(ctx: AlgebraContext, text: &'a str) -> Self {
        Self {
            ctx,
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    /// Consumes a `+`/`-` sign, ASCII or the typographic minus.
    fn take_sign(&mut self) -> Option<i8> {
        match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                Some(1)
            }
            Some(b'-') => {
                self.pos += 1;
                Some(-1)
            }
            Some(0xE2) if self.bytes[self.pos..].starts_with("\u{2212}".as_bytes()) => {
                self.pos += "\u{2212}".len();
                Some(-1)
            }
            _ => None,
        }
    }

    fn take_digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected digits"));
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits"))
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", byte as char)))
        }
    }

    fn take_rational(&mut self) -> Result<Scalar> {
        let numer: BigInt = self.take_digits()?.parse().expect("digits parse as BigInt");
        let denom: BigInt = if self.peek() == Some(b'/') {
            self.pos += 1;
            let digits = self.take_digits()?;
            let denom: BigInt = digits.parse().expect("digits parse as BigInt");
            if denom.is_zero() {
                return Err(self.error("zero denominator"));
            }
            denom
        } else {
            BigInt::one()
        };
        Ok(Scalar::new(numer, denom))
    }

    fn take_u32(&mut self) -> Result<u32> {
        let digits = self.take_digits()?;
        digits
            .parse::<u32>()
            .map_err(|_| self.error("number out of range"))
    }

    fn take_generator(&mut self) -> Result<Generator> {
        // Caller has already seen the leading 't'.
        self.pos += 1;
        self.expect(b'[')?;
        let sign = match self.take_sign() {
            Some(1) => Sign::Plus,
            Some(-1) => Sign::Minus,
            _ => return Err(self.error("expected '+' or '-'")),
        };
        let level = self.take_u32()?;
        self.expect(b';')?;
        let row = self.take_u32()?;
        self.expect(b',')?;
        let col = self.take_u32()?;
        self.expect(b']')?;
        let pos = self.pos;
        Generator::new(&self.ctx, sign, level, row, col).map_err(|e| Error::Parse {
            pos,
            msg: e.to_string(),
        })
    }

    fn parse(mut self) -> Result<Element> {
        let mut out = Element::zero(self.ctx);
        if self.peek().is_none() {
            return Err(self.error("empty input"));
        }
        let mut sign = self.take_sign().unwrap_or(1);
        loop {
            let (hpow, word, coeff) = self.take_term()?;
            out.add_term(hpow, word, coeff.scale(sign));
            match self.peek() {
                None => break,
                Some(_) => {
                    sign = self
                        .take_sign()
                        .ok_or_else(|| self.error("expected '+', '-', or end of input"))?;
                }
            }
        }
        Ok(out)
    }

    fn take_term(&mut self) -> Result<(u32, Word, Scalar)> {
        let mut coeff: Option<Scalar> = None;
        let mut hpow = 0u32;
        if self.peek().is_some_and(|b| b.is_ascii_digit()) {
            coeff = Some(self.take_rational()?);
        }
        if self.peek() == Some(b'h') {
            self.pos += 1;
            hpow = if self.peek() == Some(b'^') {
                self.pos += 1;
                self.take_u32()?
            } else {
                1
            };
        }
        let mut word = Vec::new();
        while self.peek() == Some(b't') {
            word.push(self.take_generator()?);
        }
        if coeff.is_none() && hpow == 0 && word.is_empty() {
            return Err(self.error("expected a term"));
        }
        Ok((hpow, word.into(), coeff.unwrap_or_else(Scalar::one)))
    }
}

trait ScaleBySign {
    fn scale(self, sign: i8) -> Self;
}

impl ScaleBySign for Scalar {
    fn scale(self, sign: i8) -> Self {
        if sign < 0 {
            -self
        } else {
            self
        }
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl std::ops::$trait<&Element> for &Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                self.$inner(rhs).expect("algebra context mismatch")
            }
        }
        impl std::ops::$trait<Element> for Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&Element> for Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                (&self).$method(rhs)
            }
        }
        impl std::ops::$trait<Element> for &Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                self.$method(&rhs)
            }
        }
    };
}

binary_op!(Add, add, try_add);
binary_op!(Sub, sub, try_sub);
binary_op!(Mul, mul, try_mul);

impl std::ops::Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale_int(-1)
    }
}

impl std::ops::Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> AlgebraContext {
        AlgebraContext::new(1, 1, 3, 3).unwrap()
    }

    fn gen(c: AlgebraContext, sign: Sign, level: u32, row: u32, col: u32) -> Element {
        Element::generator(c, sign, level, row, col).unwrap()
    }

    #[test]
    fn generator_parities() {
        let c = ctx();
        let g = Generator::new(&c, Sign::Minus, 1, 1, 2).unwrap();
        assert_eq!(g.parity(&c), 1);
        let even = AlgebraContext::new(2, 0, 2, 2).unwrap();
        let g = Generator::new(&even, Sign::Plus, 3, 2, 2).unwrap();
        assert_eq!(g.parity(&even), 0);
    }

    #[test]
    fn generator_index_out_of_range() {
        let c = ctx();
        assert_eq!(
            Element::generator(c, Sign::Minus, 1, 3, 1),
            Err(Error::IndexOutOfRange { index: 3, size: 2 })
        );
    }

    #[test]
    fn packing_round_trips_and_orders() {
        let c = AlgebraContext::with_level_cap(2, 1, 3, 3, 400).unwrap();
        let g = Generator::new(&c, Sign::Minus, 397, 3, 2).unwrap();
        assert_eq!(g.sign(), Sign::Minus);
        assert_eq!(g.level(), 397);
        assert_eq!(g.row(), 3);
        assert_eq!(g.col(), 2);
        // Normal order: plus before minus, then level, then row, then col.
        let plus_big = Generator::new(&c, Sign::Plus, 399, 3, 3).unwrap();
        let minus_small = Generator::new(&c, Sign::Minus, 1, 1, 1).unwrap();
        assert!(plus_big < minus_small);
        let a = Generator::new(&c, Sign::Minus, 2, 1, 3).unwrap();
        let b = Generator::new(&c, Sign::Minus, 2, 2, 1).unwrap();
        assert!(a < b);
    }

    #[test]
    fn unit_law_and_additive_inverse() {
        let c = ctx();
        let x = gen(c, Sign::Minus, 1, 1, 2);
        assert_eq!(&x * &Element::one(c), x);
        assert_eq!(Element::one(c) * &x, x);
        assert!((&x - &x).is_zero());
        assert!((&x + &x.scale_int(-1)).is_zero());
    }

    #[test]
    fn truncation_kills_high_h_products() {
        let c = ctx();
        let x = gen(c, Sign::Minus, 1, 1, 1).mul_h(1);
        let y = gen(c, Sign::Plus, 1, 2, 2).mul_h(c.h_order());
        assert!((&x * &y).is_zero());
    }

    #[test]
    fn supercomm_even_self_vanishes() {
        let c = ctx();
        let x = gen(c, Sign::Minus, 2, 1, 1);
        assert!(x.supercomm(&x).unwrap().is_zero());
    }

    #[test]
    fn supercomm_odd_self_doubles_square() {
        let c = ctx();
        let x = gen(c, Sign::Minus, 1, 1, 2);
        let sq = x.supercomm(&x).unwrap();
        assert_eq!(sq, (&x * &x).scale_int(2));
    }

    #[test]
    fn supercomm_graded_antisymmetry() {
        let c = ctx();
        let pairs = [
            (gen(c, Sign::Minus, 1, 1, 2), gen(c, Sign::Plus, 2, 2, 1)),
            (gen(c, Sign::Minus, 1, 1, 1), gen(c, Sign::Plus, 1, 1, 2)),
            (gen(c, Sign::Minus, 2, 2, 2), gen(c, Sign::Minus, 1, 1, 1)),
        ];
        for (x, y) in pairs {
            // [x, y] = −(−1)^{|x||y|} [y, x]
            let factor = i64::from(x.parity().unwrap() & y.parity().unwrap()) * 2 - 1;
            let lhs = x.supercomm(&y).unwrap();
            let rhs = y.supercomm(&x).unwrap().scale_int(factor);
            assert_eq!(lhs, rhs, "graded antisymmetry for {x} and {y}");
        }
    }

    #[test]
    fn degrees() {
        let c = ctx();
        assert_eq!(gen(c, Sign::Minus, 1, 1, 1).degree().unwrap(), 0);
        assert_eq!(gen(c, Sign::Plus, 2, 1, 1).degree().unwrap(), -2);
        let product = gen(c, Sign::Minus, 3, 1, 2) * gen(c, Sign::Plus, 1, 2, 1);
        assert_eq!(product.degree().unwrap(), 1);
        assert_eq!(Element::zero(c).degree(), Err(Error::ZeroDegree));
    }

    #[test]
    fn display_matches_grammar() {
        let c = ctx();
        assert_eq!(Element::zero(c).to_string(), "0");
        assert_eq!(Element::one(c).to_string(), "1");
        assert_eq!(gen(c, Sign::Minus, 1, 1, 2).to_string(), "t[-1;1,2]");
        let x = gen(c, Sign::Minus, 1, 1, 2) * gen(c, Sign::Plus, 1, 2, 1);
        let x = x
            .mul_h(2)
            .scale(&Scalar::new(BigInt::from(3), BigInt::from(2)));
        assert_eq!(x.to_string(), "3/2 h^2 t[-1;1,2] t[+1;2,1]");
    }

    #[test]
    fn parse_round_trips() {
        let c = ctx();
        for text in [
            "0",
            "1",
            "t[-1;1,2]",
            "3/2 h^2 t[-1;1,2] t[+1;2,1]",
            "-t[-1;1,1] + 2 t[+2;2,2] - 7/3 h^1",
        ] {
            let parsed = Element::parse(c, text).unwrap();
            let reparsed = Element::parse(c, &parsed.to_string()).unwrap();
            assert_eq!(parsed, reparsed, "round-trip through display for {text:?}");
        }
        // Canonical outputs parse back to the same canonical string.
        let canonical = "3/2 h^2 t[-1;1,2] t[+1;2,1]";
        assert_eq!(Element::parse(c, canonical).unwrap().to_string(), canonical);
    }

    #[test]
    fn parse_is_whitespace_insensitive() {
        let c = ctx();
        let tight = Element::parse(c, "3/2h^2t[-1;1,2]t[+1;2,1]").unwrap();
        let loose = Element::parse(c, " 3 / 2  h^2  t[ - 1 ; 1 , 2 ] t[ + 1 ; 2 , 1 ] ").unwrap();
        assert_eq!(tight, loose);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let c = ctx();
        match Element::parse(c, "t[-1;1,2] + !") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 12),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(Element::parse(c, ""), Err(Error::Parse { .. })));
        assert!(matches!(
            Element::parse(c, "t[-1;9,1]"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn context_mismatch_is_reported() {
        let a = Element::one(ctx());
        let b = Element::one(AlgebraContext::new(2, 1, 3, 3).unwrap());
        assert!(matches!(a.try_mul(&b), Err(Error::ContextMismatch { .. })));
    }

    #[test]
    fn h_division_and_parts() {
        let c = ctx();
        let x = gen(c, Sign::Minus, 1, 1, 2);
        let v = x.mul_h(2) + x.mul_h(3).scale_int(5);
        assert_eq!(v.h_valuation(), Some(2));
        let divided = v.div_h_exact(2).unwrap();
        assert_eq!(divided, &x + &x.mul_h(1).scale_int(5));
        assert_eq!(
            divided.div_h_exact(1),
            Err(Error::NotDivisibleByH { power: 1 })
        );
        assert_eq!(v.h_part(2), x.mul_h(2));
    }

    #[test]
    fn into_context_retruncates() {
        let c = ctx();
        let up = c.elevated(2);
        let x = Element::generator(up, Sign::Minus, 1, 1, 1).unwrap();
        let tall = x.mul_h(c.h_order() + 1) + x.mul_h(1);
        let down = tall.into_context(c).unwrap();
        assert_eq!(
            down,
            Element::generator(c, Sign::Minus, 1, 1, 1)
                .unwrap()
                .mul_h(1)
        );
    }
}
