//! The universal enveloping algebra of the loop Lie superalgebra
//! `gl(m|n) ⊗ C[t, t^{-1}]`, with exact rational coefficients, used as an
//! independent classical oracle.
//!
//! Basis generators are `e[r; i, j] = e_ij ⊗ t^r` with integer degree `r`
//! and the bracket
//!
//! `[e_ij(r), e_kl(s)] = δ_kj e_il(r+s) − (−1)^{(ī+j̄)(k̄+l̄)} δ_il e_kj(r+s)`.
//!
//! Elements are normalized to the Poincaré–Birkhoff–Witt basis of
//! nondecreasing words (odd squares vanish) by straightening, which
//! terminates because every bracket insertion shortens the word.
//!
//! The connection to the quantum engine is the graded-algebra map
//!
//! `t[-r; i, j] ↦ (−1)^{ī} e[r−1; i, j]`,
//! `t[+r; i, j] ↦ (−1)^{ī} e[−r; i, j]`,
//!
//! applied to the h-free part of an element; [`verify_classical_diagram`]
//! checks that it intertwines derived supercommutators with loop brackets.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

#[cfg(test)]
use crate::context::AlgebraContext;
use crate::element::{Element, Scalar, Sign};
use crate::error::{Error, Result};
use crate::rtt::RuleTable;
use crate::verify::Verification;

/// A loop-superalgebra generator `e_ij ⊗ t^degree`, ordered by
/// `(degree, row, col)` for the normal form.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LoopGenerator {
    pub degree: i64,
    pub row: u32,
    pub col: u32,
}

impl fmt::Display for LoopGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e[{};{},{}]", self.degree, self.row, self.col)
    }
}

type LoopWord = Box<[LoopGenerator]>;

/// An element of `U(gl(m|n) ⊗ C[t, t^{-1}])` in PBW normal form.
#[derive(Clone, PartialEq, Eq)]
pub struct ClassicalElement {
    m: u32,
    n: u32,
    terms: BTreeMap<LoopWord, Scalar>,
}

fn index_parity(m: u32, index: u32) -> u8 {
    u8::from(index > m)
}

impl ClassicalElement {
    pub fn zero(m: u32, n: u32) -> Self {
        Self {
            m,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(m: u32, n: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Box::from([]) as LoopWord, Scalar::from_integer(1.into()));
        Self { m, n, terms }
    }

    /// The generator `e_ij ⊗ t^degree`, validating the matrix indices.
    pub fn generator(m: u32, n: u32, degree: i64, row: u32, col: u32) -> Result<Self> {
        let size = m + n;
        for index in [row, col] {
            if index < 1 || index > size {
                return Err(Error::IndexOutOfRange {
                    index: index as usize,
                    size: size as usize,
                });
            }
        }
        let mut terms = BTreeMap::new();
        terms.insert(
            Box::from([LoopGenerator { degree, row, col }]) as LoopWord,
            Scalar::from_integer(1.into()),
        );
        Ok(Self { m, n, terms })
    }

    /// The central sum `I(degree) = Σ_i e_ii ⊗ t^degree`.
    pub fn identity_sum(m: u32, n: u32, degree: i64) -> Self {
        let mut out = Self::zero(m, n);
        for i in 1..=m + n {
            let word: LoopWord = Box::from([LoopGenerator {
                degree,
                row: i,
                col: i,
            }]);
            out.add_term(word, Scalar::from_integer(1.into()));
        }
        out
    }

    pub fn shape(&self) -> (u32, u32) {
        (self.m, self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn generator_parity(&self, g: LoopGenerator) -> u8 {
        (index_parity(self.m, g.row) + index_parity(self.m, g.col)) & 1
    }

    fn word_parity(&self, word: &[LoopGenerator]) -> u8 {
        word.iter()
            .map(|g| self.generator_parity(*g) as u32)
            .sum::<u32>() as u8
            & 1
    }

    fn add_term(&mut self, word: LoopWord, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(word) {
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

    fn ensure_same_shape(&self, other: &Self) -> Result<()> {
        if self.m == other.m && self.n == other.n {
            Ok(())
        } else {
            Err(Error::SizeMismatch {
                left: (self.m + self.n) as usize,
                right: (other.m + other.n) as usize,
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ensure_same_shape(other)?;
        let mut out = self.clone();
        for (word, coeff) in &other.terms {
            out.add_term(word.clone(), coeff.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale_int(-1))
    }

    pub fn scale(&self, value: &Scalar) -> Self {
        if value.is_zero() {
            return Self::zero(self.m, self.n);
        }
        Self {
            m: self.m,
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(word, coeff)| (word.clone(), coeff * value))
                .collect(),
        }
    }

    pub fn scale_int(&self, value: i64) -> Self {
        self.scale(&Scalar::from_integer(value.into()))
    }

    /// The bracket of two generators as a short list of generators with
    /// coefficients.
    fn bracket(&self, x: LoopGenerator, y: LoopGenerator) -> Vec<(LoopGenerator, i64)> {
        let mut out = Vec::new();
        if x.col == y.row {
            out.push((
                LoopGenerator {
                    degree: x.degree + y.degree,
                    row: x.row,
                    col: y.col,
                },
                1,
            ));
        }
        if y.col == x.row {
            let koszul = self.generator_parity(x) & self.generator_parity(y);
            out.push((
                LoopGenerator {
                    degree: x.degree + y.degree,
                    row: y.row,
                    col: x.col,
                },
                if koszul == 1 { 1 } else { -1 },
            ));
        }
        out
    }

    /// Straightens a raw bag of words into the PBW normal form.
    fn normalized(&self, raw: Vec<(LoopWord, Scalar)>) -> Self {
        let mut out = Self::zero(self.m, self.n);
        let mut stack = raw;
        while let Some((word, coeff)) = stack.pop() {
            if coeff.is_zero() {
                continue;
            }
            let mut redex = None;
            for p in 0..word.len().saturating_sub(1) {
                let x = word[p];
                let y = word[p + 1];
                let odd_square = x == y && self.generator_parity(x) == 1;
                if x > y || odd_square {
                    redex = Some(p);
                    break;
                }
            }
            let Some(p) = redex else {
                out.add_term(word, coeff);
                continue;
            };
            let x = word[p];
            let y = word[p + 1];
            let prefix = &word[..p];
            let suffix = &word[p + 2..];
            if x == y {
                // odd square: x·x = ½ [x, x]
                for (z, factor) in self.bracket(x, x) {
                    let inserted: LoopWord = prefix
                        .iter()
                        .copied()
                        .chain(std::iter::once(z))
                        .chain(suffix.iter().copied())
                        .collect();
                    let half = Scalar::new(factor.into(), 2.into());
                    stack.push((inserted, &coeff * half));
                }
                continue;
            }
            // x·y = (−1)^{|x||y|} y·x + [x, y]
            let koszul = self.generator_parity(x) & self.generator_parity(y);
            let swapped: LoopWord = prefix
                .iter()
                .copied()
                .chain([y, x])
                .chain(suffix.iter().copied())
                .collect();
            let swapped_coeff = if koszul == 1 {
                -coeff.clone()
            } else {
                coeff.clone()
            };
            stack.push((swapped, swapped_coeff));
            for (z, factor) in self.bracket(x, y) {
                let inserted: LoopWord = prefix
                    .iter()
                    .copied()
                    .chain(std::iter::once(z))
                    .chain(suffix.iter().copied())
                    .collect();
                stack.push((inserted, &coeff * Scalar::from_integer(factor.into())));
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.ensure_same_shape(other)?;
        let mut raw = Vec::new();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let word: LoopWord = w1.iter().chain(w2.iter()).copied().collect();
                raw.push((word, c1 * c2));
            }
        }
        Ok(self.normalized(raw))
    }

    /// Supercommutator `[a, b] = ab − (−1)^{|a||b|} ba`, extended bilinearly
    /// over monomials.
    pub fn supercomm(&self, other: &Self) -> Result<Self> {
        self.ensure_same_shape(other)?;
        let mut raw = Vec::new();
        for (w1, c1) in &self.terms {
            let p1 = self.word_parity(w1);
            for (w2, c2) in &other.terms {
                let p2 = self.word_parity(w2);
                let forward: LoopWord = w1.iter().chain(w2.iter()).copied().collect();
                raw.push((forward, c1 * c2));
                let backward: LoopWord = w2.iter().chain(w1.iter()).copied().collect();
                let back = c1 * c2;
                raw.push((backward, if p1 & p2 == 1 { back } else { -back }));
            }
        }
        Ok(self.normalized(raw))
    }
}

impl fmt::Display for ClassicalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (word, coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{coeff}")?;
            for g in word.iter() {
                write!(f, " {g}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ClassicalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Maps the h-free part of a quantum element to the loop enveloping
/// algebra: `t[-r; i, j] ↦ (−1)^{ī} e[r−1; i, j]` and
/// `t[+r; i, j] ↦ (−1)^{ī} e[−r; i, j]`, extended multiplicatively.
pub fn classical_image(x: &Element) -> Result<ClassicalElement> {
    let ctx = x.context();
    let (m, n) = (ctx.m(), ctx.n());
    let mut out = ClassicalElement::zero(m, n);
    for term in x.terms() {
        if term.hpow != 0 {
            continue;
        }
        let mut sign = 1i64;
        let mut word = Vec::with_capacity(term.word.len());
        for g in term.word {
            if index_parity(m, g.row()) == 1 {
                sign = -sign;
            }
            let degree = match g.sign() {
                Sign::Minus => g.level() as i64 - 1,
                Sign::Plus => -(g.level() as i64),
            };
            word.push(LoopGenerator {
                degree,
                row: g.row(),
                col: g.col(),
            });
        }
        let contribution = ClassicalElement {
            m,
            n,
            terms: BTreeMap::from([(
                Box::from(word.as_slice()) as LoopWord,
                term.coeff * Scalar::from_integer(sign.into()),
            )]),
        };
        // Normalize the contribution before accumulating.
        let one = ClassicalElement::one(m, n);
        out = out.add(&contribution.mul(&one)?)?;
    }
    Ok(out)
}

/// Verifies that the classical-limit map intertwines the quantum and loop
/// brackets: for every normal-ordered generator pair in the window, the
/// image of the h-free part of the derived supercommutator equals the loop
/// bracket of the images.
pub fn verify_classical_diagram(table: &RuleTable) -> Result<Vec<Verification>> {
    let ctx = *table.context();
    let size = ctx.size();
    let order = ctx.series_order();
    let params = format!(
        "shape={}|{}; N={}; H={}; levels<= {}",
        ctx.m(),
        ctx.n(),
        order,
        ctx.h_order(),
        order
    );
    let mut generators = Vec::new();
    for sign in [Sign::Minus, Sign::Plus] {
        for level in 1..=order {
            for i in 1..=size {
                for j in 1..=size {
                    generators.push(crate::element::Generator::new(&ctx, sign, level, i, j)?);
                }
            }
        }
    }
    let mut records = Vec::new();
    for &x in &generators {
        for &y in &generators {
            if !RuleTable::is_reducible_pair(&ctx, x, y) {
                continue;
            }
            let derived = table.derived_supercomm(x, y)?;
            let lhs = classical_image(&derived.h_part(0))?;
            let xe = Element::generator(ctx, x.sign(), x.level(), x.row(), x.col())?;
            let ye = Element::generator(ctx, y.sign(), y.level(), y.row(), y.col())?;
            let rhs = classical_image(&xe)?.supercomm(&classical_image(&ye)?)?;
            let residue = lhs.sub(&rhs)?;
            records.push(Verification::from_outcome(
                format!("classical-diagram-{x}-{y}"),
                "classical-limit-intertwines-brackets",
                params.clone(),
                residue.is_zero(),
                Some(format!("{residue}")),
            ));
        }
    }
    Ok(records)
}

/// Verifies that the sums `I(r)` are central in the loop enveloping
/// algebra: `[I(r), e_kl(s)] = 0` for every matrix position and all degrees
/// `r, s` in the window.
pub fn verify_identity_sum_centrality(
    m: u32,
    n: u32,
    degree_window: i64,
) -> Result<Vec<Verification>> {
    let params = format!("shape={m}|{n}; degrees -{degree_window}..={degree_window}");
    let mut records = Vec::new();
    for r in -degree_window..=degree_window {
        let central = ClassicalElement::identity_sum(m, n, r);
        let mut pass = true;
        let mut counterexample = None;
        'probe: for s in -degree_window..=degree_window {
            for k in 1..=m + n {
                for l in 1..=m + n {
                    let probe = ClassicalElement::generator(m, n, s, k, l)?;
                    let residue = central.supercomm(&probe)?;
                    if !residue.is_zero() {
                        pass = false;
                        counterexample = Some(format!("[I({r}), e[{s};{k},{l}]] = {residue}"));
                        break 'probe;
                    }
                }
            }
        }
        records.push(Verification::from_outcome(
            format!("identity-sum-central-r{r}"),
            "loop-identity-sums-central",
            params.clone(),
            pass,
            counterexample,
        ));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::all_pass;

    #[test]
    fn brackets_match_the_loop_relations() {
        // [e_12(1), e_21(-1)] = e_11(0) - (-1)^{...} e_22(0) in gl(2|0):
        // both indices even, so the sign is -1 and the bracket is
        // e_11(0) - e_22(0).
        let x = ClassicalElement::generator(2, 0, 1, 1, 2).unwrap();
        let y = ClassicalElement::generator(2, 0, -1, 2, 1).unwrap();
        let bracket = x.supercomm(&y).unwrap();
        let expected = ClassicalElement::generator(2, 0, 0, 1, 1)
            .unwrap()
            .sub(&ClassicalElement::generator(2, 0, 0, 2, 2).unwrap())
            .unwrap();
        assert_eq!(bracket, expected, "got {bracket}");

        // In gl(1|1) the generators e_12, e_21 are odd: the supercommutator
        // is the anticommutator and gains the + sign:
        // [e_12(0), e_21(0)] = e_11(0) + e_22(0).
        let x = ClassicalElement::generator(1, 1, 0, 1, 2).unwrap();
        let y = ClassicalElement::generator(1, 1, 0, 2, 1).unwrap();
        let bracket = x.supercomm(&y).unwrap();
        let expected = ClassicalElement::generator(1, 1, 0, 1, 1)
            .unwrap()
            .add(&ClassicalElement::generator(1, 1, 0, 2, 2).unwrap())
            .unwrap();
        assert_eq!(bracket, expected, "got {bracket}");
    }

    #[test]
    fn odd_squares_vanish_in_the_normal_form() {
        let x = ClassicalElement::generator(1, 1, 2, 1, 2).unwrap();
        let square = x.mul(&x).unwrap();
        assert!(square.is_zero(), "odd square should vanish: {square}");
        // Even squares survive.
        let y = ClassicalElement::generator(1, 1, 2, 1, 1).unwrap();
        assert!(!y.mul(&y).unwrap().is_zero());
    }

    #[test]
    fn straightening_is_consistent_with_associativity() {
        let a = ClassicalElement::generator(2, 1, 1, 3, 1).unwrap();
        let b = ClassicalElement::generator(2, 1, -1, 1, 2).unwrap();
        let c = ClassicalElement::generator(2, 1, 0, 2, 3).unwrap();
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        let residue = left.sub(&right).unwrap();
        assert!(residue.is_zero(), "associativity defect: {residue}");
    }

    #[test]
    fn identity_sums_are_central() {
        for (m, n) in [(1, 1), (2, 1), (1, 2)] {
            let records = verify_identity_sum_centrality(m, n, 2).unwrap();
            assert!(all_pass(&records), "{records:?}");
        }
    }

    #[test]
    fn classical_diagram_commutes_on_small_contexts() {
        for (m, n) in [(1, 1), (2, 1)] {
            let ctx = AlgebraContext::new(m, n, 2, 2).unwrap();
            let table = RuleTable::new(ctx);
            let records = verify_classical_diagram(&table).unwrap();
            assert!(!records.is_empty());
            for record in &records {
                assert!(
                    record.pass,
                    "{} failed: {:?}",
                    record.identity, record.counterexample
                );
            }
        }
    }

    #[test]
    fn classical_image_drops_higher_h_layers() {
        let ctx = AlgebraContext::new(1, 1, 2, 2).unwrap();
        let x = Element::generator(ctx, Sign::Minus, 1, 1, 1).unwrap();
        let image = classical_image(&x.mul_h(1)).unwrap();
        assert!(image.is_zero());
        let image = classical_image(&x).unwrap();
        assert_eq!(image, ClassicalElement::generator(1, 1, 0, 1, 1).unwrap());
        // An odd row flips the sign.
        let y = Element::generator(ctx, Sign::Plus, 2, 2, 1).unwrap();
        let image = classical_image(&y).unwrap();
        assert_eq!(
            image,
            ClassicalElement::generator(1, 1, -2, 2, 1)
                .unwrap()
                .scale_int(-1)
        );
    }
}
