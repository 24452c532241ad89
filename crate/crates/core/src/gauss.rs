//! Gauss decomposition `T = F D E` of the generator matrices and the
//! series it produces: the diagonal quasideterminants `d_i`, the strictly
//! triangular factors `e_ij`, `f_ji`, and the inverse-side path sums
//! `e'_ij`, `f'_ji`.
//!
//! All series here are computed by exact rational arithmetic in the free
//! truncated algebra — no rewriting is involved — so every identity checked
//! by [`verify_gauss_identities`] holds literally, coefficient by
//! coefficient. The rule table is consulted only as a fallback witness when
//! a literal comparison fails, so a genuine failure is still reported
//! against the normal form.

use std::collections::BTreeMap;

use crate::context::AlgebraContext;
use crate::element::{Element, Sign};
use crate::error::{Error, Result};
use crate::matrix::SuperMatrix;
use crate::rtt::{generator_matrix, RuleTable};
use crate::series::TruncSeries;
use crate::verify::Verification;

/// The Gauss data of one generator matrix: `T = F D E` with `F` lower
/// unitriangular, `D` diagonal, and `E` upper unitriangular, together with
/// the entries of `E^{-1}` and `F^{-1}` as alternating path sums.
///
/// Index conventions are 1-based throughout: `d(i)` for `i = 1..=m+n`,
/// `e(i, j)` and `e_prime(i, j)` for `i < j`, `f(j, i)` and `f_prime(j, i)`
/// for `j > i`.
#[derive(Clone)]
pub struct GaussData {
    ctx: AlgebraContext,
    sign: Sign,
    t: SuperMatrix,
    t_inv: SuperMatrix,
    d: Vec<TruncSeries<Element>>,
    d_inv: Vec<TruncSeries<Element>>,
    e: BTreeMap<(u32, u32), TruncSeries<Element>>,
    f: BTreeMap<(u32, u32), TruncSeries<Element>>,
    e_prime: BTreeMap<(u32, u32), TruncSeries<Element>>,
    f_prime: BTreeMap<(u32, u32), TruncSeries<Element>>,
}

/// Decomposes the generator matrix of the given sign.
///
/// The diagonal entries are quasideterminants of leading corners,
///
/// `d_i = |T[1..i, 1..i]|_{ii}`,
///
/// and the triangular entries divide the bordered quasideterminants by them:
///
/// `f_ji = |T[1..i-1, j; 1..i]|_{ji} d_i^{-1}`,
/// `e_ij = d_i^{-1} |T[1..i; 1..i-1, j]|_{ij}`.
///
/// Each bordered quasideterminant is expanded at its boxed corner against
/// the inverse of the leading `(i-1) x (i-1)` corner, which is computed once
/// per size and shared.
pub fn gauss_decompose(ctx: AlgebraContext, sign: Sign) -> Result<GaussData> {
    let t = generator_matrix(ctx, sign)?;
    let size = ctx.size() as usize;

    // corner_inv[k - 1] inverts the leading k x k corner, k = 1..size-1.
    let mut corner_inv: Vec<SuperMatrix> = Vec::new();
    for k in 1..size {
        let indices: Vec<usize> = (1..=k).collect();
        corner_inv.push(t.submatrix(&indices, &indices)?.inverse()?);
    }

    // The boxed-corner expansion of the bordered quasideterminant with
    // leading corner of size `k`, boxed entry at original position (r, c):
    // t[r,c] - sum_{a,b <= k} t[r,a] inv_k[a,b] t[b,c].
    let quasi = |k: usize, r: usize, c: usize| -> Result<TruncSeries<Element>> {
        let mut value = t.get(r, c).clone();
        if k == 0 {
            return Ok(value);
        }
        let inv = &corner_inv[k - 1];
        for a in 1..=k {
            for b in 1..=k {
                let product = t.get(r, a).mul(inv.get(a, b))?.mul(t.get(b, c))?;
                value = value.sub(&product)?;
            }
        }
        Ok(value)
    };

    let mut d = Vec::with_capacity(size);
    let mut d_inv = Vec::with_capacity(size);
    for i in 1..=size {
        let di = quasi(i - 1, i, i)?;
        d_inv.push(di.invert()?);
        d.push(di);
    }

    let mut e = BTreeMap::new();
    let mut f = BTreeMap::new();
    for i in 1..=size {
        for j in (i + 1)..=size {
            let e_num = quasi(i - 1, i, j)?;
            e.insert((i as u32, j as u32), d_inv[i - 1].mul(&e_num)?);
            let f_num = quasi(i - 1, j, i)?;
            f.insert((j as u32, i as u32), f_num.mul(&d_inv[i - 1])?);
        }
    }

    // Alternating path sums by first-step (for e') and last-step (for f')
    // recursion over chains i = i_0 < i_1 < ... < i_s = j:
    //
    // `e'_ij = sum (-1)^s e_{i_0 i_1} ... e_{i_{s-1} i_s}`
    //       `= -sum_{i < k <= j} e_{ik} e'_{kj}`,
    // `f'_ji = sum (-1)^s f_{i_s i_{s-1}} ... f_{i_1 i_0}`
    //       `= -sum_{i < k <= j} f'_{jk} f_{ki}`,
    //
    // with the empty-chain anchors `e'_jj = f'_jj = 1`.
    let one = |_: ()| {
        TruncSeries::constant(
            t.direction(),
            ctx.series_order() as usize,
            Element::one(ctx),
        )
    };
    let mut e_prime: BTreeMap<(u32, u32), TruncSeries<Element>> = BTreeMap::new();
    for i in (1..=size).rev() {
        for j in (i + 1)..=size {
            let mut acc = TruncSeries::constant(
                t.direction(),
                ctx.series_order() as usize,
                Element::zero(ctx),
            );
            for k in (i + 1)..=j {
                let tail = if k == j {
                    one(())
                } else {
                    e_prime[&(k as u32, j as u32)].clone()
                };
                acc = acc.sub(&e[&(i as u32, k as u32)].mul(&tail)?)?;
            }
            e_prime.insert((i as u32, j as u32), acc);
        }
    }
    let mut f_prime: BTreeMap<(u32, u32), TruncSeries<Element>> = BTreeMap::new();
    for j in 1..=size {
        for i in (1..j).rev() {
            let mut acc = TruncSeries::constant(
                t.direction(),
                ctx.series_order() as usize,
                Element::zero(ctx),
            );
            for k in (i + 1)..=j {
                let head = if k == j {
                    one(())
                } else {
                    f_prime[&(j as u32, k as u32)].clone()
                };
                acc = acc.sub(&head.mul(&f[&(k as u32, i as u32)])?)?;
            }
            f_prime.insert((j as u32, i as u32), acc);
        }
    }

    let t_inv = t.inverse()?;

    Ok(GaussData {
        ctx,
        sign,
        t,
        t_inv,
        d,
        d_inv,
        e,
        f,
        e_prime,
        f_prime,
    })
}

impl GaussData {
    pub fn context(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Matrix size `m + n`.
    pub fn size(&self) -> u32 {
        self.ctx.size()
    }

    /// The decomposed generator matrix.
    pub fn t_matrix(&self) -> &SuperMatrix {
        &self.t
    }

    /// Its inverse; the entries are the primed series of the inverse-side
    /// expansions.
    pub fn t_inverse(&self) -> &SuperMatrix {
        &self.t_inv
    }

    fn check_index(&self, i: u32) -> Result<()> {
        if i < 1 || i > self.size() {
            return Err(Error::IndexOutOfRange {
                index: i as usize,
                size: self.size() as usize,
            });
        }
        Ok(())
    }

    /// Diagonal series `d_i`, `i = 1..=m+n`.
    pub fn d(&self, i: u32) -> Result<&TruncSeries<Element>> {
        self.check_index(i)?;
        Ok(&self.d[i as usize - 1])
    }

    /// Inverse diagonal series `d_i^{-1}`.
    pub fn d_inv(&self, i: u32) -> Result<&TruncSeries<Element>> {
        self.check_index(i)?;
        Ok(&self.d_inv[i as usize - 1])
    }

    /// Upper factor entry `e_ij`, requiring `i < j`; the first index is
    /// reported when the pair is not strictly increasing.
    pub fn e(&self, i: u32, j: u32) -> Result<&TruncSeries<Element>> {
        self.check_index(i)?;
        self.check_index(j)?;
        self.e.get(&(i, j)).ok_or(Error::IndexOutOfRange {
            index: i as usize,
            size: self.size() as usize,
        })
    }

    /// Lower factor entry `f_ji`, requiring `j > i`; the first index is
    /// reported when the pair is not strictly decreasing.
    pub fn f(&self, j: u32, i: u32) -> Result<&TruncSeries<Element>> {
        self.check_index(j)?;
        self.check_index(i)?;
        self.f.get(&(j, i)).ok_or(Error::IndexOutOfRange {
            index: j as usize,
            size: self.size() as usize,
        })
    }

    /// Inverse-side path sum `e'_ij`, requiring `i < j`.
    pub fn e_prime(&self, i: u32, j: u32) -> Result<&TruncSeries<Element>> {
        self.check_index(i)?;
        self.check_index(j)?;
        self.e_prime.get(&(i, j)).ok_or(Error::IndexOutOfRange {
            index: i as usize,
            size: self.size() as usize,
        })
    }

    /// Inverse-side path sum `f'_ji`, requiring `j > i`.
    pub fn f_prime(&self, j: u32, i: u32) -> Result<&TruncSeries<Element>> {
        self.check_index(j)?;
        self.check_index(i)?;
        self.f_prime.get(&(j, i)).ok_or(Error::IndexOutOfRange {
            index: j as usize,
            size: self.size() as usize,
        })
    }

    /// Simple root series `e_i = e_{i,i+1}`, `i = 1..=m+n-1`.
    pub fn e_simple(&self, i: u32) -> Result<&TruncSeries<Element>> {
        self.e(i, i + 1)
    }

    /// Simple root series `f_i = f_{i+1,i}`, `i = 1..=m+n-1`.
    pub fn f_simple(&self, i: u32) -> Result<&TruncSeries<Element>> {
        self.f(i + 1, i)
    }

    fn triangular_matrix(
        &self,
        entries: &BTreeMap<(u32, u32), TruncSeries<Element>>,
    ) -> Result<SuperMatrix> {
        SuperMatrix::from_fn(self.ctx, self.t.direction(), |r, c| {
            if r == c {
                Ok(TruncSeries::constant(
                    self.t.direction(),
                    self.ctx.series_order() as usize,
                    Element::one(self.ctx),
                ))
            } else if let Some(entry) = entries.get(&(r, c)) {
                Ok(entry.clone())
            } else {
                Ok(TruncSeries::constant(
                    self.t.direction(),
                    self.ctx.series_order() as usize,
                    Element::zero(self.ctx),
                ))
            }
        })
    }

    /// The lower unitriangular factor `F`.
    pub fn f_matrix(&self) -> Result<SuperMatrix> {
        self.triangular_matrix(&self.f)
    }

    /// The diagonal factor `D`.
    pub fn d_matrix(&self) -> Result<SuperMatrix> {
        SuperMatrix::from_fn(self.ctx, self.t.direction(), |r, c| {
            if r == c {
                Ok(self.d[r as usize - 1].clone())
            } else {
                Ok(TruncSeries::constant(
                    self.t.direction(),
                    self.ctx.series_order() as usize,
                    Element::zero(self.ctx),
                ))
            }
        })
    }

    /// The upper unitriangular factor `E`.
    pub fn e_matrix(&self) -> Result<SuperMatrix> {
        self.triangular_matrix(&self.e)
    }

    /// The matrix of `e'` path sums (upper unitriangular).
    pub fn e_prime_matrix(&self) -> Result<SuperMatrix> {
        self.triangular_matrix(&self.e_prime)
    }

    /// The matrix of `f'` path sums (lower unitriangular).
    pub fn f_prime_matrix(&self) -> Result<SuperMatrix> {
        self.triangular_matrix(&self.f_prime)
    }

    fn sign_label(&self) -> &'static str {
        match self.sign {
            Sign::Minus => "minus",
            Sign::Plus => "plus",
        }
    }
}

/// Records a series residue that should vanish, coefficient by coefficient.
/// Literal zero passes immediately; otherwise the coefficient is normalized
/// by the table and the first nonzero normal form becomes the
/// counterexample.
fn series_residue_record(
    table: &RuleTable,
    identity: String,
    reference: &str,
    params: String,
    residue: &TruncSeries<Element>,
) -> Result<Verification> {
    for (k, coeff) in residue.coeffs().iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let normal = table.normalize(coeff)?;
        if !normal.is_zero() {
            return Ok(Verification::from_outcome(
                identity,
                reference,
                params,
                false,
                Some(format!("u-coefficient {k}: {normal}")),
            ));
        }
    }
    Ok(Verification::from_outcome(
        identity, reference, params, true, None,
    ))
}

/// Records that every series coefficient in the given list is divisible
/// by h (after subtracting the stated constant from coefficient 0).
fn shape_record(
    identity: String,
    params: String,
    series: &TruncSeries<Element>,
    constant: &Element,
) -> Verification {
    for (k, coeff) in series.coeffs().iter().enumerate() {
        let stripped = if k == 0 {
            match coeff.try_sub(constant) {
                Ok(value) => value,
                Err(err) => {
                    return Verification::from_outcome(
                        identity,
                        "gauss-series-shape",
                        params,
                        false,
                        Some(format!("u-coefficient 0: {err}")),
                    )
                }
            }
        } else {
            coeff.clone()
        };
        if !stripped.is_zero() && stripped.h_valuation() == Some(0) {
            return Verification::from_outcome(
                identity,
                "gauss-series-shape",
                params,
                false,
                Some(format!("u-coefficient {k} has an h-free part: {stripped}")),
            );
        }
    }
    Verification::from_outcome(identity, "gauss-series-shape", params, true, None)
}

/// Verifies the factorization and expansion identities carried by one Gauss
/// decomposition:
///
/// * `F D E = T`, entry by entry;
/// * the six entry expansions of `t_ij` and of the inverse entries `t'_ij`
///   through `d`, `e`, `f`, `e'`, `f'`;
/// * the path sums `e'`, `f'` against the unitriangular inverses `E^{-1}`,
///   `F^{-1}`;
/// * the series shapes: `d_i - 1`, `e_ij`, `f_ji` have all coefficients
///   divisible by h, and in the downward case `e_ij`, `f_ji` have zero
///   constant coefficient while `d_i` has constant coefficient exactly 1.
pub fn verify_gauss_identities(g: &GaussData, table: &RuleTable) -> Result<Vec<Verification>> {
    if table.context() != &g.ctx {
        return Err(Error::ContextMismatch {
            left: g.ctx,
            right: *table.context(),
        });
    }
    let mut records = Vec::new();
    let size = g.size();
    let label = g.sign_label();
    let params = format!(
        "shape={}|{}; sign={}; N={}; H={}",
        g.ctx.m(),
        g.ctx.n(),
        label,
        g.ctx.series_order(),
        g.ctx.h_order()
    );

    let product = g.f_matrix()?.mul(&g.d_matrix()?)?.mul(&g.e_matrix()?)?;
    for i in 1..=size as usize {
        for j in 1..=size as usize {
            let residue = product.get(i, j).sub(g.t.get(i, j))?;
            records.push(series_residue_record(
                table,
                format!("gauss-product-{label}-i{i}-j{j}"),
                "gauss-factorization",
                params.clone(),
                &residue,
            )?);
        }
    }

    let eprime_inv = g.e_matrix()?.inverse()?;
    let fprime_inv = g.f_matrix()?.inverse()?;
    for i in 1..=size as usize {
        for j in (i + 1)..=size as usize {
            let residue = g.e_prime_matrix()?.get(i, j).sub(eprime_inv.get(i, j))?;
            records.push(series_residue_record(
                table,
                format!("gauss-path-sum-e-{label}-i{i}-j{j}"),
                "gauss-unitriangular-inverse",
                params.clone(),
                &residue,
            )?);
            let residue = g.f_prime_matrix()?.get(j, i).sub(fprime_inv.get(j, i))?;
            records.push(series_residue_record(
                table,
                format!("gauss-path-sum-f-{label}-j{j}-i{i}"),
                "gauss-unitriangular-inverse",
                params.clone(),
                &residue,
            )?);
        }
    }

    // Entry expansions of T through the factors.
    for i in 1..=size {
        // t_ii = d_i + sum_{k<i} f_ik d_k e_ki
        let mut rhs = g.d(i)?.clone();
        for k in 1..i {
            rhs = rhs.add(&g.f(i, k)?.mul(g.d(k)?)?.mul(g.e(k, i)?)?)?;
        }
        let residue = rhs.sub(g.t.get(i as usize, i as usize))?;
        records.push(series_residue_record(
            table,
            format!("gauss-expansion-{label}-diag-i{i}"),
            "gauss-entry-expansion",
            params.clone(),
            &residue,
        )?);
        for j in (i + 1)..=size {
            // t_ij = d_i e_ij + sum_{k<i} f_ik d_k e_kj
            let mut rhs = g.d(i)?.mul(g.e(i, j)?)?;
            for k in 1..i {
                rhs = rhs.add(&g.f(i, k)?.mul(g.d(k)?)?.mul(g.e(k, j)?)?)?;
            }
            let residue = rhs.sub(g.t.get(i as usize, j as usize))?;
            records.push(series_residue_record(
                table,
                format!("gauss-expansion-{label}-upper-i{i}-j{j}"),
                "gauss-entry-expansion",
                params.clone(),
                &residue,
            )?);
            // t_ji = f_ji d_i + sum_{k<i} f_jk d_k e_ki
            let mut rhs = g.f(j, i)?.mul(g.d(i)?)?;
            for k in 1..i {
                rhs = rhs.add(&g.f(j, k)?.mul(g.d(k)?)?.mul(g.e(k, i)?)?)?;
            }
            let residue = rhs.sub(g.t.get(j as usize, i as usize))?;
            records.push(series_residue_record(
                table,
                format!("gauss-expansion-{label}-lower-j{j}-i{i}"),
                "gauss-entry-expansion",
                params.clone(),
                &residue,
            )?);
        }
    }

    // Entry expansions of the inverse through the factors.
    for i in 1..=size {
        // t'_ii = d_i^{-1} + sum_{k>i} e'_ik d_k^{-1} f'_ki
        let mut rhs = g.d_inv(i)?.clone();
        for k in (i + 1)..=size {
            rhs = rhs.add(&g.e_prime(i, k)?.mul(g.d_inv(k)?)?.mul(g.f_prime(k, i)?)?)?;
        }
        let residue = rhs.sub(g.t_inv.get(i as usize, i as usize))?;
        records.push(series_residue_record(
            table,
            format!("gauss-expansion-{label}-inv-diag-i{i}"),
            "gauss-inverse-entry-expansion",
            params.clone(),
            &residue,
        )?);
        for j in (i + 1)..=size {
            // t'_ij = e'_ij d_j^{-1} + sum_{k>j} e'_ik d_k^{-1} f'_kj
            let mut rhs = g.e_prime(i, j)?.mul(g.d_inv(j)?)?;
            for k in (j + 1)..=size {
                rhs = rhs.add(&g.e_prime(i, k)?.mul(g.d_inv(k)?)?.mul(g.f_prime(k, j)?)?)?;
            }
            let residue = rhs.sub(g.t_inv.get(i as usize, j as usize))?;
            records.push(series_residue_record(
                table,
                format!("gauss-expansion-{label}-inv-upper-i{i}-j{j}"),
                "gauss-inverse-entry-expansion",
                params.clone(),
                &residue,
            )?);
            // t'_ji = d_j^{-1} f'_ji + sum_{k>j} e'_jk d_k^{-1} f'_ki
            let mut rhs = g.d_inv(j)?.mul(g.f_prime(j, i)?)?;
            for k in (j + 1)..=size {
                rhs = rhs.add(&g.e_prime(j, k)?.mul(g.d_inv(k)?)?.mul(g.f_prime(k, i)?)?)?;
            }
            let residue = rhs.sub(g.t_inv.get(j as usize, i as usize))?;
            records.push(series_residue_record(
                table,
                format!("gauss-expansion-{label}-inv-lower-j{j}-i{i}"),
                "gauss-inverse-entry-expansion",
                params.clone(),
                &residue,
            )?);
        }
    }

    // Series shapes.
    let one = Element::one(g.ctx);
    let zero = Element::zero(g.ctx);
    for i in 1..=size {
        records.push(shape_record(
            format!("gauss-shape-{label}-d{i}"),
            params.clone(),
            g.d(i)?,
            &one,
        ));
        if g.sign == Sign::Minus {
            let constant_is_one = g.d(i)?.coeff(0).is_one();
            records.push(Verification::from_outcome(
                format!("gauss-shape-{label}-d{i}-constant"),
                "gauss-series-shape",
                params.clone(),
                constant_is_one,
                Some(format!("constant coefficient: {}", g.d(i)?.coeff(0))),
            ));
        }
        for j in (i + 1)..=size {
            records.push(shape_record(
                format!("gauss-shape-{label}-e{i}-{j}"),
                params.clone(),
                g.e(i, j)?,
                &zero,
            ));
            records.push(shape_record(
                format!("gauss-shape-{label}-f{j}-{i}"),
                params.clone(),
                g.f(j, i)?,
                &zero,
            ));
            if g.sign == Sign::Minus {
                let both_zero = g.e(i, j)?.coeff(0).is_zero() && g.f(j, i)?.coeff(0).is_zero();
                records.push(Verification::from_outcome(
                    format!("gauss-shape-{label}-ef{i}-{j}-constant"),
                    "gauss-series-shape",
                    params.clone(),
                    both_zero,
                    Some(format!(
                        "constant coefficients: e={}; f={}",
                        g.e(i, j)?.coeff(0),
                        g.f(j, i)?.coeff(0)
                    )),
                ));
            }
        }
    }

    Ok(records)
}

/// Verifies that the diagonal series commute pairwise across both signs:
/// `d_i(u) d_j(v) = d_j(v) d_i(u)` for the sign pairs (minus, minus),
/// (plus, plus), and (minus, plus). These are full series identities, so
/// every coefficient pair `(r, s)` up to the series order is checked; the
/// products are normalized by the rule table.
pub fn verify_d_commute(
    minus: &GaussData,
    plus: &GaussData,
    table: &RuleTable,
) -> Result<Vec<Verification>> {
    if minus.sign != Sign::Minus || plus.sign != Sign::Plus {
        return Err(Error::DirectionMismatch);
    }
    if minus.ctx != plus.ctx {
        return Err(Error::ContextMismatch {
            left: minus.ctx,
            right: plus.ctx,
        });
    }
    if table.context() != &minus.ctx {
        return Err(Error::ContextMismatch {
            left: minus.ctx,
            right: *table.context(),
        });
    }
    let ctx = minus.ctx;
    let size = ctx.size();
    let order = ctx.series_order() as usize;
    let mut records = Vec::new();
    let combos: [(&GaussData, &GaussData, &str, bool); 3] = [
        (minus, minus, "minus-minus", true),
        (plus, plus, "plus-plus", true),
        (minus, plus, "minus-plus", false),
    ];
    for (left, right, label, symmetric) in combos {
        for i in 1..=size {
            for j in 1..=size {
                if symmetric && j < i {
                    continue;
                }
                let mut pass = true;
                let mut counterexample = None;
                'window: for r in 0..=order {
                    for s in 0..=order {
                        let x = left.d(i)?.coeff(r);
                        let y = right.d(j)?.coeff(s);
                        let residue = x.try_mul(y)?.try_sub(&y.try_mul(x)?)?;
                        if residue.is_zero() {
                            continue;
                        }
                        let normal = table.normalize(&residue)?;
                        if !normal.is_zero() {
                            pass = false;
                            counterexample =
                                Some(format!("coefficient pair (r={r}, s={s}): {normal}"));
                            break 'window;
                        }
                    }
                }
                records.push(Verification::from_outcome(
                    format!("d-commute-{label}-i{i}-j{j}"),
                    "diagonal-series-commute",
                    format!(
                        "shape={}|{}; N={}; H={}; window r,s=0..={}",
                        ctx.m(),
                        ctx.n(),
                        ctx.series_order(),
                        ctx.h_order(),
                        order
                    ),
                    pass,
                    counterexample,
                ));
            }
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::quasidet;
    use crate::verify::all_pass;

    fn ctx(m: u32, n: u32, order: u32, h_order: u32) -> AlgebraContext {
        AlgebraContext::new(m, n, order, h_order).expect("valid context")
    }

    /// Independent elimination oracle: recursive rank-1 Schur updates on a
    /// plain grid of series, never touching quasideterminants or matrix
    /// inverses. Produces the same `d`, `e`, `f` by uniqueness of the
    /// unitriangular-diagonal factorization.
    fn schur_eliminate(
        grid: Vec<Vec<TruncSeries<Element>>>,
        offset: u32,
        d: &mut Vec<TruncSeries<Element>>,
        e: &mut BTreeMap<(u32, u32), TruncSeries<Element>>,
        f: &mut BTreeMap<(u32, u32), TruncSeries<Element>>,
    ) -> Result<()> {
        let n = grid.len();
        if n == 0 {
            return Ok(());
        }
        let pivot = grid[0][0].clone();
        let pivot_inv = pivot.invert()?;
        for (c, entry) in grid[0].iter().enumerate().skip(1) {
            e.insert((offset + 1, offset + 1 + c as u32), pivot_inv.mul(entry)?);
        }
        for (r, row) in grid.iter().enumerate().skip(1) {
            f.insert((offset + 1 + r as u32, offset + 1), row[0].mul(&pivot_inv)?);
        }
        d.push(pivot);
        let mut schur = Vec::with_capacity(n - 1);
        for r in 1..n {
            let mut row = Vec::with_capacity(n - 1);
            for c in 1..n {
                let update = grid[r][0].mul(&pivot_inv)?.mul(&grid[0][c])?;
                row.push(grid[r][c].sub(&update)?);
            }
            schur.push(row);
        }
        schur_eliminate(schur, offset + 1, d, e, f)
    }

    fn assert_series_eq(left: &TruncSeries<Element>, right: &TruncSeries<Element>, what: &str) {
        let diff = left.sub(right).expect("same context");
        assert!(diff.is_zero(), "{what} differs: {diff}");
    }

    #[test]
    fn elimination_oracle_matches_quasideterminant_path() {
        for (m, n) in [(1, 1), (2, 1)] {
            for sign in [Sign::Minus, Sign::Plus] {
                let ctx = ctx(m, n, 2, 2);
                let g = gauss_decompose(ctx, sign).expect("decomposition");
                let size = ctx.size() as usize;
                let t = g.t_matrix();
                let grid: Vec<Vec<TruncSeries<Element>>> = (1..=size)
                    .map(|r| (1..=size).map(|c| t.get(r, c).clone()).collect())
                    .collect();
                let mut d = Vec::new();
                let mut e = BTreeMap::new();
                let mut f = BTreeMap::new();
                schur_eliminate(grid, 0, &mut d, &mut e, &mut f).expect("elimination");
                for i in 1..=size as u32 {
                    assert_series_eq(g.d(i).unwrap(), &d[i as usize - 1], "d");
                    for j in (i + 1)..=size as u32 {
                        assert_series_eq(g.e(i, j).unwrap(), &e[&(i, j)], "e");
                        assert_series_eq(g.f(j, i).unwrap(), &f[&(j, i)], "f");
                    }
                }
            }
        }
    }

    #[test]
    fn direct_quasideterminants_match_memoized_corners() {
        let ctx = ctx(2, 1, 2, 2);
        for sign in [Sign::Minus, Sign::Plus] {
            let g = gauss_decompose(ctx, sign).expect("decomposition");
            let t = g.t_matrix();
            for i in 1..=3usize {
                let corner: Vec<usize> = (1..=i).collect();
                let direct = quasidet(&t.submatrix(&corner, &corner).unwrap(), i, i).unwrap();
                assert_series_eq(g.d(i as u32).unwrap(), &direct, "d via quasidet");
                for j in (i + 1)..=3usize {
                    let mut rows: Vec<usize> = (1..i).collect();
                    rows.push(j);
                    let cols: Vec<usize> = (1..=i).collect();
                    let numerator = quasidet(&t.submatrix(&rows, &cols).unwrap(), i, i).unwrap();
                    let f_direct = numerator.mul(g.d_inv(i as u32).unwrap()).unwrap();
                    assert_series_eq(
                        g.f(j as u32, i as u32).unwrap(),
                        &f_direct,
                        "f via quasidet",
                    );
                    let rows: Vec<usize> = (1..=i).collect();
                    let mut cols: Vec<usize> = (1..i).collect();
                    cols.push(j);
                    let numerator = quasidet(&t.submatrix(&rows, &cols).unwrap(), i, i).unwrap();
                    let e_direct = g.d_inv(i as u32).unwrap().mul(&numerator).unwrap();
                    assert_series_eq(
                        g.e(i as u32, j as u32).unwrap(),
                        &e_direct,
                        "e via quasidet",
                    );
                }
            }
        }
    }

    #[test]
    fn factorization_and_expansions_verify() {
        for (m, n) in [(1, 1), (2, 1)] {
            let ctx = ctx(m, n, 2, 2);
            let table = RuleTable::new(ctx);
            for sign in [Sign::Minus, Sign::Plus] {
                let g = gauss_decompose(ctx, sign).expect("decomposition");
                let records = verify_gauss_identities(&g, &table).expect("verification");
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
    }

    #[test]
    fn diagonal_series_commute_in_every_sign_combination() {
        let ctx = ctx(1, 1, 2, 3);
        let table = RuleTable::new(ctx);
        let minus = gauss_decompose(ctx, Sign::Minus).expect("minus decomposition");
        let plus = gauss_decompose(ctx, Sign::Plus).expect("plus decomposition");
        let records = verify_d_commute(&minus, &plus, &table).expect("verification");
        // 3 symmetric pairs for each same-sign combo, 4 ordered pairs mixed.
        assert_eq!(records.len(), 3 + 3 + 4);
        for record in &records {
            assert!(
                record.pass,
                "{} failed: {:?}",
                record.identity, record.counterexample
            );
        }
        assert!(all_pass(&records));
    }

    #[test]
    fn accessors_reject_out_of_range_and_misordered_indices() {
        let ctx = ctx(1, 1, 1, 1);
        let g = gauss_decompose(ctx, Sign::Minus).expect("decomposition");
        assert!(matches!(g.d(0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(g.d(3), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(g.e(2, 1), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(g.e(1, 1), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(g.f(1, 2), Err(Error::IndexOutOfRange { .. })));
        assert!(g.e_simple(1).is_ok());
        assert!(g.f_simple(1).is_ok());
        assert!(g.e_simple(2).is_err());
    }

    #[test]
    fn simple_root_series_match_matrix_entries() {
        let ctx = ctx(2, 1, 2, 2);
        let g = gauss_decompose(ctx, Sign::Plus).expect("decomposition");
        let e_mat = g.e_matrix().unwrap();
        let f_mat = g.f_matrix().unwrap();
        for i in 1..=2u32 {
            assert_series_eq(
                g.e_simple(i).unwrap(),
                e_mat.get(i as usize, i as usize + 1),
                "e matrix entry",
            );
            assert_series_eq(
                g.f_simple(i).unwrap(),
                f_mat.get(i as usize + 1, i as usize),
                "f matrix entry",
            );
        }
        assert!(e_mat.get(2, 1).is_zero());
        assert!(f_mat.get(1, 2).is_zero());
    }
}
