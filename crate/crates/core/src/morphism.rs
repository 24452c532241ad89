//! Algebra morphisms between double-Yangian instances: the antidiagonal
//! relabeling `rho` (gl(m|n) to gl(n|m)), the inverse-matrix involution
//! `omega`, the corner inclusion `iota` (gl(m|n) into gl(m+k|n)), and the
//! composites `zeta = rho . omega` and `psi = omega . iota . omega`.
//!
//! Every morphism is stored as a finite table of generator images and
//! applied by free substitution, term by term; substitution is an
//! h-linear ring homomorphism of the free truncated algebra, so identities
//! between matrices of images (inverses, products) hold literally.
//!
//! The image tables are exact at the working h-order: wherever a
//! construction divides by h (the `omega` images), the division is carried
//! out at an elevated h-order and re-truncated, so no top-layer information
//! is lost. The available level windows are bounded by the series order:
//! `omega`-based morphisms have images for downward levels `1..=N` and
//! upward levels `1..=N+1`; the relabelings cover every level up to the cap.

use std::collections::BTreeMap;

use crate::context::AlgebraContext;
use crate::element::{Element, Generator, Sign};
use crate::error::{Error, Result};
use crate::gauss::gauss_decompose;
use crate::matrix::{quasidet, SuperMatrix};
use crate::rtt::{generator_matrix, two_leg_expand, Family, RuleTable};
use crate::series::TruncSeries;
use crate::verify::Verification;

/// Which of the five standard maps a [`Morphism`] table implements.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum MorphismKind {
    /// Antidiagonal flip with alternating level signs; gl(m|n) to gl(n|m).
    Rho,
    /// Entrywise `T(u)` to `T(-u)^{-1}`; an involution of gl(m|n).
    Omega,
    /// Index shift into the bottom-right corner; gl(m|n) into gl(m+k|n).
    Iota,
    /// `rho . omega`; gl(m|n) to gl(n|m).
    Zeta,
    /// `omega . iota . omega`; gl(m|n) into gl(m+k|n).
    Psi,
}

impl MorphismKind {
    pub fn label(&self) -> &'static str {
        match self {
            MorphismKind::Rho => "rho",
            MorphismKind::Omega => "omega",
            MorphismKind::Iota => "iota",
            MorphismKind::Zeta => "zeta",
            MorphismKind::Psi => "psi",
        }
    }
}

/// A morphism as a finite substitution table: one target element per source
/// generator in the available level window.
#[derive(Clone)]
pub struct Morphism {
    kind: MorphismKind,
    source: AlgebraContext,
    target: AlgebraContext,
    images: BTreeMap<Generator, Element>,
}

impl Morphism {
    pub fn kind(&self) -> MorphismKind {
        self.kind
    }

    pub fn source(&self) -> &AlgebraContext {
        &self.source
    }

    pub fn target(&self) -> &AlgebraContext {
        &self.target
    }

    /// The image of one source generator, if it lies in the available
    /// window.
    pub fn image(&self, g: Generator) -> Result<&Element> {
        self.images.get(&g).ok_or_else(|| self.window_error(g))
    }

    fn window_error(&self, g: Generator) -> Error {
        let cap = self
            .images
            .keys()
            .filter(|k| k.sign() == g.sign())
            .map(Generator::level)
            .max()
            .unwrap_or(0);
        Error::LevelOutOfRange {
            level: g.level(),
            cap,
        }
    }

    /// Applies the morphism to an element of the source algebra by free
    /// substitution: every generator of every word is replaced by its image
    /// and the results multiplied in order. Fails if the element mentions a
    /// generator outside the image window.
    pub fn apply(&self, x: &Element) -> Result<Element> {
        if *x.context() != self.source {
            return Err(Error::ContextMismatch {
                left: *x.context(),
                right: self.source,
            });
        }
        let mut out = Element::zero(self.target);
        for term in x.terms() {
            let mut acc =
                Element::from_term(self.target, term.hpow, Box::from([]), term.coeff.clone());
            for g in term.word {
                let img = self.images.get(g).ok_or_else(|| self.window_error(*g))?;
                acc = acc.try_mul(img)?;
            }
            out = out.try_add(&acc)?;
        }
        Ok(out)
    }

    /// Applies the morphism to every coefficient of a series.
    pub fn apply_series(&self, s: &TruncSeries<Element>) -> Result<TruncSeries<Element>> {
        s.map(|coeff| self.apply(coeff))
    }
}

/// Substitutes `-u` for the series variable: coefficient `k` is scaled by
/// `(-1)^k` in both directions (`u^{-k}` downward, `u^k` upward).
fn negate_variable(s: &TruncSeries<Element>) -> Result<TruncSeries<Element>> {
    TruncSeries::from_coeffs(
        s.direction(),
        s.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k % 2 == 1 {
                    c.scale_int(-1)
                } else {
                    c.clone()
                }
            })
            .collect(),
    )
}

fn negate_matrix(t: &SuperMatrix) -> Result<SuperMatrix> {
    SuperMatrix::from_fn(*t.context(), t.direction(), |i, j| {
        negate_variable(t.get(i as usize, j as usize))
    })
}

/// Builds the antidiagonal relabeling gl(m|n) to gl(n|m):
/// `t_ij(u)` of either sign maps to `t_{i'j'}(-u)` with `i' = m+n+1-i`,
/// which on coefficients reads `(-1)^r` at downward level `r` and
/// `(-1)^{r-1}` at upward level `r`. Images cover every level up to the cap.
pub fn build_rho(ctx: AlgebraContext) -> Result<Morphism> {
    let target = AlgebraContext::with_level_cap(
        ctx.n(),
        ctx.m(),
        ctx.series_order(),
        ctx.h_order(),
        ctx.level_cap(),
    )?;
    let size = ctx.size();
    let mut images = BTreeMap::new();
    for sign in [Sign::Minus, Sign::Plus] {
        for level in 1..=ctx.level_cap() {
            for i in 1..=size {
                for j in 1..=size {
                    let g = Generator::new(&ctx, sign, level, i, j)?;
                    let exponent = match sign {
                        Sign::Minus => level,
                        Sign::Plus => level + 1,
                    };
                    let factor = if exponent % 2 == 1 { -1 } else { 1 };
                    let img = Element::generator(target, sign, level, size + 1 - i, size + 1 - j)?
                        .scale_int(factor);
                    images.insert(g, img);
                }
            }
        }
    }
    Ok(Morphism {
        kind: MorphismKind::Rho,
        source: ctx,
        target,
        images,
    })
}

/// Builds the corner inclusion gl(m|n) into gl(m+k|n):
/// `t_ij` of either sign and level maps to `t_{i+k, j+k}` unchanged. Images
/// cover every level up to the cap; index parities are preserved.
pub fn build_iota(ctx: AlgebraContext, k: u32) -> Result<Morphism> {
    let target = AlgebraContext::with_level_cap(
        ctx.m() + k,
        ctx.n(),
        ctx.series_order(),
        ctx.h_order(),
        ctx.level_cap(),
    )?;
    let size = ctx.size();
    let mut images = BTreeMap::new();
    for sign in [Sign::Minus, Sign::Plus] {
        for level in 1..=ctx.level_cap() {
            for i in 1..=size {
                for j in 1..=size {
                    let g = Generator::new(&ctx, sign, level, i, j)?;
                    let img = Element::generator(target, sign, level, i + k, j + k)?;
                    images.insert(g, img);
                }
            }
        }
    }
    Ok(Morphism {
        kind: MorphismKind::Iota,
        source: ctx,
        target,
        images,
    })
}

/// Builds the involution sending `T^{pm}(u)` to `T^{pm}(-u)^{-1}`
/// entrywise.
///
/// The generator series are inverted at an h-order elevated by one so the
/// division by h in the coefficient extraction is exact at the working
/// order. Downward images exist for levels `1..=N`, upward for `1..=N+1`:
/// an upward level-`r` generator sits in series coefficient `r-1`, so the
/// inverse series of order `N` determines one extra level.
pub fn build_omega(ctx: AlgebraContext) -> Result<Morphism> {
    let lifted = ctx.elevated(1);
    let s_minus = negate_matrix(&generator_matrix(lifted, Sign::Minus)?)?.inverse()?;
    let s_plus = negate_matrix(&generator_matrix(lifted, Sign::Plus)?)?.inverse()?;
    let size = ctx.size();
    let order = ctx.series_order();
    let mut images = BTreeMap::new();
    for i in 1..=size {
        for j in 1..=size {
            for r in 1..=order {
                let g = Generator::new(&ctx, Sign::Minus, r, i, j)?;
                // downward series: entry = delta + h * sum_r (image) u^{-r}
                let img = s_minus
                    .get(i as usize, j as usize)
                    .coeff(r as usize)
                    .div_h_exact(1)?
                    .into_context(ctx)?;
                images.insert(g, img);
            }
            for r in 1..=order + 1 {
                let g = Generator::new(&ctx, Sign::Plus, r, i, j)?;
                // upward series: entry = delta - h * sum_r (image) u^{r-1}
                let mut numerator = s_plus
                    .get(i as usize, j as usize)
                    .coeff(r as usize - 1)
                    .scale_int(-1);
                if r == 1 && i == j {
                    numerator = numerator.try_add(&Element::one(lifted))?;
                }
                images.insert(g, numerator.div_h_exact(1)?.into_context(ctx)?);
            }
        }
    }
    Ok(Morphism {
        kind: MorphismKind::Omega,
        source: ctx,
        target: ctx,
        images,
    })
}

/// Builds `zeta = rho . omega`, gl(m|n) to gl(n|m).
pub fn build_zeta(ctx: AlgebraContext) -> Result<Morphism> {
    let omega = build_omega(ctx)?;
    let rho = build_rho(ctx)?;
    let mut images = BTreeMap::new();
    for (g, img) in &omega.images {
        images.insert(*g, rho.apply(img)?);
    }
    Ok(Morphism {
        kind: MorphismKind::Zeta,
        source: ctx,
        target: rho.target,
        images,
    })
}

/// Builds `psi = omega . iota . omega`, gl(m|n) into gl(m+k|n).
///
/// The whole chain is evaluated at an h-order elevated by one and only the
/// final images are re-truncated, so both internal h-divisions stay exact
/// at the working order.
pub fn build_psi(ctx: AlgebraContext, k: u32) -> Result<Morphism> {
    let lifted = ctx.elevated(1);
    let omega_src = build_omega(lifted)?;
    let iota = build_iota(lifted, k)?;
    let omega_tgt = build_omega(iota.target)?;
    let target = AlgebraContext::with_level_cap(
        ctx.m() + k,
        ctx.n(),
        ctx.series_order(),
        ctx.h_order(),
        ctx.level_cap(),
    )?;
    let mut images = BTreeMap::new();
    for (g, img) in &omega_src.images {
        let chained = omega_tgt.apply(&iota.apply(img)?)?;
        images.insert(*g, chained.into_context(target)?);
    }
    Ok(Morphism {
        kind: MorphismKind::Psi,
        source: ctx,
        target,
        images,
    })
}

/// Records one series residue in the target algebra, normalizing each
/// nonzero coefficient through the table.
fn series_residue_record(
    table: &RuleTable,
    identity: String,
    reference: &str,
    params: String,
    residue: &TruncSeries<Element>,
) -> Result<Verification> {
    for (idx, coeff) in residue.coeffs().iter().enumerate() {
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
                Some(format!("u-coefficient {idx}: {normal}")),
            ));
        }
    }
    Ok(Verification::from_outcome(
        identity, reference, params, true, None,
    ))
}

fn sign_label(sign: Sign) -> &'static str {
    match sign {
        Sign::Minus => "minus",
        Sign::Plus => "plus",
    }
}

/// Verifies the Gauss-series images of `zeta`: with `s = m+n`,
///
/// * `zeta(f_i(u)) = -e_{s-i}(u)`,
/// * `zeta(e_i(u)) = -f_{s-i}(u)`,
/// * `zeta(d_j(u)) = d_{s-j+1}(u)^{-1}`,
///
/// for both signs, all residues normalized in the target algebra gl(n|m).
/// `table_target` must belong to the target context.
pub fn verify_zeta_images(
    ctx: AlgebraContext,
    table_target: &RuleTable,
) -> Result<Vec<Verification>> {
    let zeta = build_zeta(ctx)?;
    if table_target.context() != &zeta.target {
        return Err(Error::ContextMismatch {
            left: zeta.target,
            right: *table_target.context(),
        });
    }
    let size = ctx.size();
    let params = format!(
        "shape={}|{} -> {}|{}; N={}; H={}",
        ctx.m(),
        ctx.n(),
        ctx.n(),
        ctx.m(),
        ctx.series_order(),
        ctx.h_order()
    );
    let mut records = Vec::new();
    for sign in [Sign::Minus, Sign::Plus] {
        let src = gauss_decompose(ctx, sign)?;
        let tgt = gauss_decompose(zeta.target, sign)?;
        let label = sign_label(sign);
        for i in 1..size {
            let mapped_f = zeta.apply_series(src.f_simple(i)?)?;
            let residue = mapped_f.add(tgt.e_simple(size - i)?)?;
            records.push(series_residue_record(
                table_target,
                format!("zeta-f-{label}-i{i}"),
                "zeta-gauss-images",
                params.clone(),
                &residue,
            )?);
            let mapped_e = zeta.apply_series(src.e_simple(i)?)?;
            let residue = mapped_e.add(tgt.f_simple(size - i)?)?;
            records.push(series_residue_record(
                table_target,
                format!("zeta-e-{label}-i{i}"),
                "zeta-gauss-images",
                params.clone(),
                &residue,
            )?);
        }
        for j in 1..=size {
            let mapped_d = zeta.apply_series(src.d(j)?)?;
            let residue = mapped_d.sub(tgt.d_inv(size - j + 1)?)?;
            records.push(series_residue_record(
                table_target,
                format!("zeta-d-{label}-j{j}"),
                "zeta-gauss-images",
                params.clone(),
                &residue,
            )?);
        }
    }
    Ok(records)
}

/// Verifies the Gauss-series images of `psi = omega . iota . omega` into
/// gl(m+k|n):
///
/// * `psi(f_i(u)) = f_{k+i}(u)`, `psi(e_i(u)) = e_{k+i}(u)`,
///   `psi(d_j(u)) = d_{k+j}(u)`;
/// * the bordered-corner expansion: `psi(t_pq(u))` equals the
///   quasideterminant of the `(k+1) x (k+1)` submatrix of the target
///   generator matrix on rows `1..k, k+p` and columns `1..k, k+q`, boxed at
///   the corner;
/// * for `k = 1`: `psi(e_ij^+(u)) = e_{i+1, j+1}^+(u)` for all `i < j`.
///
/// `table_target` must belong to the target context gl(m+k|n).
pub fn verify_psi_images(
    ctx: AlgebraContext,
    k: u32,
    table_target: &RuleTable,
) -> Result<Vec<Verification>> {
    let psi = build_psi(ctx, k)?;
    if table_target.context() != &psi.target {
        return Err(Error::ContextMismatch {
            left: psi.target,
            right: *table_target.context(),
        });
    }
    let size = ctx.size();
    let params = format!(
        "shape={}|{} -> {}|{}; k={}; N={}; H={}",
        ctx.m(),
        ctx.n(),
        ctx.m() + k,
        ctx.n(),
        k,
        ctx.series_order(),
        ctx.h_order()
    );
    let mut records = Vec::new();
    for sign in [Sign::Minus, Sign::Plus] {
        let src = gauss_decompose(ctx, sign)?;
        let tgt = gauss_decompose(psi.target, sign)?;
        let label = sign_label(sign);
        for i in 1..size {
            let residue = psi
                .apply_series(src.f_simple(i)?)?
                .sub(tgt.f_simple(k + i)?)?;
            records.push(series_residue_record(
                table_target,
                format!("psi-f-{label}-i{i}"),
                "psi-gauss-images",
                params.clone(),
                &residue,
            )?);
            let residue = psi
                .apply_series(src.e_simple(i)?)?
                .sub(tgt.e_simple(k + i)?)?;
            records.push(series_residue_record(
                table_target,
                format!("psi-e-{label}-i{i}"),
                "psi-gauss-images",
                params.clone(),
                &residue,
            )?);
        }
        for j in 1..=size {
            let residue = psi.apply_series(src.d(j)?)?.sub(tgt.d(k + j)?)?;
            records.push(series_residue_record(
                table_target,
                format!("psi-d-{label}-j{j}"),
                "psi-gauss-images",
                params.clone(),
                &residue,
            )?);
        }

        // Bordered-corner expansion of whole-entry images.
        let t_src = generator_matrix(ctx, sign)?;
        let t_tgt = generator_matrix(psi.target, sign)?;
        for p in 1..=size {
            for q in 1..=size {
                let mut rows: Vec<usize> = (1..=k as usize).collect();
                rows.push((k + p) as usize);
                let mut cols: Vec<usize> = (1..=k as usize).collect();
                cols.push((k + q) as usize);
                let bordered = t_tgt.submatrix(&rows, &cols)?;
                let expansion = quasidet(&bordered, k as usize + 1, k as usize + 1)?;
                let mapped = psi.apply_series(t_src.get(p as usize, q as usize))?;
                let residue = mapped.sub(&expansion)?;
                records.push(series_residue_record(
                    table_target,
                    format!("psi-entry-{label}-p{p}-q{q}"),
                    "psi-bordered-quasideterminant",
                    params.clone(),
                    &residue,
                )?);
            }
        }

        if k == 1 && sign == Sign::Plus {
            for i in 1..=size {
                for j in (i + 1)..=size {
                    let residue = psi.apply_series(src.e(i, j)?)?.sub(tgt.e(i + 1, j + 1)?)?;
                    records.push(series_residue_record(
                        table_target,
                        format!("psi-corner-shift-e-plus-i{i}-j{j}"),
                        "psi-upper-entry-shift",
                        params.clone(),
                        &residue,
                    )?);
                }
            }
        }
    }
    Ok(records)
}

/// Verifies that a morphism maps the defining relations into the relation
/// ideal of its target: every entry of every in-window relation residue
/// normalizes to zero in the target after substitution.
///
/// The `(r, s)` windows are the largest for which all generators mentioned
/// by the residue have images: with series order `N`, the two-downward
/// family needs `r + s <= N - 1`, the mixed family `r <= N - 1, s <= N`,
/// and the two-upward family `r, s <= N`.
pub fn verify_relation_preservation(
    morphism: &Morphism,
    table_target: &RuleTable,
) -> Result<Vec<Verification>> {
    if table_target.context() != &morphism.target {
        return Err(Error::ContextMismatch {
            left: morphism.target,
            right: *table_target.context(),
        });
    }
    let ctx = morphism.source;
    let order = ctx.series_order();
    let label = morphism.kind.label();
    let params = format!(
        "shape={}|{}; N={}; H={}",
        ctx.m(),
        ctx.n(),
        ctx.series_order(),
        ctx.h_order()
    );
    let mut instances: Vec<(Family, u32, u32)> = Vec::new();
    for r in 0..=order {
        for s in 0..=order {
            if r + s < order {
                instances.push((Family::MinusMinus, r, s));
            }
            if r < order {
                instances.push((Family::Mixed, r, s));
            }
            instances.push((Family::PlusPlus, r, s));
        }
    }
    let mut records = Vec::new();
    for (family, r, s) in instances {
        let residue = two_leg_expand(ctx, family, r, s)?;
        let mut pass = true;
        let mut counterexample = None;
        for (key, entry) in residue.entries() {
            let mapped = morphism.apply(entry)?;
            if mapped.is_zero() {
                continue;
            }
            let normal = table_target.normalize(&mapped)?;
            if !normal.is_zero() {
                pass = false;
                counterexample = Some(format!(
                    "entry ({}, {}, {}, {}): {normal}",
                    key.0, key.1, key.2, key.3
                ));
                break;
            }
        }
        records.push(Verification::from_outcome(
            format!("morphism-relations-{label}-{:?}-r{r}-s{s}", family),
            "morphism-relation-preservation",
            params.clone(),
            pass,
            counterexample,
        ));
    }
    Ok(records)
}

/// Verifies the literal round trips: `omega . omega = id`,
/// `rho_{n|m} . rho_{m|n} = id`, and `zeta_{n|m} . zeta_{m|n} = id` on every
/// generator in the window. These composites are free-rational identities,
/// so the residues must vanish without normalization.
pub fn verify_round_trips(ctx: AlgebraContext) -> Result<Vec<Verification>> {
    let params = format!(
        "shape={}|{}; N={}; H={}",
        ctx.m(),
        ctx.n(),
        ctx.series_order(),
        ctx.h_order()
    );
    let mut records = Vec::new();
    let order = ctx.series_order();
    let size = ctx.size();

    let omega = build_omega(ctx)?;
    let rho = build_rho(ctx)?;
    let rho_back = build_rho(rho.target)?;
    let zeta = build_zeta(ctx)?;
    let zeta_back = build_zeta(zeta.target)?;
    if *zeta_back.target() != ctx || *rho_back.target() != ctx {
        return Err(Error::ContextMismatch {
            left: ctx,
            right: *zeta_back.target(),
        });
    }

    for sign in [Sign::Minus, Sign::Plus] {
        let max_level = match sign {
            Sign::Minus => order,
            Sign::Plus => order + 1,
        };
        let label = sign_label(sign);
        for level in 1..=max_level {
            for i in 1..=size {
                for j in 1..=size {
                    let g = Element::generator(ctx, sign, level, i, j)?;
                    let residue = omega.apply(&omega.apply(&g)?)?.try_sub(&g)?;
                    records.push(Verification::from_residue(
                        format!("round-trip-omega-{label}-r{level}-i{i}-j{j}"),
                        "morphism-involution",
                        params.clone(),
                        &residue,
                    ));
                    let residue = rho_back.apply(&rho.apply(&g)?)?.try_sub(&g)?;
                    records.push(Verification::from_residue(
                        format!("round-trip-rho-{label}-r{level}-i{i}-j{j}"),
                        "morphism-involution",
                        params.clone(),
                        &residue,
                    ));
                    let residue = zeta_back.apply(&zeta.apply(&g)?)?.try_sub(&g)?;
                    records.push(Verification::from_residue(
                        format!("round-trip-zeta-{label}-r{level}-i{i}-j{j}"),
                        "morphism-involution",
                        params.clone(),
                        &residue,
                    ));
                }
            }
        }
    }
    Ok(records)
}
