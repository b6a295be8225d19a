//! The identity registry: one entry per verifiable identity, each binding an
//! id to left/right side builders for both backends, default parameters and
//! a default truncation order.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Instant;

use num::complex::Complex64;

use crate::backend::{Backend, ExactBackend, FactorProduct, NumericBackend, SumFactor};
use crate::error::{Error, Result};
use crate::qseries::{Coefficient, QMonomial, QSeries};
use crate::wppairs::{
    catalog_derived, catalog_pair, pair_alpha_summand, pair_beta_summand, DerivedId, PairId,
    PairPars, Summand,
};

use super::defs::{
    derived_pair_sum, f1, f2_closed, f2_from_pair, f_blocks, psi_sum, rational_product_rhs,
    separation_rhs, F1Variant,
};

/// Named parameters of a verification run: exact monomials plus an optional
/// pair token for the entries built on a WP-Bailey pair.
#[derive(Clone, Debug, Default)]
pub struct IdentityParams {
    pub monos: BTreeMap<String, QMonomial>,
    pub pair: Option<String>,
}

impl IdentityParams {
    pub fn with(mut self, name: &str, m: QMonomial) -> Self {
        self.monos.insert(name.to_string(), m);
        self
    }

    pub fn with_pair(mut self, token: &str) -> Self {
        self.pair = Some(token.to_string());
        self
    }

    /// Merge overrides on top of defaults.
    pub fn overridden_by(mut self, other: &IdentityParams) -> Self {
        for (k, v) in &other.monos {
            self.monos.insert(k.clone(), v.clone());
        }
        if other.pair.is_some() {
            self.pair = other.pair.clone();
        }
        self
    }
}

fn par<B: Backend>(p: &IdentityParams, b: &B, name: &str) -> Result<B::Par> {
    p.monos
        .get(name)
        .map(|m| b.par_mono(m))
        .ok_or_else(|| Error::Domain(format!("missing parameter `{name}`")))
}

fn pair_token(p: &IdentityParams) -> Result<&str> {
    p.pair
        .as_deref()
        .ok_or_else(|| Error::Domain("this identity requires a --pair token".into()))
}

/// The pair-based transformation entries accept the two parameter-free
/// catalog pairs; Singh-type pairs carry auxiliary parameters whose role in
/// the inverted/negated slots the sums require is not defined here.
fn simple_pair(p: &IdentityParams) -> Result<PairId> {
    let id = catalog_pair(pair_token(p)?)?;
    match id {
        PairId::Trivial | PairId::Unit => Ok(id),
        other => Err(Error::Domain(format!(
            "this identity supports the trivial and unit pairs, not `{}`",
            other.token()
        ))),
    }
}

fn derived_token(p: &IdentityParams) -> Result<DerivedId> {
    catalog_derived(pair_token(p)?)
}

type RhoPair<B> = (Option<<B as Backend>::Par>, Option<<B as Backend>::Par>);

fn rho_pars<B: Backend>(p: &IdentityParams, b: &B, id: DerivedId) -> Result<RhoPair<B>> {
    match id {
        DerivedId::SinghStar => Ok((Some(par(p, b, "rho1")?), Some(par(p, b, "rho2")?))),
        DerivedId::SinghRho2InfStar => Ok((Some(par(p, b, "rho1")?), None)),
        _ => Ok((None, None)),
    }
}

// ---------------------------------------------------------------------------
// Shared sum shapes for the pair transformation identities
// ---------------------------------------------------------------------------

/// `Σ_{n≥1} (1-k·q^{2bn})(z; q)ₙ (q; q)ₙ₋₁ / ((1-k)(qk, qk/z; q)ₙ) · wⁿ · β_n(a, k)`.
fn wp_beta_sum<B: Backend>(
    b: &B,
    pair: PairId,
    pars: &PairPars<B::Par>,
    z: &B::Par,
    w: &B::Par,
    base: i64,
) -> Result<B::Val> {
    let q1 = b.q_pow(base);
    let k = &pars.k;
    let qk = b.par_mul(&q1, k);
    let qkz = b.par_div(&qk, z)?;
    Summand::new(vec![
        SumFactor::fwd(z.clone(), base, "(z; q)_n"),
        SumFactor::fwd(q1.clone(), base, "(q; q)_{n-1}").with_count(1, -1),
        SumFactor::inv(qk, base, "(qk; q)_n"),
        SumFactor::inv(qkz, base, "(qk/z; q)_n"),
    ])
    .weighted(b, w.clone())
    .times_one_minus(k.clone(), 2 * base)
    .with_constant(b, b.inv_one_minus(k, "1 - k")?)
    .merged(b, pair_beta_summand(pair, b, pars, base)?)
    .sum_from(b, 1)
}

/// `Σ_{n≥1} (z; q)ₙ (q; q)ₙ₋₁ / ((qa, qa/z; q)ₙ) · wⁿ · α_n(a, k)`.
fn wp_alpha_sum<B: Backend>(
    b: &B,
    pair: PairId,
    pars: &PairPars<B::Par>,
    z: &B::Par,
    w: &B::Par,
    base: i64,
) -> Result<B::Val> {
    let q1 = b.q_pow(base);
    let qa = b.par_mul(&q1, &pars.a);
    let qaz = b.par_div(&qa, z)?;
    Summand::new(vec![
        SumFactor::fwd(z.clone(), base, "(z; q)_n"),
        SumFactor::fwd(q1.clone(), base, "(q; q)_{n-1}").with_count(1, -1),
        SumFactor::inv(qa, base, "(qa; q)_n"),
        SumFactor::inv(qaz, base, "(qa/z; q)_n"),
    ])
    .weighted(b, w.clone())
    .merged(b, pair_alpha_summand(pair, b, pars, base)?)
    .sum_from(b, 1)
}

// ---------------------------------------------------------------------------
// Entry side builders
// ---------------------------------------------------------------------------

fn qgauss_lhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let (x, y, c) = (par(p, b, "A")?, par(p, b, "B")?, par(p, b, "C")?);
    let q1 = b.q_pow(1);
    let arg = b.par_div(&c, &b.par_mul(&x, &y))?;
    Summand::new(vec![
        SumFactor::fwd(x.clone(), 1, "(A; q)_n"),
        SumFactor::fwd(y.clone(), 1, "(B; q)_n"),
        SumFactor::inv(c.clone(), 1, "(C; q)_n"),
        SumFactor::inv(q1, 1, "(q; q)_n"),
    ])
    .weighted(b, arg)
    .sum_from(b, 0)
}

fn qgauss_rhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let (x, y, c) = (par(p, b, "A")?, par(p, b, "B")?, par(p, b, "C")?);
    let arg = b.par_div(&c, &b.par_mul(&x, &y))?;
    let mut t = b.mul(&b.poch_inf(&b.par_div(&c, &x)?, 1)?, &b.poch_inf(&b.par_div(&c, &y)?, 1)?);
    t = b.mul(&t, &b.inv_poch_inf(&c, 1, "(C; q)_inf")?);
    Ok(b.mul(&t, &b.inv_poch_inf(&arg, 1, "(C/AB; q)_inf")?))
}

fn eq03_lhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let pair = simple_pair(p)?;
    let (a, k) = (par(p, b, "a")?, par(p, b, "k")?);
    let pars = PairPars::new(a.clone(), k.clone());
    let q1 = b.q_pow(1);
    let ratio = b.par_div(&b.par_mul(&q1, &b.par_mul(&a, &a)), &b.par_mul(&k, &k))?;
    Summand::new(Vec::new())
        .weighted(b, ratio)
        .merged(b, pair_beta_summand(pair, b, &pars, 1)?)
        .sum_from(b, 0)
}

fn eq03_rhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let pair = simple_pair(p)?;
    let (a, k) = (par(p, b, "a")?, par(p, b, "k")?);
    let pars = PairPars::new(a.clone(), k.clone());
    let q1 = b.q_pow(1);
    let a2q = b.par_mul(&q1, &b.par_mul(&a, &a));
    let a2qk = b.par_div(&a2q, &k)?;
    let ratio = b.par_div(&a2q, &b.par_mul(&k, &k))?;
    let mut pref = b.poch_inf(&b.par_div(&b.par_mul(&q1, &a), &k)?, 1)?;
    pref = b.mul(&pref, &b.poch_inf(&a2qk, 1)?);
    pref = b.mul(&pref, &b.inv_poch_inf(&b.par_mul(&q1, &a), 1, "(qa; q)_inf")?);
    pref = b.mul(&pref, &b.inv_poch_inf(&ratio, 1, "(qa^2/k^2; q)_inf")?);
    let sum = Summand::new(vec![
        SumFactor::fwd(k.clone(), 1, "(k; q)_{2n}").with_count(2, 0),
        SumFactor::inv(a2qk, 1, "(qa^2/k; q)_{2n}").with_count(2, 0),
    ])
    .weighted(b, ratio)
    .merged(b, pair_alpha_summand(pair, b, &pars, 1)?)
    .sum_from(b, 0)?;
    Ok(b.mul(&pref, &sum))
}

fn thm1_lhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let pair = simple_pair(p)?;
    let (a, k, z) = (par(p, b, "a")?, par(p, b, "k")?, par(p, b, "z")?);
    let q1 = b.q_pow(1);
    let (ia, ik, iz) = (b.par_inv(&a)?, b.par_inv(&k)?, b.par_inv(&z)?);
    let w_fwd = b.par_div(&b.par_mul(&q1, &a), &z)?; // qa/z
    let w_bwd = b.par_div(&b.par_mul(&q1, &z), &a)?; // qz/a
    let pars = PairPars::new(a.clone(), k.clone());
    let pars_inv = PairPars::new(ia.clone(), ik.clone());
    let s1 = wp_beta_sum(b, pair, &pars, &z, &w_fwd, 1)?;
    let s2 = wp_beta_sum(b, pair, &pars_inv, &iz, &w_bwd, 1)?;
    let s3 = wp_alpha_sum(b, pair, &pars, &z, &w_fwd, 1)?;
    let s4 = wp_alpha_sum(b, pair, &pars_inv, &iz, &w_bwd, 1)?;
    Ok(b.add(&b.sub(&b.sub(&s1, &s2), &s3), &s4))
}

fn thm1_rhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let (a, k, z) = (par(p, b, "a")?, par(p, b, "k")?, par(p, b, "z")?);
    rational_product_rhs(b, &a, &k, &z, 1)
}

fn thm2_lhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let pair = simple_pair(p)?;
    let (a, k, z) = (par(p, b, "a")?, par(p, b, "k")?, par(p, b, "z")?);
    let q1 = b.q_pow(1);
    let w = b.par_div(&b.par_mul(&q1, &a), &z)?;
    let pars = PairPars::new(a.clone(), k.clone());
    let pars_neg = PairPars::new(b.par_neg(&a), b.par_neg(&k));
    let (a2, k2, z2) = (b.par_mul(&a, &a), b.par_mul(&k, &k), b.par_mul(&z, &z));
    let w2 = b.par_mul(&w, &w);
    let pars_sq = PairPars::new(a2, k2);
    let s1 = wp_beta_sum(b, pair, &pars, &z, &w, 1)?;
    let s2 = wp_beta_sum(b, pair, &pars_neg, &z, &b.par_neg(&w), 1)?;
    let s3 = wp_beta_sum(b, pair, &pars_sq, &z2, &w2, 2)?;
    Ok(b.sub(&b.add(&s1, &s2), &b.scale(&s3, &Coefficient::from_int(2))))
}

fn thm2_rhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let pair = simple_pair(p)?;
    let (a, k, z) = (par(p, b, "a")?, par(p, b, "k")?, par(p, b, "z")?);
    let q1 = b.q_pow(1);
    let w = b.par_div(&b.par_mul(&q1, &a), &z)?;
    let pars = PairPars::new(a.clone(), k.clone());
    let pars_neg = PairPars::new(b.par_neg(&a), b.par_neg(&k));
    let (a2, k2, z2) = (b.par_mul(&a, &a), b.par_mul(&k, &k), b.par_mul(&z, &z));
    let w2 = b.par_mul(&w, &w);
    let pars_sq = PairPars::new(a2, k2);
    let s1 = wp_alpha_sum(b, pair, &pars, &z, &w, 1)?;
    let s2 = wp_alpha_sum(b, pair, &pars_neg, &z, &b.par_neg(&w), 1)?;
    let s3 = wp_alpha_sum(b, pair, &pars_sq, &z2, &w2, 2)?;
    Ok(b.sub(&b.add(&s1, &s2), &b.scale(&s3, &Coefficient::from_int(2))))
}

fn thm3_lhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let d = derived_token(p)?;
    let (x, y) = (par(p, b, "a")?, par(p, b, "b")?);
    let (r1, r2) = rho_pars(p, b, d)?;
    // The summation sides at a and b come from the derived pair; at the
    // inverted arguments those series have no formal Laurent expansion for
    // monomial parameters, so the closed Lambert form of f2 stands in.
    let f2a = f2_from_pair(b, d, &x, r1.as_ref(), r2.as_ref(), 1)?;
    let f2b = f2_from_pair(b, d, &y, r1.as_ref(), r2.as_ref(), 1)?;
    let f2ia = f2_closed(b, &b.par_inv(&x)?, 1)?;
    let f2ib = f2_closed(b, &b.par_inv(&y)?, 1)?;
    Ok(b.add(&b.sub(&b.sub(&f2a, &f2b), &f2ia), &f2ib))
}

fn thm3_rhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let (x, y) = (par(p, b, "a")?, par(p, b, "b")?);
    separation_rhs(b, &x, &y, 1)
}

fn eq117_lhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let (a, k, z) = (par(p, b, "a")?, par(p, b, "k")?, par(p, b, "z")?);
    let fwd = f_blocks(b, &a, &k, &z, 1)?;
    let bwd = f_blocks(b, &b.par_inv(&a)?, &b.par_inv(&k)?, &b.par_inv(&z)?, 1)?;
    Ok(b.sub(&fwd, &bwd))
}

fn eq117_rhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let (a, k, z) = (par(p, b, "a")?, par(p, b, "k")?, par(p, b, "z")?);
    rational_product_rhs(b, &a, &k, &z, 1)
}

fn cor1_lhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let a = par(p, b, "a")?;
    f1(b, F1Variant::Lambert, &a, 1)
}

fn cor1_1_rhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let a = par(p, b, "a")?;
    derived_pair_sum(b, DerivedId::SinghRhoInfStar, &a, None, None, 1)
}

fn cor1_2_rhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let a = par(p, b, "a")?;
    derived_pair_sum(b, DerivedId::SqrtKStar, &a, None, None, 1)
}

fn cor2_lhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let (x, y) = (par(p, b, "a")?, par(p, b, "b")?);
    let q1 = b.q_pow(1);
    let first = b.sum(0, &mut |n| {
        let m = 2 * n + 1;
        let mut t = b.embed(&b.q_pow(2 * n * n + 3 * n + 1));
        t = b.mul(&t, &b.inv_one_minus(&b.q_pow(m), "1 - q^(2n+1)")?);
        let mut bracket = b.sub(&b.embed(&b.par_pow(&y, m)?), &b.embed(&b.par_pow(&x, m)?));
        bracket = b.add(&bracket, &b.embed(&b.par_pow(&x, -m)?));
        bracket = b.sub(&bracket, &b.embed(&b.par_pow(&y, -m)?));
        Ok(b.mul(&t, &bracket))
    })?;
    // The eight bracket rows share the shape
    // (1 - t q^{2n}) (t; q)_n / ((1 - t)(q t^2; q)_{2n}) · t^{2n},
    // each tracked by its own incremental factor product.
    let (ix, iy) = (b.par_inv(&x)?, b.par_inv(&y)?);
    let signs: [i64; 8] = [1, -1, -1, 1, -1, 1, 1, -1];
    let args = [
        x.clone(),
        b.par_neg(&x),
        y.clone(),
        b.par_neg(&y),
        ix.clone(),
        b.par_neg(&ix),
        iy.clone(),
        b.par_neg(&iy),
    ];
    let mut rows = Vec::new();
    for t in &args {
        let qt2 = b.par_mul(&q1, &b.par_mul(t, t));
        let fp = FactorProduct::start(
            b,
            vec![
                SumFactor::fwd(t.clone(), 1, "(t; q)_n"),
                SumFactor::inv(qt2, 1, "(q t^2; q)_{2n}").with_count(2, 0),
            ],
            1,
        )?;
        let inv_const = b.inv_one_minus(t, "1 - t (bracket row)")?;
        rows.push((t.clone(), fp, inv_const));
    }
    let outer = FactorProduct::start(
        b,
        vec![
            SumFactor::fwd(q1.clone(), 1, "(q; q)_{2n-1}").with_count(2, -1),
            SumFactor::inv(q1.clone(), 1, "(q; q)_n"),
        ],
        1,
    )?;
    let mut outer = outer;
    let second = b.sum(1, &mut |n| {
        outer.advance_to(b, n)?;
        let mut combined: Option<B::Val> = None;
        for (i, (t, fp, inv_const)) in rows.iter_mut().enumerate() {
            fp.advance_to(b, n)?;
            let mut r = b.mul_one_minus(fp.value(), &b.par_mul(t, &b.q_pow(2 * n)));
            r = b.mul(&r, inv_const);
            r = b.scale_par(&r, &b.par_pow(t, 2 * n)?);
            if signs[i] < 0 {
                r = b.neg(&r);
            }
            combined = Some(match combined.take() {
                Some(acc) => b.add(&acc, &r),
                None => r,
            });
        }
        let sign = if n % 2 == 0 { Coefficient::one() } else { -Coefficient::one() };
        let mut term = b.mul(&combined.expect("eight rows"), outer.value());
        term = b.scale_par(&term, &b.q_pow(n * (n + 1) / 2));
        Ok(b.scale(&term, &sign))
    })?;
    Ok(b.sub(&first, &b.scale(&second, &Coefficient::from_ratio(1, 2))))
}

fn cor2_rhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let (x, y) = (par(p, b, "a")?, par(p, b, "b")?);
    Ok(b.scale(&separation_rhs(b, &x, &y, 1)?, &Coefficient::from_ratio(1, 2)))
}

fn cor3_lhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let (x, y) = (par(p, b, "a")?, par(p, b, "b")?);
    let q1 = b.q_pow(1);
    // Each of the four arguments t contributes
    // ((1/t; q)_n/(qt; q)_n - (-1/t; q)_n/(-qt; q)_n) · t^{2n} qⁿ/(1-qⁿ);
    // the plus and minus ratios are tracked as separate factor products.
    let (ix, iy) = (b.par_inv(&x)?, b.par_inv(&y)?);
    let signs: [i64; 4] = [1, -1, -1, 1];
    let args = [x.clone(), ix, y.clone(), iy];
    let mut rows = Vec::new();
    for t in &args {
        let it = b.par_inv(t)?;
        let qt = b.par_mul(&q1, t);
        let plus = FactorProduct::start(
            b,
            vec![
                SumFactor::fwd(it.clone(), 1, "(1/t; q)_n"),
                SumFactor::inv(qt.clone(), 1, "(qt; q)_n"),
            ],
            1,
        )?;
        let minus = FactorProduct::start(
            b,
            vec![
                SumFactor::fwd(b.par_neg(&it), 1, "(-1/t; q)_n"),
                SumFactor::inv(b.par_neg(&qt), 1, "(-qt; q)_n"),
            ],
            1,
        )?;
        rows.push((t.clone(), plus, minus));
    }
    b.sum(1, &mut |n| {
        let mut combined: Option<B::Val> = None;
        for (i, (t, plus, minus)) in rows.iter_mut().enumerate() {
            plus.advance_to(b, n)?;
            minus.advance_to(b, n)?;
            let mut r = b.sub(plus.value(), minus.value());
            r = b.scale_par(&r, &b.par_mul(&b.par_pow(t, 2 * n)?, &b.q_pow(n)));
            r = b.mul_inv_one_minus(&r, &b.q_pow(n), "1 - q^n")?;
            if signs[i] < 0 {
                r = b.neg(&r);
            }
            combined = Some(match combined.take() {
                Some(acc) => b.add(&acc, &r),
                None => r,
            });
        }
        Ok(combined.expect("four rows"))
    })
}

fn cor3_rhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let (x, y) = (par(p, b, "a")?, par(p, b, "b")?);
    separation_rhs(b, &x, &y, 1)
}

fn theta_lattice_lhs<B: Backend>(_p: &IdentityParams, b: &B) -> Result<B::Val> {
    b.theta_lattice_a()
}

fn one_plus_six<B: Backend>(b: &B, v: B::Val) -> B::Val {
    b.add(&b.one(), &b.scale(&v, &Coefficient::from_int(6)))
}

fn inv_q<B: Backend>(b: &B) -> B::Par {
    b.par_mono(&QMonomial::q_power(-1))
}

fn cor4_1_rhs<B: Backend>(_p: &IdentityParams, b: &B) -> Result<B::Val> {
    Ok(one_plus_six(b, f1(b, F1Variant::QGauss, &inv_q(b), 3)?))
}

fn cor4_2_rhs<B: Backend>(_p: &IdentityParams, b: &B) -> Result<B::Val> {
    Ok(one_plus_six(b, f1(b, F1Variant::UnitPair, &inv_q(b), 3)?))
}

fn cor4_3_rhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    let (r1, r2) = (par(p, b, "rho1")?, par(p, b, "rho2")?);
    let s = derived_pair_sum(b, DerivedId::SinghStar, &inv_q(b), Some(&r1), Some(&r2), 3)?;
    Ok(one_plus_six(b, s))
}

fn cor4_4_rhs<B: Backend>(_p: &IdentityParams, b: &B) -> Result<B::Val> {
    let s = derived_pair_sum(b, DerivedId::SinghRhoInfStar, &inv_q(b), None, None, 3)?;
    Ok(one_plus_six(b, s))
}

fn psi_sq4_lhs<B: Backend>(_p: &IdentityParams, b: &B) -> Result<B::Val> {
    let psi4 = psi_sum(b, 4)?;
    Ok(b.mul(&psi4, &psi4))
}

/// `-i/(2q) · f₂(-i/q, q²)` assembled from the given derived pair.
fn psi_sq4_from_pair<B: Backend>(
    p: &IdentityParams,
    b: &B,
    d: DerivedId,
) -> Result<B::Val> {
    let a = b.par_mono(&QMonomial::new(-Coefficient::i(), -1));
    let (r1, r2) = rho_pars(p, b, d)?;
    let f2 = f2_from_pair(b, d, &a, r1.as_ref(), r2.as_ref(), 2)?;
    // 1/(2i) = -i/2
    let prefactor = Coefficient::from_ratios(0, 1, -1, 2);
    Ok(b.scale(&b.mul(&b.embed(&b.q_pow(-1)), &f2), &prefactor))
}

fn cor5_1_rhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    psi_sq4_from_pair(p, b, DerivedId::UnitStar)
}

fn cor5_2_rhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    psi_sq4_from_pair(p, b, DerivedId::SinghRho2InfStar)
}

fn cor5_3_rhs<B: Backend>(p: &IdentityParams, b: &B) -> Result<B::Val> {
    psi_sq4_from_pair(p, b, DerivedId::SinghRhoInfStar)
}

fn psi_sq2_lhs<B: Backend>(_p: &IdentityParams, b: &B) -> Result<B::Val> {
    let psi2 = psi_sum(b, 2)?;
    Ok(b.mul(&psi2, &psi2))
}

fn psi_sq2_lambert_rhs<B: Backend>(_p: &IdentityParams, b: &B) -> Result<B::Val> {
    b.sum(0, &mut |n| {
        let t = b.embed(&b.q_pow(n));
        b.mul_inv_one_minus(&t, &b.par_neg(&b.q_pow(2 * n + 1)), "1 + q^(2n+1)")
    })
}

fn q_psi2_psi6<B: Backend>(b: &B) -> Result<B::Val> {
    let t = b.mul(&psi_sum(b, 2)?, &psi_sum(b, 6)?);
    Ok(b.mul(&b.embed(&b.q_pow(1)), &t))
}

fn eq25_lhs<B: Backend>(_p: &IdentityParams, b: &B) -> Result<B::Val> {
    q_psi2_psi6(b)
}

fn lambert_difference<B: Backend>(
    b: &B,
    e_num1: impl Fn(i64) -> i64,
    e_den1: impl Fn(i64) -> i64,
    e_num2: impl Fn(i64) -> i64,
    e_den2: impl Fn(i64) -> i64,
) -> Result<B::Val> {
    let s1 = b.sum(1, &mut |n| {
        b.mul_inv_one_minus(&b.embed(&b.q_pow(e_num1(n))), &b.q_pow(e_den1(n)), "1 - q^m")
    })?;
    let s2 = b.sum(1, &mut |n| {
        b.mul_inv_one_minus(&b.embed(&b.q_pow(e_num2(n))), &b.q_pow(e_den2(n)), "1 - q^m")
    })?;
    Ok(b.sub(&s1, &s2))
}

fn eq25_rhs<B: Backend>(_p: &IdentityParams, b: &B) -> Result<B::Val> {
    lambert_difference(b, |n| 6 * n - 5, |n| 12 * n - 10, |n| 6 * n - 1, |n| 12 * n - 2)
}

fn cor6_lhs<B: Backend>(_p: &IdentityParams, b: &B) -> Result<B::Val> {
    Ok(b.scale(&q_psi2_psi6(b)?, &Coefficient::from_int(2)))
}

fn cor6_rhs<B: Backend>(_p: &IdentityParams, b: &B) -> Result<B::Val> {
    let a1 = b.par_mono(&QMonomial::q_power(-1));
    let a5 = b.par_mono(&QMonomial::q_power(-5));
    let f2a = f2_from_pair(b, DerivedId::UnitStar, &a1, None, None, 6)?;
    let f2b = f2_from_pair(b, DerivedId::UnitStar, &a5, None, None, 6)?;
    Ok(b.sub(&f2a, &f2b))
}

fn eq27_lhs<B: Backend>(_p: &IdentityParams, b: &B) -> Result<B::Val> {
    let psi3 = psi_sum(b, 3)?;
    let psi1 = psi_sum(b, 1)?;
    let mut t = b.mul(&psi3, &b.mul(&psi3, &psi3));
    t = b.mul(&t, &b.inv(&psi1)?);
    Ok(b.mul(&b.embed(&b.q_pow(1)), &t))
}

fn eq27_rhs<B: Backend>(_p: &IdentityParams, b: &B) -> Result<B::Val> {
    lambert_difference(b, |n| 3 * n - 2, |n| 6 * n - 4, |n| 3 * n - 1, |n| 6 * n - 2)
}

// ---------------------------------------------------------------------------
// Registry table
// ---------------------------------------------------------------------------

type ExactSide = fn(&IdentityParams, &ExactBackend) -> Result<QSeries>;
type NumericSide = fn(&IdentityParams, &NumericBackend) -> Result<Complex64>;

pub struct IdentityEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub default_order: i64,
    pub defaults: fn() -> IdentityParams,
    pub exact_lhs: ExactSide,
    pub exact_rhs: ExactSide,
    pub numeric_lhs: NumericSide,
    pub numeric_rhs: NumericSide,
}

fn m(num: i64, den: i64, e: i64) -> QMonomial {
    QMonomial::ratio_q(num, den, e)
}

macro_rules! entry {
    ($id:literal, $desc:literal, $order:expr, $defaults:expr, $lhs:path, $rhs:path) => {
        IdentityEntry {
            id: $id,
            description: $desc,
            default_order: $order,
            defaults: $defaults,
            exact_lhs: |p, b| $lhs(p, b),
            exact_rhs: |p, b| $rhs(p, b),
            numeric_lhs: |p, b| $lhs(p, b),
            numeric_rhs: |p, b| $rhs(p, b),
        }
    };
}

pub fn registry() -> &'static [IdentityEntry] {
    static REGISTRY: OnceLock<Vec<IdentityEntry>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        vec![
            entry!(
                "qgauss",
                "q-Gauss summation of a 2phi1 at argument C/AB",
                40,
                || IdentityParams::default()
                    .with("A", m(1, 1, 1))
                    .with("B", m(1, 1, 2))
                    .with("C", m(1, 1, 5)),
                qgauss_lhs,
                qgauss_rhs
            ),
            entry!(
                "eq03",
                "chain-collapsed summation: weighted beta sum equals a product times the alpha sum",
                40,
                || IdentityParams::default()
                    .with("a", m(2, 1, 1))
                    .with("k", m(3, 1, 1))
                    .with_pair("unit"),
                eq03_lhs,
                eq03_rhs
            ),
            entry!(
                "thm1",
                "four-series transformation with inverted-parameter pair terms",
                40,
                // k matches the exponent of a and z so every summand gains
                // valuation; the coefficient keeps all poles beyond 1/3 and
                // qz/ak away from 1.
                || IdentityParams::default()
                    .with("a", m(2, 1, 1))
                    .with("k", m(7, 3, 1))
                    .with("z", m(5, 1, 1))
                    .with_pair("trivial"),
                thm1_lhs,
                thm1_rhs
            ),
            entry!(
                "thm2",
                "six-series quadratic transformation mixing (a,k), (-a,-k) and (a^2,k^2,q^2)",
                40,
                || IdentityParams::default()
                    .with("a", m(2, 1, 1))
                    .with("k", m(3, 1, 2))
                    .with("z", m(5, 1, 1))
                    .with_pair("trivial"),
                thm2_lhs,
                thm2_rhs
            ),
            entry!(
                "thm3",
                "pair-independent f2 separation identity",
                40,
                // (q^2/b^2; q^2)_inf puts a pole at 1/|coeff(b)|; 5/2 keeps
                // it at 2/5 so the numeric cross-check point converges.
                || IdentityParams::default()
                    .with("a", m(2, 1, 1))
                    .with("b", m(5, 2, 2))
                    .with("rho1", m(5, 1, 1))
                    .with("rho2", m(7, 1, 1))
                    .with_pair("trivial*"),
                thm3_lhs,
                thm3_rhs
            ),
            entry!(
                "eq117",
                "four-block Lambert difference equals a rational plus an eight-fold theta quotient",
                40,
                // (q/k; q)_inf puts a pole at |coeff(k)|^{-1}; 7/3 keeps it
                // at 3/7 while ak/z stays away from 1.
                || IdentityParams::default()
                    .with("a", m(2, 1, 1))
                    .with("k", m(7, 3, 2))
                    .with("z", m(5, 1, 3)),
                eq117_lhs,
                eq117_rhs
            ),
            entry!(
                "cor1.1",
                "Lambert difference as a signed triangular series minus a balanced series",
                40,
                || IdentityParams::default().with("a", m(2, 1, 1)),
                cor1_lhs,
                cor1_1_rhs
            ),
            entry!(
                "cor1.2",
                "Lambert difference via the square-root pair limit",
                40,
                || IdentityParams::default().with("a", m(2, 1, 1)),
                cor1_lhs,
                cor1_2_rhs
            ),
            entry!(
                "cor2",
                "sixteen-series separation identity from the triangular-weight pair",
                40,
                // |coeff(a)|^2 must stay below 3 so the Laurent window of the
                // (q/a^2; q)_{2n} rows still converges at the numeric
                // cross-check point.
                || IdentityParams::default().with("a", m(3, 2, 1)).with("b", m(5, 2, 2)),
                cor2_lhs,
                cor2_rhs
            ),
            entry!(
                "cor3",
                "separation identity with ratio-of-pochhammer Lambert weights",
                40,
                || IdentityParams::default().with("a", m(3, 2, 0)).with("b", m(5, 4, 0)),
                cor3_lhs,
                cor3_rhs
            ),
            entry!(
                "cor4.1",
                "cubic lattice theta series as a q-Gauss style sum in base q^3",
                60,
                IdentityParams::default,
                theta_lattice_lhs,
                cor4_1_rhs
            ),
            entry!(
                "cor4.2",
                "cubic lattice theta series as a balanced series in base q^3",
                60,
                IdentityParams::default,
                theta_lattice_lhs,
                cor4_2_rhs
            ),
            entry!(
                "cor4.3",
                "cubic lattice theta series via the two-parameter derived pair",
                60,
                || IdentityParams::default().with("rho1", m(5, 1, 3)).with("rho2", m(7, 1, 3)),
                theta_lattice_lhs,
                cor4_3_rhs
            ),
            entry!(
                "cor4.4",
                "cubic lattice theta series via the triangular-weight derived pair",
                60,
                IdentityParams::default,
                theta_lattice_lhs,
                cor4_4_rhs
            ),
            entry!(
                "cor5.1",
                "psi(q^4)^2 from the balanced derived pair at a Gaussian argument",
                60,
                IdentityParams::default,
                psi_sq4_lhs,
                cor5_1_rhs
            ),
            entry!(
                "cor5.2",
                "psi(q^4)^2 from the one-parameter derived pair at a Gaussian argument",
                60,
                || IdentityParams::default().with("rho1", m(5, 1, -1)),
                psi_sq4_lhs,
                cor5_2_rhs
            ),
            entry!(
                "cor5.3",
                "psi(q^4)^2 from the triangular-weight derived pair at a Gaussian argument",
                60,
                IdentityParams::default,
                psi_sq4_lhs,
                cor5_3_rhs
            ),
            entry!(
                "psi2lambert",
                "psi(q^2)^2 as a Lambert series with alternating-sign denominators",
                60,
                IdentityParams::default,
                psi_sq2_lhs,
                psi_sq2_lambert_rhs
            ),
            entry!(
                "eq25",
                "q psi(q^2) psi(q^6) as a difference of two Lambert series",
                60,
                IdentityParams::default,
                eq25_lhs,
                eq25_rhs
            ),
            entry!(
                "cor6",
                "2q psi(q^2) psi(q^6) from the balanced derived pair in base q^6",
                60,
                IdentityParams::default,
                cor6_lhs,
                cor6_rhs
            ),
            entry!(
                "eq27",
                "q psi(q^3)^3/psi(q) as a difference of two Lambert series",
                60,
                IdentityParams::default,
                eq27_lhs,
                eq27_rhs
            ),
        ]
    })
}

pub fn get_entry(id: &str) -> Result<&'static IdentityEntry> {
    registry()
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

pub fn all_ids() -> Vec<&'static str> {
    registry().iter().map(|e| e.id).collect()
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendChoice {
    Exact,
    Numeric,
}

impl BackendChoice {
    pub fn token(self) -> &'static str {
        match self {
            BackendChoice::Exact => "exact",
            BackendChoice::Numeric => "numeric",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mismatch {
    /// Exponent of the first differing coefficient (exact backend).
    pub exponent: Option<i64>,
    pub lhs: (String, String),
    pub rhs: (String, String),
    /// |lhs - rhs| in numeric mode.
    pub abs_diff: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub id: String,
    pub backend: BackendChoice,
    pub order: i64,
    pub q_point: Option<Complex64>,
    pub pass: bool,
    pub first_mismatch: Option<Mismatch>,
    pub millis: u128,
}

/// Exact verification: both sides expanded at a padded working order, then
/// compared coefficient-exactly below `order`.
pub fn verify_exact(id: &str, overrides: &IdentityParams, order: i64) -> Result<VerificationReport> {
    let entry = get_entry(id)?;
    let params = (entry.defaults)().overridden_by(overrides);
    let start = Instant::now();
    for pad in [8, 24, 56, 120] {
        let b = ExactBackend::new(order + pad);
        let lhs = (entry.exact_lhs)(&params, &b)?;
        let rhs = (entry.exact_rhs)(&params, &b)?;
        if !lhs.order().at_least(order) || !rhs.order().at_least(order) {
            continue;
        }
        let mm = lhs.first_mismatch(&rhs, order);
        return Ok(VerificationReport {
            id: id.to_string(),
            backend: BackendChoice::Exact,
            order,
            q_point: None,
            pass: mm.is_none(),
            first_mismatch: mm.map(|(e, l, r)| Mismatch {
                exponent: Some(e),
                lhs: l.render_pair(),
                rhs: r.render_pair(),
                abs_diff: None,
            }),
            millis: start.elapsed().as_millis(),
        });
    }
    Err(Error::Domain(format!(
        "could not reach provable order {order} for identity {id}"
    )))
}

/// Numeric verification at `q0`: tolerance `1e-9` absolute plus `1e-9`
/// relative.
pub fn verify_numeric(
    id: &str,
    overrides: &IdentityParams,
    order: i64,
    q0: Complex64,
) -> Result<VerificationReport> {
    if q0.norm() >= 1.0 {
        return Err(Error::Domain(format!("numeric mode requires |q| < 1, got {}", q0.norm())));
    }
    let entry = get_entry(id)?;
    let params = (entry.defaults)().overridden_by(overrides);
    let start = Instant::now();
    let b = NumericBackend::new(q0);
    let lhs = (entry.numeric_lhs)(&params, &b)?;
    let rhs = (entry.numeric_rhs)(&params, &b)?;
    let diff = (lhs - rhs).norm();
    let tol = 1e-9 + 1e-9 * lhs.norm().max(rhs.norm());
    let pass = diff <= tol;
    Ok(VerificationReport {
        id: id.to_string(),
        backend: BackendChoice::Numeric,
        order,
        q_point: Some(q0),
        pass,
        first_mismatch: if pass {
            None
        } else {
            Some(Mismatch {
                exponent: None,
                lhs: (format!("{}", lhs.re), format!("{}", lhs.im)),
                rhs: (format!("{}", rhs.re), format!("{}", rhs.im)),
                abs_diff: Some(diff),
            })
        },
        millis: start.elapsed().as_millis(),
    })
}

/// Both sides of an identity in the exact backend, at a padded working
/// order (for report extraction and cross-checks).
pub fn identity_sides_exact(
    id: &str,
    overrides: &IdentityParams,
    order: i64,
) -> Result<(QSeries, QSeries)> {
    let entry = get_entry(id)?;
    let params = (entry.defaults)().overridden_by(overrides);
    let b = ExactBackend::new(order + 40);
    Ok(((entry.exact_lhs)(&params, &b)?, (entry.exact_rhs)(&params, &b)?))
}

/// Both sides of an identity in the numeric backend.
pub fn identity_sides_numeric(
    id: &str,
    overrides: &IdentityParams,
    q0: Complex64,
) -> Result<(Complex64, Complex64)> {
    let entry = get_entry(id)?;
    let params = (entry.defaults)().overridden_by(overrides);
    let b = NumericBackend::new(q0);
    Ok(((entry.numeric_lhs)(&params, &b)?, (entry.numeric_rhs)(&params, &b)?))
}
