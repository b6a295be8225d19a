//! Named series builders shared by the identity registry: Lambert blocks,
//! the three representations of `f₁`, the closed and pair-built forms of
//! `f₂`, the four-block Lambert function `f(a,k,z,q)`, the theta series `ψ`
//! and the two closed product-plus-rational right-hand sides.
//!
//! Everything is generic over [`Backend`], so one definition serves exact
//! coefficient verification and numeric point checks.

use crate::backend::{Backend, SumFactor};
use crate::error::Result;
use crate::qseries::Coefficient;
use crate::wppairs::{derived_alpha_summand, derived_beta_summand, DerivedId, Summand};

/// `Σ_{n≥1} x·qᵇⁿ/(1 - x·qᵇⁿ)`.
pub fn lambert_block<B: Backend>(b: &B, x: &B::Par, base: i64) -> Result<B::Val> {
    b.sum(1, &mut |n| {
        let t = b.par_mul(x, &b.q_pow(base * n));
        b.mul_inv_one_minus(&b.embed(&t), &t, "1 - x*q^n (lambert block)")
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum F1Variant {
    /// `Σ a²qⁿ/(1-a²qⁿ) - Σ aqⁿ/(1-aqⁿ)`.
    Lambert,
    /// `Σ (1/a; q)ₙ a²ⁿqⁿ / ((aq; q)ₙ (1-qⁿ))`.
    QGauss,
    /// `-Σ (1-aq²ⁿ)(a,a; q)ₙ (q; q)₂ₙ₋₁ aⁿqⁿ / ((1-a)(q,q; q)ₙ (qa²; q)₂ₙ)`.
    UnitPair,
}

impl F1Variant {
    pub fn token(self) -> &'static str {
        match self {
            F1Variant::Lambert => "lambert",
            F1Variant::QGauss => "qgauss",
            F1Variant::UnitPair => "unitpair",
        }
    }

    pub fn from_token(t: &str) -> Option<Self> {
        match t {
            "lambert" => Some(F1Variant::Lambert),
            "qgauss" => Some(F1Variant::QGauss),
            "unitpair" => Some(F1Variant::UnitPair),
            _ => None,
        }
    }
}

/// One of the three representations of `f₁(a, q)`, in base `q^base`.
///
/// All variants share the pole set `{a = 1}`; the precondition is enforced
/// uniformly so the variants are interchangeable.
pub fn f1<B: Backend>(b: &B, variant: F1Variant, a: &B::Par, base: i64) -> Result<B::Val> {
    // (1-a) divides the unit-pair representation; enforce for all variants.
    let inv_one_minus_a = b.inv_one_minus(a, "1 - a")?;
    let q1 = b.q_pow(base);
    match variant {
        F1Variant::Lambert => {
            let a2 = b.par_mul(a, a);
            let s1 = lambert_block(b, &a2, base)?;
            let s2 = lambert_block(b, a, base)?;
            Ok(b.sub(&s1, &s2))
        }
        F1Variant::QGauss => Summand::new(vec![
            SumFactor::fwd(b.par_inv(a)?, base, "(1/a; q)_n"),
            SumFactor::inv(b.par_mul(a, &q1), base, "(aq; q)_n"),
        ])
        .weighted(b, b.par_mul(&b.par_mul(a, a), &q1))
        .over_one_minus(b.q_pow(0), base, "1 - q^n")
        .sum_from(b, 1),
        F1Variant::UnitPair => {
            let a2q = b.par_mul(&b.par_mul(a, a), &q1);
            let sum = Summand::new(vec![
                SumFactor::fwd(a.clone(), base, "(a; q)_n"),
                SumFactor::fwd(a.clone(), base, "(a; q)_n"),
                SumFactor::inv(q1.clone(), base, "(q; q)_n"),
                SumFactor::inv(q1.clone(), base, "(q; q)_n"),
                SumFactor::fwd(q1.clone(), base, "(q; q)_{2n-1}").with_count(2, -1),
                SumFactor::inv(a2q, base, "(qa^2; q)_{2n}").with_count(2, 0),
            ])
            .weighted(b, b.par_mul(a, &q1))
            .times_one_minus(a.clone(), 2 * base)
            .sum_from(b, 1)?;
            Ok(b.neg(&b.mul(&sum, &inv_one_minus_a)))
        }
    }
}

/// The host weights of the summation fed by a derived pair:
/// `Σ a²ⁿqⁿ β*ₙ(a) - Σ (q; q)₂ₙ₋₁/(qa²; q)₂ₙ · a²ⁿqⁿ α*ₙ(a)`.
pub fn derived_pair_sum<B: Backend>(
    b: &B,
    derived: DerivedId,
    a: &B::Par,
    rho1: Option<&B::Par>,
    rho2: Option<&B::Par>,
    base: i64,
) -> Result<B::Val> {
    let q1 = b.q_pow(base);
    let host_weight = b.par_mul(&b.par_mul(a, a), &q1);
    let beta_part = Summand::new(Vec::new())
        .weighted(b, host_weight.clone())
        .merged(b, derived_beta_summand(derived, b, a, rho1, rho2, base)?)
        .sum_from(b, 1)?;
    let a2q = b.par_mul(&b.par_mul(a, a), &q1);
    let alpha_part = Summand::new(vec![
        SumFactor::fwd(q1.clone(), base, "(q; q)_{2n-1}").with_count(2, -1),
        SumFactor::inv(a2q, base, "(qa^2; q)_{2n}").with_count(2, 0),
    ])
    .weighted(b, host_weight)
    .merged(b, derived_alpha_summand(derived, b, a, rho1, rho2, base)?)
    .sum_from(b, 1)?;
    Ok(b.sub(&beta_part, &alpha_part))
}

/// `f₂(a, q) = -Σ 2a qⁿ/(1 - a²q²ⁿ)`, the closed Lambert form.
pub fn f2_closed<B: Backend>(b: &B, a: &B::Par, base: i64) -> Result<B::Val> {
    let a2 = b.par_mul(a, a);
    let sum = b.sum(1, &mut |n| {
        let num = b.par_mul(a, &b.q_pow(base * n));
        let den = b.par_mul(&a2, &b.q_pow(2 * base * n));
        b.mul_inv_one_minus(&b.embed(&num), &den, "1 - a^2 q^(2n)")
    })?;
    Ok(b.scale(&sum, &Coefficient::from_int(-2)))
}

/// `f₂(a, q)` assembled from a derived pair: the `β*`/`α*` sums at `a` minus
/// the same sums at `-a`.
pub fn f2_from_pair<B: Backend>(
    b: &B,
    derived: DerivedId,
    a: &B::Par,
    rho1: Option<&B::Par>,
    rho2: Option<&B::Par>,
    base: i64,
) -> Result<B::Val> {
    let plus = derived_pair_sum(b, derived, a, rho1, rho2, base)?;
    let minus = derived_pair_sum(b, derived, &b.par_neg(a), rho1, rho2, base)?;
    Ok(b.sub(&plus, &minus))
}

/// The four-block Lambert combination
/// `f(a,k,z,q) = Σ kqⁿ/(1-kqⁿ) + Σ (a/z)qⁿ/(1-(a/z)qⁿ) - Σ aqⁿ/(1-aqⁿ) - Σ (k/z)qⁿ/(1-(k/z)qⁿ)`.
pub fn f_blocks<B: Backend>(b: &B, a: &B::Par, k: &B::Par, z: &B::Par, base: i64) -> Result<B::Val> {
    let az = b.par_div(a, z)?;
    let kz = b.par_div(k, z)?;
    let mut acc = lambert_block(b, k, base)?;
    acc = b.add(&acc, &lambert_block(b, &az, base)?);
    acc = b.sub(&acc, &lambert_block(b, a, base)?);
    Ok(b.sub(&acc, &lambert_block(b, &kz, base)?))
}

/// `ψ(q^base) = Σ_{n≥0} q^{base·n(n+1)/2}`.
pub fn psi_sum<B: Backend>(b: &B, base: i64) -> Result<B::Val> {
    b.sum(0, &mut |n| Ok(b.embed(&b.q_pow(base * n * (n + 1) / 2))))
}

/// `ψ(q^base)` as the product `(q^{2b}; q^{2b})_∞ / (q^b; q^{2b})_∞`.
pub fn psi_product<B: Backend>(b: &B, base: i64) -> Result<B::Val> {
    let num = b.poch_inf(&b.q_pow(2 * base), 2 * base)?;
    let den = b.inv_poch_inf(&b.q_pow(base), 2 * base, "(q; q^2)_inf")?;
    Ok(b.mul(&num, &den))
}

/// Rational-plus-product right-hand side shared by the four-block Lambert
/// difference `f(a,k,z) - f(1/a,1/k,1/z)`:
///
/// ```text
/// (a-k)(1-1/z)(1-ak/z) / ((1-a)(1-k)(1-a/z)(1-k/z))
///   + (z/k)·(z, q/z, k/a, qa/k, ak/z, qz/ak, q, q; q)_∞
///          /(z/k, qk/z, z/a, qa/z, a, q/a, k, q/k; q)_∞ .
/// ```
pub fn rational_product_rhs<B: Backend>(
    b: &B,
    a: &B::Par,
    k: &B::Par,
    z: &B::Par,
    base: i64,
) -> Result<B::Val> {
    let q1 = b.q_pow(base);
    let inv_z = b.par_inv(z)?;
    let akz = b.par_div(&b.par_mul(a, k), z)?;
    let mut rat = b.sub(&b.embed(a), &b.embed(k));
    rat = b.mul(&rat, &b.one_minus(&inv_z));
    rat = b.mul(&rat, &b.one_minus(&akz));
    rat = b.mul(&rat, &b.inv_one_minus(a, "1 - a")?);
    rat = b.mul(&rat, &b.inv_one_minus(k, "1 - k")?);
    rat = b.mul(&rat, &b.inv_one_minus(&b.par_div(a, z)?, "1 - a/z")?);
    rat = b.mul(&rat, &b.inv_one_minus(&b.par_div(k, z)?, "1 - k/z")?);

    let mut prod = b.embed(&b.par_div(z, k)?);
    let numerators = [
        z.clone(),
        b.par_div(&q1, z)?,
        b.par_div(k, a)?,
        b.par_div(&b.par_mul(&q1, a), k)?,
        akz.clone(),
        b.par_div(&b.par_mul(&q1, z), &b.par_mul(a, k))?,
        q1.clone(),
        q1.clone(),
    ];
    for x in &numerators {
        prod = b.mul(&prod, &b.poch_inf(x, base)?);
    }
    let denominators = [
        (b.par_div(z, k)?, "(z/k; q)_inf"),
        (b.par_div(&b.par_mul(&q1, k), z)?, "(qk/z; q)_inf"),
        (b.par_div(z, a)?, "(z/a; q)_inf"),
        (b.par_div(&b.par_mul(&q1, a), z)?, "(qa/z; q)_inf"),
        (a.clone(), "(a; q)_inf"),
        (b.par_div(&q1, a)?, "(q/a; q)_inf"),
        (k.clone(), "(k; q)_inf"),
        (b.par_div(&q1, k)?, "(q/k; q)_inf"),
    ];
    for (x, ctx) in &denominators {
        prod = b.mul(&prod, &b.inv_poch_inf(x, base, ctx)?);
    }
    Ok(b.add(&rat, &prod))
}

/// The pair-independent right-hand side of the `f₂` separation identity:
///
/// ```text
/// 2(a-b)(1+ab)/((1-a²)(1-b²))
///   - 2a·(b/a, qa/b, -ab, -q/ab; q)_∞ (q², q²; q²)_∞ / (a², q²/a², b², q²/b²; q²)_∞ .
/// ```
pub fn separation_rhs<B: Backend>(b: &B, x: &B::Par, y: &B::Par, base: i64) -> Result<B::Val> {
    let q1 = b.q_pow(base);
    let q2 = b.q_pow(2 * base);
    let x2 = b.par_mul(x, x);
    let y2 = b.par_mul(y, y);
    let xy = b.par_mul(x, y);

    let mut rat = b.sub(&b.embed(x), &b.embed(y));
    rat = b.mul(&rat, &b.add(&b.one(), &b.embed(&xy)));
    rat = b.mul(&rat, &b.inv_one_minus(&x2, "1 - a^2")?);
    rat = b.mul(&rat, &b.inv_one_minus(&y2, "1 - b^2")?);
    rat = b.scale(&rat, &Coefficient::from_int(2));

    let mut prod = b.scale(&b.embed(x), &Coefficient::from_int(2));
    prod = b.mul(&prod, &b.poch_inf(&b.par_div(y, x)?, base)?);
    prod = b.mul(&prod, &b.poch_inf(&b.par_div(&b.par_mul(&q1, x), y)?, base)?);
    prod = b.mul(&prod, &b.poch_inf(&b.par_neg(&xy), base)?);
    prod = b.mul(&prod, &b.poch_inf(&b.par_neg(&b.par_div(&q1, &xy)?), base)?);
    let euler2 = b.poch_inf(&q2, 2 * base)?;
    prod = b.mul(&prod, &b.mul(&euler2, &euler2));
    prod = b.mul(&prod, &b.inv_poch_inf(&x2, 2 * base, "(a^2; q^2)_inf")?);
    prod = b.mul(&prod, &b.inv_poch_inf(&b.par_div(&q2, &x2)?, 2 * base, "(q^2/a^2; q^2)_inf")?);
    prod = b.mul(&prod, &b.inv_poch_inf(&y2, 2 * base, "(b^2; q^2)_inf")?);
    prod = b.mul(&prod, &b.inv_poch_inf(&b.par_div(&q2, &y2)?, 2 * base, "(q^2/b^2; q^2)_inf")?);

    Ok(b.sub(&rat, &prod))
}
