//! WP-Bailey pair machinery.
//!
//! A WP-Bailey pair is a pair of sequences `(α_n(a,k), β_n(a,k))` with
//! `α_0 = β_0 = 1` linked by the well-poised summation relation
//!
//! ```text
//! β_n = Σ_{j=0}^n  (k/a; q)_{n-j} (k; q)_{n+j} / ((q; q)_{n-j} (aq; q)_{n+j}) · α_j .
//! ```
//!
//! This module holds the closed-form catalog (square-root artifacts are
//! collapsed so the coefficient field stays Gaussian-rational), the derived
//! pairs obtained in the k→1 limit, the defining-relation checker, one chain
//! transform, and a numeric probe validating each derived pair against its
//! source.
//!
//! Each α/β is specified once as a [`Summand`]: a list of pochhammer factors
//! whose lengths grow linearly in `n`, a geometric weight, an optional
//! triangular exponent and per-term binomial factors. Summation loops march
//! the factor list incrementally; single-index evaluation instantiates it
//! directly.

use num::complex::Complex64;

use crate::backend::{Backend, ExactBackend, FactorProduct, NumericBackend, SumFactor};
use crate::error::{Error, Result};
use crate::qseries::{Coefficient, QMonomial, QSeries};

/// Catalog pairs. The last two are the ρ→∞ specializations of Singh's pair;
/// they back the derived-pair machinery and the limit probe but are not part
/// of the four-entry public catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairId {
    Trivial,
    Unit,
    Singh,
    SqrtK,
    SinghRhoInf,
    SinghRho2Inf,
}

impl PairId {
    pub fn token(self) -> &'static str {
        match self {
            PairId::Trivial => "trivial",
            PairId::Unit => "unit",
            PairId::Singh => "singh",
            PairId::SqrtK => "sqrtk",
            PairId::SinghRhoInf => "singh-rho-inf",
            PairId::SinghRho2Inf => "singh-rho2-inf",
        }
    }
}

/// Derived pairs `(α*_n, β*_n) = lim_{k→1} (α_n, β_n/(1-k))`, defined for
/// n ≥ 1. `SinghRho2InfStar` keeps ρ₁ free with ρ₂ sent to infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivedId {
    TrivialStar,
    UnitStar,
    SinghStar,
    SinghRhoInfStar,
    SqrtKStar,
    SinghRho2InfStar,
}

impl DerivedId {
    pub fn token(self) -> &'static str {
        match self {
            DerivedId::TrivialStar => "trivial*",
            DerivedId::UnitStar => "unit*",
            DerivedId::SinghStar => "singh*",
            DerivedId::SinghRhoInfStar => "singh-rho-inf*",
            DerivedId::SqrtKStar => "sqrtk*",
            DerivedId::SinghRho2InfStar => "singh-rho2-inf*",
        }
    }

    /// The source pair whose k→1 limit this derived pair is.
    pub fn source(self) -> PairId {
        match self {
            DerivedId::TrivialStar => PairId::Trivial,
            DerivedId::UnitStar => PairId::Unit,
            DerivedId::SinghStar => PairId::Singh,
            DerivedId::SinghRhoInfStar => PairId::SinghRhoInf,
            DerivedId::SqrtKStar => PairId::SqrtK,
            DerivedId::SinghRho2InfStar => PairId::SinghRho2Inf,
        }
    }
}

/// The four-entry public pair catalog.
pub fn catalog_pair(token: &str) -> Result<PairId> {
    match token {
        "trivial" => Ok(PairId::Trivial),
        "unit" => Ok(PairId::Unit),
        "singh" => Ok(PairId::Singh),
        "sqrtk" => Ok(PairId::SqrtK),
        _ => Err(Error::UnknownPair(token.to_string())),
    }
}

/// The five-entry public derived-pair catalog.
pub fn catalog_derived(token: &str) -> Result<DerivedId> {
    match token {
        "trivial*" => Ok(DerivedId::TrivialStar),
        "unit*" => Ok(DerivedId::UnitStar),
        "singh*" => Ok(DerivedId::SinghStar),
        "singh-rho-inf*" => Ok(DerivedId::SinghRhoInfStar),
        "sqrtk*" => Ok(DerivedId::SqrtKStar),
        _ => Err(Error::UnknownPair(token.to_string())),
    }
}

/// Parameters of a pair in either backend. `s` is the square root of `k`
/// for the `sqrtk` pair; `rho1`, `rho2` are the free Singh parameters.
#[derive(Clone, Debug)]
pub struct PairPars<P: Clone> {
    pub a: P,
    pub k: P,
    pub rho1: Option<P>,
    pub rho2: Option<P>,
    pub s: Option<P>,
}

impl<P: Clone> PairPars<P> {
    pub fn new(a: P, k: P) -> Self {
        PairPars { a, k, rho1: None, rho2: None, s: None }
    }

    pub fn with_rhos(mut self, rho1: P, rho2: P) -> Self {
        self.rho1 = Some(rho1);
        self.rho2 = Some(rho2);
        self
    }

    pub fn with_sqrt_k(mut self, s: P) -> Self {
        self.s = Some(s);
        self
    }
}

fn need<'a, P: Clone>(p: &'a Option<P>, what: &str) -> Result<&'a P> {
    p.as_ref()
        .ok_or_else(|| Error::Domain(format!("pair requires parameter {what}")))
}

// ---------------------------------------------------------------------------
// Summand specifications
// ---------------------------------------------------------------------------

/// Term shape `constant · weightⁿ · q^{tri·n(n-1)/2} · Π factors(n)
/// · Π (1 - x·q^{s·n}) · Π (1 - y·q^{t·n})⁻¹`.
pub struct Summand<B: Backend> {
    pub factors: Vec<SumFactor<B::Par>>,
    pub weight: Option<B::Par>,
    pub tri: i64,
    pub one_minus: Vec<(B::Par, i64)>,
    pub inv_one_minus: Vec<(B::Par, i64, &'static str)>,
    pub constant: Option<B::Val>,
    /// Identically zero for n ≥ 1.
    pub zero: bool,
}

impl<B: Backend> Summand<B> {
    pub fn new(factors: Vec<SumFactor<B::Par>>) -> Self {
        Summand {
            factors,
            weight: None,
            tri: 0,
            one_minus: Vec::new(),
            inv_one_minus: Vec::new(),
            constant: None,
            zero: false,
        }
    }

    pub fn vanishing() -> Self {
        Summand { zero: true, ..Summand::new(Vec::new()) }
    }

    pub fn weighted(mut self, b: &B, w: B::Par) -> Self {
        self.weight = Some(match self.weight.take() {
            Some(prev) => b.par_mul(&prev, &w),
            None => w,
        });
        self
    }

    pub fn triangular(mut self, tri: i64) -> Self {
        self.tri += tri;
        self
    }

    pub fn times_one_minus(mut self, x: B::Par, shift: i64) -> Self {
        self.one_minus.push((x, shift));
        self
    }

    pub fn over_one_minus(mut self, x: B::Par, shift: i64, ctx: &'static str) -> Self {
        self.inv_one_minus.push((x, shift, ctx));
        self
    }

    pub fn with_constant(mut self, b: &B, c: B::Val) -> Self {
        self.constant = Some(match self.constant.take() {
            Some(prev) => b.mul(&prev, &c),
            None => c,
        });
        self
    }

    /// Pointwise product of two summands.
    pub fn merged(mut self, b: &B, other: Summand<B>) -> Self {
        self.factors.extend(other.factors);
        if let Some(w) = other.weight {
            self = self.weighted(b, w);
        }
        self.tri += other.tri;
        self.one_minus.extend(other.one_minus);
        self.inv_one_minus.extend(other.inv_one_minus);
        if let Some(c) = other.constant {
            self = self.with_constant(b, c);
        }
        self.zero |= other.zero;
        self
    }

    /// Apply the per-index parts (everything except `constant`) to a running
    /// factor-product value.
    pub fn finish_term(&self, b: &B, mut t: B::Val, n: i64) -> Result<B::Val> {
        if let Some(w) = &self.weight {
            t = b.scale_par(&t, &b.par_pow(w, n)?);
        }
        if self.tri != 0 {
            t = b.scale_par(&t, &b.q_pow(self.tri * n * (n - 1) / 2));
        }
        for (x, sh) in &self.one_minus {
            t = b.mul_one_minus(&t, &b.par_mul(x, &b.q_pow(sh * n)));
        }
        for (x, sh, ctx) in &self.inv_one_minus {
            t = b.mul_inv_one_minus(&t, &b.par_mul(x, &b.q_pow(sh * n)), ctx)?;
        }
        Ok(t)
    }

    /// Value at a single index `n ≥ 1`.
    pub fn eval(&self, b: &B, n: i64) -> Result<B::Val> {
        if self.zero {
            return Ok(b.scalar(&Coefficient::zero()));
        }
        let fp = FactorProduct::start(b, self.factors.clone(), n)?;
        let t = self.finish_term(b, fp.value().clone(), n)?;
        Ok(match &self.constant {
            Some(c) => b.mul(&t, c),
            None => t,
        })
    }

    /// `Σ_{n ≥ start} term(n)`. A vanishing summand contributes only its
    /// `n = 0` unit term when the sum starts at zero.
    pub fn sum_from(&self, b: &B, start: i64) -> Result<B::Val> {
        if self.zero {
            return Ok(if start == 0 { b.one() } else { b.scalar(&Coefficient::zero()) });
        }
        let mut fp = FactorProduct::start(b, self.factors.clone(), start)?;
        let mut acc = b.sum(start, &mut |n| {
            fp.advance_to(b, n)?;
            self.finish_term(b, fp.value().clone(), n)
        })?;
        if let Some(c) = &self.constant {
            acc = b.mul(&acc, c);
        }
        Ok(acc)
    }
}

/// `(1 - a)⁻¹` as a summand constant.
fn inv_one_minus_const<B: Backend>(b: &B, a: &B::Par, ctx: &'static str) -> Result<B::Val> {
    b.inv_one_minus(a, ctx)
}

/// `α_n(a, k)` of the given catalog pair as a summand in base `q^base`,
/// valid for n ≥ 1 (the n = 0 value is 1 by definition).
pub fn pair_alpha_summand<B: Backend>(
    id: PairId,
    b: &B,
    p: &PairPars<B::Par>,
    base: i64,
) -> Result<Summand<B>> {
    let q1 = b.q_pow(base);
    let a = &p.a;
    let k = &p.k;
    match id {
        PairId::Trivial => Ok(Summand::vanishing()),
        PairId::Unit => Ok(Summand::new(vec![
            SumFactor::fwd(a.clone(), base, "(a; q)_n"),
            SumFactor::fwd(b.par_div(a, k)?, base, "(a/k; q)_n"),
            SumFactor::inv(q1.clone(), base, "(q; q)_n"),
            SumFactor::inv(b.par_mul(k, &q1), base, "(kq; q)_n"),
        ])
        .weighted(b, b.par_div(k, a)?)
        .times_one_minus(a.clone(), 2 * base)
        .with_constant(b, inv_one_minus_const(b, a, "1 - a")?)),
        PairId::Singh => {
            let r1 = need(&p.rho1, "rho1")?;
            let r2 = need(&p.rho2, "rho2")?;
            let aq = b.par_mul(a, &q1);
            let a2q = b.par_mul(a, &aq);
            let kr1r2 = b.par_mul(k, &b.par_mul(r1, r2));
            Ok(Summand::new(vec![
                SumFactor::fwd(a.clone(), base, "(a; q)_n"),
                SumFactor::fwd(r1.clone(), base, "(rho1; q)_n"),
                SumFactor::fwd(r2.clone(), base, "(rho2; q)_n"),
                SumFactor::fwd(b.par_div(&a2q, &kr1r2)?, base, "(a^2 q/(k rho1 rho2); q)_n"),
                SumFactor::inv(q1.clone(), base, "(q; q)_n"),
                SumFactor::inv(b.par_div(&aq, r1)?, base, "(aq/rho1; q)_n"),
                SumFactor::inv(b.par_div(&aq, r2)?, base, "(aq/rho2; q)_n"),
                SumFactor::inv(b.par_div(&kr1r2, a)?, base, "(k rho1 rho2/a; q)_n"),
            ])
            .weighted(b, b.par_div(k, a)?)
            .times_one_minus(a.clone(), 2 * base)
            .with_constant(b, inv_one_minus_const(b, a, "1 - a")?))
        }
        PairId::SqrtK => {
            let s = need(&p.s, "s (sqrt of k)")?;
            let aq = b.par_mul(a, &q1);
            let a2q = b.par_mul(a, &aq);
            let s2 = b.par_mul(s, s);
            Ok(Summand::new(vec![
                SumFactor::fwd(a.clone(), base, "(a; q)_n"),
                SumFactor::fwd(b.par_div(a, s)?, base, "(a/s; q)_n"),
                SumFactor::fwd(b.par_neg(&b.par_div(&aq, s)?), base, "(-aq/s; q)_n"),
                SumFactor::fwd(b.par_div(&s2, a)?, base, "(s^2/a; q)_n"),
                SumFactor::fwd(b.par_div(&a2q, &s2)?, 2 * base, "(a^2 q/s^2; q^2)_n"),
                SumFactor::inv(q1.clone(), base, "(q; q)_n"),
                SumFactor::inv(b.par_mul(&q1, s), base, "(qs; q)_n"),
                SumFactor::inv(b.par_neg(s), base, "(-s; q)_n"),
                SumFactor::inv(b.par_div(&a2q, &s2)?, base, "(qa^2/s^2; q)_n"),
                SumFactor::inv(b.par_mul(&s2, &q1), 2 * base, "(s^2 q; q^2)_n"),
            ])
            .weighted(b, b.par_div(&s2, a)?)
            .times_one_minus(a.clone(), 2 * base)
            .with_constant(b, inv_one_minus_const(b, a, "1 - a")?))
        }
        PairId::SinghRhoInf => Ok(Summand::new(vec![
            SumFactor::fwd(a.clone(), base, "(a; q)_n"),
            SumFactor::inv(q1.clone(), base, "(q; q)_n"),
        ])
        .weighted(b, b.par_mono(&QMonomial::constant(-Coefficient::one())))
        .triangular(base)
        .times_one_minus(a.clone(), 2 * base)
        .with_constant(b, inv_one_minus_const(b, a, "1 - a")?)),
        PairId::SinghRho2Inf => {
            let r1 = need(&p.rho1, "rho1")?;
            let aq = b.par_mul(a, &q1);
            Ok(Summand::new(vec![
                SumFactor::fwd(a.clone(), base, "(a; q)_n"),
                SumFactor::fwd(r1.clone(), base, "(rho1; q)_n"),
                SumFactor::inv(q1.clone(), base, "(q; q)_n"),
                SumFactor::inv(b.par_div(&aq, r1)?, base, "(aq/rho1; q)_n"),
            ])
            .weighted(b, b.par_inv(r1)?)
            .times_one_minus(a.clone(), 2 * base)
            .with_constant(b, inv_one_minus_const(b, a, "1 - a")?))
        }
    }
}

/// `β_n(a, k)` of the given catalog pair as a summand in base `q^base`,
/// valid for all n ≥ 0.
pub fn pair_beta_summand<B: Backend>(
    id: PairId,
    b: &B,
    p: &PairPars<B::Par>,
    base: i64,
) -> Result<Summand<B>> {
    let q1 = b.q_pow(base);
    let a = &p.a;
    let k = &p.k;
    match id {
        PairId::Unit => Ok(Summand::vanishing()),
        PairId::Trivial => Ok(Summand::new(vec![
            SumFactor::fwd(k.clone(), base, "(k; q)_n"),
            SumFactor::fwd(b.par_div(k, a)?, base, "(k/a; q)_n"),
            SumFactor::inv(q1.clone(), base, "(q; q)_n"),
            SumFactor::inv(b.par_mul(a, &q1), base, "(aq; q)_n"),
        ])),
        PairId::Singh => {
            let r1 = need(&p.rho1, "rho1")?;
            let r2 = need(&p.rho2, "rho2")?;
            let aq = b.par_mul(a, &q1);
            let kr1r2 = b.par_mul(k, &b.par_mul(r1, r2));
            Ok(Summand::new(vec![
                SumFactor::fwd(b.par_div(&b.par_mul(k, r1), a)?, base, "(k rho1/a; q)_n"),
                SumFactor::fwd(b.par_div(&b.par_mul(k, r2), a)?, base, "(k rho2/a; q)_n"),
                SumFactor::fwd(k.clone(), base, "(k; q)_n"),
                SumFactor::fwd(b.par_div(&aq, &b.par_mul(r1, r2))?, base, "(aq/(rho1 rho2); q)_n"),
                SumFactor::inv(b.par_div(&aq, r1)?, base, "(aq/rho1; q)_n"),
                SumFactor::inv(b.par_div(&aq, r2)?, base, "(aq/rho2; q)_n"),
                SumFactor::inv(b.par_div(&kr1r2, a)?, base, "(k rho1 rho2/a; q)_n"),
                SumFactor::inv(q1.clone(), base, "(q; q)_n"),
            ]))
        }
        PairId::SqrtK => {
            let s = need(&p.s, "s (sqrt of k)")?;
            let s2 = b.par_mul(s, s);
            let s4 = b.par_mul(&s2, &s2);
            let a2 = b.par_mul(a, a);
            Ok(Summand::new(vec![
                SumFactor::fwd(s.clone(), base, "(s; q)_n"),
                SumFactor::fwd(b.par_div(&s4, &a2)?, base, "(s^4/a^2; q)_n"),
                SumFactor::inv(b.par_mul(&q1, s), base, "(qs; q)_n"),
                SumFactor::inv(q1.clone(), base, "(q; q)_n"),
            ]))
        }
        PairId::SinghRhoInf => Ok(Summand::new(vec![
            SumFactor::fwd(k.clone(), base, "(k; q)_n"),
            SumFactor::inv(q1.clone(), base, "(q; q)_n"),
        ])
        .weighted(b, b.par_neg(&b.par_div(k, a)?))
        .triangular(base)),
        PairId::SinghRho2Inf => {
            let r1 = need(&p.rho1, "rho1")?;
            let aq = b.par_mul(a, &q1);
            Ok(Summand::new(vec![
                SumFactor::fwd(b.par_div(&b.par_mul(k, r1), a)?, base, "(k rho1/a; q)_n"),
                SumFactor::fwd(k.clone(), base, "(k; q)_n"),
                SumFactor::inv(b.par_div(&aq, r1)?, base, "(aq/rho1; q)_n"),
                SumFactor::inv(q1.clone(), base, "(q; q)_n"),
            ])
            .weighted(b, b.par_inv(r1)?))
        }
    }
}

/// `α*_n(a)` of the derived pair as a summand (n ≥ 1).
pub fn derived_alpha_summand<B: Backend>(
    id: DerivedId,
    b: &B,
    a: &B::Par,
    rho1: Option<&B::Par>,
    rho2: Option<&B::Par>,
    base: i64,
) -> Result<Summand<B>> {
    let q1 = b.q_pow(base);
    match id {
        DerivedId::TrivialStar => Ok(Summand::vanishing()),
        DerivedId::UnitStar => Ok(Summand::new(vec![
            SumFactor::fwd(a.clone(), base, "(a; q)_n"),
            SumFactor::fwd(a.clone(), base, "(a; q)_n"),
            SumFactor::inv(q1.clone(), base, "(q; q)_n"),
            SumFactor::inv(q1.clone(), base, "(q; q)_n"),
        ])
        .weighted(b, b.par_inv(a)?)
        .times_one_minus(a.clone(), 2 * base)
        .with_constant(b, inv_one_minus_const(b, a, "1 - a")?)),
        DerivedId::SinghStar => {
            let r1 = rho1.ok_or_else(|| Error::Domain("singh* requires rho1".into()))?;
            let r2 = rho2.ok_or_else(|| Error::Domain("singh* requires rho2".into()))?;
            let aq = b.par_mul(a, &q1);
            let a2q = b.par_mul(a, &aq);
            let r1r2 = b.par_mul(r1, r2);
            Ok(Summand::new(vec![
                SumFactor::fwd(a.clone(), base, "(a; q)_n"),
                SumFactor::fwd(r1.clone(), base, "(rho1; q)_n"),
                SumFactor::fwd(r2.clone(), base, "(rho2; q)_n"),
                SumFactor::fwd(b.par_div(&a2q, &r1r2)?, base, "(a^2 q/(rho1 rho2); q)_n"),
                SumFactor::inv(q1.clone(), base, "(q; q)_n"),
                SumFactor::inv(b.par_div(&aq, r1)?, base, "(aq/rho1; q)_n"),
                SumFactor::inv(b.par_div(&aq, r2)?, base, "(aq/rho2; q)_n"),
                SumFactor::inv(b.par_div(&r1r2, a)?, base, "(rho1 rho2/a; q)_n"),
            ])
            .weighted(b, b.par_inv(a)?)
            .times_one_minus(a.clone(), 2 * base)
            .with_constant(b, inv_one_minus_const(b, a, "1 - a")?))
        }
        DerivedId::SinghRhoInfStar => Ok(Summand::new(vec![
            SumFactor::fwd(a.clone(), base, "(a; q)_n"),
            SumFactor::inv(q1.clone(), base, "(q; q)_n"),
        ])
        .weighted(b, b.par_mono(&QMonomial::constant(-Coefficient::one())))
        .triangular(base)
        .times_one_minus(a.clone(), 2 * base)
        .with_constant(b, inv_one_minus_const(b, a, "1 - a")?)),
        DerivedId::SqrtKStar => {
            let aq = b.par_mul(a, &q1);
            let a2 = b.par_mul(a, a);
            let a2q = b.par_mul(&a2, &q1);
            let minus_one = b.par_mono(&QMonomial::constant(-Coefficient::one()));
            Ok(Summand::new(vec![
                SumFactor::fwd(a.clone(), base, "(a; q)_n"),
                SumFactor::fwd(a.clone(), base, "(a; q)_n"),
                SumFactor::fwd(b.par_neg(&aq), base, "(-aq; q)_n"),
                SumFactor::fwd(b.par_inv(a)?, base, "(1/a; q)_n"),
                SumFactor::fwd(a2q.clone(), 2 * base, "(a^2 q; q^2)_n"),
                SumFactor::inv(q1.clone(), base, "(q; q)_n"),
                SumFactor::inv(q1.clone(), base, "(q; q)_n"),
                SumFactor::inv(minus_one, base, "(-1; q)_n"),
                SumFactor::inv(a2q.clone(), base, "(qa^2; q)_n"),
                SumFactor::inv(q1.clone(), 2 * base, "(q; q^2)_n"),
            ])
            .weighted(b, b.par_inv(a)?)
            .times_one_minus(a.clone(), 2 * base)
            .with_constant(b, inv_one_minus_const(b, a, "1 - a")?))
        }
        DerivedId::SinghRho2InfStar => {
            let r1 = rho1.ok_or_else(|| Error::Domain("singh-rho2-inf* requires rho1".into()))?;
            let aq = b.par_mul(a, &q1);
            Ok(Summand::new(vec![
                SumFactor::fwd(a.clone(), base, "(a; q)_n"),
                SumFactor::fwd(r1.clone(), base, "(rho1; q)_n"),
                SumFactor::inv(q1.clone(), base, "(q; q)_n"),
                SumFactor::inv(b.par_div(&aq, r1)?, base, "(aq/rho1; q)_n"),
            ])
            .weighted(b, b.par_inv(r1)?)
            .times_one_minus(a.clone(), 2 * base)
            .with_constant(b, inv_one_minus_const(b, a, "1 - a")?))
        }
    }
}

/// `β*_n(a)` of the derived pair as a summand (n ≥ 1).
pub fn derived_beta_summand<B: Backend>(
    id: DerivedId,
    b: &B,
    a: &B::Par,
    rho1: Option<&B::Par>,
    rho2: Option<&B::Par>,
    base: i64,
) -> Result<Summand<B>> {
    let q1 = b.q_pow(base);
    let one_par = b.q_pow(0);
    match id {
        DerivedId::UnitStar => Ok(Summand::vanishing()),
        DerivedId::TrivialStar => Ok(Summand::new(vec![
            SumFactor::fwd(b.par_inv(a)?, base, "(1/a; q)_n"),
            SumFactor::inv(b.par_mul(a, &q1), base, "(aq; q)_n"),
        ])
        .over_one_minus(one_par, base, "1 - q^n")),
        DerivedId::SinghStar => {
            let r1 = rho1.ok_or_else(|| Error::Domain("singh* requires rho1".into()))?;
            let r2 = rho2.ok_or_else(|| Error::Domain("singh* requires rho2".into()))?;
            let aq = b.par_mul(a, &q1);
            let r1r2 = b.par_mul(r1, r2);
            Ok(Summand::new(vec![
                SumFactor::fwd(b.par_div(r1, a)?, base, "(rho1/a; q)_n"),
                SumFactor::fwd(b.par_div(r2, a)?, base, "(rho2/a; q)_n"),
                SumFactor::fwd(b.par_div(&aq, &r1r2)?, base, "(aq/(rho1 rho2); q)_n"),
                SumFactor::inv(b.par_div(&aq, r1)?, base, "(aq/rho1; q)_n"),
                SumFactor::inv(b.par_div(&aq, r2)?, base, "(aq/rho2; q)_n"),
                SumFactor::inv(b.par_div(&r1r2, a)?, base, "(rho1 rho2/a; q)_n"),
            ])
            .over_one_minus(one_par, base, "1 - q^n"))
        }
        DerivedId::SinghRhoInfStar => Ok(Summand::new(Vec::new())
            .weighted(b, b.par_neg(&b.par_inv(a)?))
            .triangular(base)
            .over_one_minus(one_par, base, "1 - q^n")),
        DerivedId::SqrtKStar => {
            let a2 = b.par_mul(a, a);
            Ok(Summand::new(vec![
                SumFactor::fwd(b.par_inv(&a2)?, base, "(1/a^2; q)_n"),
                SumFactor::inv(q1.clone(), base, "(q; q)_n"),
            ])
            .over_one_minus(one_par, base, "1 - q^n")
            .with_constant(b, b.scalar(&Coefficient::from_ratio(1, 2))))
        }
        DerivedId::SinghRho2InfStar => {
            let r1 = rho1.ok_or_else(|| Error::Domain("singh-rho2-inf* requires rho1".into()))?;
            let aq = b.par_mul(a, &q1);
            Ok(Summand::new(vec![
                SumFactor::fwd(b.par_div(r1, a)?, base, "(rho1/a; q)_n"),
                SumFactor::inv(b.par_div(&aq, r1)?, base, "(aq/rho1; q)_n"),
            ])
            .weighted(b, b.par_inv(r1)?)
            .over_one_minus(one_par, base, "1 - q^n"))
        }
    }
}

/// `α_n(a, k)` evaluated at one index.
pub fn pair_alpha<B: Backend>(
    id: PairId,
    b: &B,
    n: i64,
    p: &PairPars<B::Par>,
    base: i64,
) -> Result<B::Val> {
    assert!(n >= 0);
    if n == 0 {
        return Ok(b.one());
    }
    pair_alpha_summand(id, b, p, base)?.eval(b, n)
}

/// `β_n(a, k)` evaluated at one index.
pub fn pair_beta<B: Backend>(
    id: PairId,
    b: &B,
    n: i64,
    p: &PairPars<B::Par>,
    base: i64,
) -> Result<B::Val> {
    assert!(n >= 0);
    if n == 0 {
        return Ok(b.one());
    }
    pair_beta_summand(id, b, p, base)?.eval(b, n)
}

/// `α*_n(a)` evaluated at one index (n ≥ 1).
pub fn derived_alpha<B: Backend>(
    id: DerivedId,
    b: &B,
    n: i64,
    a: &B::Par,
    rho1: Option<&B::Par>,
    rho2: Option<&B::Par>,
    base: i64,
) -> Result<B::Val> {
    assert!(n >= 1, "derived pairs are defined for n >= 1");
    derived_alpha_summand(id, b, a, rho1, rho2, base)?.eval(b, n)
}

/// `β*_n(a)` evaluated at one index (n ≥ 1).
pub fn derived_beta<B: Backend>(
    id: DerivedId,
    b: &B,
    n: i64,
    a: &B::Par,
    rho1: Option<&B::Par>,
    rho2: Option<&B::Par>,
    base: i64,
) -> Result<B::Val> {
    assert!(n >= 1, "derived pairs are defined for n >= 1");
    derived_beta_summand(id, b, a, rho1, rho2, base)?.eval(b, n)
}

// ---------------------------------------------------------------------------
// Exact pair instances and the defining-relation checker
// ---------------------------------------------------------------------------

/// A pair with bound exact parameters, evaluable term by term.
pub trait ExactPair {
    fn alpha(&self, n: i64, b: &ExactBackend) -> Result<QSeries>;
    fn beta(&self, n: i64, b: &ExactBackend) -> Result<QSeries>;
    fn a(&self) -> &QMonomial;
    fn k(&self) -> &QMonomial;
    fn base(&self) -> i64;
    fn describe(&self) -> String;
}

#[derive(Clone, Debug)]
pub struct PairInstance {
    pub id: PairId,
    pub pars: PairPars<QMonomial>,
    pub base: i64,
}

impl PairInstance {
    pub fn new(id: PairId, pars: PairPars<QMonomial>, base: i64) -> Result<Self> {
        if id == PairId::SqrtK {
            let s = need(&pars.s, "s (sqrt of k)")?;
            if s.mul(s) != pars.k {
                return Err(Error::Domain(format!(
                    "sqrtk pair requires k = s^2, got k = {} and s^2 = {}",
                    pars.k,
                    s.mul(s)
                )));
            }
        }
        Ok(PairInstance { id, pars, base })
    }
}

impl ExactPair for PairInstance {
    fn alpha(&self, n: i64, b: &ExactBackend) -> Result<QSeries> {
        pair_alpha(self.id, b, n, &self.pars, self.base)
    }
    fn beta(&self, n: i64, b: &ExactBackend) -> Result<QSeries> {
        pair_beta(self.id, b, n, &self.pars, self.base)
    }
    fn a(&self) -> &QMonomial {
        &self.pars.a
    }
    fn k(&self) -> &QMonomial {
        &self.pars.k
    }
    fn base(&self) -> i64 {
        self.base
    }
    fn describe(&self) -> String {
        format!("{} pair at a = {}, k = {}", self.id.token(), self.pars.a, self.pars.k)
    }
}

#[derive(Debug, Clone)]
pub struct WpCheckReport {
    pub pair: String,
    pub n_max: i64,
    pub order: i64,
    pub ok: bool,
    /// `(n, exponent, beta coefficient, summed coefficient)` of the first
    /// mismatch, when any.
    pub first_failure: Option<(i64, i64, Coefficient, Coefficient)>,
}

/// Check the defining relation for `0 ≤ n ≤ n_max`, coefficient-exactly
/// below `order`.
///
/// Negative-exponent weights such as `(k/a)ⁿ` erode the provable order
/// linearly in `n`, so the working pad escalates until the comparison
/// window is fully covered.
pub fn wp_check(pair: &dyn ExactPair, n_max: i64, order: i64) -> Result<WpCheckReport> {
    let mut last = None;
    for pad in [8, 8 + 2 * n_max, 8 + 6 * n_max] {
        match wp_check_at(pair, n_max, order, pad) {
            Ok(rep) => return Ok(rep),
            Err(e @ Error::Domain(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one pad attempted"))
}

fn wp_check_at(pair: &dyn ExactPair, n_max: i64, order: i64, pad: i64) -> Result<WpCheckReport> {
    let b = ExactBackend::new(order + pad);
    let base = pair.base();
    let a = pair.a().clone();
    let k = pair.k().clone();
    let ka = k.div(&a);
    let aq = a.mul(&QMonomial::q_power(base));
    let q1 = QMonomial::q_power(base);

    let alphas: Vec<QSeries> = (0..=n_max)
        .map(|j| pair.alpha(j, &b))
        .collect::<Result<_>>()?;

    // Prefix tables for the weights; W(n,j) factors through u[n-j]·v[n+j].
    let mut u = Vec::with_capacity(2 * n_max as usize + 1);
    let mut v = Vec::with_capacity(2 * n_max as usize + 1);
    for m in 0..=(2 * n_max) {
        u.push(b.poch(&ka, base, m)?.mul(&b.inv_poch(&q1, base, m, "(q; q)_{n-j}")?));
        v.push(b.poch(&k, base, m)?.mul(&b.inv_poch(&aq, base, m, "(aq; q)_{n+j}")?));
    }

    for n in 0..=n_max {
        let lhs = pair.beta(n, &b)?;
        let mut rhs = QSeries::zero();
        for (j, alpha_j) in alphas.iter().enumerate().take(n as usize + 1) {
            let j = j as i64;
            if alpha_j.is_exactly_zero() {
                continue;
            }
            let w = u[(n - j) as usize].mul(&v[(n + j) as usize]);
            rhs = rhs.add(&w.mul(alpha_j));
        }
        if !lhs.order().at_least(order) || !rhs.order().at_least(order) {
            return Err(Error::Domain(format!(
                "insufficient provable order while checking {} at n = {}",
                pair.describe(),
                n
            )));
        }
        if let Some((e, cl, cr)) = lhs.first_mismatch(&rhs, order) {
            return Ok(WpCheckReport {
                pair: pair.describe(),
                n_max,
                order,
                ok: false,
                first_failure: Some((n, e, cl, cr)),
            });
        }
    }
    Ok(WpCheckReport { pair: pair.describe(), n_max, order, ok: true, first_failure: None })
}

// ---------------------------------------------------------------------------
// Chain transform
// ---------------------------------------------------------------------------

/// One step of the chain that maps a pair at `(a, qa²/k)` to a new pair at
/// `(a, k)`:
///
/// ```text
/// α̃_n(a,k) = (qa²/k; q)_{2n} / (k; q)_{2n} · (k²/qa²)^n · α_n(a, qa²/k)
/// β̃_n(a,k) = Σ_{j=0}^n (k²/qa²; q)_{n-j} / (q; q)_{n-j} · (k²/qa²)^j · β_j(a, qa²/k)
/// ```
pub struct ChainedPair {
    src: PairInstance,
    a: QMonomial,
    k: QMonomial,
    base: i64,
    ratio: QMonomial, // k²/(qa²)
}

/// Build the chain step for a catalog pair at monomial `(a, k)`. The source
/// pair is instantiated at the shifted parameter `qa²/k`; for `sqrtk` that
/// parameter would need an exact monomial square root, which is not
/// attempted.
pub fn chain_step(
    id: PairId,
    a: &QMonomial,
    k: &QMonomial,
    rho1: Option<QMonomial>,
    rho2: Option<QMonomial>,
    base: i64,
) -> Result<ChainedPair> {
    if id == PairId::SqrtK {
        return Err(Error::Domain(
            "chain step is not available for the sqrtk pair: qa^2/k has no exact monomial square root in general".into(),
        ));
    }
    let q1 = QMonomial::q_power(base);
    let inner_k = q1.mul(a).mul(a).div(k);
    let ratio = k.mul(k).div(&q1.mul(a).mul(a));
    let mut pars = PairPars::new(a.clone(), inner_k);
    pars.rho1 = rho1;
    pars.rho2 = rho2;
    let src = PairInstance::new(id, pars, base)?;
    Ok(ChainedPair { src, a: a.clone(), k: k.clone(), base, ratio })
}

impl ExactPair for ChainedPair {
    fn alpha(&self, n: i64, b: &ExactBackend) -> Result<QSeries> {
        if n == 0 {
            return Ok(QSeries::one());
        }
        let q1 = QMonomial::q_power(self.base);
        let inner_k = q1.mul(&self.a).mul(&self.a).div(&self.k);
        let num = b.poch(&inner_k, self.base, 2 * n)?;
        let den = b.inv_poch(&self.k, self.base, 2 * n, "(k; q)_{2n}")?;
        let w = QSeries::from_monomial(&self.ratio.powi(n));
        let inner = self.src.alpha(n, b)?;
        Ok(num.mul(&den).mul(&w).mul(&inner))
    }

    fn beta(&self, n: i64, b: &ExactBackend) -> Result<QSeries> {
        let q1 = QMonomial::q_power(self.base);
        let mut acc = QSeries::zero();
        for j in 0..=n {
            let head = b.poch(&self.ratio, self.base, n - j)?;
            let den = b.inv_poch(&q1, self.base, n - j, "(q; q)_{n-j}")?;
            let w = QSeries::from_monomial(&self.ratio.powi(j));
            let inner = self.src.beta(j, b)?;
            acc = acc.add(&head.mul(&den).mul(&w).mul(&inner));
        }
        Ok(acc)
    }

    fn a(&self) -> &QMonomial {
        &self.a
    }
    fn k(&self) -> &QMonomial {
        &self.k
    }
    fn base(&self) -> i64 {
        self.base
    }
    fn describe(&self) -> String {
        format!("chained {} at a = {}, k = {}", self.src.id.token(), self.a, self.k)
    }
}

/// Pole-free monomial `(a, k)` samples for catalog checks, three per pair.
pub fn default_samples(id: PairId) -> Vec<PairPars<QMonomial>> {
    let m = QMonomial::ratio_q;
    match id {
        PairId::Trivial | PairId::Unit => vec![
            PairPars::new(m(2, 1, 1), m(3, 1, 2)),
            PairPars::new(m(3, 1, 1), m(5, 1, 3)),
            PairPars::new(m(5, 1, 2), m(2, 1, 1)),
        ],
        PairId::Singh => vec![
            PairPars::new(m(2, 1, 1), m(3, 1, 2)).with_rhos(m(5, 1, 1), m(7, 1, 1)),
            PairPars::new(m(3, 1, 1), m(2, 1, 3)).with_rhos(m(5, 1, 2), m(7, 1, 2)),
            PairPars::new(m(5, 1, 2), m(2, 1, 1)).with_rhos(m(3, 1, 1), m(7, 1, 3)),
        ],
        PairId::SqrtK => vec![
            PairPars::new(m(3, 1, 1), m(4, 1, 2)).with_sqrt_k(m(2, 1, 1)),
            PairPars::new(m(2, 1, 1), m(9, 1, 4)).with_sqrt_k(m(3, 1, 2)),
            PairPars::new(m(5, 1, 2), m(4, 1, 2)).with_sqrt_k(m(2, 1, 1)),
        ],
        _ => Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// Derived-pair limit probe
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub derived: DerivedId,
    pub n: i64,
    pub eps: f64,
    pub alpha_residual: f64,
    pub beta_residual: f64,
}

/// Numeric check of the k→1 limit: evaluates the source pair at `k = 1-eps`
/// and compares `α_n` against `α*_n` and `β_n/eps` against `β*_n`. Residuals
/// decay linearly in `eps` when the derived pair is the genuine limit.
pub fn derived_limit_probe(
    derived: DerivedId,
    a: Complex64,
    q0: Complex64,
    n: i64,
    eps: f64,
    rho1: Option<Complex64>,
    rho2: Option<Complex64>,
) -> Result<ProbeReport> {
    if q0.norm() >= 1.0 {
        return Err(Error::Domain("probe requires |q| < 1".into()));
    }
    let b = NumericBackend::new(q0);
    let source = derived.source();
    let k = Complex64::new(1.0 - eps, 0.0);
    let mut pars = PairPars::new(a, k);
    pars.rho1 = rho1;
    pars.rho2 = rho2;
    if source == PairId::SqrtK {
        pars.s = Some(k.sqrt());
    }
    let alpha_k = pair_alpha(source, &b, n, &pars, 1)?;
    let beta_k = pair_beta(source, &b, n, &pars, 1)?;
    let alpha_lim = derived_alpha(derived, &b, n, &a, rho1.as_ref(), rho2.as_ref(), 1)?;
    let beta_lim = derived_beta(derived, &b, n, &a, rho1.as_ref(), rho2.as_ref(), 1)?;
    Ok(ProbeReport {
        derived,
        n,
        eps,
        alpha_residual: (alpha_k - alpha_lim).norm(),
        beta_residual: (beta_k / eps - beta_lim).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(num: i64, den: i64, e: i64) -> QMonomial {
        QMonomial::ratio_q(num, den, e)
    }

    #[test]
    fn alpha0_beta0_are_one() {
        let b = ExactBackend::new(20);
        for id in [PairId::Trivial, PairId::Unit, PairId::Singh, PairId::SqrtK] {
            let mut pars = PairPars::new(m(2, 1, 1), m(4, 1, 2));
            pars.rho1 = Some(m(5, 1, 1));
            pars.rho2 = Some(m(7, 1, 1));
            pars.s = Some(m(2, 1, 1));
            assert_eq!(pair_alpha(id, &b, 0, &pars, 1).unwrap(), QSeries::one());
            assert_eq!(pair_beta(id, &b, 0, &pars, 1).unwrap(), QSeries::one());
        }
    }

    #[test]
    fn trivial_pair_satisfies_relation() {
        let inst =
            PairInstance::new(PairId::Trivial, PairPars::new(m(2, 1, 1), m(3, 1, 2)), 1).unwrap();
        let rep = wp_check(&inst, 8, 40).unwrap();
        assert!(rep.ok, "{:?}", rep.first_failure);
    }

    #[test]
    fn unit_pair_satisfies_relation() {
        let inst =
            PairInstance::new(PairId::Unit, PairPars::new(m(2, 1, 1), m(3, 1, 2)), 1).unwrap();
        let rep = wp_check(&inst, 8, 40).unwrap();
        assert!(rep.ok, "{:?}", rep.first_failure);
    }

    #[test]
    fn singh_pair_satisfies_relation() {
        let pars = PairPars::new(m(2, 1, 1), m(3, 1, 2)).with_rhos(m(5, 1, 1), m(7, 1, 1));
        let inst = PairInstance::new(PairId::Singh, pars, 1).unwrap();
        let rep = wp_check(&inst, 6, 40).unwrap();
        assert!(rep.ok, "{:?}", rep.first_failure);
    }

    #[test]
    fn sqrtk_pair_satisfies_relation() {
        let pars = PairPars::new(m(3, 1, 1), m(4, 1, 2)).with_sqrt_k(m(2, 1, 1));
        let inst = PairInstance::new(PairId::SqrtK, pars, 1).unwrap();
        let rep = wp_check(&inst, 6, 40).unwrap();
        assert!(rep.ok, "{:?}", rep.first_failure);
    }

    #[test]
    fn rho_limit_pairs_satisfy_relation() {
        let inst = PairInstance::new(PairId::SinghRhoInf, PairPars::new(m(2, 1, 1), m(3, 1, 2)), 1)
            .unwrap();
        assert!(wp_check(&inst, 6, 40).unwrap().ok);
        let pars = PairPars::new(m(2, 1, 1), m(3, 1, 2)).with_rhos(m(5, 1, 1), m(7, 1, 1));
        let inst = PairInstance::new(PairId::SinghRho2Inf, pars, 1).unwrap();
        assert!(wp_check(&inst, 6, 40).unwrap().ok);
    }

    #[test]
    fn sqrtk_requires_matching_square_root() {
        let pars = PairPars::new(m(3, 1, 1), m(5, 1, 2)).with_sqrt_k(m(2, 1, 1));
        assert!(PairInstance::new(PairId::SqrtK, pars, 1).is_err());
    }

    #[test]
    fn chain_closure_example() {
        let chained =
            chain_step(PairId::Trivial, &m(2, 1, 1), &m(3, 1, 3), None, None, 1).unwrap();
        let rep = wp_check(&chained, 6, 40).unwrap();
        assert!(rep.ok, "{:?}", rep.first_failure);
    }

    #[test]
    fn chain_alpha_beta_start_at_one() {
        let b = ExactBackend::new(30);
        let chained = chain_step(PairId::Unit, &m(2, 1, 1), &m(3, 1, 3), None, None, 1).unwrap();
        assert_eq!(chained.alpha(0, &b).unwrap(), QSeries::one());
        assert_eq!(chained.beta(0, &b).unwrap(), QSeries::one());
    }

    #[test]
    fn probe_trivial_residual_scales() {
        let a = Complex64::new(0.4, 0.0);
        let q = Complex64::new(0.3, 0.0);
        let r3 = derived_limit_probe(DerivedId::TrivialStar, a, q, 3, 1e-3, None, None).unwrap();
        let r4 = derived_limit_probe(DerivedId::TrivialStar, a, q, 3, 1e-4, None, None).unwrap();
        assert!(r3.beta_residual < 1e-1);
        let ratio = r3.beta_residual / r4.beta_residual;
        assert!((5.0..20.0).contains(&ratio), "ratio {ratio}");
        // alpha of the trivial pair is constant in k, so its residual is 0.
        assert!(r3.alpha_residual < 1e-14);
    }

    #[test]
    fn vanishing_denominator_is_a_named_pole() {
        // a = q^{-1} with coefficient 1 makes (aq; q)_{n+j} vanish at j = 0.
        let inst = PairInstance::new(
            PairId::Trivial,
            PairPars::new(QMonomial::q_power(-1), m(3, 1, 2)),
            1,
        )
        .unwrap();
        match wp_check(&inst, 4, 20) {
            Err(Error::PoleDetected { factor }) => assert!(factor.contains("aq")),
            other => panic!("expected PoleDetected, got {other:?}"),
        }
    }

    #[test]
    fn unknown_tokens_rejected() {
        assert!(matches!(catalog_pair("nope"), Err(Error::UnknownPair(_))));
        assert!(matches!(catalog_derived("singh-rho2-inf*"), Err(Error::UnknownPair(_))));
        assert!(catalog_pair("sqrtk").is_ok());
        assert!(catalog_derived("singh-rho-inf*").is_ok());
    }

    #[test]
    fn summand_sum_matches_per_index_eval() {
        // The incremental summation path and single-index evaluation must
        // agree term by term. The host weight (a^2 q)^n makes the series
        // formally summable.
        let b = ExactBackend::new(24);
        let a = m(2, 1, 1);
        let host = b.par_mul(&b.par_mul(&a, &a), &b.q_pow(1));
        let s = Summand::new(Vec::new()).weighted(&b, host).merged(
            &b,
            derived_beta_summand(
                DerivedId::SinghStar,
                &b,
                &a,
                Some(&m(5, 1, 1)),
                Some(&m(7, 1, 1)),
                1,
            )
            .unwrap(),
        );
        let total = s.sum_from(&b, 1).unwrap();
        let mut manual = QSeries::zero();
        for n in 1..40 {
            manual = manual.add(&s.eval(&b, n).unwrap());
        }
        assert!(total.first_mismatch(&manual, 24).is_none());
    }
}
