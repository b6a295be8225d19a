//! Evaluation backends.
//!
//! Identity sides and pair generators are written once against [`Backend`]
//! and run either over exact truncated Laurent series (`ExactBackend`) or
//! over complex points (`NumericBackend`). Parameters are monomials `c·q^m`
//! in exact mode and arbitrary complex numbers in numeric mode, so the same
//! formula code serves coefficient verification, point cross-checks and the
//! off-lattice limit probes.

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::qnumeric::{self, NumericConfig};
use crate::qseries::{
    adaptive_sum, mul_one_minus, one_minus_inv, poch_infinite, poch_pole_index,
    Coefficient, Order, QMonomial, QSeries, SumConfig,
};

pub trait Backend {
    type Val: Clone;
    type Par: Clone;

    fn par_mono(&self, m: &QMonomial) -> Self::Par;
    fn par_mul(&self, x: &Self::Par, y: &Self::Par) -> Self::Par;
    fn par_div(&self, x: &Self::Par, y: &Self::Par) -> Result<Self::Par>;
    fn par_neg(&self, x: &Self::Par) -> Self::Par;
    fn par_inv(&self, x: &Self::Par) -> Result<Self::Par>;
    fn par_pow(&self, x: &Self::Par, e: i64) -> Result<Self::Par>;
    /// The parameter `q^e`.
    fn q_pow(&self, e: i64) -> Self::Par;

    fn one(&self) -> Self::Val;
    fn scalar(&self, c: &Coefficient) -> Self::Val;
    fn embed(&self, x: &Self::Par) -> Self::Val;
    fn add(&self, x: &Self::Val, y: &Self::Val) -> Self::Val;
    fn sub(&self, x: &Self::Val, y: &Self::Val) -> Self::Val;
    fn mul(&self, x: &Self::Val, y: &Self::Val) -> Self::Val;
    fn neg(&self, x: &Self::Val) -> Self::Val;
    fn scale(&self, x: &Self::Val, c: &Coefficient) -> Self::Val;
    /// General inverse of a computed value.
    fn inv(&self, x: &Self::Val) -> Result<Self::Val>;

    /// `1 - x`.
    fn one_minus(&self, x: &Self::Par) -> Self::Val;
    /// `(1 - x)⁻¹` with a pole check; `ctx` names the factor in errors.
    fn inv_one_minus(&self, x: &Self::Par, ctx: &str) -> Result<Self::Val>;
    fn mul_one_minus(&self, v: &Self::Val, x: &Self::Par) -> Self::Val;
    fn mul_inv_one_minus(&self, v: &Self::Val, x: &Self::Par, ctx: &str) -> Result<Self::Val>;

    /// `(x; q^base)_n`.
    fn poch(&self, x: &Self::Par, base: i64, n: i64) -> Result<Self::Val>;
    fn inv_poch(&self, x: &Self::Par, base: i64, n: i64, ctx: &str) -> Result<Self::Val>;
    fn poch_inf(&self, x: &Self::Par, base: i64) -> Result<Self::Val>;
    fn inv_poch_inf(&self, x: &Self::Par, base: i64, ctx: &str) -> Result<Self::Val>;

    /// Multiply a value by a parameter (an O(terms) scaling in exact mode).
    fn scale_par(&self, v: &Self::Val, x: &Self::Par) -> Self::Val;
    /// Re-truncate a value at the working order when it has outgrown it.
    fn clamp(&self, v: Self::Val) -> Self::Val;

    fn sum(&self, start: i64, term: &mut dyn FnMut(i64) -> Result<Self::Val>) -> Result<Self::Val>;

    /// The cubic lattice theta series `Σ_{m,n} q^{m²+mn+n²}`.
    fn theta_lattice_a(&self) -> Result<Self::Val>;
}

// ---------------------------------------------------------------------------
// Exact backend
// ---------------------------------------------------------------------------

/// Exact evaluation at a fixed working order.
///
/// Pochhammer symbols are memoized per `(argument, base, length, inverted)`;
/// consecutive lengths extend the cached value by one factor, which makes
/// the summation loops of the identity builders incremental. The cache is
/// confined to the backend instance, so independent evaluations can run on
/// separate backends in parallel.
pub struct ExactBackend {
    /// All values are provable at least to this truncation order minus the
    /// accumulated valuation slack of the expression.
    pub order: i64,
    pub sum_cfg: SumConfig,
    poch_cache: std::cell::RefCell<std::collections::HashMap<PochKey, QSeries>>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct PochKey {
    x: QMonomial,
    base: i64,
    n: i64,
    inverted: bool,
}

impl ExactBackend {
    pub fn new(order: i64) -> Self {
        ExactBackend {
            order,
            sum_cfg: SumConfig::default(),
            poch_cache: std::cell::RefCell::new(std::collections::HashMap::new()),
        }
    }

    fn poch_cached(&self, x: &QMonomial, base: i64, n: i64, inverted: bool) -> Result<QSeries> {
        if n == 0 {
            return Ok(QSeries::one());
        }
        let key = PochKey { x: x.clone(), base, n, inverted };
        if let Some(v) = self.poch_cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let prev = self.poch_cached(x, base, n - 1, inverted)?;
        let f = x.shifted(base * (n - 1));
        let v = if inverted {
            prev.mul(&one_minus_inv(&f, self.order)?)
        } else {
            let next = mul_one_minus(&prev, &f);
            // Safe to truncate only once the factor exponents are
            // nonnegative; earlier factors keep the polynomial exact.
            if f.expo() >= 0 {
                let reaches = next.terms().last().map(|(e, _)| e >= self.order).unwrap_or(false);
                if reaches {
                    next.truncated(Order::Finite(self.order))
                } else {
                    next
                }
            } else {
                next
            }
        };
        self.poch_cache.borrow_mut().insert(key, v.clone());
        Ok(v)
    }
}

impl Backend for ExactBackend {
    type Val = QSeries;
    type Par = QMonomial;

    fn par_mono(&self, m: &QMonomial) -> QMonomial {
        m.clone()
    }
    fn par_mul(&self, x: &QMonomial, y: &QMonomial) -> QMonomial {
        x.mul(y)
    }
    fn par_div(&self, x: &QMonomial, y: &QMonomial) -> Result<QMonomial> {
        Ok(x.div(y))
    }
    fn par_neg(&self, x: &QMonomial) -> QMonomial {
        x.neg()
    }
    fn par_inv(&self, x: &QMonomial) -> Result<QMonomial> {
        Ok(x.inv())
    }
    fn par_pow(&self, x: &QMonomial, e: i64) -> Result<QMonomial> {
        Ok(x.powi(e))
    }
    fn q_pow(&self, e: i64) -> QMonomial {
        QMonomial::q_power(e)
    }

    fn one(&self) -> QSeries {
        QSeries::one()
    }
    fn scalar(&self, c: &Coefficient) -> QSeries {
        QSeries::constant(c)
    }
    fn embed(&self, x: &QMonomial) -> QSeries {
        QSeries::from_monomial(x)
    }
    fn add(&self, x: &QSeries, y: &QSeries) -> QSeries {
        x.add(y)
    }
    fn sub(&self, x: &QSeries, y: &QSeries) -> QSeries {
        x.sub(y)
    }
    fn mul(&self, x: &QSeries, y: &QSeries) -> QSeries {
        x.mul(y)
    }
    fn neg(&self, x: &QSeries) -> QSeries {
        x.neg()
    }
    fn scale(&self, x: &QSeries, c: &Coefficient) -> QSeries {
        x.scale_coeff(c)
    }
    fn inv(&self, x: &QSeries) -> Result<QSeries> {
        x.invert(self.order)
    }

    fn one_minus(&self, x: &QMonomial) -> QSeries {
        QSeries::one().sub(&QSeries::from_monomial(x))
    }
    fn inv_one_minus(&self, x: &QMonomial, ctx: &str) -> Result<QSeries> {
        one_minus_inv(x, self.order).map_err(|e| name_pole(e, ctx))
    }
    fn mul_one_minus(&self, v: &QSeries, x: &QMonomial) -> QSeries {
        mul_one_minus(v, x)
    }
    fn mul_inv_one_minus(&self, v: &QSeries, x: &QMonomial, ctx: &str) -> Result<QSeries> {
        Ok(v.mul(&self.inv_one_minus(x, ctx)?))
    }

    fn poch(&self, x: &QMonomial, base: i64, n: i64) -> Result<QSeries> {
        self.poch_cached(x, base, n, false)
    }
    fn inv_poch(&self, x: &QMonomial, base: i64, n: i64, ctx: &str) -> Result<QSeries> {
        if let Some(j) = poch_pole_index(x, base, Some(n)) {
            return Err(Error::PoleDetected {
                factor: format!("{ctx}: factor 1 - {}", x.shifted(base * j)),
            });
        }
        self.poch_cached(x, base, n, true)
    }
    fn poch_inf(&self, x: &QMonomial, base: i64) -> Result<QSeries> {
        Ok(poch_infinite(x, base, self.order))
    }
    fn inv_poch_inf(&self, x: &QMonomial, base: i64, ctx: &str) -> Result<QSeries> {
        if let Some(j) = poch_pole_index(x, base, None) {
            return Err(Error::PoleDetected {
                factor: format!("{ctx}: factor 1 - {}", x.shifted(base * j)),
            });
        }
        poch_infinite(x, base, self.order).invert(self.order)
    }

    fn scale_par(&self, v: &QSeries, x: &QMonomial) -> QSeries {
        v.scale_mono(x)
    }
    fn clamp(&self, v: QSeries) -> QSeries {
        let reaches = v.terms().last().map(|(e, _)| e >= self.order).unwrap_or(false);
        if reaches {
            v.truncated(Order::Finite(self.order))
        } else {
            v
        }
    }

    fn sum(&self, start: i64, term: &mut dyn FnMut(i64) -> Result<QSeries>) -> Result<QSeries> {
        adaptive_sum(term, start, self.order, &self.sum_cfg)
    }

    fn theta_lattice_a(&self) -> Result<QSeries> {
        let order = self.order;
        // On the boundary |m| = B or |n| = B the quadratic form is at least
        // (3/4)B², so B with (3/4)B² >= order covers every exponent < order.
        let mut b = 1i64;
        while 3 * b * b < 4 * order {
            b += 1;
        }
        b += 1;
        let mut counts = std::collections::BTreeMap::new();
        for m in -b..=b {
            for n in -b..=b {
                let e = m * m + m * n + n * n;
                if e < order {
                    *counts.entry(e).or_insert(0i64) += 1;
                }
            }
        }
        let terms = counts
            .into_iter()
            .map(|(e, c)| (e, Coefficient::from_int(c)))
            .collect();
        Ok(QSeries::from_terms(terms, Order::Finite(order)))
    }
}

fn name_pole(e: Error, ctx: &str) -> Error {
    match e {
        Error::PoleDetected { factor } => Error::PoleDetected { factor: format!("{ctx}: {factor}") },
        other => other,
    }
}

// ---------------------------------------------------------------------------
// Numeric backend
// ---------------------------------------------------------------------------

/// Complex-point evaluation at `q0` with |q0| < 1.
#[derive(Clone, Debug)]
pub struct NumericBackend {
    pub q0: Complex64,
    pub cfg: NumericConfig,
}

impl NumericBackend {
    pub fn new(q0: Complex64) -> Self {
        NumericBackend { q0, cfg: NumericConfig::default() }
    }

    fn qb(&self, base: i64) -> Complex64 {
        self.q0.powi(base as i32)
    }
}

impl Backend for NumericBackend {
    type Val = Complex64;
    type Par = Complex64;

    fn par_mono(&self, m: &QMonomial) -> Complex64 {
        m.eval(self.q0)
    }
    fn par_mul(&self, x: &Complex64, y: &Complex64) -> Complex64 {
        x * y
    }
    fn par_div(&self, x: &Complex64, y: &Complex64) -> Result<Complex64> {
        if y.norm() == 0.0 {
            return Err(Error::Domain("division by zero parameter".into()));
        }
        Ok(x / y)
    }
    fn par_neg(&self, x: &Complex64) -> Complex64 {
        -x
    }
    fn par_inv(&self, x: &Complex64) -> Result<Complex64> {
        if x.norm() == 0.0 {
            return Err(Error::Domain("inverse of zero parameter".into()));
        }
        Ok(1.0 / x)
    }
    fn par_pow(&self, x: &Complex64, e: i64) -> Result<Complex64> {
        if e < 0 && x.norm() == 0.0 {
            return Err(Error::Domain("zero parameter to negative power".into()));
        }
        Ok(x.powi(e as i32))
    }
    fn q_pow(&self, e: i64) -> Complex64 {
        self.q0.powi(e as i32)
    }

    fn one(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
    fn scalar(&self, c: &Coefficient) -> Complex64 {
        c.to_c64()
    }
    fn embed(&self, x: &Complex64) -> Complex64 {
        *x
    }
    fn add(&self, x: &Complex64, y: &Complex64) -> Complex64 {
        x + y
    }
    fn sub(&self, x: &Complex64, y: &Complex64) -> Complex64 {
        x - y
    }
    fn mul(&self, x: &Complex64, y: &Complex64) -> Complex64 {
        x * y
    }
    fn neg(&self, x: &Complex64) -> Complex64 {
        -x
    }
    fn scale(&self, x: &Complex64, c: &Coefficient) -> Complex64 {
        x * c.to_c64()
    }
    fn inv(&self, x: &Complex64) -> Result<Complex64> {
        if x.norm() == 0.0 {
            return Err(Error::Domain("inverse of zero value".into()));
        }
        Ok(1.0 / x)
    }

    fn one_minus(&self, x: &Complex64) -> Complex64 {
        self.one() - x
    }
    fn inv_one_minus(&self, x: &Complex64, ctx: &str) -> Result<Complex64> {
        let f = self.one() - x;
        if f.norm() < self.cfg.pole_tol {
            return Err(Error::PoleProximity { factor: ctx.to_string(), magnitude: f.norm() });
        }
        Ok(1.0 / f)
    }
    fn mul_one_minus(&self, v: &Complex64, x: &Complex64) -> Complex64 {
        v * (self.one() - x)
    }
    fn mul_inv_one_minus(&self, v: &Complex64, x: &Complex64, ctx: &str) -> Result<Complex64> {
        Ok(v * self.inv_one_minus(x, ctx)?)
    }

    fn poch(&self, x: &Complex64, base: i64, n: i64) -> Result<Complex64> {
        qnumeric::num_poch(*x, self.qb(base), Some(n), &self.cfg)
    }
    fn inv_poch(&self, x: &Complex64, base: i64, n: i64, ctx: &str) -> Result<Complex64> {
        let v = qnumeric::num_poch(*x, self.qb(base), Some(n), &self.cfg)
            .map_err(|e| name_pole_numeric(e, ctx))?;
        if v.norm() == 0.0 {
            return Err(Error::PoleProximity { factor: ctx.to_string(), magnitude: 0.0 });
        }
        Ok(1.0 / v)
    }
    fn poch_inf(&self, x: &Complex64, base: i64) -> Result<Complex64> {
        qnumeric::num_poch(*x, self.qb(base), None, &self.cfg)
    }
    fn inv_poch_inf(&self, x: &Complex64, base: i64, ctx: &str) -> Result<Complex64> {
        let v = qnumeric::num_poch(*x, self.qb(base), None, &self.cfg)
            .map_err(|e| name_pole_numeric(e, ctx))?;
        if v.norm() < self.cfg.pole_tol {
            return Err(Error::PoleProximity { factor: ctx.to_string(), magnitude: v.norm() });
        }
        Ok(1.0 / v)
    }

    fn scale_par(&self, v: &Complex64, x: &Complex64) -> Complex64 {
        v * x
    }
    fn clamp(&self, v: Complex64) -> Complex64 {
        v
    }

    fn sum(&self, start: i64, term: &mut dyn FnMut(i64) -> Result<Complex64>) -> Result<Complex64> {
        qnumeric::num_sum(term, start, &self.cfg)
    }

    fn theta_lattice_a(&self) -> Result<Complex64> {
        let mut b = 1i64;
        // |q0|^{(3/4)B²} below the tail tolerance bounds the neglected shell.
        while self.q0.norm().powf(0.75 * (b * b) as f64) > self.cfg.term_tol {
            b += 1;
            if b > 400 {
                return Err(Error::NonConvergent("lattice theta sum tail too slow".into()));
            }
        }
        b += 2;
        let mut acc = Complex64::new(0.0, 0.0);
        for m in -b..=b {
            for n in -b..=b {
                let e = m * m + m * n + n * n;
                acc += self.q0.powi(e as i32);
            }
        }
        Ok(acc)
    }
}

fn name_pole_numeric(e: Error, ctx: &str) -> Error {
    match e {
        Error::PoleProximity { factor, magnitude } => {
            Error::PoleProximity { factor: format!("{ctx}: {factor}"), magnitude }
        }
        other => other,
    }
}

// ---------------------------------------------------------------------------
// Factor products for summand terms
// ---------------------------------------------------------------------------

/// One pochhammer factor of a summand, with length `stride·n + offset`
/// (clamped at zero) in the summation index `n`.
#[derive(Clone)]
pub struct SumFactor<P> {
    pub x: P,
    pub base: i64,
    pub stride: i64,
    pub offset: i64,
    pub invert: bool,
    pub ctx: &'static str,
}

impl<P> SumFactor<P> {
    pub fn fwd(x: P, base: i64, ctx: &'static str) -> Self {
        SumFactor { x, base, stride: 1, offset: 0, invert: false, ctx }
    }
    pub fn inv(x: P, base: i64, ctx: &'static str) -> Self {
        SumFactor { x, base, stride: 1, offset: 0, invert: true, ctx }
    }
    pub fn with_count(mut self, stride: i64, offset: i64) -> Self {
        self.stride = stride;
        self.offset = offset;
        self
    }
}

/// Running product of pochhammer factors, advanced one summation index at a
/// time so each new term costs one factor update per pochhammer.
pub struct FactorProduct<B: Backend> {
    factors: Vec<(SumFactor<B::Par>, i64)>,
    val: B::Val,
    n: i64,
}

impl<B: Backend> FactorProduct<B> {
    pub fn start(b: &B, factors: Vec<SumFactor<B::Par>>, n0: i64) -> Result<Self> {
        let mut val = b.one();
        let mut with_counts = Vec::with_capacity(factors.len());
        for f in factors {
            let count = (f.stride * n0 + f.offset).max(0);
            let piece = if f.invert {
                b.inv_poch(&f.x, f.base, count, f.ctx)?
            } else {
                b.poch(&f.x, f.base, count)?
            };
            val = b.mul(&val, &piece);
            with_counts.push((f, count));
        }
        Ok(FactorProduct { factors: with_counts, val, n: n0 })
    }

    pub fn advance_to(&mut self, b: &B, n: i64) -> Result<()> {
        assert!(n >= self.n, "factor products advance forward only");
        while self.n < n {
            self.n += 1;
            for (f, count) in &mut self.factors {
                let target = (f.stride * self.n + f.offset).max(0);
                while *count < target {
                    let t = b.par_mul(&f.x, &b.q_pow(f.base * *count));
                    self.val = if f.invert {
                        b.mul_inv_one_minus(&self.val, &t, f.ctx)?
                    } else {
                        b.clamp(b.mul_one_minus(&self.val, &t))
                    };
                    *count += 1;
                }
            }
        }
        Ok(())
    }

    pub fn value(&self) -> &B::Val {
        &self.val
    }
}
