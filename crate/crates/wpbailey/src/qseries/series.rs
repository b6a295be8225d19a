//! Truncated Laurent series in `q` over the Gaussian rationals.
//!
//! A series carries a provable truncation bound: coefficients at exponents
//! `< order` are exact, coefficients at or beyond it are unknown (not zero).
//! Every ring operation propagates the tightest bound it can prove, so a
//! result never reports coefficients that the inputs cannot justify.
//! Laurent polynomials built from monomials are known at every exponent and
//! carry `Order::Exact`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

use super::coeff::Coefficient;
use super::monomial::QMonomial;

/// Provable truncation bound of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// Coefficients known exactly for all exponents `< n`.
    Finite(i64),
    /// Every coefficient is known (the series is a Laurent polynomial).
    Exact,
}

impl Order {
    pub fn min_with(self, other: Order) -> Order {
        match (self, other) {
            (Order::Exact, o) | (o, Order::Exact) => o,
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a.min(b)),
        }
    }

    pub fn shifted(self, d: i64) -> Order {
        match self {
            Order::Exact => Order::Exact,
            Order::Finite(n) => Order::Finite(n + d),
        }
    }

    /// True when exponent `e` lies below the bound (its coefficient is known).
    pub fn covers(self, e: i64) -> bool {
        match self {
            Order::Exact => true,
            Order::Finite(n) => e < n,
        }
    }

    pub fn at_least(self, n: i64) -> bool {
        match self {
            Order::Exact => true,
            Order::Finite(m) => m >= n,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Order::Exact => None,
            Order::Finite(n) => Some(n),
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct QSeries {
    coeffs: BTreeMap<i64, Coefficient>,
    order: Order,
}

impl QSeries {
    /// The canonical zero series, known to every order.
    pub fn zero() -> Self {
        QSeries { coeffs: BTreeMap::new(), order: Order::Exact }
    }

    pub fn one() -> Self {
        QSeries::from_monomial(&QMonomial::one())
    }

    pub fn from_monomial(m: &QMonomial) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(m.expo(), m.coeff().clone());
        QSeries { coeffs, order: Order::Exact }
    }

    pub fn constant(c: &Coefficient) -> Self {
        if c.is_zero() {
            QSeries::zero()
        } else {
            QSeries::from_monomial(&QMonomial::constant(c.clone()))
        }
    }

    pub fn q_power(e: i64) -> Self {
        QSeries::from_monomial(&QMonomial::q_power(e))
    }

    /// Test helper: build from explicit `(exponent, coefficient)` terms.
    pub fn from_terms(terms: Vec<(i64, Coefficient)>, order: Order) -> Self {
        let mut coeffs = BTreeMap::new();
        for (e, c) in terms {
            if !c.is_zero() && order.covers(e) {
                coeffs.insert(e, c);
            }
        }
        QSeries { coeffs, order }
    }

    pub fn order(&self) -> Order {
        self.order
    }

    /// Least exponent with a (known) nonzero coefficient.
    pub fn val(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// True when no nonzero coefficient is tracked. For a `Finite` order this
    /// only means the series is `O(q^order)`; for `Exact` it is really zero.
    pub fn is_zero_window(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.coeffs.is_empty() && self.order == Order::Exact
    }

    /// Lower bound on the valuation, usable for order bookkeeping even when
    /// the tracked window is empty. `None` means `+∞` (the exact zero).
    pub fn val_floor(&self) -> Option<i64> {
        match self.val() {
            Some(v) => Some(v),
            None => self.order.finite(),
        }
    }

    /// Coefficient of `q^e`, zero-filled. Callers must ensure `e` is below
    /// the truncation bound; use `coeff_window` for checked access.
    pub fn coeff(&self, e: i64) -> Coefficient {
        self.coeffs.get(&e).cloned().unwrap_or_else(Coefficient::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Coefficient)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let order = self.order.min_with(other.order);
        let mut coeffs = BTreeMap::new();
        for (&e, c) in &self.coeffs {
            if order.covers(e) {
                coeffs.insert(e, c.clone());
            }
        }
        for (&e, c) in &other.coeffs {
            if !order.covers(e) {
                continue;
            }
            let sum = match coeffs.get(&e) {
                Some(prev) => prev + c,
                None => c.clone(),
            };
            if sum.is_zero() {
                coeffs.remove(&e);
            } else {
                coeffs.insert(e, sum);
            }
        }
        QSeries { coeffs, order }
    }

    pub fn neg(&self) -> QSeries {
        let coeffs = self.coeffs.iter().map(|(&e, c)| (e, -c)).collect();
        QSeries { coeffs, order: self.order }
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    /// Product with the valuation-aware truncation rule: multiplying series
    /// of orders `N₁, N₂` and valuations `v₁, v₂` proves the result to order
    /// `min(N₁+v₂, N₂+v₁)`.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        if self.is_exactly_zero() || other.is_exactly_zero() {
            return QSeries::zero();
        }
        let mut order = Order::Exact;
        if let Some(n1) = self.order.finite() {
            // other.val_floor() is Some here: `other` is not the exact zero.
            order = order.min_with(Order::Finite(n1 + other.val_floor().unwrap()));
        }
        if let Some(n2) = other.order.finite() {
            order = order.min_with(Order::Finite(n2 + self.val_floor().unwrap()));
        }
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return QSeries { coeffs: BTreeMap::new(), order };
        }
        // Accumulate into a dense buffer over the compact exponent range.
        let lo = self.val().unwrap() + other.val().unwrap();
        let hi_raw = self.coeffs.keys().next_back().unwrap()
            + other.coeffs.keys().next_back().unwrap()
            + 1;
        let hi = match order {
            Order::Exact => hi_raw,
            Order::Finite(n) => hi_raw.min(n),
        };
        if hi <= lo {
            return QSeries { coeffs: BTreeMap::new(), order };
        }
        let mut buf: Vec<Option<Coefficient>> = vec![None; (hi - lo) as usize];
        for (&ka, ca) in &self.coeffs {
            for (&kb, cb) in &other.coeffs {
                let e = ka + kb;
                if e >= hi {
                    break; // kb ascending: all later products overflow too
                }
                let p = ca * cb;
                let slot = &mut buf[(e - lo) as usize];
                *slot = Some(match slot.take() {
                    Some(prev) => &prev + &p,
                    None => p,
                });
            }
        }
        let coeffs = buf
            .into_iter()
            .enumerate()
            .filter_map(|(i, c)| {
                c.and_then(|c| if c.is_zero() { None } else { Some((lo + i as i64, c)) })
            })
            .collect();
        QSeries { coeffs, order }
    }

    /// Multiply by a monomial: exponent shift plus exact scaling.
    pub fn scale_mono(&self, m: &QMonomial) -> QSeries {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&e, c)| (e + m.expo(), c * m.coeff()))
            .collect();
        QSeries { coeffs, order: self.order.shifted(m.expo()) }
    }

    pub fn scale_coeff(&self, c: &Coefficient) -> QSeries {
        if c.is_zero() {
            return match self.order {
                Order::Exact => QSeries::zero(),
                o => QSeries { coeffs: BTreeMap::new(), order: o },
            };
        }
        let coeffs = self.coeffs.iter().map(|(&e, x)| (e, x * c)).collect();
        QSeries { coeffs, order: self.order }
    }

    /// Restrict to a (possibly) smaller truncation bound.
    pub fn truncated(&self, order: Order) -> QSeries {
        let order = self.order.min_with(order);
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&e, _)| order.covers(e))
            .map(|(&e, c)| (e, c.clone()))
            .collect();
        QSeries { coeffs, order }
    }

    /// Multiplicative inverse, provable to `x·y = 1 + O(q^cap)`.
    ///
    /// The leading monomial `c·q^v` is factored out and `(1+g)⁻¹` expanded as
    /// a Neumann series in the tail `g` (valuation ≥ 1 after normalization).
    /// Fails with `SingularSeries` when no nonzero coefficient is tracked.
    pub fn invert(&self, cap: i64) -> Result<QSeries> {
        let v = self.val().ok_or(Error::SingularSeries)?;
        let lead = self.coeffs[&v].clone();
        let y_order = match self.order {
            Order::Exact => cap - v,
            Order::Finite(n) => (cap - v).min(n - 2 * v),
        };
        if y_order <= -v {
            return Ok(QSeries { coeffs: BTreeMap::new(), order: Order::Finite(y_order) });
        }
        let t = y_order + v; // working order for the normalized tail
        let lead_inv = QMonomial::new(lead, v).inv();
        // g = x/(c·q^v) - 1 has valuation >= 1; h = (1+g)^{-1} satisfies
        // h_0 = 1, h_n = -sum_{e<=n} g_e h_{n-e}.
        let g = self
            .scale_mono(&lead_inv)
            .truncated(Order::Finite(t))
            .sub(&QSeries::one());
        let g_terms: Vec<(i64, Coefficient)> =
            g.terms().map(|(e, c)| (e, c.clone())).collect();
        let mut h = vec![Coefficient::zero(); t.max(1) as usize];
        h[0] = Coefficient::one();
        for n in 1..t {
            let mut s = Coefficient::zero();
            for (e, ge) in &g_terms {
                if *e > n {
                    break;
                }
                let prev = &h[(n - e) as usize];
                if !prev.is_zero() {
                    s = &s + &(ge * prev);
                }
            }
            h[n as usize] = -s;
        }
        let acc = QSeries::from_terms(
            h.into_iter().enumerate().map(|(e, c)| (e as i64, c)).collect(),
            Order::Finite(t),
        );
        Ok(acc.scale_mono(&lead_inv))
    }

    /// Substitute `q -> q^k` for `k ≥ 1`.
    pub fn substitute_power(&self, k: i64) -> QSeries {
        assert!(k >= 1, "substitution power must be positive");
        let coeffs = self.coeffs.iter().map(|(&e, c)| (e * k, c.clone())).collect();
        let order = match self.order {
            Order::Exact => Order::Exact,
            // Exponents that are not multiples of k are known zero, so the
            // first genuinely unknown exponent is k·N.
            Order::Finite(n) => Order::Finite(n * k),
        };
        QSeries { coeffs, order }
    }

    /// Coefficients for exponents `lo..hi`, zero-filled where absent.
    pub fn coeff_window(&self, lo: i64, hi: i64) -> Result<Vec<Coefficient>> {
        if let Order::Finite(n) = self.order {
            if hi > n {
                return Err(Error::WindowExceedsOrder { lo, hi, order: n });
            }
        }
        Ok((lo..hi).map(|e| self.coeff(e)).collect())
    }

    /// First exponent `< below` where the two series disagree.
    pub fn first_mismatch(&self, other: &QSeries, below: i64) -> Option<(i64, Coefficient, Coefficient)> {
        let mut exps: Vec<i64> = self
            .coeffs
            .keys()
            .chain(other.coeffs.keys())
            .copied()
            .filter(|&e| e < below)
            .collect();
        exps.sort_unstable();
        exps.dedup();
        for e in exps {
            let l = self.coeff(e);
            let r = other.coeff(e);
            if l != r {
                return Some((e, l, r));
            }
        }
        None
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        } else {
            for (i, (e, c)) in self.coeffs.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                if *e == 0 {
                    write!(f, "({})", c)?;
                } else {
                    write!(f, "({})q^{}", c, e)?;
                }
            }
        }
        match self.order {
            Order::Finite(n) => write!(f, " + O(q^{})", n),
            Order::Exact => Ok(()),
        }
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> Coefficient {
        Coefficient::from_int(n)
    }

    fn one_minus_q() -> QSeries {
        QSeries::from_terms(vec![(0, c(1)), (1, c(-1))], Order::Exact)
    }

    #[test]
    fn difference_of_squares() {
        let l = one_minus_q();
        let r = QSeries::from_terms(vec![(0, c(1)), (1, c(1))], Order::Exact);
        let p = l.mul(&r);
        assert_eq!(p, QSeries::from_terms(vec![(0, c(1)), (2, c(-1))], Order::Exact));
    }

    #[test]
    fn additive_identity_preserves_order() {
        let x = QSeries::from_terms(vec![(0, c(1)), (3, c(5))], Order::Finite(7));
        let y = x.add(&QSeries::zero());
        assert_eq!(y, x);
        assert_eq!(y.order(), Order::Finite(7));
    }

    #[test]
    fn two_factor_product_by_hand() {
        // (1-q)(1-q^2) = 1 - q - q^2 + q^3
        let p = one_minus_q().mul(&QSeries::from_terms(
            vec![(0, c(1)), (2, c(-1))],
            Order::Exact,
        ));
        let expect = QSeries::from_terms(
            vec![(0, c(1)), (1, c(-1)), (2, c(-1)), (3, c(1))],
            Order::Exact,
        );
        assert_eq!(p, expect);
    }

    #[test]
    fn mul_order_bound_is_valuation_aware() {
        // x = q^2 + O(q^5), y = q^3 + O(q^4): provable order min(5+3, 4+2) = 6.
        let x = QSeries::from_terms(vec![(2, c(1))], Order::Finite(5));
        let y = QSeries::from_terms(vec![(3, c(1))], Order::Finite(4));
        let p = x.mul(&y);
        assert_eq!(p.order(), Order::Finite(6));
        assert_eq!(p.coeff(5), c(1));
    }

    #[test]
    fn invert_geometric() {
        let inv = one_minus_q().invert(5).unwrap();
        assert_eq!(inv.order(), Order::Finite(5));
        let expect = QSeries::from_terms(
            vec![(0, c(1)), (1, c(1)), (2, c(1)), (3, c(1)), (4, c(1))],
            Order::Finite(5),
        );
        assert_eq!(inv, expect);
    }

    #[test]
    fn invert_constant() {
        let x = QSeries::constant(&Coefficient::from_ratio(3, 4));
        let inv = x.invert(6).unwrap();
        assert_eq!(inv.coeff(0), Coefficient::from_ratio(4, 3));
    }

    #[test]
    fn invert_shifted_geometric() {
        // 1/(q(1-q)) = q^-1 + 1 + q + q^2 + O(q^3), provable to x*y = 1 + O(q^4).
        let x = QSeries::from_monomial(&QMonomial::q_power(1)).mul(&one_minus_q());
        let inv = x.invert(4).unwrap();
        assert_eq!(inv.order(), Order::Finite(3));
        let expect = QSeries::from_terms(
            vec![(-1, c(1)), (0, c(1)), (1, c(1)), (2, c(1))],
            Order::Finite(3),
        );
        assert_eq!(inv, expect);
        let prod = x.mul(&inv);
        assert!(prod.first_mismatch(&QSeries::one(), 4).is_none());
    }

    #[test]
    fn invert_zero_fails() {
        assert_eq!(QSeries::zero().invert(5), Err(Error::SingularSeries));
        let hidden = QSeries::from_terms(vec![], Order::Finite(3));
        assert_eq!(hidden.invert(5), Err(Error::SingularSeries));
    }

    #[test]
    fn invert_negative_valuation() {
        // 1 - (1/3)q^-1 has valuation -1; its inverse has valuation +1.
        let x = QSeries::from_terms(
            vec![(-1, Coefficient::from_ratio(-1, 3)), (0, c(1))],
            Order::Exact,
        );
        let inv = x.invert(6).unwrap();
        assert_eq!(inv.val(), Some(1));
        let prod = x.mul(&inv);
        assert!(prod.first_mismatch(&QSeries::one(), 6).is_none());
    }

    #[test]
    fn substitute_power_examples() {
        let x = QSeries::from_terms(vec![(0, c(1)), (1, c(1))], Order::Exact);
        assert_eq!(
            x.substitute_power(3),
            QSeries::from_terms(vec![(0, c(1)), (3, c(1))], Order::Exact)
        );
        let m = QSeries::q_power(-1).substitute_power(2);
        assert_eq!(m, QSeries::q_power(-2));
        let geo = one_minus_q().invert(4).unwrap().substitute_power(2);
        assert!(geo.order().at_least(7));
        let expect = QSeries::from_terms(
            vec![(0, c(1)), (2, c(1)), (4, c(1)), (6, c(1))],
            geo.order(),
        );
        assert_eq!(geo, expect);
    }

    #[test]
    fn coeff_window_reads() {
        let x = one_minus_q();
        let w = x.coeff_window(0, 3).unwrap();
        assert_eq!(w, vec![c(1), c(-1), c(0)]);
        let z = QSeries::zero().coeff_window(-2, 2).unwrap();
        assert_eq!(z, vec![c(0); 4]);
        let bounded = QSeries::from_terms(vec![(0, c(1))], Order::Finite(4));
        assert!(matches!(
            bounded.coeff_window(0, 6),
            Err(Error::WindowExceedsOrder { hi: 6, order: 4, .. })
        ));
    }
}
