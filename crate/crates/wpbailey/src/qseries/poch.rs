//! q-Pochhammer symbols over the exact kernel.
//!
//! `(x; q^b)_n = (1-x)(1-xq^b)⋯(1-xq^{b(n-1)})` for monomial or series `x`,
//! together with the truncated infinite product and the geometric-series
//! fast path for `(1 - c·q^m)⁻¹`.

use crate::error::{Error, Result};

use super::coeff::Coefficient;
use super::monomial::QMonomial;
use super::series::{Order, QSeries};

/// Truncate only when the polynomial actually reaches the cap, so small
/// exact products keep their `Exact` order.
fn truncate_lazily(s: QSeries, cap: i64) -> QSeries {
    let reaches = s.terms().last().map(|(e, _)| e >= cap).unwrap_or(false);
    if reaches {
        s.truncated(Order::Finite(cap))
    } else {
        s
    }
}

/// Multiply `acc` by the factor `(1 - m)` in O(terms).
pub fn mul_one_minus(acc: &QSeries, m: &QMonomial) -> QSeries {
    acc.sub(&acc.scale_mono(m))
}

/// Finite product `(x; q^base)_n`, coefficients provable below `cap`.
///
/// Factors are processed in ascending exponent order; once the running
/// exponent is nonnegative the accumulator can be truncated at `cap` without
/// losing any coefficient below it.
pub fn poch_finite(x: &QMonomial, base: i64, n: i64, cap: i64) -> QSeries {
    assert!(base >= 1, "base power must be positive");
    assert!(n >= 0, "pochhammer length must be nonnegative");
    let mut acc = QSeries::one();
    for j in 0..n {
        let f = x.shifted(base * j);
        acc = mul_one_minus(&acc, &f);
        if acc.is_exactly_zero() {
            return acc;
        }
        if f.expo() >= 0 {
            acc = truncate_lazily(acc, cap);
        }
    }
    truncate_lazily(acc, cap)
}

/// Finite product with a series argument: `(1-x)(1-xq^b)⋯`.
pub fn poch_finite_series(x: &QSeries, base: i64, n: i64, cap: i64) -> QSeries {
    assert!(base >= 1);
    assert!(n >= 0);
    let mut acc = QSeries::one();
    for j in 0..n {
        let factor = QSeries::one().sub(&x.scale_mono(&QMonomial::q_power(base * j)));
        acc = acc.mul(&factor);
        acc = acc.truncated(acc.order().min_with(Order::Finite(cap)));
    }
    acc
}

/// Exponent at which the `j`-th pole test fires, if `x·q^{b·j} = 1` exactly
/// for some admissible `j`. Returns the offending `j`.
pub fn poch_pole_index(x: &QMonomial, base: i64, count: Option<i64>) -> Option<i64> {
    if !x.coeff().is_one() {
        return None;
    }
    if x.expo() > 0 || x.expo() % base != 0 {
        return None;
    }
    let j = -x.expo() / base;
    match count {
        Some(n) if j >= n => None,
        _ => Some(j),
    }
}

/// Truncation of the infinite product `(x; q^base)_∞`.
///
/// Factors whose exponent reaches `order` contribute `1 + O(q^order)` and are
/// skipped. A factor that is exactly zero yields the exact zero series.
/// Finitely many factors may have negative exponents; they lower the provable
/// order of the result by their total valuation.
pub fn poch_infinite(x: &QMonomial, base: i64, order: i64) -> QSeries {
    assert!(base >= 1);
    if poch_pole_index(x, base, None).is_some() {
        return QSeries::zero();
    }
    let mut vneg = 0i64;
    {
        let mut j = 0;
        loop {
            let e = x.expo() + base * j;
            if e >= order {
                break;
            }
            if e < 0 {
                vneg += e;
            }
            j += 1;
        }
    }
    let final_order = order + vneg;
    let mut acc = QSeries::one();
    let mut j = 0;
    loop {
        let f = x.shifted(base * j);
        if f.expo() >= order {
            break;
        }
        acc = mul_one_minus(&acc, &f);
        if f.expo() >= 0 {
            acc = acc.truncated(Order::Finite(final_order));
        }
        j += 1;
    }
    acc.truncated(Order::Finite(final_order))
}

/// `(1 - m)⁻¹` provable to `product = 1 + O(q^cap)`, using the closed
/// geometric series when `m` has positive exponent.
pub fn one_minus_inv(m: &QMonomial, cap: i64) -> Result<QSeries> {
    if m.is_one() {
        return Err(Error::PoleDetected { factor: format!("1 - {}", m) });
    }
    if m.expo() >= 1 {
        let mut terms = vec![(0, Coefficient::one())];
        let mut c = Coefficient::one();
        let mut e = 0i64;
        loop {
            c = &c * m.coeff();
            e += m.expo();
            if e >= cap {
                break;
            }
            terms.push((e, c.clone()));
        }
        Ok(QSeries::from_terms(terms, Order::Finite(cap)))
    } else {
        QSeries::one().sub(&QSeries::from_monomial(m)).invert(cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> Coefficient {
        Coefficient::from_int(n)
    }

    #[test]
    fn empty_product_is_one() {
        let a = QMonomial::ratio_q(7, 3, -2);
        assert_eq!(poch_finite(&a, 1, 0, 40), QSeries::one());
    }

    #[test]
    fn two_factor_expansion() {
        // (q; q)_2 = (1-q)(1-q^2) = 1 - q - q^2 + q^3
        let p = poch_finite(&QMonomial::q_power(1), 1, 2, 40);
        let expect = QSeries::from_terms(
            vec![(0, c(1)), (1, c(-1)), (2, c(-1)), (3, c(1))],
            Order::Exact,
        );
        assert_eq!(p, expect);
    }

    #[test]
    fn unit_argument_annihilates() {
        let p = poch_finite(&QMonomial::one(), 1, 3, 40);
        assert!(p.is_exactly_zero());
    }

    #[test]
    fn euler_product_window() {
        // (q; q)_inf = 1 - q - q^2 + q^5 + O(q^6)
        let p = poch_infinite(&QMonomial::q_power(1), 1, 6);
        assert_eq!(p.order(), Order::Finite(6));
        let w = p.coeff_window(0, 6).unwrap();
        assert_eq!(w, vec![c(1), c(-1), c(-1), c(0), c(0), c(1)]);
    }

    #[test]
    fn pentagonal_number_oracle() {
        // Coefficients of (q; q)_inf follow Euler's pentagonal pattern:
        // exponent k(3k-1)/2 carries (-1)^k for k in Z, all others vanish.
        let n = 200;
        let p = poch_infinite(&QMonomial::q_power(1), 1, n);
        let mut expect = vec![c(0); n as usize];
        let mut k = 0i64;
        loop {
            let mut hit = false;
            for kk in [k, -k] {
                let e = kk * (3 * kk - 1) / 2;
                if e < n {
                    hit = true;
                    expect[e as usize] = if k % 2 == 0 { c(1) } else { c(-1) };
                }
                if kk == 0 {
                    break;
                }
            }
            if !hit {
                break;
            }
            k += 1;
        }
        assert_eq!(p.coeff_window(0, n).unwrap(), expect);
    }

    #[test]
    fn all_factors_beyond_order() {
        let x = QMonomial::int_q(5, 9);
        let p = poch_infinite(&x, 1, 6);
        assert!(p.first_mismatch(&QSeries::one(), 6).is_none());
    }

    #[test]
    fn zero_infinite_product() {
        assert!(poch_infinite(&QMonomial::one(), 1, 10).is_exactly_zero());
        // q^{-3} hits 1 at j = 3.
        assert!(poch_infinite(&QMonomial::q_power(-3), 1, 10).is_exactly_zero());
    }

    #[test]
    fn splitting_identity() {
        // (x; q)_inf = (x; q)_n (x q^n; q)_inf up to truncation.
        let x = QMonomial::ratio_q(2, 3, 1);
        for n in [1, 4, 10] {
            let full = poch_infinite(&x, 1, 30);
            let head = poch_finite(&x, 1, n, 30);
            let tail = poch_infinite(&x.shifted(n), 1, 30);
            let prod = head.mul(&tail);
            assert!(full.first_mismatch(&prod, 30).is_none(), "n = {}", n);
        }
    }

    #[test]
    fn geometric_inverse_matches_generic() {
        let m = QMonomial::ratio_q(3, 2, 2);
        let fast = one_minus_inv(&m, 25).unwrap();
        let slow = QSeries::one()
            .sub(&QSeries::from_monomial(&m))
            .invert(25)
            .unwrap();
        assert!(fast.first_mismatch(&slow, 25).is_none());
    }

    #[test]
    fn one_minus_inv_pole() {
        assert!(matches!(
            one_minus_inv(&QMonomial::one(), 10),
            Err(Error::PoleDetected { .. })
        ));
    }

    #[test]
    fn series_argument_recurrence() {
        // (x; q)_{n+1} = (x; q)_n (1 - x q^n) for a series argument.
        let x = QSeries::from_terms(vec![(1, c(2)), (2, c(1))], Order::Exact);
        for n in 0..6 {
            let a = poch_finite_series(&x, 1, n + 1, 30);
            let b = poch_finite_series(&x, 1, n, 30)
                .mul(&QSeries::one().sub(&x.scale_mono(&QMonomial::q_power(n))));
            assert!(a.first_mismatch(&b, 25).is_none());
        }
    }
}
