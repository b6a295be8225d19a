//! Floating-point complex backend: Pochhammer symbols, sums and series
//! evaluation at concrete points with |q| < 1. The exact kernel is the
//! source of truth; this module exists for parameters off the monomial
//! lattice and for cross-checking.

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::qseries::QSeries;

pub type CPoint = Complex64;

#[derive(Clone, Debug)]
pub struct NumericConfig {
    /// Relative tail threshold for sums and infinite products.
    pub term_tol: f64,
    /// Consecutive small terms required before stopping.
    pub streak: u32,
    pub max_terms: u64,
    /// Minimum allowed |1 - x·q^j| in denominator-bound factors.
    pub pole_tol: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig { term_tol: 1e-15, streak: 3, max_terms: 100_000, pole_tol: 1e-8 }
    }
}

fn check_finite(z: Complex64, what: &str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonConvergent(format!("{what} produced a non-finite value")))
    }
}

/// `(x; q)_n` for finite `n`, or `(x; q)_∞` when `n` is `None`.
///
/// Every factor is screened against `pole_tol`: a factor that close to zero
/// signals a parameter violating a non-vanishing hypothesis, and the result
/// would be numerically meaningless.
pub fn num_poch(x: CPoint, q: CPoint, n: Option<i64>, cfg: &NumericConfig) -> Result<CPoint> {
    let mut acc = Complex64::new(1.0, 0.0);
    match n {
        Some(n) => {
            assert!(n >= 0, "pochhammer length must be nonnegative");
            let mut xq = x;
            for j in 0..n {
                let f = Complex64::new(1.0, 0.0) - xq;
                if f.norm() < cfg.pole_tol {
                    return Err(Error::PoleProximity {
                        factor: format!("1 - x*q^{j} at x = {x}"),
                        magnitude: f.norm(),
                    });
                }
                acc *= f;
                xq *= q;
            }
            check_finite(acc, "finite pochhammer")
        }
        None => {
            if q.norm() >= 1.0 {
                return Err(Error::Domain(format!(
                    "infinite pochhammer requires |q| < 1, got |q| = {}",
                    q.norm()
                )));
            }
            let mut xq = x;
            let mut small = 0u32;
            let mut j = 0u64;
            while small < cfg.streak {
                if j >= cfg.max_terms {
                    return Err(Error::NonConvergent(
                        "infinite pochhammer did not reach its tail".into(),
                    ));
                }
                let f = Complex64::new(1.0, 0.0) - xq;
                if f.norm() < cfg.pole_tol {
                    return Err(Error::PoleProximity {
                        factor: format!("1 - x*q^{j} at x = {x}"),
                        magnitude: f.norm(),
                    });
                }
                acc *= f;
                if xq.norm() < cfg.term_tol {
                    small += 1;
                } else {
                    small = 0;
                }
                xq *= q;
                j += 1;
            }
            check_finite(acc, "infinite pochhammer")
        }
    }
}

/// Sum `term(start) + term(start+1) + ⋯` until the relative tail stays below
/// `term_tol` for `streak` consecutive terms.
pub fn num_sum<F>(mut term: F, start: i64, cfg: &NumericConfig) -> Result<CPoint>
where
    F: FnMut(i64) -> Result<CPoint>,
{
    let mut acc = Complex64::new(0.0, 0.0);
    let mut small = 0u32;
    let mut n = start;
    let mut consumed = 0u64;
    while small < cfg.streak {
        if consumed >= cfg.max_terms {
            return Err(Error::NonConvergent(format!(
                "sum consumed {} terms without a sustained small tail",
                cfg.max_terms
            )));
        }
        let t = check_finite(term(n)?, "sum term")?;
        acc += t;
        if t.norm() <= cfg.term_tol * (1.0 + acc.norm()) {
            small += 1;
        } else {
            small = 0;
        }
        n += 1;
        consumed += 1;
    }
    check_finite(acc, "sum")
}

/// Evaluate the tracked window of an exact series at `q0`.
pub fn eval_series_at(x: &QSeries, q0: CPoint) -> CPoint {
    let mut acc = Complex64::new(0.0, 0.0);
    for (e, c) in x.terms() {
        acc += c.to_c64() * q0.powi(e as i32);
    }
    acc
}

/// Sum of |coefficient| over the tracked window, for cross-backend bounds.
pub fn coeff_abs_sum(x: &QSeries) -> f64 {
    x.terms().map(|(_, c)| c.abs_f64()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{poch_infinite, one_minus_inv, QMonomial};

    fn r(x: f64) -> CPoint {
        Complex64::new(x, 0.0)
    }

    fn cfg() -> NumericConfig {
        NumericConfig::default()
    }

    #[test]
    fn empty_product() {
        assert_eq!(num_poch(r(0.7), r(0.5), Some(0), &cfg()).unwrap(), r(1.0));
    }

    #[test]
    fn hand_product() {
        let v = num_poch(r(0.5), r(0.5), Some(2), &cfg()).unwrap();
        assert!((v - r(0.375)).norm() < 1e-15);
    }

    #[test]
    fn euler_value_at_tenth() {
        // Direct product oracle for (0.1; 0.1)_inf.
        let mut expect = 1.0;
        let mut p = 0.1;
        while p > 1e-20 {
            expect *= 1.0 - p;
            p *= 0.1;
        }
        let v = num_poch(r(0.1), r(0.1), None, &cfg()).unwrap();
        assert!((v - r(expect)).norm() < 1e-12);
        assert!((v.re - 0.8900100999).abs() < 1e-9);
    }

    #[test]
    fn recurrence_property() {
        let x = Complex64::new(0.3, 0.2);
        let q = Complex64::new(0.4, -0.1);
        for n in 0..8 {
            let a = num_poch(x, q, Some(n + 1), &cfg()).unwrap();
            let b = num_poch(x, q, Some(n), &cfg()).unwrap()
                * (Complex64::new(1.0, 0.0) - x * q.powi(n as i32));
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn pole_proximity_detected() {
        // Factor (1 - 2*0.5) vanishes at j = 1.
        let r2 = num_poch(r(2.0), r(0.5), Some(3), &cfg());
        assert!(matches!(r2, Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn geometric_sum() {
        let v = num_sum(|n| Ok(r(0.5).powi(n as i32)), 1, &cfg()).unwrap();
        assert!((v - r(1.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_terms_sum() {
        let v = num_sum(|_| Ok(r(0.0)), 1, &cfg()).unwrap();
        assert_eq!(v, r(0.0));
    }

    #[test]
    fn psi_at_tenth() {
        // psi(0.1) = sum q^{n(n+1)/2} = 1.1010010001...
        let v = num_sum(|n| Ok(r(0.1).powi((n * (n + 1) / 2) as i32)), 0, &cfg()).unwrap();
        assert!((v - r(1.1010010001)).norm() < 1e-10);
    }

    #[test]
    fn invariant_under_doubling_max_terms() {
        let mut cfg2 = cfg();
        let a = num_sum(|n| Ok(r(0.7).powi(n as i32)), 1, &cfg2).unwrap();
        cfg2.max_terms *= 2;
        let b = num_sum(|n| Ok(r(0.7).powi(n as i32)), 1, &cfg2).unwrap();
        assert!((a - b).norm() <= cfg2.term_tol * (1.0 + a.norm()));
    }

    #[test]
    fn nonconvergent_sum() {
        let cfg2 = NumericConfig { max_terms: 100, ..cfg() };
        assert!(matches!(
            num_sum(|_| Ok(r(1.0)), 1, &cfg2),
            Err(Error::NonConvergent(_))
        ));
    }

    #[test]
    fn eval_simple() {
        let s = QSeries::one().sub(&QSeries::q_power(1));
        assert!((eval_series_at(&s, r(0.5)) - r(0.5)).norm() < 1e-15);
    }

    #[test]
    fn eval_geometric_window() {
        let s = one_minus_inv(&QMonomial::q_power(1), 40).unwrap();
        let v = eval_series_at(&s, r(0.5));
        // Truncation error is bounded by ~0.5^40 * C.
        assert!((v - r(2.0)).norm() < 1e-10);
    }

    #[test]
    fn eval_matches_num_poch() {
        let s = poch_infinite(&QMonomial::q_power(1), 1, 40);
        let a = eval_series_at(&s, r(0.1));
        let b = num_poch(r(0.1), r(0.1), None, &cfg()).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}
