//! Monomials `c·q^m` with a nonzero Gaussian-rational coefficient and a
//! signed integer exponent. Parameters such as `a`, `b`, `k`, `z`, `ρ₁`, `ρ₂`
//! are represented this way in exact mode, so products, quotients and integer
//! powers of parameters stay exact.

use std::fmt;

use num::complex::Complex64;

use super::coeff::Coefficient;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMonomial {
    coeff: Coefficient,
    expo: i64,
}

impl QMonomial {
    /// Panics on a zero coefficient; zero is not a monomial.
    pub fn new(coeff: Coefficient, expo: i64) -> Self {
        assert!(!coeff.is_zero(), "QMonomial coefficient must be nonzero");
        QMonomial { coeff, expo }
    }

    /// `q^m`.
    pub fn q_power(m: i64) -> Self {
        QMonomial::new(Coefficient::one(), m)
    }

    /// `c·q^0`.
    pub fn constant(c: Coefficient) -> Self {
        QMonomial::new(c, 0)
    }

    pub fn one() -> Self {
        QMonomial::q_power(0)
    }

    /// Convenience constructor `(num/den)·q^m`.
    pub fn ratio_q(num: i64, den: i64, m: i64) -> Self {
        QMonomial::new(Coefficient::from_ratio(num, den), m)
    }

    /// Convenience constructor `n·q^m`.
    pub fn int_q(n: i64, m: i64) -> Self {
        QMonomial::new(Coefficient::from_int(n), m)
    }

    pub fn coeff(&self) -> &Coefficient {
        &self.coeff
    }

    pub fn expo(&self) -> i64 {
        self.expo
    }

    pub fn mul(&self, other: &QMonomial) -> QMonomial {
        QMonomial::new(&self.coeff * &other.coeff, self.expo + other.expo)
    }

    pub fn div(&self, other: &QMonomial) -> QMonomial {
        QMonomial::new(&self.coeff / &other.coeff, self.expo - other.expo)
    }

    pub fn neg(&self) -> QMonomial {
        QMonomial::new(-&self.coeff, self.expo)
    }

    pub fn inv(&self) -> QMonomial {
        QMonomial::new(
            self.coeff.checked_inv().expect("nonzero by invariant"),
            -self.expo,
        )
    }

    pub fn powi(&self, e: i64) -> QMonomial {
        QMonomial::new(self.coeff.powi(e), self.expo * e)
    }

    /// Multiply by `q^d`.
    pub fn shifted(&self, d: i64) -> QMonomial {
        QMonomial::new(self.coeff.clone(), self.expo + d)
    }

    /// True iff the monomial is exactly the scalar 1.
    pub fn is_one(&self) -> bool {
        self.expo == 0 && self.coeff.is_one()
    }

    /// Value at a concrete complex point `q0`.
    pub fn eval(&self, q0: Complex64) -> Complex64 {
        self.coeff.to_c64() * q0.powi(self.expo as i32)
    }
}

impl fmt::Display for QMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expo == 0 {
            write!(f, "({})", self.coeff)
        } else {
            write!(f, "({})q^{}", self.coeff, self.expo)
        }
    }
}

impl fmt::Debug for QMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient() {
        let a = QMonomial::ratio_q(2, 1, 1);
        let b = QMonomial::ratio_q(3, 1, 2);
        let p = a.mul(&b);
        assert_eq!(p.expo(), 3);
        assert_eq!(p.coeff(), &Coefficient::from_int(6));
        let q = p.div(&a);
        assert_eq!(q, b);
    }

    #[test]
    fn inverse_and_powers() {
        let a = QMonomial::ratio_q(2, 1, 1);
        assert!(a.mul(&a.inv()).is_one());
        let c = a.powi(-3);
        assert_eq!(c.expo(), -3);
        assert_eq!(c.coeff(), &Coefficient::from_ratio(1, 8));
    }

    #[test]
    fn eval_point() {
        let m = QMonomial::int_q(2, -1);
        let v = m.eval(Complex64::new(0.5, 0.0));
        assert!((v - Complex64::new(4.0, 0.0)).norm() < 1e-15);
    }
}
