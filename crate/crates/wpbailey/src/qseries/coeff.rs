//! Gaussian-rational coefficients: exact complex numbers `re + im·i` with
//! arbitrary-precision rational parts. This is the coefficient field for
//! every exact series in the crate; no rounding ever occurs.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

/// An exact Gaussian rational. `BigRational` keeps itself in lowest terms
/// with a positive denominator, so both invariants hold by construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coefficient {
    re: BigRational,
    im: BigRational,
}

impl Coefficient {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Coefficient { re, im }
    }

    pub fn zero() -> Self {
        Coefficient::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Coefficient::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Coefficient::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Coefficient::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// Exact rational `num/den`. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Coefficient::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    /// Exact Gaussian rational `rn/rd + (in_/id)·i`.
    pub fn from_ratios(rn: i64, rd: i64, in_: i64, id: i64) -> Self {
        Coefficient::new(
            BigRational::new(BigInt::from(rn), BigInt::from(rd)),
            BigRational::new(BigInt::from(in_), BigInt::from(id)),
        )
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// True when the coefficient is purely real.
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Coefficient::new(self.re.clone(), -self.im.clone())
    }

    /// `re² + im²`, the field norm down to the rationals.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact multiplicative inverse; `None` for zero.
    pub fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Coefficient::new(&self.re / &n, -&self.im / &n))
    }

    /// Integer power with exact negative-exponent handling.
    /// Panics when raising zero to a negative power.
    pub fn powi(&self, e: i64) -> Self {
        if e == 0 {
            return Coefficient::one();
        }
        let base = if e < 0 {
            self.checked_inv().expect("zero coefficient to negative power")
        } else {
            self.clone()
        };
        let mut acc = Coefficient::one();
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            k >>= 1;
        }
        acc
    }

    /// Nearest double-precision complex value.
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Render one rational part as `num/den` (denominator always printed).
    pub fn fmt_rational(r: &BigRational) -> String {
        format!("{}/{}", r.numer(), r.denom())
    }

    /// `(re, im)` rendered as a pair of `num/den` strings for reports.
    pub fn render_pair(&self) -> (String, String) {
        (Self::fmt_rational(&self.re), Self::fmt_rational(&self.im))
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        Coefficient::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        Coefficient::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        // Purely real operands dominate in practice; avoid the three extra
        // big-rational products of the general complex formula.
        if self.im.is_zero() {
            if rhs.im.is_zero() {
                return Coefficient::new(&self.re * &rhs.re, BigRational::zero());
            }
            return Coefficient::new(&self.re * &rhs.re, &self.re * &rhs.im);
        }
        if rhs.im.is_zero() {
            return Coefficient::new(&self.re * &rhs.re, &self.im * &rhs.re);
        }
        Coefficient::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &Coefficient {
    type Output = Coefficient;
    #[allow(clippy::suspicious_arithmetic_impl)] // division by multiplicative inverse
    fn div(self, rhs: &Coefficient) -> Coefficient {
        let inv = rhs.checked_inv().expect("division by zero coefficient");
        self * &inv
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient::new(-self.re, -self.im)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}*i", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}*i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_laws_spot() {
        let c = Coefficient::from_ratios(3, 4, -2, 5);
        let inv = c.checked_inv().unwrap();
        assert!((&c * &inv).is_one());
        assert!((&c - &c).is_zero());
        let d = Coefficient::from_ratios(1, 7, 2, 3);
        assert_eq!(&(&c * &d) / &d, c);
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = Coefficient::i();
        assert_eq!(&i * &i, Coefficient::from_int(-1));
        assert_eq!(i.powi(4), Coefficient::one());
    }

    #[test]
    fn negative_powers() {
        let c = Coefficient::from_ratio(2, 3);
        assert_eq!(c.powi(-2), Coefficient::from_ratio(9, 4));
        assert_eq!(Coefficient::i().powi(-1), -Coefficient::i());
    }

    #[test]
    fn zero_inverse_is_none() {
        assert!(Coefficient::zero().checked_inv().is_none());
    }

    #[test]
    fn render() {
        let c = Coefficient::from_ratios(1, 2, -3, 1);
        assert_eq!(c.render_pair(), ("1/2".to_string(), "-3/1".to_string()));
    }
}
