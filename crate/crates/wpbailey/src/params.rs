//! Parsers for command-line parameter values.
//!
//! Exact monomial grammar (no whitespace):
//!
//! ```text
//! value    := '[' int '/' int ',' int '/' int ']' 'q' '^' int
//! example  := [0/1,-1/1]q^-1        (the monomial -i/q)
//! param    := name '=' value
//! ```
//!
//! Complex q-points accept `0.3`, `-0.25`, `0.2+0.1i`, `0.2-0.1i`, `0.5i`.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::Zero;

use crate::error::{Error, Result};
use crate::qseries::{Coefficient, QMonomial};

fn err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Split `name=value` and parse the value as an exact monomial.
pub fn parse_param(input: &str) -> Result<(String, QMonomial)> {
    let (name, value) = input
        .split_once('=')
        .ok_or_else(|| err(format!("expected name=value, got `{input}`")))?;
    if name.is_empty() {
        return Err(err("empty parameter name"));
    }
    if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(err(format!("invalid parameter name `{name}`")));
    }
    Ok((name.to_string(), parse_monomial(value)?))
}

/// Parse the bit-exact monomial grammar `[re_num/re_den,im_num/im_den]q^expo`.
pub fn parse_monomial(input: &str) -> Result<QMonomial> {
    let rest = input
        .strip_prefix('[')
        .ok_or_else(|| err(format!("expected `[`, got `{input}`")))?;
    let (inside, tail) = rest
        .split_once(']')
        .ok_or_else(|| err("missing closing `]`"))?;
    let (re_str, im_str) = inside
        .split_once(',')
        .ok_or_else(|| err("expected `re/den,im/den` inside brackets"))?;
    let re = parse_fraction(re_str)?;
    let im = parse_fraction(im_str)?;
    let expo_str = tail
        .strip_prefix("q^")
        .ok_or_else(|| err(format!("expected `q^expo` after `]`, got `{tail}`")))?;
    let expo = parse_i64(expo_str)?;
    let coeff = Coefficient::new(re, im);
    if coeff.is_zero() {
        return Err(err("monomial coefficient must be nonzero"));
    }
    Ok(QMonomial::new(coeff, expo))
}

fn parse_fraction(s: &str) -> Result<BigRational> {
    let (num, den) = s
        .split_once('/')
        .ok_or_else(|| err(format!("expected `num/den`, got `{s}`")))?;
    let num: BigInt = parse_bigint(num)?;
    let den: BigInt = parse_bigint(den)?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

fn parse_bigint(s: &str) -> Result<BigInt> {
    if s.is_empty() {
        return Err(err("empty integer"));
    }
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return Err(err(format!("invalid integer `{s}`")));
    }
    s.parse::<BigInt>().map_err(|e| err(format!("invalid integer `{s}`: {e}")))
}

fn parse_i64(s: &str) -> Result<i64> {
    if s.is_empty() {
        return Err(err("empty exponent"));
    }
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return Err(err(format!("invalid exponent `{s}`")));
    }
    s.parse::<i64>().map_err(|e| err(format!("exponent out of range `{s}`: {e}")))
}

/// Render a monomial back into the parameter grammar.
pub fn render_monomial(m: &QMonomial) -> String {
    format!(
        "[{}/{},{}/{}]q^{}",
        m.coeff().re().numer(),
        m.coeff().re().denom(),
        m.coeff().im().numer(),
        m.coeff().im().denom(),
        m.expo()
    )
}

/// Parse a complex point: `re`, `re+im i`, `re-im i`, or `im i`.
pub fn parse_cpoint(input: &str) -> Result<Complex64> {
    let s = input.trim();
    if s.is_empty() {
        return Err(err("empty q-point"));
    }
    let finite = |v: f64| -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err(format!("non-finite value in `{input}`")))
        }
    };
    if let Some(im_str) = s.strip_suffix('i') {
        // Split into real and imaginary at the last +/- that is not a
        // leading sign (exponent markers like `e-3` are also skipped).
        let bytes = im_str.as_bytes();
        let mut split_at = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i];
            if (c == b'+' || c == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E' {
                split_at = Some(i);
                break;
            }
        }
        match split_at {
            Some(i) => {
                let re: f64 = im_str[..i]
                    .parse()
                    .map_err(|_| err(format!("invalid real part in `{input}`")))?;
                let sign = if bytes[i] == b'-' { -1.0 } else { 1.0 };
                let mag_str = &im_str[i + 1..];
                let mag: f64 = if mag_str.is_empty() {
                    1.0
                } else {
                    mag_str.parse().map_err(|_| err(format!("invalid imaginary part in `{input}`")))?
                };
                Ok(Complex64::new(finite(re)?, finite(sign * mag)?))
            }
            None => {
                let mag: f64 = if im_str.is_empty() || im_str == "-" {
                    if im_str == "-" {
                        -1.0
                    } else {
                        1.0
                    }
                } else {
                    im_str.parse().map_err(|_| err(format!("invalid imaginary part in `{input}`")))?
                };
                Ok(Complex64::new(0.0, finite(mag)?))
            }
        }
    } else {
        let re: f64 = s.parse().map_err(|_| err(format!("invalid q-point `{input}`")))?;
        Ok(Complex64::new(finite(re)?, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_examples() {
        let m = parse_monomial("[2/1,0/1]q^1").unwrap();
        assert_eq!(m, QMonomial::ratio_q(2, 1, 1));
        let m = parse_monomial("[0/1,-1/1]q^-1").unwrap();
        assert_eq!(m, QMonomial::new(-Coefficient::i(), -1));
        let m = parse_monomial("[3/4,1/2]q^0").unwrap();
        assert_eq!(m, QMonomial::new(Coefficient::from_ratios(3, 4, 1, 2), 0));
    }

    #[test]
    fn monomial_rejects() {
        for bad in [
            "",
            "q^1",
            "[2/1]q^1",
            "[2/1,0/1]q1",
            "[2/1,0/1]",
            "[2/0,0/1]q^0",
            "[0/1,0/1]q^0",
            "[2/1,0/1]q^",
            "[a/1,0/1]q^1",
            "[2/1,0/1]q^+3",
            "[ 2/1,0/1]q^1",
        ] {
            assert!(parse_monomial(bad).is_err(), "should reject `{bad}`");
        }
    }

    #[test]
    fn monomial_roundtrip() {
        for s in ["[2/1,0/1]q^1", "[0/1,-1/1]q^-1", "[-7/3,5/9]q^12"] {
            let m = parse_monomial(s).unwrap();
            assert_eq!(render_monomial(&m), s);
            assert_eq!(parse_monomial(&render_monomial(&m)).unwrap(), m);
        }
    }

    #[test]
    fn param_assignment() {
        let (name, m) = parse_param("a=[2/1,0/1]q^1").unwrap();
        assert_eq!(name, "a");
        assert_eq!(m, QMonomial::ratio_q(2, 1, 1));
        assert!(parse_param("=[2/1,0/1]q^1").is_err());
        assert!(parse_param("a[2/1,0/1]q^1").is_err());
        assert!(parse_param("a b=[2/1,0/1]q^1").is_err());
    }

    #[test]
    fn cpoint_examples() {
        assert_eq!(parse_cpoint("0.3").unwrap(), Complex64::new(0.3, 0.0));
        assert_eq!(parse_cpoint("-0.25").unwrap(), Complex64::new(-0.25, 0.0));
        assert_eq!(parse_cpoint("0.2+0.1i").unwrap(), Complex64::new(0.2, 0.1));
        assert_eq!(parse_cpoint("0.2-0.1i").unwrap(), Complex64::new(0.2, -0.1));
        assert_eq!(parse_cpoint("0.5i").unwrap(), Complex64::new(0.0, 0.5));
        assert_eq!(parse_cpoint("-0.5i").unwrap(), Complex64::new(0.0, -0.5));
        assert_eq!(parse_cpoint("1e-3").unwrap(), Complex64::new(1e-3, 0.0));
        assert!(parse_cpoint("").is_err());
        assert!(parse_cpoint("nan").is_err());
        assert!(parse_cpoint("0.2+bad i").is_err());
    }
}
