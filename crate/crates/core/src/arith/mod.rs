//! Exact integer, rational and polynomial arithmetic.
//!
//! Everything downstream (discriminants, point search, lattice geometry) is
//! decided with these types; floating point only appears in reported bounds.

mod factor;
mod poly;
mod primality;

pub use factor::{factorize, factorize_with, FactorConfig, FactorError, Factorization};
pub use poly::{discriminant, resultant, PolyError, RatPoly};
pub use primality::is_prime;

pub use num_bigint::{BigInt, BigUint, Sign};
pub use num_rational::BigRational;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Parses `"n"` or `"n/d"` (optional leading sign on either part) into a reduced rational.
pub fn parse_rational(text: &str) -> Result<BigRational, ParseRationalError> {
    let trimmed = text.trim();
    let bad = || ParseRationalError::Malformed(text.to_string());
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let parse = |s: &str| -> Result<BigInt, ParseRationalError> {
        let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse::<BigInt>().map_err(|_| bad())
    };
    let num = parse(num)?;
    let den = parse(den)?;
    if den.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(text.to_string()));
    }
    Ok(BigRational::new(num, den))
}

/// Canonical `"num/den"` rendering; always carries the denominator.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Display adapter that renders integers without the `/1`.
pub struct Compact<'a>(pub &'a BigRational);

impl fmt::Display for Compact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Exact integer square root, if `n` is a perfect square.
pub fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let root = n.sqrt();
    (&root * &root == *n).then_some(root)
}

/// The nonnegative rational square root of `r`, if one exists.
pub fn is_square_rational(r: &BigRational) -> Option<BigRational> {
    // BigRational keeps numer/denom reduced with a positive denominator.
    let num = exact_isqrt(r.numer())?;
    let den = exact_isqrt(r.denom())?;
    Some(BigRational::new(num, den))
}

pub fn rational_from_i64(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `max{|numerator|, denominator}` of a reduced rational.
pub fn rational_height(r: &BigRational) -> BigInt {
    let num = r.numer().abs();
    if num > *r.denom() {
        num
    } else {
        r.denom().clone()
    }
}

/// Natural logarithm of a positive big integer, accurate to f64 precision
/// even when the value itself overflows f64.
pub fn ln_bigint(n: &BigInt) -> f64 {
    assert!(n.is_positive(), "ln of non-positive integer");
    if let Some(v) = n.to_f64().filter(|v| v.is_finite()) {
        return v.ln();
    }
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top = (n >> shift).to_f64().unwrap_or(f64::MAX);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Least common multiple of the denominators, i.e. the smallest `q >= 1`
/// with `q * r` integral for every `r`.
pub fn denominator_lcm<'a, I: IntoIterator<Item = &'a BigRational>>(values: I) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn to_integer(r: &BigRational) -> Option<BigInt> {
    r.is_integer().then(|| r.numer().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn square_roots_of_rationals() {
        assert_eq!(is_square_rational(&q(9, 4)), Some(q(3, 2)));
        assert_eq!(is_square_rational(&q(2, 1)), None);
        assert_eq!(is_square_rational(&q(0, 1)), Some(q(0, 1)));
        assert_eq!(is_square_rational(&q(-4, 1)), None);
        assert_eq!(is_square_rational(&q(4, 3)), None);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-6/4").unwrap(), q(-3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), q(7, 1));
        assert_eq!(parse_rational("3/-9").unwrap(), q(-1, 3));
        assert!(matches!(
            parse_rational("1/0"),
            Err(ParseRationalError::ZeroDenominator(_))
        ));
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("--1").is_err());
        assert_eq!(format_rational(&q(4, 1)), "4/1");
        assert_eq!(Compact(&q(4, 1)).to_string(), "4");
        assert_eq!(Compact(&q(-1, 3)).to_string(), "-1/3");
    }

    #[test]
    fn log_of_huge_integer() {
        let big = BigInt::from(10).pow(400u32);
        assert!((ln_bigint(&big) - 400.0 * 10f64.ln()).abs() < 1e-9);
        assert!((ln_bigint(&BigInt::from(3)) - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn lcm_of_denominators() {
        let vals = [q(1, 4), q(5, 6), q(2, 1)];
        assert_eq!(denominator_lcm(&vals), BigInt::from(12));
    }
}
