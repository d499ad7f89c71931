//! Exact values `a + b * sqrt(m)` with rational `a`, `b` and `m >= 0`.
//!
//! The covering bounds `(1 + 2R/r)^rho` and `(1 + sqrt(8 c1))^rho` live in
//! `Q(sqrt(m))`, so comparisons against integers and floors are decided
//! exactly instead of through a floating guard band.

use crate::arith::{is_square_rational, BigInt, BigRational};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadSurd {
    pub a: BigRational,
    pub b: BigRational,
    pub m: BigRational,
}

/// `floor(sqrt(x))` for rational `x >= 0`.
pub fn floor_sqrt(x: &BigRational) -> BigInt {
    assert!(!x.is_negative(), "square root of a negative rational");
    // sqrt(n/d) = sqrt(n d) / d and floor(y / d) = floor(floor(y) / d) for integer d > 0
    let nd = x.numer() * x.denom();
    nd.sqrt() / x.denom()
}

impl QuadSurd {
    pub fn rational(a: BigRational) -> Self {
        QuadSurd { a, b: BigRational::zero(), m: BigRational::zero() }
    }

    /// `1 + k * sqrt(m)`
    pub fn one_plus(k: BigRational, m: BigRational) -> Self {
        assert!(!m.is_negative(), "radicand must be nonnegative");
        QuadSurd { a: BigRational::one(), b: k, m }.normalized()
    }

    /// Folds a square radicand into the rational part.
    pub fn normalized(self) -> QuadSurd {
        if self.b.is_zero() || self.m.is_zero() {
            return QuadSurd::rational(self.a);
        }
        match is_square_rational(&self.m) {
            Some(root) => QuadSurd::rational(self.a + self.b * root),
            None => self,
        }
    }

    pub fn mul(&self, other: &QuadSurd) -> QuadSurd {
        let m = if self.b.is_zero() { other.m.clone() } else { self.m.clone() };
        debug_assert!(self.b.is_zero() || other.b.is_zero() || self.m == other.m);
        QuadSurd {
            a: &self.a * &other.a + &self.b * &other.b * &m,
            b: &self.a * &other.b + &self.b * &other.a,
            m,
        }
        .normalized()
    }

    pub fn pow(&self, n: usize) -> QuadSurd {
        let mut acc = QuadSurd::rational(BigRational::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn scale(&self, k: &BigRational) -> QuadSurd {
        QuadSurd { a: &self.a * k, b: &self.b * k, m: self.m.clone() }.normalized()
    }

    pub fn add_rational(&self, k: &BigRational) -> QuadSurd {
        QuadSurd { a: &self.a + k, ..self.clone() }
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, k: &BigRational) -> Ordering {
        // compare b * sqrt(m) with t = k - a
        let t = k - &self.a;
        if self.b.is_zero() || self.m.is_zero() {
            return BigRational::zero().cmp(&t);
        }
        let lhs_sq = &self.b * &self.b * &self.m;
        let t_sq = &t * &t;
        match (self.b.is_positive(), t.is_positive()) {
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (true, true) => lhs_sq.cmp(&t_sq),
            (false, false) => t_sq.cmp(&lhs_sq),
        }
    }

    pub fn ge_rational(&self, k: &BigRational) -> bool {
        self.cmp_rational(k) != Ordering::Less
    }

    pub fn floor(&self) -> BigInt {
        let s = floor_sqrt(&(&self.b * &self.b * &self.m));
        let base = self.a.floor().to_integer();
        let mut k = if self.b.is_negative() { base - s - 1 } else { base + s };
        let int = |k: &BigInt| BigRational::from_integer(k.clone());
        while !self.ge_rational(&int(&k)) {
            k -= 1;
        }
        while self.ge_rational(&int(&(&k + 1))) {
            k += 1;
        }
        k
    }

    pub fn to_f64(&self) -> f64 {
        let f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
        f(&self.a) + f(&self.b) * f(&self.m).sqrt()
    }
}
