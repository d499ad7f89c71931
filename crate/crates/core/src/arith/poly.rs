//! Dense univariate polynomials over the rationals.
//!
//! Resultants are computed on the cleared-denominator integer forms with the
//! subresultant pseudo-remainder sequence, which keeps every intermediate
//! integral and bounds coefficient growth.

use super::factor::{factorize, FactorError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("rational root search needs a factorization that did not complete: {0}")]
    Factorization(#[from] FactorError),
}

/// Coefficients stored lowest degree first; the zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        RatPoly::new(vec![c])
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        RatPoly::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    /// `x - root`
    pub fn linear(root: &BigRational) -> Self {
        RatPoly::new(vec![-root.clone(), BigRational::one()])
    }

    /// Monic polynomial with exactly the given roots.
    pub fn from_roots(roots: &[BigRational]) -> Self {
        roots
            .iter()
            .fold(RatPoly::constant(BigRational::one()), |acc, r| {
                &acc * &RatPoly::linear(r)
            })
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(i.into()))
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        RatPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Euclidean division over the rationals.
    pub fn div_rem(&self, divisor: &RatPoly) -> Result<(RatPoly, RatPoly), PolyError> {
        let dd = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        let lc = divisor.leading_coeff().expect("nonzero divisor");
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree().filter(|&n| n >= dd) else {
            return Ok((RatPoly::zero(), self.clone()));
        };
        let mut quot = vec![BigRational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let factor = &rem[k + dd] / lc;
            if factor.is_zero() {
                continue;
            }
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &factor * c;
            }
            quot[k] = factor;
        }
        rem.truncate(dd);
        Ok((RatPoly::new(quot), RatPoly::new(rem)))
    }

    /// Monic greatest common divisor; zero only when both inputs are zero.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> RatPoly {
        match self.leading_coeff() {
            Some(lc) => self.scale(&lc.recip()),
            None => RatPoly::zero(),
        }
    }

    /// True iff `gcd(P, P')` is a nonzero constant.
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// Smallest positive integer `q` with `q * P` integral.
    pub fn denominator_lcm(&self) -> BigInt {
        super::denominator_lcm(&self.coeffs)
    }

    /// The integer polynomial `q * P` for `q = denominator_lcm()`.
    pub fn cleared(&self) -> Vec<BigInt> {
        let q = BigRational::from_integer(self.denominator_lcm());
        self.coeffs
            .iter()
            .map(|c| (c * &q).to_integer())
            .collect()
    }

    /// All distinct rational roots, ascending.
    pub fn rational_roots(&self) -> Result<Vec<BigRational>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::Degenerate("rational roots of the zero polynomial"));
        }
        let mut ints = primitive(&self.cleared());
        let mut roots = Vec::new();
        let zeros = ints.iter().take_while(|c| c.is_zero()).count();
        if zeros > 0 {
            roots.push(BigRational::zero());
            ints.drain(..zeros);
        }
        if ints.len() > 1 {
            let constant = ints[0].abs();
            let lead = ints.last().expect("nonempty").abs();
            // Cauchy bound: every root has |r| < 1 + max |a_i / a_n|.
            let cauchy = ints
                .iter()
                .map(|c| BigRational::new(c.abs(), lead.clone()))
                .max()
                .expect("nonempty")
                + BigRational::one();
            let reduced = RatPoly::new(ints.iter().cloned().map(BigRational::from_integer).collect());
            let nums = divisors(&constant)?;
            let dens = divisors(&lead)?;
            for p in &nums {
                for qd in &dens {
                    if !p.gcd(qd).is_one() {
                        continue;
                    }
                    let cand = BigRational::new(p.clone(), qd.clone());
                    if cand > cauchy {
                        continue;
                    }
                    for r in [cand.clone(), -cand] {
                        if reduced.eval(&r).is_zero() {
                            roots.push(r);
                        }
                    }
                }
            }
        }
        roots.sort();
        roots.dedup();
        Ok(roots)
    }
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>, FactorError> {
    let fact = factorize(n)?;
    let mut out = vec![BigInt::one()];
    for (p, e) in fact.factors() {
        let current = out.clone();
        let mut pk = BigInt::one();
        for _ in 0..*e {
            pk *= p;
            out.extend(current.iter().map(|d| d * &pk));
        }
    }
    Ok(out)
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly({self})")
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let coeff = super::Compact(&mag).to_string();
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{coeff}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{coeff}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{coeff}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new(
            (0..n)
                .map(|i| {
                    let zero = BigRational::zero();
                    self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        self + &(-rhs)
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

/// `Res(P, Q) = lc(P)^deg Q * prod Q(alpha)` over the roots of `P`.
///
/// A nonzero constant against a polynomial of degree `n` gives `c^n`; a zero
/// argument gives 0 unless both are zero, which is rejected.
pub fn resultant(p: &RatPoly, q: &RatPoly) -> Result<BigRational, PolyError> {
    let (dp, dq) = match (p.degree(), q.degree()) {
        (None, None) => return Err(PolyError::Degenerate("resultant of two zero polynomials")),
        (None, _) | (_, None) => return Ok(BigRational::zero()),
        (Some(a), Some(b)) => (a, b),
    };
    let p_den = p.denominator_lcm();
    let q_den = q.denominator_lcm();
    let res = resultant_int(&p.cleared(), &q.cleared());
    // Res is homogeneous of degree deg Q in P's coefficients and deg P in Q's.
    let scale = num_traits::pow(p_den, dq) * num_traits::pow(q_den, dp);
    Ok(BigRational::new(res, scale))
}

/// `(-1)^(d(d-1)/2) Res(P, P') / lc(P)` for `d = deg P >= 1`.
pub fn discriminant(p: &RatPoly) -> Result<BigRational, PolyError> {
    let d = match p.degree() {
        None | Some(0) => return Err(PolyError::Degenerate("discriminant of a constant polynomial")),
        Some(d) => d,
    };
    let res = resultant(p, &p.derivative())?;
    let lc = p.leading_coeff().expect("degree >= 1");
    let signed = if (d * (d - 1) / 2) % 2 == 1 { -res } else { res };
    Ok(signed / lc)
}

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let c = content(v);
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|x| x / &c).collect()
}

/// Pseudo-remainder: `lc(B)^(deg A - deg B + 1) A mod B` over the integers.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    let mut e = a.len() - b.len() + 1;
    while r.len() > db {
        let k = r.len() - 1 - db;
        let lr = r.last().expect("nonempty").clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, c) in b.iter().enumerate() {
            r[k + j] -= &lr * c;
        }
        r = trim(r);
        e -= 1;
    }
    let factor = num_traits::pow(lb.clone(), e);
    r.into_iter().map(|c| c * &factor).collect()
}

fn exact_div(a: BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    debug_assert!(r.is_zero(), "subresultant division must be exact");
    q
}

/// Subresultant PRS resultant of two nonzero integer polynomials.
fn resultant_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    let (da, db) = (a.len() - 1, b.len() - 1);
    if db == 0 {
        return num_traits::pow(b[0].clone(), da);
    }
    if da == 0 {
        return num_traits::pow(a[0].clone(), db);
    }
    let (ca, cb) = (content(&a), content(&b));
    let t = num_traits::pow(ca.clone(), db) * num_traits::pow(cb.clone(), da);
    a = a.into_iter().map(|c| c / &ca).collect();
    b = b.into_iter().map(|c| c / &cb).collect();
    let mut sign_negative = false;
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
        if (a.len() - 1) % 2 == 1 && (b.len() - 1) % 2 == 1 {
            sign_negative = true;
        }
    }
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let (da, db) = (a.len() - 1, b.len() - 1);
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            sign_negative = !sign_negative;
        }
        let r = pseudo_rem(&a, &b);
        a = b;
        if r.is_empty() {
            return BigInt::zero();
        }
        let divisor = &g * num_traits::pow(h.clone(), delta);
        b = r.into_iter().map(|c| exact_div(c, &divisor)).collect();
        g = a.last().expect("nonempty").clone();
        h = if delta == 0 {
            h
        } else {
            exact_div(num_traits::pow(g.clone(), delta), &num_traits::pow(h.clone(), delta - 1))
        };
        if b.len() == 1 {
            let da = a.len() - 1;
            let last = exact_div(
                num_traits::pow(b[0].clone(), da),
                &num_traits::pow(h, da - 1),
            );
            let res = t * last;
            return if sign_negative { -res } else { res };
        }
    }
}
