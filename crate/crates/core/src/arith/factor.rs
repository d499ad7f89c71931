//! Integer factorization: trial division up to a configurable bound, then
//! Brent's variant of Pollard rho on the remaining composite cofactors.
//!
//! Rho seeds are fixed (start value 2, increments 1, 2, 3, ...), so runs are
//! reproducible. Each cofactor gets a bounded iteration budget; when it runs
//! out the partial factorization is returned inside the error.

use super::primality::{is_prime, is_prime_u64, mul_mod};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorConfig {
    pub trial_bound: u64,
    /// Rho iterations allowed per (cofactor, seed) attempt.
    pub rho_iterations: u64,
    pub rho_seeds: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            trial_bound: DEFAULT_TRIAL_BOUND,
            rho_iterations: 1 << 22,
            rho_seeds: 8,
        }
    }
}

/// A positive integer as ascending `(prime, exponent)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: BigInt,
    factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    /// Assembles a factorization from prime powers; primes may repeat.
    pub fn from_prime_powers<I: IntoIterator<Item = (BigInt, u32)>>(powers: I) -> Self {
        let mut merged: BTreeMap<BigInt, u32> = BTreeMap::new();
        for (p, e) in powers {
            if e > 0 {
                *merged.entry(p).or_default() += e;
            }
        }
        let factors: Vec<_> = merged.into_iter().collect();
        let value = factors
            .iter()
            .fold(BigInt::one(), |acc, (p, e)| acc * num_traits::pow(p.clone(), *e as usize));
        Factorization { value, factors }
    }

    pub fn one() -> Self {
        Factorization { value: BigInt::one(), factors: Vec::new() }
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn factors(&self) -> &[(BigInt, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn product(&self) -> BigInt {
        self.factors
            .iter()
            .fold(BigInt::one(), |acc, (p, e)| acc * num_traits::pow(p.clone(), *e as usize))
    }

    /// Factorization of `self * other`.
    pub fn merge(&self, other: &Factorization) -> Factorization {
        Factorization::from_prime_powers(self.factors.iter().chain(&other.factors).cloned())
    }

    pub fn pow(&self, k: u32) -> Factorization {
        Factorization::from_prime_powers(self.factors.iter().map(|(p, e)| (p.clone(), e * k)))
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FactorError {
    #[error("cannot factor non-positive integer {0}")]
    NonPositive(BigInt),
    #[error("incomplete factorization: found {found}, unfactored composite cofactors {unfactored:?}")]
    Incomplete {
        found: Factorization,
        unfactored: Vec<BigInt>,
    },
}

fn sieve_primes(bound: u64) -> Vec<u32> {
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u32);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn default_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(DEFAULT_TRIAL_BOUND))
}

pub fn factorize(n: &BigInt) -> Result<Factorization, FactorError> {
    factorize_with(n, &FactorConfig::default())
}

pub fn factorize_with(n: &BigInt, cfg: &FactorConfig) -> Result<Factorization, FactorError> {
    if !n.is_positive() {
        return Err(FactorError::NonPositive(n.clone()));
    }
    let owned;
    let primes: &[u32] = if cfg.trial_bound == DEFAULT_TRIAL_BOUND {
        default_primes()
    } else {
        owned = sieve_primes(cfg.trial_bound.min(u32::MAX as u64));
        &owned
    };

    let mut found: Vec<(BigInt, u32)> = Vec::new();
    let mut rest = n.magnitude().clone();
    for &p in primes {
        if let Some(small) = rest.to_u64() {
            if (p as u64) * (p as u64) > small {
                break;
            }
            if small % p as u64 != 0 {
                continue;
            }
        } else if !(&rest % p).is_zero() {
            continue;
        }
        let mut e = 0;
        while (&rest % p).is_zero() {
            rest /= p;
            e += 1;
        }
        found.push((BigInt::from(p), e));
    }
    if rest.is_one() {
        return Ok(Factorization::from_prime_powers(found));
    }
    // Everything left has all prime factors above the trial bound.
    let trial_limit = primes.last().map_or(1u64, |&p| p as u64);
    let mut unfactored = Vec::new();
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        let m_int = BigInt::from(m.clone());
        let fully_trialled = m.to_u64().is_some_and(|v| (trial_limit as u128).pow(2) >= v as u128);
        if fully_trialled || is_prime(&m_int) {
            found.push((m_int, 1));
            continue;
        }
        match split(&m, cfg) {
            Some(d) => {
                let other = &m / &d;
                stack.push(d);
                stack.push(other);
            }
            None => unfactored.push(m_int),
        }
    }
    let found = Factorization::from_prime_powers(found);
    if unfactored.is_empty() {
        Ok(found)
    } else {
        unfactored.sort();
        Err(FactorError::Incomplete { found, unfactored })
    }
}

/// Finds a nontrivial divisor of an odd composite `m`, if rho succeeds within budget.
fn split(m: &BigUint, cfg: &FactorConfig) -> Option<BigUint> {
    if let Some(small) = m.to_u64() {
        return (1..=cfg.rho_seeds)
            .find_map(|c| rho_brent_u64(small, c, cfg.rho_iterations))
            .map(BigUint::from);
    }
    if let Some(r) = perfect_square_root(m) {
        return Some(r);
    }
    (1..=cfg.rho_seeds).find_map(|c| rho_brent_big(m, c, cfg.rho_iterations))
}

fn perfect_square_root(m: &BigUint) -> Option<BigUint> {
    let r = num_integer::Roots::sqrt(m);
    (&r * &r == *m).then_some(r)
}

fn rho_brent_u64(n: u64, c: u64, budget: u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    if is_prime_u64(n) {
        return None;
    }
    let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
    let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
    let mut x = y;
    let mut ys = y;
    let mut iterations = 0;
    const BATCH: u64 = 128;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += BATCH;
        }
        iterations += r;
        if iterations > budget {
            return None;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn rho_brent_big(n: &BigUint, c: u64, budget: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let one = BigUint::one();
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut y = BigUint::from(2u32);
    let mut x = y.clone();
    let mut ys = y.clone();
    let (mut r, mut q, mut g) = (1u64, one.clone(), one.clone());
    let mut iterations = 0;
    const BATCH: u64 = 128;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..BATCH.min(r - k) {
                y = f(&y);
                q = (q * diff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += BATCH;
        }
        iterations += r;
        if iterations > budget {
            return None;
        }
        r *= 2;
    }
    if g == *n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if g > one {
                break;
            }
        }
    }
    (g != *n).then_some(g)
}
