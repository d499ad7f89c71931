//! Bad primes and the explicit Mordell-Weil rank bound of a fiber.
//!
//! The rank of the Jacobian over `k` is at most `2g([k:Q] - 1 + #P')` where
//! `P'` covers the primes above the bad set `P`. We take `#P'` at its upper
//! bound `[k:Q] #P` plus a caller-supplied correction for making the ring of
//! `P'`-integers a PID; the correction is 0 for `k = Q`.

use crate::arith::{factorize, BigInt, FactorError, Factorization};
use crate::io::json_int;
use crate::pencil::{integral_disc, integral_disc_factorization, FiberParams, PencilError, PencilSpec};
use crate::arith::ln_bigint;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RankError {
    #[error("incomplete factorization; bad primes found so far: {partial:?}")]
    IncompleteFactorization { partial: Vec<BigInt>, source: FactorError },
    #[error("[k:Q] must be at least 1")]
    InvalidFieldDegree,
    #[error(transparent)]
    Pencil(#[from] PencilError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankBoundReport {
    pub fiber: FiberParams,
    pub genus: usize,
    pub bad_primes: Vec<BigInt>,
    pub p_prime_count: u64,
    pub deg_k: u32,
    pub pid_correction: u64,
    pub rank_bound: u64,
    pub omega_disc: usize,
}

impl RankBoundReport {
    /// The bound is unconditional for `k = Q`; otherwise it relies on the supplied PID correction.
    pub fn is_conditional(&self) -> bool {
        self.deg_k > 1
    }

    pub fn to_record(&self, c: f64) -> RankRecord {
        RankRecord {
            a: self.fiber.a().clone(),
            b: self.fiber.b().clone(),
            h_star: self.fiber.h_star().clone(),
            bad_primes: self.bad_primes.clone(),
            omega_disc: self.omega_disc,
            deg_k: self.deg_k,
            pid_correction: self.pid_correction,
            rank_bound: self.rank_bound,
            count_bound: count_bound(self.fiber.h_star(), c),
            c,
        }
    }
}

/// One JSON object per fiber. `count_bound` holds only up to the ineffective constant `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRecord {
    #[serde(with = "json_int")]
    pub a: BigInt,
    #[serde(with = "json_int")]
    pub b: BigInt,
    #[serde(rename = "H_star", with = "json_int")]
    pub h_star: BigInt,
    #[serde(with = "json_int::vec")]
    pub bad_primes: Vec<BigInt>,
    pub omega_disc: usize,
    pub deg_k: u32,
    pub pid_correction: u64,
    pub rank_bound: u64,
    pub count_bound: f64,
    pub c: f64,
}

fn factor_2bq(spec: &PencilSpec, fp: &FiberParams) -> Factorization {
    let n = BigInt::from(2) * fp.b() * spec.q();
    // 2bq is small in practice; its factorization is unbounded only for absurd inputs.
    factorize(&n).unwrap_or_else(|e| match e {
        FactorError::Incomplete { found, unfactored } => Factorization::from_prime_powers(
            found.factors().iter().cloned().chain(unfactored.into_iter().map(|u| (u, 1))),
        ),
        FactorError::NonPositive(_) => unreachable!("2bq > 0"),
    })
}

fn disc_factorization(spec: &PencilSpec, fp: &FiberParams) -> Result<Factorization, RankError> {
    let two_bq: BTreeSet<BigInt> = factor_2bq(spec, fp).primes().cloned().collect();
    let fact = integral_disc_factorization(spec, fp).map_err(|source| {
        let mut partial = two_bq.clone();
        if let FactorError::Incomplete { found, .. } = &source {
            partial.extend(found.primes().cloned());
        }
        RankError::IncompleteFactorization { partial: partial.into_iter().collect(), source }
    })?;
    let direct = integral_disc(spec, fp)?;
    if *fact.value() != direct.abs() {
        return Err(PencilError::Internal("piecewise discriminant factorization mismatch".into()).into());
    }
    Ok(fact)
}

/// Primes dividing `2bq` or `(bq)^(2d-2) Delta(s)`, ascending.
pub fn bad_primes(spec: &PencilSpec, fp: &FiberParams) -> Result<Vec<BigInt>, RankError> {
    let fact = disc_factorization(spec, fp)?;
    Ok(merge_primes(spec, fp, &fact))
}

fn merge_primes(spec: &PencilSpec, fp: &FiberParams, disc: &Factorization) -> Vec<BigInt> {
    let mut set: BTreeSet<BigInt> = factor_2bq(spec, fp).primes().cloned().collect();
    set.extend(disc.primes().cloned());
    set.into_iter().collect()
}

/// `2g(deg_k - 1 + deg_k * #P + pid_correction)`
pub fn rank_bound_formula(genus: usize, deg_k: u32, bad_prime_count: usize, pid_correction: u64) -> u64 {
    let p_prime = deg_k as u64 * bad_prime_count as u64 + pid_correction;
    2 * genus as u64 * (deg_k as u64 - 1 + p_prime)
}

pub fn rank_bound(
    spec: &PencilSpec,
    fp: &FiberParams,
    deg_k: u32,
    pid_correction: u64,
) -> Result<RankBoundReport, RankError> {
    if deg_k == 0 {
        return Err(RankError::InvalidFieldDegree);
    }
    let fact = disc_factorization(spec, fp)?;
    let bad = merge_primes(spec, fp, &fact);
    let p_prime_count = deg_k as u64 * bad.len() as u64 + pid_correction;
    Ok(RankBoundReport {
        fiber: fp.clone(),
        genus: spec.genus(),
        rank_bound: rank_bound_formula(spec.genus(), deg_k, bad.len(), pid_correction),
        bad_primes: bad,
        p_prime_count,
        deg_k,
        pid_correction,
        omega_disc: fact.omega(),
    })
}

/// `H*^(c / log log H*)`, up to the ineffective constant `c`.
pub fn count_bound(h_star: &BigInt, c: f64) -> f64 {
    log_count_bound(h_star, c).exp()
}

/// Natural log of [`count_bound`]: `c log H* / log log H*`.
pub fn log_count_bound(h_star: &BigInt, c: f64) -> f64 {
    let ln_h = ln_bigint(h_star);
    c * ln_h / ln_h.ln()
}

/// `Some(1)` when `Q` splits into distinct linear factors over `Q`.
pub fn detect_split(spec: &PencilSpec) -> Option<u32> {
    spec.splits_over_q().then_some(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{BigRational, RatPoly};
    use crate::pencil::{fiber_params, new_pencil};

    fn trial_primes(mut n: u128) -> Vec<u128> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                out.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    #[test]
    fn sextic_at_one() {
        let spec = PencilSpec::sextic_example();
        let fp = fiber_params(&spec, &1.into(), &1.into()).unwrap();
        let bad = bad_primes(&spec, &fp).unwrap();
        let expected: Vec<BigInt> = [2, 3, 5, 7, 11, 19].iter().map(|&p| BigInt::from(p)).collect();
        assert_eq!(bad, expected);
        let report = rank_bound(&spec, &fp, 1, 0).unwrap();
        assert_eq!(report.rank_bound, 36);
        assert_eq!(report.omega_disc, 6);
        assert!(!report.is_conditional());
        // trial-division oracle on the distinct primes of 7315, joined with disc(Q)'s
        let mut oracle = trial_primes(7315);
        oracle.extend([2, 3, 5, 7]);
        oracle.sort();
        oracle.dedup();
        assert_eq!(oracle.len(), 6);
    }

    #[test]
    fn formula_edges() {
        assert_eq!(rank_bound_formula(3, 1, 1, 0), 6);
        assert_eq!(rank_bound_formula(2, 2, 3, 1), 2 * 2 * (1 + 6 + 1));
        let spec = PencilSpec::sextic_example();
        let fp = fiber_params(&spec, &1.into(), &1.into()).unwrap();
        assert_eq!(rank_bound(&spec, &fp, 0, 0), Err(RankError::InvalidFieldDegree));
        let conditional = rank_bound(&spec, &fp, 2, 3).unwrap();
        assert!(conditional.is_conditional());
        assert_eq!(conditional.p_prime_count, 15);
        assert_eq!(conditional.rank_bound, 6 * (1 + 15));
    }

    #[test]
    fn two_is_always_bad() {
        let spec = new_pencil(RatPoly::from_i64s(&[1, 0, 0, 0, 1])).unwrap();
        for (a, b) in [(1, 1), (3, 5), (-7, 2), (1000, 999)] {
            let fp = fiber_params(&spec, &a.into(), &b.into()).unwrap();
            assert!(bad_primes(&spec, &fp).unwrap().contains(&BigInt::from(2)));
        }
    }

    #[test]
    fn sextic_integer_fibers_bounded_by_product_omega() {
        let spec = PencilSpec::sextic_example();
        for s in 21i64..200 {
            let fp = fiber_params(&spec, &s.into(), &1.into()).unwrap();
            let report = rank_bound(&spec, &fp, 1, 0).unwrap();
            let product = [0, 2, 6, 8, 12, 20].iter().map(|&r| (s - r) as u128).product::<u128>();
            let mut allowed = trial_primes(product);
            allowed.extend([2, 3, 5, 7]);
            for p in &report.bad_primes {
                assert!(allowed.contains(&p.to_string().parse::<u128>().unwrap()), "s={s}, p={p}");
            }
            let t = trial_primes(product).len() as u64;
            assert!(report.rank_bound <= 6 * (t + 4));
        }
    }

    #[test]
    fn count_bound_shape() {
        let h = BigInt::from(3);
        let expected = 3f64.powf(1.0 / 3f64.ln().ln());
        assert!((count_bound(&h, 1.0) / expected - 1.0).abs() < 1e-12);
        // H* = e^e is not an integer; check the exponent identity on the log form instead
        let e_e = std::f64::consts::E.powf(std::f64::consts::E);
        let lb = 2.0 * e_e.ln() / e_e.ln().ln();
        assert!((lb - 2.0 * std::f64::consts::E).abs() < 1e-12);
        let mut prev = 0.0;
        for n in 16u64..5000 {
            let v = log_count_bound(&BigInt::from(n), 1.5);
            assert!(v >= prev, "not monotone at {n}");
            prev = v;
        }
    }

    #[test]
    fn split_detection() {
        assert_eq!(detect_split(&PencilSpec::sextic_example()), Some(1));
        assert_eq!(detect_split(&new_pencil(RatPoly::from_i64s(&[1, 0, 0, 0, 1])).unwrap()), None);
        let p = &RatPoly::from_i64s(&[-2, 0, 1]) * &RatPoly::from_i64s(&[-3, 0, 1]);
        assert_eq!(detect_split(&new_pencil(&p * &RatPoly::from_i64s(&[1, 1])).unwrap()), None);
        let halves = RatPoly::from_roots(&[0, 1, 2, 3, 4].map(|r| BigRational::new(r.into(), 2.into())));
        assert_eq!(detect_split(&new_pencil(halves).unwrap()), Some(1));
    }
}
