//! Exhaustive search for affine rational points on `y^2 = (x - s) Q(x)`.
//!
//! Candidates are `x = u/w` in lowest terms with `max{|u|, w} <= H`. Writing
//! `s = a/b`, the value `f(u/w)` is a rational square exactly when the integer
//!
//! ```text
//! V(u, w) = bq * (bu - aw) * G(u, w) * w^(d mod 2),   G(u, w) = w^(d-1) qQ(u/w)
//! ```
//!
//! is a perfect square. `V mod m` only depends on `(u mod m, w mod m)`, so a
//! table per modulus of the classes where `V` can be a square discards most
//! candidates before any exact arithmetic. Survivors are checked exactly.

use crate::arith::{is_square_rational, BigInt, BigRational, RatPoly};
use crate::io::json_int;
use crate::pencil::{fiber_poly, FiberParams, PencilSpec};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Number of odd primes used by the default residue filter.
pub const DEFAULT_SIEVE_PRIME_COUNT: usize = 8;
/// Modulus of the power-of-two square test.
pub const POWER_OF_TWO_MODULUS: u64 = 64;
const STRIP_WIDTH: i64 = 32;
/// Larger moduli are ignored; tables hold `m^2` entries.
pub const MAX_FILTER_MODULUS: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointRecord {
    pub x: BigRational,
    /// Nonnegative representative; `(x, -y)` is also a point.
    pub y: BigRational,
    pub is_weierstrass: bool,
    pub x_height: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub height_bound: u64,
    /// `None` selects the default primes for the fiber.
    pub sieve_primes: Option<Vec<u64>>,
    pub use_sieve: bool,
    /// Count `(x, -y)` as a second point when `y != 0`.
    pub count_negatives: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { height_bound: 100, sieve_primes: None, use_sieve: true, count_negatives: true }
    }
}

impl SearchConfig {
    pub fn with_height(height_bound: u64) -> Self {
        SearchConfig { height_bound, ..Default::default() }
    }
}

/// Allowed `(u mod m, w mod m)` classes for one modulus.
#[derive(Debug, Clone)]
pub struct ResidueTable {
    pub modulus: u64,
    allowed: Vec<bool>,
}

impl ResidueTable {
    pub fn admits(&self, u: i64, w: u64) -> bool {
        let m = self.modulus;
        let ur = u.rem_euclid(m as i64) as u64;
        self.allowed[(ur * m + w % m) as usize]
    }

    pub fn allowed_fraction(&self) -> f64 {
        self.allowed.iter().filter(|&&a| a).count() as f64 / self.allowed.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct ResidueFilter {
    pub tables: Vec<ResidueTable>,
}

impl ResidueFilter {
    pub fn admits(&self, u: i64, w: u64) -> bool {
        self.tables.iter().all(|t| t.admits(u, w))
    }
}

/// Integer data of `V(u, w)`.
struct ClearedForm {
    scale: BigInt,
    lin_u: BigInt,
    lin_w: BigInt,
    g: Vec<BigInt>,
    odd: bool,
}

impl ClearedForm {
    fn new(spec: &PencilSpec, fp: &FiberParams) -> Self {
        ClearedForm {
            scale: fp.b() * spec.q(),
            lin_u: fp.b().clone(),
            lin_w: -fp.a(),
            g: spec.integer_poly().to_vec(),
            odd: spec.degree() % 2 == 1,
        }
    }

    fn residue_table(&self, m: u64) -> ResidueTable {
        let red = |x: &BigInt| x.mod_floor(&BigInt::from(m)).to_u64().expect("reduced mod m");
        let scale = red(&self.scale);
        let (lu, lw) = (red(&self.lin_u), red(&self.lin_w));
        let g: Vec<u64> = self.g.iter().map(red).collect();
        let deg_g = g.len() - 1;
        let mut squares = vec![false; m as usize];
        for x in 0..m {
            squares[((x * x) % m) as usize] = true;
        }
        let mul = |x: u64, y: u64| (x * y) % m;
        let pow = |x: u64, e: usize| (0..e).fold(1 % m, |acc, _| mul(acc, x));
        let mut allowed = vec![false; (m * m) as usize];
        for u in 0..m {
            for w in 0..m {
                let gv = g
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (i, c)| (acc + mul(mul(*c, pow(u, i)), pow(w, deg_g - i))) % m);
                let mut v = mul(scale, mul((lu * u + lw * w) % m, gv));
                if self.odd {
                    v = mul(v, w);
                }
                allowed[(u * m + w) as usize] = squares[v as usize];
            }
        }
        ResidueTable { modulus: m, allowed }
    }
}

/// The first odd primes not dividing `bq * lc(qQ)`.
pub fn default_sieve_primes(spec: &PencilSpec, fp: &FiberParams) -> Vec<u64> {
    let lc = spec.integer_poly().last().expect("nonzero Q").clone();
    let avoid = fp.b() * spec.q() * lc;
    (3u64..)
        .filter(|&p| crate::arith::is_prime(&BigInt::from(p)))
        .filter(|&p| !(&avoid % p).is_zero())
        .take(DEFAULT_SIEVE_PRIME_COUNT)
        .collect()
}

/// Residue tables for the given primes plus the mod-64 square test.
///
/// Sound for any moduli: an integer square reduces to a square modulo every `m`.
pub fn residue_filter(spec: &PencilSpec, fp: &FiberParams, primes: &[u64]) -> ResidueFilter {
    let form = ClearedForm::new(spec, fp);
    let mut tables: Vec<ResidueTable> = primes
        .iter()
        .filter(|&&p| (2..=MAX_FILTER_MODULUS).contains(&p))
        .map(|&p| form.residue_table(p))
        .collect();
    tables.push(form.residue_table(POWER_OF_TWO_MODULUS));
    // most selective first
    tables.sort_by(|x, y| x.allowed_fraction().total_cmp(&y.allowed_fraction()));
    ResidueFilter { tables }
}

fn check_candidate(f: &RatPoly, u: i64, w: u64) -> Option<PointRecord> {
    let x = BigRational::new(u.into(), w.into());
    let y = is_square_rational(&f.eval(&x))?;
    Some(PointRecord {
        is_weierstrass: y.is_zero(),
        x_height: BigInt::from(u.unsigned_abs().max(w)),
        x,
        y,
    })
}

fn strips(height: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut start = -height;
    while start <= height {
        let end = (start + STRIP_WIDTH - 1).min(height);
        out.push((start, end));
        start = end + 1;
    }
    out
}

/// All affine rational points with x-height at most `cfg.height_bound`, one
/// record per x-coordinate, ordered by `(denominator, numerator)` of x.
pub fn enumerate_points(spec: &PencilSpec, fp: &FiberParams, cfg: &SearchConfig) -> Vec<PointRecord> {
    let height = cfg.height_bound as i64;
    if height == 0 {
        return Vec::new();
    }
    let f = fiber_poly(spec, fp);
    let filter = cfg.use_sieve.then(|| {
        let primes = cfg.sieve_primes.clone().unwrap_or_else(|| default_sieve_primes(spec, fp));
        residue_filter(spec, fp, &primes)
    });
    let mut records: Vec<PointRecord> = strips(height)
        .into_par_iter()
        .flat_map_iter(|(lo, hi)| {
            let mut found = Vec::new();
            for w in 1..=height as u64 {
                for u in lo..=hi {
                    if u.unsigned_abs().gcd(&w) != 1 {
                        continue;
                    }
                    if filter.as_ref().is_some_and(|flt| !flt.admits(u, w)) {
                        continue;
                    }
                    found.extend(check_candidate(&f, u, w));
                }
            }
            found
        })
        .collect();
    records.sort_by(|p, q| (p.x.denom(), p.x.numer()).cmp(&(q.x.denom(), q.x.numer())));
    records
}

/// Affine point count: each non-Weierstrass record stands for `(x, y)` and `(x, -y)`.
pub fn affine_count(records: &[PointRecord], count_negatives: bool) -> u64 {
    records
        .iter()
        .map(|r| if r.is_weierstrass || !count_negatives { 1 } else { 2 })
        .sum()
}

/// Rational points at infinity of the smooth model: one for odd `d`, and
/// for even `d` two or none depending on whether `lc(Q)` is a square.
pub fn points_at_infinity(spec: &PencilSpec) -> u8 {
    if spec.degree() % 2 == 1 {
        return 1;
    }
    let lc = spec.q_poly().leading_coeff().expect("nonzero Q");
    if lc.is_positive() && is_square_rational(lc).is_some() {
        2
    } else {
        0
    }
}

/// Rational roots of `(x - s)Q(x)`, ascending; always contains `s`.
pub fn weierstrass_points(spec: &PencilSpec, fp: &FiberParams) -> Vec<BigRational> {
    let mut pts = spec.rational_roots().to_vec();
    pts.push(fp.s());
    pts.sort();
    pts.dedup();
    pts
}

pub fn verify_point(spec: &PencilSpec, fp: &FiberParams, x: &BigRational, y: &BigRational) -> bool {
    fiber_poly(spec, fp).eval(x) == y * y
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSummary {
    #[serde(with = "json_int")]
    pub a: BigInt,
    #[serde(with = "json_int")]
    pub b: BigInt,
    #[serde(rename = "H")]
    pub height_bound: u64,
    pub affine_count: u64,
    pub weierstrass_count: u64,
    pub infinity_count: u8,
}

pub fn summarize(spec: &PencilSpec, fp: &FiberParams, cfg: &SearchConfig, records: &[PointRecord]) -> PointSummary {
    PointSummary {
        a: fp.a().clone(),
        b: fp.b().clone(),
        height_bound: cfg.height_bound,
        affine_count: affine_count(records, cfg.count_negatives),
        weierstrass_count: records.iter().filter(|r| r.is_weierstrass).count() as u64,
        infinity_count: points_at_infinity(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::{fiber_params, new_pencil};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn quintic_fiber() -> (PencilSpec, FiberParams) {
        let spec = new_pencil(RatPoly::from_i64s(&[-1, 0, 0, 0, 1])).unwrap();
        let fp = fiber_params(&spec, &0.into(), &1.into()).unwrap();
        (spec, fp)
    }

    #[test]
    fn height_one_on_x5_minus_x() {
        let (spec, fp) = quintic_fiber();
        for use_sieve in [true, false] {
            let cfg = SearchConfig { height_bound: 1, use_sieve, ..Default::default() };
            let xs: Vec<_> = enumerate_points(&spec, &fp, &cfg).into_iter().map(|r| r.x).collect();
            assert_eq!(xs, vec![q(-1, 1), q(0, 1), q(1, 1)]);
        }
        assert!(enumerate_points(&spec, &fp, &SearchConfig::with_height(0)).is_empty());
    }

    #[test]
    fn sextic_weierstrass_floor() {
        let spec = PencilSpec::sextic_example();
        let fp = fiber_params(&spec, &1.into(), &1.into()).unwrap();
        let recs = enumerate_points(&spec, &fp, &SearchConfig::with_height(20));
        let w: Vec<_> = recs.iter().filter(|r| r.is_weierstrass).map(|r| r.x.clone()).collect();
        assert_eq!(w, [0, 1, 2, 6, 8, 12, 20].map(|v| q(v, 1)).to_vec());
        assert_eq!(weierstrass_points(&spec, &fp), w);
    }

    /// `V(u, w)` for the sextic at `s = 1`: `(u - w) * prod (u - r w) * w`.
    fn sextic_v(u: i64, w: i64) -> i64 {
        [0, 2, 6, 8, 12, 20].iter().fold((u - w) * w, |acc, r| acc * (u - r * w))
    }

    #[test]
    fn residue_tables_match_direct_reduction() {
        let spec = PencilSpec::sextic_example();
        let fp = fiber_params(&spec, &1.into(), &1.into()).unwrap();
        let form = ClearedForm::new(&spec, &fp);
        for m in [3u64, 5, 7, 11, 64] {
            let table = form.residue_table(m);
            let squares: Vec<i64> = (0..m as i64).map(|x| (x * x).rem_euclid(m as i64)).collect();
            for u in 0..m as i64 {
                for w in 0..m as i64 {
                    let v = sextic_v(u, w).rem_euclid(m as i64);
                    assert_eq!(table.admits(u, w as u64), squares.contains(&v), "m={m} u={u} w={w}");
                }
            }
        }
    }

    #[test]
    fn nonresidue_class_is_discarded() {
        // y^2 = x^5 + x at s = 0
        let spec = new_pencil(RatPoly::from_i64s(&[1, 0, 0, 0, 1])).unwrap();
        let fp = fiber_params(&spec, &0.into(), &1.into()).unwrap();
        // V(u, 1) = u * (u^4 + 1); u = 1 gives 2, a non-residue mod 3
        let table = ClearedForm::new(&spec, &fp).residue_table(3);
        assert!(!table.admits(1, 1));
        assert!(table.admits(0, 1));
    }

    #[test]
    fn infinity_counts() {
        assert_eq!(points_at_infinity(&PencilSpec::sextic_example()), 1);
        let d6_square = new_pencil(RatPoly::from_i64s(&[1, 0, 0, 0, 1, 4])).unwrap();
        assert_eq!(points_at_infinity(&d6_square), 2);
        let d6_nonsquare = new_pencil(RatPoly::from_i64s(&[1, 0, 0, 0, 1, 2])).unwrap();
        assert_eq!(points_at_infinity(&d6_nonsquare), 0);
        let d6_negative = new_pencil(RatPoly::from_i64s(&[1, 0, 0, 0, 1, -4])).unwrap();
        assert_eq!(points_at_infinity(&d6_negative), 0);
    }

    #[test]
    fn weierstrass_listing() {
        let spec = new_pencil(RatPoly::from_i64s(&[1, 0, 0, 0, 1])).unwrap();
        let fp = fiber_params(&spec, &5.into(), &1.into()).unwrap();
        assert_eq!(weierstrass_points(&spec, &fp), vec![q(5, 1)]);
        let p = &RatPoly::from_i64s(&[-2, 0, 1]) * &RatPoly::from_i64s(&[-3, 0, 1]);
        let spec = new_pencil(p).unwrap();
        let fp = fiber_params(&spec, &0.into(), &1.into()).unwrap();
        assert_eq!(weierstrass_points(&spec, &fp), vec![q(0, 1)]);
    }

    #[test]
    fn membership() {
        let (spec, fp) = quintic_fiber();
        assert!(verify_point(&spec, &fp, &q(0, 1), &q(0, 1)));
        assert!(!verify_point(&spec, &fp, &q(2, 1), &q(1, 1)));
        let sextic = PencilSpec::sextic_example();
        let fp = fiber_params(&sextic, &1.into(), &1.into()).unwrap();
        for r in enumerate_points(&sextic, &fp, &SearchConfig::with_height(60)) {
            assert!(verify_point(&sextic, &fp, &r.x, &r.y));
            assert!(verify_point(&sextic, &fp, &r.x, &-r.y.clone()));
        }
    }

    #[test]
    fn counting_with_and_without_negatives() {
        let spec = PencilSpec::sextic_example();
        let fp = fiber_params(&spec, &1.into(), &1.into()).unwrap();
        let recs = enumerate_points(&spec, &fp, &SearchConfig::with_height(100));
        let w = recs.iter().filter(|r| r.is_weierstrass).count() as u64;
        let non_w = recs.len() as u64 - w;
        assert_eq!(affine_count(&recs, true), 2 * non_w + w);
        assert_eq!(affine_count(&recs, false), recs.len() as u64);
    }
}
