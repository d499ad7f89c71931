//! Per-fiber reports, range surveys, prime-omega statistics and the density
//! experiment behind the command-line tool.

use crate::arith::{factorize, BigInt};
use crate::io::{json_int, IoError};
use crate::pencil::{fiber_params, integral_disc_factorization, FiberParams, PencilError, PencilSpec};
use crate::points::{enumerate_points, summarize, SearchConfig};
use crate::rank::{count_bound, rank_bound, RankError};
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// Constant term of the mean of `omega(n)` over `n <= x`: `log log x + B1`.
pub const MERTENS_B1: f64 = 0.261_497_212_847_642_8;
/// Default cap on smallest-prime-factor sieve memory.
pub const DEFAULT_MEMORY_BUDGET: usize = 512 << 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FiberError {
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Rank(#[from] RankError),
}

impl FiberError {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, FiberError::Pencil(PencilError::DegenerateFiber(_)) | FiberError::Rank(RankError::Pencil(PencilError::DegenerateFiber(_))))
    }
}

/// Rank bound and point count for one fiber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    #[serde(with = "json_int")]
    pub a: BigInt,
    #[serde(with = "json_int")]
    pub b: BigInt,
    #[serde(rename = "H_star", with = "json_int")]
    pub h_star: BigInt,
    pub genus: usize,
    #[serde(with = "json_int::vec")]
    pub bad_primes: Vec<BigInt>,
    pub omega_disc: usize,
    pub deg_k: u32,
    pub pid_correction: u64,
    pub rank_bound: u64,
    /// `H*^(c / log log H*)` for the supplied `c`.
    pub count_bound: f64,
    pub c: f64,
    #[serde(rename = "H")]
    pub height_bound: u64,
    pub affine_count: u64,
    pub weierstrass_count: u64,
    pub infinity_count: u8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberOptions {
    pub c: f64,
    pub deg_k: u32,
    pub pid_correction: u64,
}

impl Default for FiberOptions {
    fn default() -> Self {
        FiberOptions { c: 1.0, deg_k: 1, pid_correction: 0 }
    }
}

pub fn fiber_report(spec: &PencilSpec, fp: &FiberParams, cfg: &SearchConfig, opts: &FiberOptions) -> Result<CountReport, FiberError> {
    let rank = rank_bound(spec, fp, opts.deg_k, opts.pid_correction)?;
    let records = enumerate_points(spec, fp, cfg);
    let summary = summarize(spec, fp, cfg, &records);
    Ok(CountReport {
        a: fp.a().clone(),
        b: fp.b().clone(),
        h_star: fp.h_star().clone(),
        genus: rank.genus,
        bad_primes: rank.bad_primes,
        omega_disc: rank.omega_disc,
        deg_k: rank.deg_k,
        pid_correction: rank.pid_correction,
        rank_bound: rank.rank_bound,
        count_bound: count_bound(fp.h_star(), opts.c),
        c: opts.c,
        height_bound: cfg.height_bound,
        affine_count: summary.affine_count,
        weierstrass_count: summary.weierstrass_count,
        infinity_count: summary.infinity_count,
    })
}

/// The report for `s = a/b`.
pub fn cmd_fiber(spec: &PencilSpec, a: &BigInt, b: &BigInt, cfg: &SearchConfig, opts: &FiberOptions) -> Result<CountReport, FiberError> {
    let fp = fiber_params(spec, a, b)?;
    fiber_report(spec, &fp, cfg, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveySummary {
    pub fibers: usize,
    pub skipped: usize,
    pub failed: usize,
    pub max_affine_count: Option<u64>,
    pub max_rank_bound: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyFailure {
    pub s: i64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub s_from: i64,
    pub s_to: i64,
    pub reports: Vec<CountReport>,
    /// Degenerate parameters (`Q(s) = 0`).
    pub skipped: Vec<i64>,
    pub failed: Vec<SurveyFailure>,
    pub summary: SurveySummary,
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .unwrap_or_else(|e| panic!("cannot start worker pool: {e}")),
        _ => f(),
    }
}

/// Reports for every integer `s` in `s_from..=s_to`, in order. Degenerate
/// parameters are skipped and other per-fiber errors recorded.
pub fn survey(spec: &PencilSpec, s_from: i64, s_to: i64, cfg: &SearchConfig, opts: &FiberOptions, jobs: Option<usize>) -> SurveyReport {
    let results: Vec<(i64, Result<CountReport, FiberError>)> = with_pool(jobs, || {
        (s_from..=s_to)
            .into_par_iter()
            .map(|s| (s, cmd_fiber(spec, &s.into(), &1.into(), cfg, opts)))
            .collect()
    });
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    let mut failed = Vec::new();
    for (s, r) in results {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) if e.is_degenerate() => {
                log::info!("skipping degenerate fiber s = {s}");
                skipped.push(s);
            }
            Err(e) => {
                log::warn!("fiber s = {s} failed: {e}");
                failed.push(SurveyFailure { s, error: e.to_string() });
            }
        }
    }
    let summary = SurveySummary {
        fibers: reports.len(),
        skipped: skipped.len(),
        failed: failed.len(),
        max_affine_count: reports.iter().map(|r| r.affine_count).max(),
        max_rank_bound: reports.iter().map(|r| r.rank_bound).max(),
    };
    SurveyReport { s_from, s_to, reports, skipped, failed, summary }
}

pub const SURVEY_CSV_HEADER: [&str; 15] = [
    "a",
    "b",
    "H_star",
    "genus",
    "bad_primes",
    "omega_disc",
    "deg_k",
    "pid_correction",
    "rank_bound",
    "count_bound",
    "c",
    "H",
    "affine_count",
    "weierstrass_count",
    "infinity_count",
];

/// One row per report; bad primes are `;`-separated. A trailing `#` comment
/// line carries the summary.
pub fn write_survey_csv<W: Write>(out: W, reports: &[CountReport], summary: Option<&SurveySummary>) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| IoError::Csv(e.to_string());
    w.write_record(SURVEY_CSV_HEADER).map_err(csv_err)?;
    for r in reports {
        let primes: Vec<String> = r.bad_primes.iter().map(|p| p.to_string()).collect();
        w.write_record([
            r.a.to_string(),
            r.b.to_string(),
            r.h_star.to_string(),
            r.genus.to_string(),
            primes.join(";"),
            r.omega_disc.to_string(),
            r.deg_k.to_string(),
            r.pid_correction.to_string(),
            r.rank_bound.to_string(),
            r.count_bound.to_string(),
            r.c.to_string(),
            r.height_bound.to_string(),
            r.affine_count.to_string(),
            r.weierstrass_count.to_string(),
            r.infinity_count.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let mut inner = w.into_inner().map_err(|e| IoError::Csv(e.to_string()))?;
    if let Some(s) = summary {
        let opt = |v: Option<u64>| v.map_or_else(|| "none".to_string(), |x| x.to_string());
        writeln!(
            inner,
            "# summary fibers={} skipped={} failed={} max_affine_count={} max_rank_bound={}",
            s.fibers,
            s.skipped,
            s.failed,
            opt(s.max_affine_count),
            opt(s.max_rank_bound)
        )?;
    }
    inner.flush()?;
    Ok(())
}

pub fn read_survey_csv<R: Read>(input: R) -> Result<Vec<CountReport>, IoError> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let csv_err = |e: csv::Error| IoError::Csv(e.to_string());
    let header = rd.headers().map_err(csv_err)?.clone();
    if header.iter().ne(SURVEY_CSV_HEADER) {
        return Err(IoError::Csv(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(csv_err)?;
        fn field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize) -> Result<T, IoError> {
            row[i]
                .parse()
                .map_err(|_| IoError::Csv(format!("bad value {:?} in column {}", &row[i], SURVEY_CSV_HEADER[i])))
        }
        let bad_primes = if row[4].is_empty() {
            Vec::new()
        } else {
            row[4]
                .split(';')
                .map(|p| p.parse().map_err(|_| IoError::Csv(format!("bad prime {p:?}"))))
                .collect::<Result<_, _>>()?
        };
        out.push(CountReport {
            a: field(&row, 0)?,
            b: field(&row, 1)?,
            h_star: field(&row, 2)?,
            genus: field(&row, 3)?,
            bad_primes,
            omega_disc: field(&row, 5)?,
            deg_k: field(&row, 6)?,
            pid_correction: field(&row, 7)?,
            rank_bound: field(&row, 8)?,
            count_bound: field(&row, 9)?,
            c: field(&row, 10)?,
            height_bound: field(&row, 11)?,
            affine_count: field(&row, 12)?,
            weierstrass_count: field(&row, 13)?,
            infinity_count: field(&row, 14)?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OmegaError {
    #[error("sieve up to {limit} needs {needed} bytes, over the budget of {budget}")]
    MemoryBudget { limit: u64, needed: usize, budget: usize },
    #[error("range must reach at least {min}, got {got}")]
    RangeTooSmall { min: u64, got: u64 },
    #[error("fiber s = {s}: {error}")]
    Fiber { s: u64, error: String },
}

/// Smallest-prime-factor table for `0..=limit` (linear sieve).
#[derive(Debug, Clone)]
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: u64, memory_budget: usize) -> Result<Self, OmegaError> {
        let needed = (limit as usize)
            .checked_add(1)
            .and_then(|n| n.checked_mul(std::mem::size_of::<u32>()))
            .unwrap_or(usize::MAX);
        if needed > memory_budget || limit > u32::MAX as u64 {
            return Err(OmegaError::MemoryBudget { limit, needed, budget: memory_budget });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let j = i * p as usize;
                if p > si || j > n {
                    break;
                }
                spf[j] = p;
            }
        }
        Ok(SpfSieve { spf })
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    /// Distinct prime factors of `n` in increasing order; `n` must be in range.
    pub fn prime_factors(&self, mut n: u64) -> Vec<u64> {
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        out
    }

    pub fn omega(&self, n: u64) -> usize {
        self.prime_factors(n).len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaSummary {
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub min: usize,
    pub max: usize,
    /// `histogram[k]` counts the values with `omega = k`.
    pub histogram: Vec<u64>,
}

impl OmegaSummary {
    pub fn from_values<I: IntoIterator<Item = usize>>(values: I) -> Self {
        let mut histogram: Vec<u64> = Vec::new();
        let (mut count, mut sum, mut sum_sq) = (0u64, 0f64, 0f64);
        let (mut min, mut max) = (usize::MAX, 0);
        for w in values {
            if histogram.len() <= w {
                histogram.resize(w + 1, 0);
            }
            histogram[w] += 1;
            count += 1;
            sum += w as f64;
            sum_sq += (w * w) as f64;
            min = min.min(w);
            max = max.max(w);
        }
        let mean = if count == 0 { 0.0 } else { sum / count as f64 };
        let variance = if count == 0 { 0.0 } else { sum_sq / count as f64 - mean * mean };
        OmegaSummary { count, mean, variance, min: if count == 0 { 0 } else { min }, max, histogram }
    }
}

/// Statistics of `omega(n)` for `1 <= n <= s_to` and, for a split pencil, of
/// `omega` of the product of its linear forms at `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyStats {
    pub s_to: u64,
    pub integers: OmegaSummary,
    /// `log log s_to + B1`, the expected mean.
    pub reference_mean: f64,
    pub pencil: Option<OmegaSummary>,
    /// `linear-forms` or `discriminant`, see [`product_omegas`].
    pub pencil_mode: Option<String>,
}

pub fn omega_stats(spec: Option<&PencilSpec>, s_to: u64, memory_budget: usize) -> Result<SurveyStats, OmegaError> {
    if s_to < 3 {
        return Err(OmegaError::RangeTooSmall { min: 3, got: s_to });
    }
    let sieve = SpfSieve::new(s_to, memory_budget)?;
    let integers = OmegaSummary::from_values((1..=s_to).map(|n| sieve.omega(n)));
    let (pencil, pencil_mode) = match spec {
        Some(spec) if spec.splits_over_q() => {
            let values = product_omegas(spec, s_to, memory_budget)?;
            (Some(OmegaSummary::from_values(values.omegas.iter().map(|&(_, w)| w))), Some(values.mode))
        }
        _ => (None, None),
    };
    Ok(SurveyStats {
        s_to,
        integers,
        reference_mean: (s_to as f64).ln().ln() + MERTENS_B1,
        pencil,
        pencil_mode,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductOmegas {
    pub mode: String,
    /// `(s, omega)` for every non-degenerate `s` in `1..=s_to`.
    pub omegas: Vec<(u64, usize)>,
}

/// `omega` of `prod (m_i s - n_i)` over the roots `n_i/m_i` of `Q` when `Q`
/// splits over Q; otherwise `omega` of the integral discriminant
/// `q^(2d-2) Delta(s)`.
pub fn product_omegas(spec: &PencilSpec, s_to: u64, memory_budget: usize) -> Result<ProductOmegas, OmegaError> {
    if spec.splits_over_q() {
        let forms = spec.linear_forms();
        let mut limit = 1u64;
        for (m, n) in forms {
            let bound = m.abs() * BigInt::from(s_to) + n.abs();
            limit = limit.max(bound.to_u64().unwrap_or(u64::MAX));
        }
        let sieve = SpfSieve::new(limit, memory_budget)?;
        let omegas = (1..=s_to)
            .into_par_iter()
            .filter_map(|s| {
                let mut primes: Vec<u64> = Vec::new();
                for (m, n) in forms {
                    let v = (m * BigInt::from(s) - n).abs();
                    if v.is_zero() {
                        return None;
                    }
                    primes.extend(sieve.prime_factors(v.to_u64().expect("within sieve")));
                }
                primes.sort_unstable();
                primes.dedup();
                Some((s, primes.len()))
            })
            .collect();
        Ok(ProductOmegas { mode: "linear-forms".into(), omegas })
    } else {
        let results: Vec<Result<Option<(u64, usize)>, OmegaError>> = (1..=s_to)
            .into_par_iter()
            .map(|s| {
                let fp = match fiber_params(spec, &s.into(), &1.into()) {
                    Ok(fp) => fp,
                    Err(PencilError::DegenerateFiber(_)) => return Ok(None),
                    Err(e) => return Err(OmegaError::Fiber { s, error: e.to_string() }),
                };
                let f = integral_disc_factorization(spec, &fp).map_err(|e| OmegaError::Fiber { s, error: e.to_string() })?;
                Ok(Some((s, f.omega())))
            })
            .collect();
        let omegas = results.into_iter().filter_map(Result::transpose).collect::<Result<_, _>>()?;
        Ok(ProductOmegas { mode: "discriminant".into(), omegas })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowOmegaReport {
    pub s_to: u64,
    pub t: usize,
    pub mode: String,
    pub hits: Vec<u64>,
    /// Smallest `omega` seen over the range and the first `s` attaining it.
    pub min_omega: Option<usize>,
    pub min_omega_at: Option<u64>,
}

/// Parameters with `omega <= t`, in increasing order.
pub fn low_omega_hits(values: &ProductOmegas, t: usize) -> Vec<u64> {
    values.omegas.iter().filter(|&&(_, w)| w <= t).map(|&(s, _)| s).collect()
}

pub fn cmd_low_omega(spec: &PencilSpec, s_to: u64, t: usize, memory_budget: usize) -> Result<LowOmegaReport, OmegaError> {
    let values = product_omegas(spec, s_to, memory_budget)?;
    let min = values.omegas.iter().min_by_key(|&&(s, w)| (w, s)).copied();
    Ok(LowOmegaReport {
        s_to,
        t,
        hits: low_omega_hits(&values, t),
        mode: values.mode,
        min_omega: min.map(|(_, w)| w),
        min_omega_at: min.map(|(s, _)| s),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFailure {
    pub s: i64,
    pub affine_count: u64,
    pub threshold: f64,
}

/// Fraction of fibers whose height-truncated affine count is at most `(log s)^A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub s_from: i64,
    pub s_to: i64,
    #[serde(rename = "A")]
    pub exponent: f64,
    #[serde(rename = "H")]
    pub height_bound: u64,
    pub samples: usize,
    pub skipped: usize,
    pub passing: usize,
    pub density: f64,
    /// No samples: the density is vacuously 1.
    pub zero_sample: bool,
    /// Counts only cover points with x-height at most H, so they are lower
    /// bounds on the true counts.
    pub truncated_counts: bool,
    pub failures: Vec<DensityFailure>,
}

pub fn cmd_density(
    spec: &PencilSpec,
    s_from: i64,
    s_to: i64,
    exponent: f64,
    cfg: &SearchConfig,
    jobs: Option<usize>,
) -> DensityReport {
    let results: Vec<Option<(i64, u64)>> = with_pool(jobs, || {
        (s_from.max(1)..=s_to)
            .into_par_iter()
            .map(|s| {
                let fp = fiber_params(spec, &s.into(), &1.into()).ok()?;
                let records = enumerate_points(spec, &fp, cfg);
                Some((s, summarize(spec, &fp, cfg, &records).affine_count))
            })
            .collect()
    });
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let mut passing = 0;
    let mut failures = Vec::new();
    let samples = results.len() - skipped;
    for (s, count) in results.into_iter().flatten() {
        let threshold = (s as f64).ln().powf(exponent);
        if (count as f64) <= threshold {
            passing += 1;
        } else {
            failures.push(DensityFailure { s, affine_count: count, threshold });
        }
    }
    DensityReport {
        s_from,
        s_to,
        exponent,
        height_bound: cfg.height_bound,
        samples,
        skipped,
        passing,
        density: if samples == 0 { 1.0 } else { passing as f64 / samples as f64 },
        zero_sample: samples == 0,
        truncated_counts: true,
        failures,
    }
}

/// `omega(|n|)` by factorization, for values outside a sieve.
pub fn omega_by_factorization(n: &BigInt) -> Option<usize> {
    if n.is_zero() {
        return None;
    }
    factorize(&n.abs()).ok().map(|f| f.omega())
}
