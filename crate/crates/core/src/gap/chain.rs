//! The large-point counting chain: height filter, stabilizer thinning, cone
//! pigeonhole, then the Vojta annulus and the Mumford gap inside each cone.
//!
//! The two inequalities are not provable here, so they act as hypotheses:
//! the trace records whether every cone of the input respects them, and the
//! certified bound `deg^2 * floor((1 + sqrt(8 c1))^rho) * max{2, c c2 deg + 1}`
//! is only claimed when they do.

use super::cone::{cone_assign, cone_count_bound, ConeAssignment};
use super::lattice::{GramLattice, Vector};
use super::surd::QuadSurd;
use super::GapError;
use crate::arith::{format_rational, BigInt, BigRational, Compact};
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

/// Exponent of `deg C` in the large-point threshold.
pub const LARGE_POINT_DEG_EXPONENT: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapParams {
    pub c: BigRational,
    pub deg_c: u32,
    /// Stands in for `max{1, h(C), h_1, c_NT}`.
    pub kappa: BigRational,
    pub c3: BigRational,
    pub c2_ball: BigRational,
}

impl Default for GapParams {
    fn default() -> Self {
        GapParams {
            c: BigRational::one(),
            deg_c: 1,
            kappa: BigRational::one(),
            c3: BigRational::one(),
            c2_ball: BigRational::one(),
        }
    }
}

fn pow_u32(x: u32, e: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(x).pow(e))
}

impl GapParams {
    pub fn new(c: BigRational, deg_c: u32, kappa: BigRational, c3: BigRational, c2_ball: BigRational) -> Result<Self, GapError> {
        let p = GapParams { c, deg_c, kappa, c3, c2_ball };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), GapError> {
        if self.deg_c == 0 {
            return Err(GapError::InvalidParams("deg_C must be positive".into()));
        }
        let one = BigRational::one();
        for (name, v) in [("c", &self.c), ("kappa", &self.kappa), ("c3", &self.c3), ("c2_ball", &self.c2_ball)] {
            if *v < one {
                return Err(GapError::InvalidParams(format!("{name} must be >= 1, got {}", Compact(v))));
            }
        }
        Ok(())
    }

    /// `c deg^2`
    pub fn c1(&self) -> BigRational {
        &self.c * pow_u32(self.deg_c, 2)
    }

    /// `c deg^6`
    pub fn c2(&self) -> BigRational {
        &self.c * pow_u32(self.deg_c, 6)
    }

    /// `c deg^20 kappa`
    pub fn large_threshold(&self) -> BigRational {
        &self.c * pow_u32(self.deg_c, LARGE_POINT_DEG_EXPONENT) * &self.kappa
    }

    /// `max{2, c c2 deg + 1}`, the per-cone count once both hypotheses hold.
    pub fn per_cone_bound(&self) -> BigRational {
        let v = &self.c * self.c2() * pow_u32(self.deg_c, 1) + BigRational::one();
        v.max(BigRational::from_integer(2.into()))
    }
}

/// `deg^2 * floor((1 + sqrt(8 c1))^rho) * max{2, c c2 deg + 1}`
pub fn certified_bound(params: &GapParams, rho: usize) -> BigRational {
    pow_u32(params.deg_c, 2) * BigRational::from_integer(cone_count_bound(&params.c1(), rho)) * params.per_cone_bound()
}

/// `c2_ball (1 + 2 sqrt(c1 c3))^rho`
pub fn small_point_bound(params: &GapParams, rho: usize) -> QuadSurd {
    small_from_ratio(&params.c2_ball, &(params.c1() * &params.c3), rho)
}

/// `c1^rho + small_point_bound`
pub fn total_bound(params: &GapParams, rho: usize) -> QuadSurd {
    total_from_ratio(params, &(params.c1() * &params.c3), rho)
}

/// The total bound derived from the radii `R^2 = c1 h` and `r^2 = h / c3` at a
/// concrete height scale `h > 0`; the scale cancels in `R^2 / r^2`.
pub fn total_bound_at_height(params: &GapParams, rho: usize, h: &BigRational) -> Result<QuadSurd, GapError> {
    if !h.is_positive() {
        return Err(GapError::InvalidParams("height scale must be positive".into()));
    }
    let big_r_sq = params.c1() * h;
    let r_sq = h / &params.c3;
    Ok(total_from_ratio(params, &(big_r_sq / r_sq), rho))
}

fn small_from_ratio(c2_ball: &BigRational, ratio_sq: &BigRational, rho: usize) -> QuadSurd {
    QuadSurd::one_plus(BigRational::from_integer(2.into()), ratio_sq.clone())
        .pow(rho)
        .scale(c2_ball)
}

fn total_from_ratio(params: &GapParams, ratio_sq: &BigRational, rho: usize) -> QuadSurd {
    let large = num_traits::pow(params.c1(), rho);
    small_from_ratio(&params.c2_ball, ratio_sq, rho).add_rational(&large)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub name: String,
    pub satisfied: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeTrace {
    /// Input indices of the class representatives in this cone, by increasing norm.
    pub members: Vec<usize>,
    pub vojta_ok: bool,
    pub mumford_ok: bool,
    /// First offending pair `(smaller norm, larger norm)` for each check.
    pub vojta_violation: Option<(usize, usize)>,
    pub mumford_violation: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub rho: usize,
    pub input_count: usize,
    pub large_threshold: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N_prime")]
    pub n_prime: usize,
    #[serde(rename = "N_double_prime")]
    pub n_double_prime: usize,
    pub cone_count: usize,
    pub cone_bound: String,
    pub certified_bound: String,
    pub stabilizer_ok: bool,
    pub cone_bound_ok: bool,
    pub vojta_ok: bool,
    pub mumford_ok: bool,
    pub bound_holds: bool,
    pub all_satisfied: bool,
    pub steps: Vec<ChainStep>,
    pub cones: Vec<ConeTrace>,
}

/// Validates that `classes` partitions `0..n` into classes of size at most `max_size`.
fn check_classes(classes: &[Vec<usize>], n: usize, max_size: u64) -> Result<(), GapError> {
    let mut seen = vec![false; n];
    for (k, class) in classes.iter().enumerate() {
        if class.is_empty() {
            return Err(GapError::InconsistentStabilizer(format!("class {k} is empty")));
        }
        if class.len() as u64 > max_size {
            return Err(GapError::InconsistentStabilizer(format!(
                "class {k} has {} members, more than deg_C^2 = {max_size}",
                class.len()
            )));
        }
        for &i in class {
            if i >= n {
                return Err(GapError::InconsistentStabilizer(format!("class {k} names point {i}, only {n} given")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(GapError::InconsistentStabilizer(format!("point {i} appears in more than one class")));
            }
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(GapError::InconsistentStabilizer(format!("point {i} belongs to no class")));
    }
    Ok(())
}

/// `|sqrt(b) - sqrt(a)| <= k sqrt(b)` for `0 < a <= b`, decided exactly.
fn norms_close(a: &BigRational, b: &BigRational, k: &BigRational) -> bool {
    // (sqrt b - sqrt a)^2 <= k^2 b  <=>  a + b - k^2 b <= 2 sqrt(ab)
    let l = a + b - k * k * b;
    !l.is_positive() || &l * &l <= BigRational::from_integer(4.into()) * a * b
}

fn check_cone(
    lat: &GramLattice,
    points: &[Vector],
    norms: &[BigRational],
    members: &[usize],
    params: &GapParams,
) -> ConeTrace {
    let c2_sq = params.c2() * params.c2();
    let mumford_cos = BigRational::one() - params.c1().recip();
    let k = (&params.c * pow_u32(params.deg_c, 1)).recip();
    let mut vojta_violation = None;
    let mut mumford_violation = None;
    for (i, &p) in members.iter().enumerate() {
        for &q in &members[i + 1..] {
            // members are sorted by norm, so |P| <= |Q|
            let (a, b) = (&norms[p], &norms[q]);
            if vojta_violation.is_none() && *b >= &c2_sq * a {
                vojta_violation = Some((p, q));
            }
            if mumford_violation.is_none() && lat.cosine_at_least(&points[p], &points[q], &mumford_cos) && norms_close(a, b, &k) {
                mumford_violation = Some((p, q));
            }
        }
    }
    ConeTrace {
        members: members.to_vec(),
        vojta_ok: vojta_violation.is_none(),
        mumford_ok: mumford_violation.is_none(),
        vojta_violation,
        mumford_violation,
    }
}

/// Runs the chain on `points`. `stab_classes` partitions the point indices
/// into stabilizer cosets; `None` puts every point in its own class.
pub fn vojta_mumford_chain(
    lat: &GramLattice,
    points: &[Vector],
    stab_classes: Option<&[Vec<usize>]>,
    params: &GapParams,
) -> Result<ChainTrace, GapError> {
    params.validate()?;
    for p in points {
        lat.check_dim(p)?;
    }
    let deg_sq = u64::from(params.deg_c).pow(2);
    let singletons: Vec<Vec<usize>>;
    let classes = match stab_classes {
        Some(c) => c,
        None => {
            singletons = (0..points.len()).map(|i| vec![i]).collect();
            &singletons
        }
    };
    check_classes(classes, points.len(), deg_sq)?;

    let norms: Vec<BigRational> = points.iter().map(|p| lat.inner_unchecked(p, p)).collect();
    let threshold = params.large_threshold();
    let large: Vec<bool> = norms.iter().map(|n| *n > threshold).collect();
    let n = large.iter().filter(|&&l| l).count();

    // one representative per class: its first large member
    let reps: Vec<usize> = classes
        .iter()
        .filter_map(|class| class.iter().copied().find(|&i| large[i]))
        .collect();
    let n_prime = reps.len();

    let rep_vectors: Vec<Vector> = reps.iter().map(|&i| points[i].clone()).collect();
    let c1 = params.c1();
    let ConeAssignment { groups, .. } = cone_assign(lat, &rep_vectors, &c1)?;
    let cone_count = groups.len();
    let n_double_prime = groups.iter().map(Vec::len).max().unwrap_or(0);

    let cones: Vec<ConeTrace> = groups
        .iter()
        .map(|g| {
            let mut members: Vec<usize> = g.iter().map(|&j| reps[j]).collect();
            members.sort_by(|&x, &y| norms[x].cmp(&norms[y]).then(x.cmp(&y)));
            check_cone(lat, points, &norms, &members, params)
        })
        .collect();

    let cone_bound = cone_count_bound(&c1, lat.rho());
    let bound = certified_bound(params, lat.rho());
    let cone_bound_ok = BigInt::from(cone_count) <= cone_bound;
    let vojta_ok = cones.iter().all(|c| c.vojta_ok);
    let mumford_ok = cones.iter().all(|c| c.mumford_ok);
    let bound_holds = BigRational::from_integer(n.into()) <= bound;
    let per_cone = params.per_cone_bound();

    let steps = vec![
        ChainStep {
            name: "large_filter".into(),
            satisfied: true,
            detail: format!("{n} of {} points have norm_sq > {}", points.len(), Compact(&threshold)),
        },
        ChainStep {
            name: "stabilizer_thinning".into(),
            satisfied: (n as u64) <= deg_sq * n_prime as u64,
            detail: format!("N' = {n_prime} class representatives, N <= {deg_sq} N'"),
        },
        ChainStep {
            name: "cone_pigeonhole".into(),
            satisfied: cone_bound_ok && n_prime <= cone_count * n_double_prime,
            detail: format!("{cone_count} cones (bound {cone_bound}), largest holds N'' = {n_double_prime}"),
        },
        ChainStep {
            name: "vojta_annulus".into(),
            satisfied: vojta_ok,
            detail: format!("|Q| < c2 |P| within every cone, c2 = {}", Compact(&params.c2())),
        },
        ChainStep {
            name: "mumford_gap".into(),
            satisfied: mumford_ok,
            detail: format!(
                "no close-norm pair within any cone; N'' = {n_double_prime} <= {}",
                Compact(&per_cone)
            ),
        },
        ChainStep {
            name: "certified_bound".into(),
            satisfied: bound_holds,
            detail: format!("N = {n} <= B = {}", Compact(&bound)),
        },
    ];
    let stabilizer_ok = true;
    let all_satisfied = steps.iter().all(|s| s.satisfied);
    Ok(ChainTrace {
        rho: lat.rho(),
        input_count: points.len(),
        large_threshold: format_rational(&threshold),
        n,
        n_prime,
        n_double_prime,
        cone_count,
        cone_bound: cone_bound.to_string(),
        certified_bound: Compact(&bound).to_string(),
        stabilizer_ok,
        cone_bound_ok,
        vojta_ok,
        mumford_ok,
        bound_holds,
        all_satisfied,
        steps,
        cones,
    })
}
