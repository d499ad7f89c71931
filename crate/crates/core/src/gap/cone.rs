//! Cone covering of a finite vector set.
//!
//! Leaders form a maximal `delta`-separated set of directions on the unit
//! sphere with `delta = 1/sqrt(2 c1)`; every other nonzero vector joins the
//! first leader whose direction is within `delta`. Two members of a group are
//! then within `2 delta` of each other, i.e. `<u, v> >= (1 - 1/c1)|u||v|`.
//! Disjoint caps give at most `(1 + 2/delta)^rho - (2/delta - 1)^rho` leaders,
//! leaving room for the zero-vector group under `floor((1 + sqrt(8 c1))^rho)`.

use super::cover::greedy_order;
use super::lattice::{GramLattice, Vector};
use super::surd::QuadSurd;
use super::GapError;
use crate::arith::{BigInt, BigRational};
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeAssignment {
    /// Member indices per group; the leader of a nonzero group comes first.
    pub groups: Vec<Vec<usize>>,
    /// Position in `groups` of the zero-vector group, if any.
    pub zero_group: Option<usize>,
}

impl ConeAssignment {
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn largest_group(&self) -> usize {
        self.groups.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// `floor((1 + sqrt(8 c1))^rho)`
pub fn cone_count_bound(c1: &BigRational, rho: usize) -> BigInt {
    QuadSurd::one_plus(BigRational::one(), c1 * BigRational::from_integer(8.into()))
        .pow(rho)
        .floor()
}

/// `1 - 1/c1`
pub fn cone_cosine(c1: &BigRational) -> BigRational {
    BigRational::one() - c1.recip()
}

pub fn cone_assign(lat: &GramLattice, vectors: &[Vector], c1: &BigRational) -> Result<ConeAssignment, GapError> {
    if *c1 < BigRational::one() {
        return Err(GapError::InvalidParams(format!("c1 must be >= 1, got {c1}")));
    }
    for v in vectors {
        lat.check_dim(v)?;
    }
    // |u/|u| - v/|v||^2 <= 1/(2 c1)  <=>  cos(u, v) >= 1 - 1/(4 c1)
    let join_cos = BigRational::one() - (c1 * BigRational::from_integer(4.into())).recip();
    let norms: Vec<BigRational> = vectors.iter().map(|v| lat.inner_unchecked(v, v)).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut zeros = Vec::new();
    for idx in greedy_order(&norms, vectors) {
        if norms[idx].is_zero() {
            zeros.push(idx);
            continue;
        }
        let v = &vectors[idx];
        match groups.iter_mut().find(|g| lat.cosine_at_least(v, &vectors[g[0]], &join_cos)) {
            Some(g) => g.push(idx),
            None => groups.push(vec![idx]),
        }
    }
    let zero_group = (!zeros.is_empty()).then(|| {
        groups.push(zeros);
        groups.len() - 1
    });
    Ok(ConeAssignment { groups, zero_group })
}

/// Checks the pairwise cosine condition inside every group.
pub fn groups_satisfy_cosine(lat: &GramLattice, vectors: &[Vector], assignment: &ConeAssignment, c1: &BigRational) -> bool {
    let t = cone_cosine(c1);
    assignment.groups.iter().all(|g| {
        g.iter().enumerate().all(|(i, &a)| {
            g[i + 1..]
                .iter()
                .all(|&b| lat.cosine_at_least(&vectors[a], &vectors[b], &t))
        })
    })
}
