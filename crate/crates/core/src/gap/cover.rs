//! Greedy r-nets: a maximal r-separated subset of a finite point set.
//!
//! Balls of radius r/2 around the centers are disjoint and sit inside the
//! ball of radius R + r/2, which gives `#centers <= (1 + 2R/r)^rho`.

use super::lattice::{GramLattice, Vector};
use super::surd::QuadSurd;
use super::GapError;
use crate::arith::BigRational;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallCover {
    /// Indices into the input of the chosen centers, in selection order.
    pub centers: Vec<usize>,
    /// For each input point, the position in `centers` of its covering center.
    pub assignment: Vec<usize>,
    pub radius_sq: BigRational,
    /// `R^2`, the largest squared norm in the input (0 when empty).
    pub max_norm_sq: BigRational,
}

/// Processing order: decreasing squared norm, ties by lexicographic coordinates.
pub(crate) fn greedy_order(norms: &[BigRational], points: &[Vector]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| match norms[j].cmp(&norms[i]) {
        Ordering::Equal => points[i].cmp(&points[j]),
        other => other,
    });
    order
}

pub fn ball_cover(lat: &GramLattice, points: &[Vector], radius_sq: &BigRational) -> Result<BallCover, GapError> {
    if !radius_sq.is_positive() {
        return Err(GapError::NonPositiveRadius);
    }
    for p in points {
        lat.check_dim(p)?;
    }
    let norms: Vec<BigRational> = points.iter().map(|p| lat.inner_unchecked(p, p)).collect();
    let max_norm_sq = norms.iter().max().cloned().unwrap_or_else(BigRational::zero);
    let mut centers: Vec<usize> = Vec::new();
    let mut assignment = vec![usize::MAX; points.len()];
    for idx in greedy_order(&norms, points) {
        let hit = centers.iter().position(|&c| {
            let d = lat.dist_sq(&points[idx], &points[c]).expect("dimensions checked");
            d <= *radius_sq
        });
        assignment[idx] = match hit {
            Some(pos) => pos,
            None => {
                centers.push(idx);
                centers.len() - 1
            }
        };
    }
    Ok(BallCover { centers, assignment, radius_sq: radius_sq.clone(), max_norm_sq })
}

/// `(1 + 2R/r)^rho` as an exact surd with radicand `R^2 / r^2`.
pub fn packing_bound(max_norm_sq: &BigRational, radius_sq: &BigRational, rho: usize) -> QuadSurd {
    QuadSurd::one_plus(BigRational::from_integer(2.into()), max_norm_sq / radius_sq).pow(rho)
}

impl BallCover {
    pub fn bound(&self, rho: usize) -> QuadSurd {
        packing_bound(&self.max_norm_sq, &self.radius_sq, rho)
    }

    pub fn within_bound(&self, rho: usize) -> bool {
        self.bound(rho).ge_rational(&BigRational::from_integer(self.centers.len().into()))
    }

    /// Every point lies within r of its assigned center.
    pub fn covers(&self, lat: &GramLattice, points: &[Vector]) -> bool {
        points.iter().zip(&self.assignment).all(|(p, &slot)| {
            let c = &points[self.centers[slot]];
            lat.dist_sq(p, c).is_ok_and(|d| d <= self.radius_sq)
        })
    }

    /// Centers are pairwise more than r apart.
    pub fn separated(&self, lat: &GramLattice, points: &[Vector]) -> bool {
        self.centers.iter().enumerate().all(|(i, &a)| {
            self.centers[i + 1..]
                .iter()
                .all(|&b| lat.dist_sq(&points[a], &points[b]).is_ok_and(|d| d > self.radius_sq))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn line_with_three_points() {
        let lat = GramLattice::identity(1);
        let r = 5;
        let pts = vec![vec![q(-r)], vec![q(0)], vec![q(r)]];
        let cover = ball_cover(&lat, &pts, &q(r * r)).unwrap();
        assert!(cover.centers.len() <= 3);
        assert!(cover.covers(&lat, &pts));
        assert!(cover.separated(&lat, &pts));
        assert_eq!(cover.bound(1).floor(), 3.into());
        assert!(cover.within_bound(1));
    }

    #[test]
    fn single_point_and_errors() {
        let lat = GramLattice::identity(2);
        let pts = vec![vec![q(3), q(4)]];
        let cover = ball_cover(&lat, &pts, &q(1)).unwrap();
        assert_eq!(cover.centers, vec![0]);
        assert!(matches!(ball_cover(&lat, &pts, &q(0)), Err(GapError::NonPositiveRadius)));
        assert!(matches!(ball_cover(&lat, &[vec![q(1)]], &q(1)), Err(GapError::DimensionMismatch { .. })));
        let empty = ball_cover(&lat, &[], &q(1)).unwrap();
        assert!(empty.centers.is_empty());
        assert!(empty.within_bound(2));
    }

    #[test]
    fn deterministic_order() {
        let lat = GramLattice::identity(1);
        let pts = vec![vec![q(1)], vec![q(-3)], vec![q(3)], vec![q(2)]];
        let cover = ball_cover(&lat, &pts, &q(1)).unwrap();
        // -3 and 3 tie on norm; -3 sorts first
        assert_eq!(cover.centers, vec![1, 2, 0]);
        assert_eq!(cover.assignment, vec![2, 0, 1, 1]);
    }
}
