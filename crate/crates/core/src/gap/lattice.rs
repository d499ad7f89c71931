use super::GapError;
use crate::arith::BigRational;
use num_traits::{One, Signed, Zero};

pub type Vector = Vec<BigRational>;

/// `R^rho` with an exact positive-definite inner product given by its Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramLattice {
    rho: usize,
    gram: Vec<Vec<BigRational>>,
}

impl GramLattice {
    pub fn new(gram: Vec<Vec<BigRational>>) -> Result<Self, GapError> {
        let rho = gram.len();
        if gram.iter().any(|row| row.len() != rho) {
            return Err(GapError::NotSquare);
        }
        for i in 0..rho {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(GapError::NotSymmetric { row: i, col: j });
                }
            }
        }
        // Pivots of unpivoted elimination are ratios of consecutive leading
        // principal minors, so all positive <=> positive definite.
        let mut work = gram.clone();
        for k in 0..rho {
            let pivot = work[k][k].clone();
            if !pivot.is_positive() {
                return Err(GapError::NotPositiveDefinite { minor: k + 1 });
            }
            for i in k + 1..rho {
                let factor = &work[i][k] / &pivot;
                if factor.is_zero() {
                    continue;
                }
                for j in k..rho {
                    let sub = &factor * &work[k][j];
                    work[i][j] -= sub;
                }
            }
        }
        Ok(GramLattice { rho, gram })
    }

    pub fn identity(rho: usize) -> Self {
        let gram = (0..rho)
            .map(|i| {
                (0..rho)
                    .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        GramLattice { rho, gram }
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn gram(&self) -> &[Vec<BigRational>] {
        &self.gram
    }

    pub fn check_dim(&self, v: &[BigRational]) -> Result<(), GapError> {
        if v.len() == self.rho {
            Ok(())
        } else {
            Err(GapError::DimensionMismatch { expected: self.rho, got: v.len() })
        }
    }

    /// `u^T G v`
    pub fn inner(&self, u: &[BigRational], v: &[BigRational]) -> Result<BigRational, GapError> {
        self.check_dim(u)?;
        self.check_dim(v)?;
        Ok(self.inner_unchecked(u, v))
    }

    pub fn norm_sq(&self, u: &[BigRational]) -> Result<BigRational, GapError> {
        self.inner(u, u)
    }

    pub fn dist_sq(&self, u: &[BigRational], v: &[BigRational]) -> Result<BigRational, GapError> {
        self.check_dim(u)?;
        self.check_dim(v)?;
        let diff: Vector = u.iter().zip(v).map(|(a, b)| a - b).collect();
        Ok(self.inner_unchecked(&diff, &diff))
    }

    pub(crate) fn inner_unchecked(&self, u: &[BigRational], v: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            let row: BigRational = self.gram[i]
                .iter()
                .zip(v)
                .filter(|(_, vj)| !vj.is_zero())
                .map(|(g, vj)| g * vj)
                .sum();
            acc += ui * row;
        }
        acc
    }

    /// Exact test of `<u, v> >= t |u| |v|` by comparing squares with sign guards.
    pub fn cosine_at_least(&self, u: &[BigRational], v: &[BigRational], t: &BigRational) -> bool {
        let ip = self.inner_unchecked(u, v);
        let rhs_sq = t * t * self.inner_unchecked(u, u) * self.inner_unchecked(v, v);
        if t.is_negative() {
            !ip.is_negative() || &ip * &ip <= rhs_sq
        } else {
            !ip.is_negative() && &ip * &ip >= rhs_sq
        }
    }
}
