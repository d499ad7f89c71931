//! Euclidean geometry on a finite-rank lattice with an exact Gram form:
//! ball covers, cone covers and the large-point counting chain.

pub mod chain;
pub mod cone;
pub mod cover;
pub mod lattice;
pub mod surd;

pub use chain::{
    certified_bound, small_point_bound, total_bound, total_bound_at_height, vojta_mumford_chain, ChainStep, ChainTrace,
    ConeTrace, GapParams,
};
pub use cone::{cone_assign, cone_count_bound, groups_satisfy_cosine, ConeAssignment};
pub use cover::{ball_cover, packing_bound, BallCover};
pub use lattice::{GramLattice, Vector};
pub use surd::QuadSurd;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GapError {
    #[error("gram matrix is not square")]
    NotSquare,
    #[error("gram matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("gram matrix is not positive definite (leading minor {minor})")]
    NotPositiveDefinite { minor: usize },
    #[error("vector has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cover radius must be positive")]
    NonPositiveRadius,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("inconsistent stabilizer classes: {0}")]
    InconsistentStabilizer(String),
}
