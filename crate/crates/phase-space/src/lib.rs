//! Phase-space views of the reduced cavity state: Wigner function on a grid,
//! rotated quadrature marginals, and the symmetric characteristic function.
//!
//! All evaluations go through exact Fock-basis matrix elements of the
//! displacement operator, so a state that fits the kept block is rendered
//! without discretization error at each sample point. Grid points are
//! independent reads of the same state; callers may fan them out freely.

pub mod characteristic;
pub mod kernel;
pub mod marginal;
pub mod wigner;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PhaseSpaceError {
    #[error("grid must be at least 2 x 2 with ascending extents, got {nx} x {ny}")]
    BadGrid { nx: usize, ny: usize },
    #[error("grid spacing {spacing} is too coarse for a reliable line quadrature")]
    UnderResolved { spacing: f64 },
    #[error("window widening stalled at sampled mass {mass}; state spread past the cap")]
    NormalizationFailed { mass: f64 },
}

pub use characteristic::{characteristic_function, wigner_via_transform};
pub use kernel::{displaced_parity, displacement};
pub use marginal::{marginal, Marginal, MAX_SPACING};
pub use wigner::{
    vacuum_wigner, wigner, wigner_auto, wigner_point, GridSpec, WignerGrid, TRUNCATION_TOL,
};
