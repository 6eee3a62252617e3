//! Truncated Hermite model of the symplectic spinor fiber `L²(ℝⁿ)`.
//!
//! States are coefficient vectors over the orthonormal Hermite functions
//! `h_β` with `|β| ≤ L`. The Weyl generators act by the ladder formulas and
//! are cut off at the top level, so an operator built from `q` generators is
//! exact only on states supported in levels `≤ L − q`.

mod basis;
mod operator;
mod symplectic;
mod weyl;

pub use basis::{binomial, FiberBasis, MultiIndex};
pub use operator::{fiber_inner, FiberOperator, FiberVector};
pub use symplectic::{
    complex_structure, omega, omega_matrix, sp_defect, standard_frame_vector, NormalCoeffs,
};
pub use weyl::WeylFiber;
