//! Spinor fields over a model foliation and the operators built from them:
//! the spinor derivative, the Dirac operators `D′, D̃′, D, D̃`, the second
//! order operator `𝒫 = i[D̃, D]`, the connection Laplacian, the curvature
//! term `F`, and Galerkin spectra.

mod calculus;
mod field;
mod identities;
mod spectrum;
mod weitzenbock;

pub use calculus::{DiracVariant, SpinorCalculus};
pub use field::SpinorField;
pub use spectrum::{
    AssembledOperator, EigenEntry, OperatorName, Spectrum, TrialFunction, HERMITIAN_TOL,
    MAX_TRIAL_DIM,
};
pub use weitzenbock::{WeitzenbockFormula, WeitzenbockResidual};
