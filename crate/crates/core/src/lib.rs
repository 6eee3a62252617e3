//! Verification engine for transversely symplectic Dirac operators on
//! desk-scale model foliations.
//!
//! The crate is organized bottom-up: [`fiber`] models the spinor fiber by
//! truncated Hermite expansions, [`geometry`] builds torus foliations with
//! symplectic connections, [`spinor`] assembles the Dirac operators and their
//! identities, and [`verify`] runs named check suites and writes reports.

pub mod error;
pub mod fiber;
pub mod geometry;
pub mod spinor;
pub mod verify;

pub use error::{Error, Result};
pub use fiber::{FiberBasis, FiberOperator, FiberVector, MultiIndex, NormalCoeffs, WeylFiber};
pub use geometry::{build_model, FoliationModel, Mode, ModelSpec, TransverseField};
pub use num_complex::Complex64;
pub use spinor::{DiracVariant, OperatorName, SpinorCalculus, SpinorField, WeitzenbockFormula};
pub use verify::{run_suite, SuiteConfig, VerificationReport};
