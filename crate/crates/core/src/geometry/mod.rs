//! Model foliations over the transverse torus `T²ⁿ` with explicit
//! symplectic connections, curvature, mean curvature and leaf density.
//!
//! Frame conventions: the unitary frame is `(e₁,…,eₙ, Je₁,…,Jeₙ)`, the
//! symplectic frame is `v_i = e_i`, `w_i = e_{n+i}`, and vector fields are
//! component vectors in this frame.

mod connection;
mod curvature;
mod density;
mod divergence;
mod field;
mod model;

pub use connection::{make_j_compatible, ConnectionData, ConnectionDataFlags, FLAG_TOL};
pub use curvature::{
    chsc_curvature, curvature, ricci_vector, symplectic_ricci, symplectic_ricci_of,
    CurvatureTensor, SymplecticRicci,
};
pub use divergence::{
    covariant_derivative, divergence_theorem_residual, divergence_in_frame, metric_defect,
    transversal_divergence, DivergenceTheorem, SymplecticFrame,
};
pub use field::{Mode, ModeValue, TransverseField};
pub use model::{build_model, FoliationModel, ModelFlags, ModelSpec};
