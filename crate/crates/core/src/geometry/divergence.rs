use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::field::TransverseField;
use super::model::FoliationModel;
use crate::error::{Error, Result};
use crate::fiber::{omega, omega_matrix};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A symplectic frame `{v_i, w_i}` with constant components,
/// `ω(v_i, w_j) = δ_ij`, `ω(v_i, v_j) = ω(w_i, w_j) = 0`.
#[derive(Debug, Clone)]
pub struct SymplecticFrame {
    pub v: Vec<DVector<Complex64>>,
    pub w: Vec<DVector<Complex64>>,
}

impl SymplecticFrame {
    pub fn standard(n: usize) -> Self {
        Self::from_matrix(&DMatrix::identity(2 * n, 2 * n)).expect("identity is symplectic")
    }

    /// Columns `S e_i`, `S e_{n+i}` of a symplectic matrix `S`.
    pub fn from_matrix(s: &DMatrix<f64>) -> Result<Self> {
        let dim = s.nrows();
        let n = dim / 2;
        let om = omega_matrix(n);
        let defect = (s.transpose() * &om * s - &om).amax();
        if defect > 1e-12 {
            return Err(Error::NotSymplectic { defect });
        }
        let col = |c: usize| s.column(c).map(|x| Complex64::new(x, 0.0));
        Ok(SymplecticFrame { v: (0..n).map(col).collect(), w: (n..dim).map(col).collect() })
    }

    /// A random frame: a symmetric shear composed with `diag(A, A^{-T})`.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let dim = 2 * n;
        let mut shear = DMatrix::<f64>::identity(dim, dim);
        for i in 0..n {
            for j in i..n {
                let b = rng.gen_range(-1.0..1.0);
                shear[(i, n + j)] = b;
                shear[(j, n + i)] = b;
            }
        }
        let a = DMatrix::<f64>::from_fn(n, n, |i, j| {
            if i == j { 1.0 + rng.gen_range(0.0..0.5) } else { rng.gen_range(-0.3..0.3) }
        });
        let a_inv_t = a.clone().try_inverse().expect("diagonally dominant").transpose();
        let mut block = DMatrix::<f64>::zeros(dim, dim);
        block.view_mut((0, 0), (n, n)).copy_from(&a);
        block.view_mut((n, n), (n, n)).copy_from(&a_inv_t);
        Self::from_matrix(&(shear * block)).expect("product of symplectic matrices")
    }
}

/// `∇_X s = Σ_a X^a (∂_a s + Γ(a)s)` for a constant direction `X`.
pub fn covariant_derivative(
    model: &FoliationModel,
    direction: &DVector<Complex64>,
    s: &TransverseField<DVector<Complex64>>,
) -> TransverseField<DVector<Complex64>> {
    let cutoff = model.work_cutoff();
    let mut out = TransverseField::new(s.dim(), cutoff);
    for a in 0..model.dim() {
        let c = direction[a];
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        out.axpy(c, &s.derivative(a));
        let gs = model.connection().gamma(a).product(s, cutoff, |m, v| m * v);
        out.axpy(c, &gs);
    }
    out
}

/// `Σ_i {ω(∇_{v_i}s, w_i) − ω(∇_{w_i}s, v_i)}` in a given symplectic frame.
pub fn divergence_in_frame(
    model: &FoliationModel,
    s: &TransverseField<DVector<Complex64>>,
    frame: &SymplecticFrame,
) -> TransverseField<Complex64> {
    let mut out = TransverseField::new(s.dim(), model.work_cutoff());
    for (v, w) in frame.v.iter().zip(&frame.w) {
        let dv = covariant_derivative(model, v, s);
        let dw = covariant_derivative(model, w, s);
        out.axpy(ONE, &dv.map(|_, x| omega(x, w)));
        out.axpy(-ONE, &dw.map(|_, x| omega(x, v)));
    }
    out.pruned()
}

pub fn transversal_divergence(
    model: &FoliationModel,
    s: &TransverseField<DVector<Complex64>>,
) -> TransverseField<Complex64> {
    divergence_in_frame(model, s, &SymplecticFrame::standard(model.n()))
}

/// Both sides of `∫ div(s) μ_M = ∫ ω(κ♯ + τ, s) μ_M`.
#[derive(Debug, Clone, Copy)]
pub struct DivergenceTheorem {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

pub fn divergence_theorem_residual(
    model: &FoliationModel,
    s: &TransverseField<DVector<Complex64>>,
) -> DivergenceTheorem {
    let lhs = model.integrate(&transversal_divergence(model, s));
    let kt = model.kappa_tau();
    let w = kt.product(s, model.work_cutoff(), omega);
    let rhs = model.integrate(&w);
    DivergenceTheorem { lhs, rhs, residual: (lhs - rhs).norm() }
}

/// `max |X g(s,t) − g(∇_X s, t) − g(s, ∇_X t)|` over the modes, for frame
/// direction `x`.
pub fn metric_defect(
    model: &FoliationModel,
    x: usize,
    s: &TransverseField<DVector<Complex64>>,
    t: &TransverseField<DVector<Complex64>>,
) -> f64 {
    let cutoff = model.work_cutoff();
    let g = |a: &DVector<Complex64>, b: &DVector<Complex64>| a.dot(b);
    let e = crate::fiber::standard_frame_vector(model.dim(), x);
    let mut d = s.product(t, cutoff, g).derivative(x);
    d.axpy(-ONE, &covariant_derivative(model, &e, s).product(t, cutoff, g));
    d.axpy(-ONE, &s.product(&covariant_derivative(model, &e, t), cutoff, g));
    d.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max)
}
