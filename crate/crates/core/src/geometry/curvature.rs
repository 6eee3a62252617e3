use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::connection::{to_complex, ConnectionData};
use super::field::TransverseField;
use super::model::FoliationModel;
use crate::fiber::{complex_structure, omega_matrix};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `R(e_i, e_j)` for all frame pairs, as matrix fields acting on normal
/// components.
#[derive(Debug, Clone)]
pub struct CurvatureTensor {
    n: usize,
    components: Vec<TransverseField<DMatrix<Complex64>>>,
}

impl CurvatureTensor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &TransverseField<DMatrix<Complex64>> {
        &self.components[i * 2 * self.n + j]
    }

    /// `R(X, Y)` for constant directions, as a matrix field.
    pub fn along(
        &self,
        x: &DVector<Complex64>,
        y: &DVector<Complex64>,
    ) -> TransverseField<DMatrix<Complex64>> {
        let dim = 2 * self.n;
        let mut out = TransverseField::new(dim, self.get(0, 0).cutoff());
        for i in 0..dim {
            for j in 0..dim {
                let c = x[i] * y[j];
                if c != Complex64::new(0.0, 0.0) {
                    out.axpy(c, self.get(i, j));
                }
            }
        }
        out
    }

    /// Largest coefficient entry.
    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|f| f.iter().map(|(_, m)| m.camax()))
            .fold(0.0, f64::max)
    }

    pub fn aliasing(&self) -> f64 {
        self.components.iter().map(TransverseField::aliasing).sum()
    }

    /// `max |R(e_i,e_j) + R(e_j,e_i)|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let dim = 2 * self.n;
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let s = self.get(i, j).plus(self.get(j, i));
                worst = s.iter().map(|(_, m)| m.camax()).fold(worst, f64::max);
            }
        }
        worst
    }

    /// `max |ω(R s, t) − ω(R t, s)|` over frame vectors and modes.
    pub fn symplectic_symmetry_defect(&self) -> f64 {
        let om = to_complex(&omega_matrix(self.n));
        self.fold_modes(|r| {
            let w = r.transpose() * &om;
            (&w - w.transpose()).camax()
        })
    }

    /// `max |ω(R Js, Jt) − ω(R s, t)|`.
    pub fn j_invariance_defect(&self) -> f64 {
        let om = to_complex(&omega_matrix(self.n));
        let j = to_complex(&complex_structure(self.n));
        self.fold_modes(|r| {
            let w = r.transpose() * &om;
            let wj = j.transpose() * r.transpose() * &om * &j;
            (wj - w).camax()
        })
    }

    fn fold_modes(&self, f: impl Fn(&DMatrix<Complex64>) -> f64) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter().map(|(_, m)| f(m)))
            .fold(0.0, f64::max)
    }
}

/// `R(i,j) = ∂_iΓ_j − ∂_jΓ_i + [Γ_i, Γ_j]` (frame fields commute).
pub(crate) fn connection_curvature(conn: &ConnectionData, cutoff: i32) -> CurvatureTensor {
    let n = conn.n();
    let dim = 2 * n;
    let mut components = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let gi = conn.gamma(i);
            let gj = conn.gamma(j);
            let mut r = gj.derivative(i).with_cutoff(cutoff);
            r.axpy(-ONE, &gi.derivative(j));
            r.axpy(ONE, &gi.product(gj, cutoff, |a, b| a * b));
            r.axpy(-ONE, &gj.product(gi, cutoff, |a, b| a * b));
            components.push(r.pruned());
        }
    }
    CurvatureTensor { n, components }
}

/// The curvature tensor of a model: the stored algebraic tensor for the
/// fiber-only model, otherwise computed from the connection.
pub fn curvature(model: &FoliationModel) -> CurvatureTensor {
    match model.fiber_curvature() {
        Some(r) => r.clone(),
        None => connection_curvature(model.connection(), model.work_cutoff()),
    }
}

/// The constant tensor of constant holomorphic sectional curvature `h`:
/// `ω(R(X,Y)Z,W) = h/4 {ω(X,Z)ω(Y,JW) + ω(X,W)ω(Y,JZ) − ω(Y,Z)ω(X,JW)
/// − ω(Y,W)ω(X,JZ) + 2ω(X,Y)ω(Z,JW)}`.
pub fn chsc_curvature(n: usize, h: f64) -> CurvatureTensor {
    let dim = 2 * n;
    let om = omega_matrix(n);
    let j = complex_structure(n);
    let w = |a: usize, b: usize| om[(a, b)];
    // ω(e_a, J e_b) = Σ_c Ω_{ac} J_{cb} = δ_ab
    let wj = |a: usize, b: usize| (&om * &j)[(a, b)];
    let mut components = Vec::with_capacity(dim * dim);
    for x in 0..dim {
        for y in 0..dim {
            // form[k][l] = ω(R e_k, e_l) = (RᵀΩ)_{kl}  ⇒  R = (form Ωᵀ)ᵀ
            let form = DMatrix::from_fn(dim, dim, |z, ww| {
                h / 4.0
                    * (w(x, z) * wj(y, ww) + w(x, ww) * wj(y, z)
                        - w(y, z) * wj(x, ww)
                        - w(y, ww) * wj(x, z)
                        + 2.0 * w(x, y) * wj(z, ww))
            });
            let r = (form * om.transpose()).transpose();
            let mut f = TransverseField::new(dim, 0);
            if h != 0.0 {
                f.insert(super::Mode::zero(dim), to_complex(&r)).expect("zero mode");
            }
            components.push(f);
        }
    }
    CurvatureTensor { n, components }
}

/// Symplectic Ricci form and scalar curvature.
#[derive(Debug, Clone)]
pub struct SymplecticRicci {
    /// `Sric(e_s, e_t) = Σ_j ω(R(v_j, w_j)e_s, e_t)` as an `(s,t)` matrix field.
    pub sric: TransverseField<DMatrix<Complex64>>,
    /// `r = Σ_a Sric(e_a, e_a)`.
    pub scalar: TransverseField<Complex64>,
    /// `r = ½ Σ_{i,j} ω(R(e_i, Je_i)e_j, e_j)`, computed independently.
    pub scalar_alt: TransverseField<Complex64>,
}

pub fn symplectic_ricci(model: &FoliationModel) -> SymplecticRicci {
    symplectic_ricci_of(&curvature(model))
}

pub fn symplectic_ricci_of(r: &CurvatureTensor) -> SymplecticRicci {
    let n = r.n();
    let dim = 2 * n;
    let om = to_complex(&omega_matrix(n));
    let j = complex_structure(n);
    let cutoff = r.get(0, 0).cutoff();
    let mut sric = TransverseField::new(dim, cutoff);
    for jj in 0..n {
        let form = r.get(jj, n + jj).map(|_, m| m.transpose() * &om);
        sric.axpy(ONE, &form);
    }
    let scalar = sric.map(|_, m| m.trace());
    let mut scalar_alt = TransverseField::new(dim, cutoff);
    for i in 0..dim {
        let x = crate::fiber::standard_frame_vector(dim, i);
        let jx = to_complex(&j).column(i).clone_owned();
        let rij = r.along(&x, &jx);
        let tr = rij.map(|_, m| (m.transpose() * &om).trace());
        scalar_alt.axpy(Complex64::new(0.5, 0.0), &tr);
    }
    SymplecticRicci { sric: sric.pruned(), scalar: scalar.pruned(), scalar_alt: scalar_alt.pruned() }
}

/// `Ric(X) = Σ_j R(X, e_j)e_j` for a constant `X`, as a vector field.
pub fn ricci_vector(r: &CurvatureTensor, x: &DVector<Complex64>) -> TransverseField<DVector<Complex64>> {
    let dim = 2 * r.n();
    let mut out = TransverseField::new(dim, r.get(0, 0).cutoff());
    for jj in 0..dim {
        let e = crate::fiber::standard_frame_vector(dim, jj);
        let rx = r.along(x, &e);
        out.axpy(ONE, &rx.map(|_, m| m * &e));
    }
    out
}
