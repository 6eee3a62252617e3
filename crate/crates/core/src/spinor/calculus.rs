use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::SpinorField;
use crate::error::{Error, Result};
use crate::fiber::{standard_frame_vector, FiberBasis, WeylFiber};
use crate::geometry::{
    covariant_derivative, curvature, symplectic_ricci_of, transversal_divergence, CurvatureTensor,
    FoliationModel, Mode, SymplecticFrame, SymplecticRicci, TransverseField,
};

pub(crate) type VecField = TransverseField<DVector<Complex64>>;
pub(crate) type MatField = TransverseField<DMatrix<Complex64>>;
pub(crate) type ScalarField = TransverseField<Complex64>;

pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The four first-order operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiracVariant {
    /// `Σ{v_i·∇_{w_i} − w_i·∇_{v_i}}`
    Dprime,
    /// `Σ{Jv_i·∇_{w_i} − Jw_i·∇_{v_i}}`
    Dtildeprime,
    /// `D′ − ½(κ♯+τ)·`
    D,
    /// `D̃′ − ½J(κ♯+τ)·`
    Dtilde,
}

/// Spinor derivative, Dirac operators and their relatives over one model.
///
/// Every operator acts on the truncated fiber, so a composition that raises
/// the level by `q` is exact only on inputs supported in levels `≤ L − q`;
/// see [`SpinorCalculus::protected_level`].
#[derive(Debug, Clone)]
pub struct SpinorCalculus {
    model: FoliationModel,
    fiber: WeylFiber,
    q_gamma: Vec<MatField>,
    curvature: CurvatureTensor,
    q_curvature: Vec<MatField>,
    ricci: SymplecticRicci,
    frame_divergence: Vec<ScalarField>,
    kappa_tau: VecField,
    j_kappa_tau: VecField,
    j: DMatrix<Complex64>,
}

impl SpinorCalculus {
    pub fn new(model: FoliationModel, basis: Arc<FiberBasis>) -> Result<Self> {
        if basis.n() != model.n() {
            return Err(Error::DimensionMismatch { expected: model.n(), got: basis.n() });
        }
        let fiber = WeylFiber::new(basis);
        let q_gamma = model
            .connection()
            .gammas()
            .iter()
            .map(|g| g.map(|_, m| fiber.quadratic_matrix(m)))
            .collect();
        let curvature = curvature(&model);
        let dim = model.dim();
        let q_curvature = (0..dim * dim)
            .map(|ij| curvature.get(ij / dim, ij % dim).map(|_, m| fiber.quadratic_matrix(m)))
            .collect();
        let ricci = symplectic_ricci_of(&curvature);
        let frame_divergence = (0..dim)
            .map(|a| {
                let e = TransverseField::constant(dim, model.cutoff(), standard_frame_vector(dim, a));
                transversal_divergence(&model, &e)
            })
            .collect();
        let j = model.j_matrix();
        let kappa_tau = model.kappa_tau();
        let j_kappa_tau = kappa_tau.map(|_, v| &j * v);
        Ok(SpinorCalculus {
            model,
            fiber,
            q_gamma,
            curvature,
            q_curvature,
            ricci,
            frame_divergence,
            kappa_tau,
            j_kappa_tau,
            j,
        })
    }

    pub fn model(&self) -> &FoliationModel {
        &self.model
    }

    pub fn fiber(&self) -> &WeylFiber {
        &self.fiber
    }

    pub fn basis(&self) -> &Arc<FiberBasis> {
        self.fiber.basis()
    }

    pub fn curvature(&self) -> &CurvatureTensor {
        &self.curvature
    }

    pub fn ricci(&self) -> &SymplecticRicci {
        &self.ricci
    }

    pub fn j_matrix(&self) -> &DMatrix<Complex64> {
        &self.j
    }

    pub fn max_level(&self) -> usize {
        self.basis().max_level()
    }

    fn cutoff(&self) -> i32 {
        self.model.work_cutoff()
    }

    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn n(&self) -> usize {
        self.model.n()
    }

    /// Levels gained by one application of `Q(Γ_X)`: zero when `∇J = 0`
    /// (then `Γ_X ∈ u(n)` commutes with `H₀`), otherwise two.
    pub fn connection_raise(&self) -> usize {
        if self.model.flags().preserves_j { 0 } else { 2 }
    }

    pub fn dirac_raise(&self) -> usize {
        1 + self.connection_raise()
    }

    pub fn p_raise(&self) -> usize {
        2 * self.dirac_raise()
    }

    /// Highest input level on which an operator raising by `raise` is exact.
    pub fn protected_level(&self, raise: usize) -> Result<usize> {
        let l = self.max_level();
        l.checked_sub(raise).ok_or(Error::LevelOutOfRange { level: raise, max: l })
    }

    // ---- field construction -------------------------------------------------

    pub fn zero_field(&self) -> SpinorField {
        SpinorField::zeros(self.basis().clone(), self.dim(), self.model.cutoff())
    }

    /// Seeded test field on modes `|k|∞ ≤ K − 1` and the given levels.
    pub fn random_field<R: rand::Rng>(&self, max_level: usize, rng: &mut R) -> SpinorField {
        let radius = if self.model.flags().fiber_only { 0 } else { (self.model.cutoff() - 1).max(0) };
        SpinorField::random(
            self.basis().clone(),
            self.dim(),
            self.model.cutoff(),
            radius,
            max_level.min(self.max_level()),
            rng,
        )
    }

    pub(crate) fn check(&self, phi: &SpinorField) -> Result<()> {
        if **phi.basis() != **self.basis() {
            return Err(Error::BasisMismatch);
        }
        if phi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: phi.dim() });
        }
        Ok(())
    }

    /// Rejects inputs above the protected level for an operator of the given raise.
    pub(crate) fn check_protected(&self, phi: &SpinorField, raise: usize) -> Result<()> {
        self.check(phi)?;
        let max = self.protected_level(raise)?;
        match phi.top_level() {
            Some(l) if l > max => Err(Error::LevelOutOfRange { level: l, max }),
            _ => Ok(()),
        }
    }

    pub(crate) fn wrap(&self, f: VecField) -> SpinorField {
        SpinorField::from_field(self.basis().clone(), f).expect("fiber length preserved")
    }

    // ---- raw fiberwise and convolution primitives ---------------------------

    pub(crate) fn gen(&self, a: usize, p: &VecField) -> VecField {
        let g = self.fiber.generator(a);
        p.map(|_, v| g * v)
    }

    /// Clifford multiplication by a constant vector.
    pub(crate) fn cvec(&self, v: &DVector<Complex64>, p: &VecField) -> VecField {
        let mut out = TransverseField::new(p.dim(), p.cutoff());
        for (a, &c) in v.iter().enumerate() {
            if c != ZERO {
                out.axpy(c, &self.gen(a, p));
            }
        }
        out
    }

    pub(crate) fn apply_matrix(&self, m: &MatField, p: &VecField) -> VecField {
        m.product(p, self.cutoff(), |a, v| a * v)
    }

    pub(crate) fn apply_scalar(&self, f: &ScalarField, p: &VecField) -> VecField {
        f.product(p, self.cutoff(), |c, v| v * *c)
    }

    pub(crate) fn component(s: &VecField, a: usize) -> ScalarField {
        s.map(|_, v| v[a]).pruned()
    }

    /// Clifford multiplication by a vector field.
    pub(crate) fn cliff(&self, s: &VecField, p: &VecField) -> VecField {
        let mut out = TransverseField::new(p.dim(), self.cutoff());
        for a in 0..self.dim() {
            let c = Self::component(s, a);
            if !c.is_empty() {
                out.axpy(ONE, &self.apply_scalar(&c, &self.gen(a, p)));
            }
        }
        out
    }

    pub(crate) fn nabla(&self, x: usize, p: &VecField) -> VecField {
        let mut out = p.derivative(x).with_cutoff(self.cutoff());
        out.axpy(ONE, &self.apply_matrix(&self.q_gamma[x], p));
        out
    }

    fn nabla_all(&self, p: &VecField) -> Vec<VecField> {
        (0..self.dim()).map(|x| self.nabla(x, p)).collect()
    }

    fn combine(&self, coeffs: &DVector<Complex64>, fields: &[VecField]) -> VecField {
        let mut out = TransverseField::new(self.dim(), self.cutoff());
        for (c, f) in coeffs.iter().zip(fields) {
            if *c != ZERO {
                out.axpy(*c, f);
            }
        }
        out
    }

    /// `∇_s φ` for a vector field `s`.
    pub(crate) fn nabla_along(&self, s: &VecField, p: &VecField) -> VecField {
        let mut out = TransverseField::new(self.dim(), self.cutoff());
        for x in 0..self.dim() {
            let c = Self::component(s, x);
            if !c.is_empty() {
                out.axpy(ONE, &self.apply_scalar(&c, &self.nabla(x, p)));
            }
        }
        out
    }

    pub(crate) fn prime(&self, variant: DiracVariant, p: &VecField, frame: &SymplecticFrame) -> VecField {
        let nab = self.nabla_all(p);
        let mut out = TransverseField::new(self.dim(), self.cutoff());
        for (v, w) in frame.v.iter().zip(&frame.w) {
            let (cv, cw) = match variant {
                DiracVariant::Dprime | DiracVariant::D => (v.clone(), w.clone()),
                _ => (&self.j * v, &self.j * w),
            };
            out.axpy(ONE, &self.cvec(&cv, &self.combine(w, &nab)));
            out.axpy(-ONE, &self.cvec(&cw, &self.combine(v, &nab)));
        }
        out
    }

    pub(crate) fn dirac_raw(&self, variant: DiracVariant, p: &VecField) -> VecField {
        self.dirac_frame_raw(variant, p, &SymplecticFrame::standard(self.n()))
    }

    fn dirac_frame_raw(&self, variant: DiracVariant, p: &VecField, frame: &SymplecticFrame) -> VecField {
        let mut out = self.prime(variant, p, frame);
        match variant {
            DiracVariant::D => out.axpy(-0.5 * ONE, &self.cliff(&self.kappa_tau, p)),
            DiracVariant::Dtilde => out.axpy(-0.5 * ONE, &self.cliff(&self.j_kappa_tau, p)),
            _ => {}
        }
        out
    }

    pub(crate) fn p_raw(&self, p: &VecField) -> VecField {
        if self.model.flags().fiber_only {
            return self.f_raw(p).scale(I);
        }
        let dt_d = self.dirac_raw(DiracVariant::Dtilde, &self.dirac_raw(DiracVariant::D, p));
        let d_dt = self.dirac_raw(DiracVariant::D, &self.dirac_raw(DiracVariant::Dtilde, p));
        dt_d.minus(&d_dt).scale(I)
    }

    pub(crate) fn conn_lap_raw(&self, p: &VecField) -> VecField {
        let mut out = TransverseField::new(self.dim(), self.cutoff());
        for i in 0..self.dim() {
            let ni = self.nabla(i, p);
            out.axpy(-ONE, &self.nabla(i, &ni));
            out.axpy(-ONE, &self.apply_scalar(&self.frame_divergence[i], &ni));
        }
        out.axpy(ONE, &self.nabla_along(&self.j_kappa_tau, p));
        out
    }

    pub(crate) fn rs_raw(&self, i: usize, j: usize, p: &VecField) -> VecField {
        self.apply_matrix(&self.q_curvature[i * self.dim() + j], p)
    }

    pub(crate) fn f_raw(&self, p: &VecField) -> VecField {
        let dim = self.dim();
        let mut out = TransverseField::new(dim, self.cutoff());
        for i in 0..dim {
            let jei = self.j.column(i).clone_owned();
            for j in 0..dim {
                if self.q_curvature[i * dim + j].is_empty() {
                    continue;
                }
                let t = self.gen(j, &self.rs_raw(i, j, p));
                out.axpy(ONE, &self.cvec(&jei, &t));
            }
        }
        out
    }

    pub(crate) fn hamilton_raw(&self, p: &VecField) -> VecField {
        let d = self.fiber.dim();
        let diag = DVector::from_fn(d, |i, _| Complex64::new(self.fiber.hamilton_eigenvalue(i), 0.0));
        p.map(|_, v| v.component_mul(&diag))
    }

    // ---- public operators ---------------------------------------------------

    /// `∇_{e_x} φ = ∂_x φ + Q(Γ(e_x))φ`.
    pub fn derivative(&self, x: usize, phi: &SpinorField) -> Result<SpinorField> {
        self.check(phi)?;
        if x >= self.dim() {
            return Err(Error::InvalidParameter(format!("frame index {x} out of range")));
        }
        Ok(self.wrap(self.nabla(x, phi.field())))
    }

    /// `∇_s φ` for a transverse vector field `s`.
    pub fn derivative_along(&self, s: &VecField, phi: &SpinorField) -> Result<SpinorField> {
        self.check(phi)?;
        Ok(self.wrap(self.nabla_along(s, phi.field())))
    }

    /// `s·φ` for a transverse vector field `s`.
    pub fn clifford(&self, s: &VecField, phi: &SpinorField) -> Result<SpinorField> {
        self.check(phi)?;
        Ok(self.wrap(self.cliff(s, phi.field())))
    }

    pub fn dirac(&self, phi: &SpinorField, variant: DiracVariant) -> Result<SpinorField> {
        self.check(phi)?;
        Ok(self.wrap(self.dirac_raw(variant, phi.field())))
    }

    /// The same operator assembled in an arbitrary constant symplectic frame.
    pub fn dirac_in_frame(
        &self,
        phi: &SpinorField,
        variant: DiracVariant,
        frame: &SymplecticFrame,
    ) -> Result<SpinorField> {
        self.check(phi)?;
        Ok(self.wrap(self.dirac_frame_raw(variant, phi.field(), frame)))
    }

    /// Unitary-frame forms `D′ = −Σ Je_a·∇_{e_a}` and `D̃′ = Σ e_a·∇_{e_a}`.
    pub fn dirac_unitary_form(&self, phi: &SpinorField, variant: DiracVariant) -> Result<SpinorField> {
        self.check(phi)?;
        let p = phi.field();
        let mut out = TransverseField::new(self.dim(), self.cutoff());
        for a in 0..self.dim() {
            let na = self.nabla(a, p);
            match variant {
                DiracVariant::Dprime | DiracVariant::D => {
                    out.axpy(-ONE, &self.cvec(&self.j.column(a).clone_owned(), &na))
                }
                _ => out.axpy(ONE, &self.gen(a, &na)),
            }
        }
        match variant {
            DiracVariant::D => out.axpy(-0.5 * ONE, &self.cliff(&self.kappa_tau, p)),
            DiracVariant::Dtilde => out.axpy(-0.5 * ONE, &self.cliff(&self.j_kappa_tau, p)),
            _ => {}
        }
        Ok(self.wrap(out))
    }

    /// `𝒫 = i(D̃D − DD̃)`. On the fiber-only model there is no base to
    /// differentiate along and `𝒫` reduces to its curvature term `iF`.
    pub fn p_operator(&self, phi: &SpinorField) -> Result<SpinorField> {
        self.check(phi)?;
        Ok(self.wrap(self.p_raw(phi.field())))
    }

    /// `∇*∇φ = −Σ{∇_{e_i}∇_{e_i}φ + div(e_i)∇_{e_i}φ} + ∇_{J(κ♯+τ)}φ`.
    pub fn connection_laplacian(&self, phi: &SpinorField) -> Result<SpinorField> {
        self.check(phi)?;
        Ok(self.wrap(self.conn_lap_raw(phi.field())))
    }

    /// `R^S(e_i, e_j)φ = Q(R(e_i, e_j))φ`.
    pub fn spinor_curvature(&self, i: usize, j: usize, phi: &SpinorField) -> Result<SpinorField> {
        self.check(phi)?;
        Ok(self.wrap(self.rs_raw(i, j, phi.field())))
    }

    /// `(i/2) Σ_l {v_l·R w_l − w_l·R v_l}·φ`, with `R = R(e_i, e_j)`.
    pub fn spinor_curvature_left(&self, i: usize, j: usize, phi: &SpinorField) -> Result<SpinorField> {
        self.check(phi)?;
        let r = self.curvature.get(i, j);
        let p = phi.field();
        let n = self.n();
        let mut out = TransverseField::new(self.dim(), self.cutoff());
        for l in 0..n {
            let rw = r.map(|_, m| m.column(n + l).clone_owned());
            let rv = r.map(|_, m| m.column(l).clone_owned());
            out.axpy(ONE, &self.gen(l, &self.cliff(&rw, p)));
            out.axpy(-ONE, &self.gen(n + l, &self.cliff(&rv, p)));
        }
        Ok(self.wrap(out.scale(0.5 * I)))
    }

    /// `(i/2) Σ_l {R w_l·v_l − R v_l·w_l}·φ`.
    pub fn spinor_curvature_right(&self, i: usize, j: usize, phi: &SpinorField) -> Result<SpinorField> {
        self.check(phi)?;
        let r = self.curvature.get(i, j);
        let p = phi.field();
        let n = self.n();
        let mut out = TransverseField::new(self.dim(), self.cutoff());
        for l in 0..n {
            let rw = r.map(|_, m| m.column(n + l).clone_owned());
            let rv = r.map(|_, m| m.column(l).clone_owned());
            out.axpy(ONE, &self.cliff(&rw, &self.gen(l, p)));
            out.axpy(-ONE, &self.cliff(&rv, &self.gen(n + l, p)));
        }
        Ok(self.wrap(out.scale(0.5 * I)))
    }

    /// `F(φ) = Σ_{i,j} Je_i·e_j·R^S(e_i, e_j)φ`.
    pub fn curvature_f(&self, phi: &SpinorField) -> Result<SpinorField> {
        self.check(phi)?;
        Ok(self.wrap(self.f_raw(phi.field())))
    }

    /// `ℋ^J`, the fiberwise Hamilton operator `H₀`.
    pub fn hamilton_field(&self, phi: &SpinorField) -> Result<SpinorField> {
        self.check(phi)?;
        Ok(self.wrap(self.hamilton_raw(phi.field())))
    }

    /// `½ Σ_a e_a·e_a·φ`.
    pub fn hamilton_clifford_form(&self, phi: &SpinorField) -> Result<SpinorField> {
        self.check(phi)?;
        let p = phi.field();
        let mut out = TransverseField::new(self.dim(), p.cutoff());
        for a in 0..self.dim() {
            out.axpy(0.5 * ONE, &self.gen(a, &self.gen(a, p)));
        }
        Ok(self.wrap(out))
    }

    // ---- vector-field data --------------------------------------------------

    /// `∇_X s` for a constant direction `X`.
    pub fn vector_derivative(&self, direction: &DVector<Complex64>, s: &VecField) -> VecField {
        covariant_derivative(&self.model, direction, s)
    }

    pub fn divergence(&self, s: &VecField) -> ScalarField {
        transversal_divergence(&self.model, s)
    }

    /// `s^c = s − iJs`.
    pub fn complexified(&self, s: &VecField) -> VecField {
        s.map(|_, v| v - (&self.j * v) * I)
    }

    pub fn apply_j(&self, s: &VecField) -> VecField {
        s.map(|_, v| &self.j * v)
    }

    /// Bilinear `g(s, s) = Σ_a s_a s_a`.
    pub fn norm_sq_field(&self, s: &VecField) -> ScalarField {
        let mut out = TransverseField::new(self.dim(), self.cutoff());
        for a in 0..self.dim() {
            let c = Self::component(s, a);
            out.axpy(ONE, &c.product(&c, self.cutoff(), |x, y| x * y));
        }
        out
    }

    /// `P(s) = Σ_i e_i·∇_{Je_i}s·`, as a field of fiber operators.
    pub fn p_of(&self, s: &VecField) -> MatField {
        let mut out = TransverseField::new(self.dim(), self.cutoff());
        for i in 0..self.dim() {
            let ns = self.vector_derivative(&self.j.column(i).clone_owned(), s);
            let g = self.fiber.generator(i);
            out.axpy(ONE, &ns.map(|_, v| g * self.fiber.clifford_matrix(v)));
        }
        out
    }

    /// `P̃(s) = Σ_i e_i·∇_{e_i}s·`.
    pub fn p_tilde_of(&self, s: &VecField) -> MatField {
        let mut out = TransverseField::new(self.dim(), self.cutoff());
        for i in 0..self.dim() {
            let ns = self.vector_derivative(&standard_frame_vector(self.dim(), i), s);
            let g = self.fiber.generator(i);
            out.axpy(ONE, &ns.map(|_, v| g * self.fiber.clifford_matrix(v)));
        }
        out
    }

    /// `∇_{e_x}J = [Γ(e_x), J]` as a matrix field.
    pub fn nabla_j(&self, x: usize) -> MatField {
        self.model.connection().gamma(x).map(|_, m| m * &self.j - &self.j * m)
    }

    /// `P(J)(s) = Σ_i (∇_{Je_i}J)(s)·e_i·` for a constant `s`.
    pub fn p_of_j(&self, s: &DVector<Complex64>) -> MatField {
        self.p_of_j_field(&TransverseField::constant(self.dim(), 0, s.clone()))
    }

    /// `P(J)(s)` for a vector field `s`.
    pub fn p_of_j_field(&self, s: &VecField) -> MatField {
        let dim = self.dim();
        let mut out = TransverseField::new(dim, self.cutoff());
        for i in 0..dim {
            let mut nj = TransverseField::new(dim, self.cutoff());
            for x in 0..dim {
                let c = self.j[(x, i)];
                if c != ZERO {
                    nj.axpy(c, &self.nabla_j(x));
                }
            }
            if nj.is_empty() {
                continue;
            }
            let v = nj.product(s, self.cutoff(), |m, t| m * t);
            let g = self.fiber.generator(i);
            out.axpy(ONE, &v.map(|_, t| self.fiber.clifford_matrix(t) * g));
        }
        out.pruned()
    }

    pub fn apply_matrix_field(&self, m: &MatField, phi: &SpinorField) -> SpinorField {
        self.wrap(self.apply_matrix(m, phi.field()))
    }

    pub fn apply_scalar_field(&self, f: &ScalarField, phi: &SpinorField) -> SpinorField {
        self.wrap(self.apply_scalar(f, phi.field()))
    }

    /// `κ♯ + τ`.
    pub fn kappa_tau(&self) -> &VecField {
        &self.kappa_tau
    }

    pub fn frame_divergence(&self, a: usize) -> &ScalarField {
        &self.frame_divergence[a]
    }

    // ---- inner products -----------------------------------------------------

    /// `∫_M ⟨φ, ψ⟩ μ = Σ_{k,q} ⟨φ_k, ψ_{k+q}⟩ ρ_q`, linear in `φ`.
    pub fn inner(&self, phi: &SpinorField, psi: &SpinorField) -> Complex64 {
        let rho = self.model.leaf_density();
        let mut acc = ZERO;
        for (k, a) in phi.field().iter() {
            for (q, r) in rho.iter() {
                if let Some(b) = psi.field().get(&k.add(q)) {
                    acc += b.dotc(a) * r;
                }
            }
        }
        acc
    }

    pub fn norm(&self, phi: &SpinorField) -> f64 {
        self.inner(phi, phi).re.max(0.0).sqrt()
    }

    /// The function `⟨φ, ψ⟩(x)`.
    pub fn pointwise_inner(&self, phi: &SpinorField, psi: &SpinorField) -> ScalarField {
        let mut out = TransverseField::new(self.dim(), self.cutoff());
        for (k, a) in phi.field().iter() {
            for (m, b) in psi.field().iter() {
                out.accumulate(k.sub(m), b.dotc(a), &ONE);
            }
        }
        out
    }

    /// `∫_M h μ`.
    pub fn integrate(&self, h: &ScalarField) -> Complex64 {
        self.model.integrate(h)
    }

    pub fn zero_mode(&self) -> Mode {
        Mode::zero(self.dim())
    }
}
