use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::calculus::{DiracVariant, MatField, ScalarField, SpinorCalculus, VecField, I, ONE};
use super::field::SpinorField;
use super::spectrum::OperatorName;
use super::weitzenbock::relative;
use crate::error::{Error, Result};
use crate::fiber::{omega, standard_frame_vector};
use crate::geometry::{ricci_vector, SymplecticFrame, TransverseField};

fn sup(f: &ScalarField) -> f64 {
    f.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max)
}

impl SpinorCalculus {
    fn require(&self, ok: bool, why: &str) -> Result<()> {
        if ok { Ok(()) } else { Err(Error::Hypothesis(why.into())) }
    }

    fn require_vacuum(&self, phi: &SpinorField) -> Result<()> {
        self.check(phi)?;
        self.require(phi.top_level().unwrap_or(0) == 0, "field must lie in level 0")
    }

    fn rel(&self, diff: &VecField, phi: &SpinorField) -> f64 {
        relative(self.norm(&self.wrap(diff.clone())), self.norm(phi))
    }

    /// `‖∇_x(s·φ) − (∇_x s)·φ − s·∇_xφ‖ / ‖φ‖`.
    pub fn leibniz_residual(&self, x: usize, s: &VecField, phi: &SpinorField) -> Result<f64> {
        let q = self.connection_raise();
        self.check_protected(phi, 1 + q)?;
        let p = phi.field();
        let e = standard_frame_vector(self.model().dim(), x);
        let mut d = self.nabla(x, &self.cliff(s, p));
        d.axpy(-ONE, &self.cliff(&self.vector_derivative(&e, s), p));
        d.axpy(-ONE, &self.cliff(s, &self.nabla(x, p)));
        Ok(self.rel(&d, phi))
    }

    /// `max_k |(e_x⟨φ,ψ⟩ − ⟨∇_xφ,ψ⟩ − ⟨φ,∇_xψ⟩)_k| / (‖φ‖‖ψ‖)`.
    pub fn metric_compatibility_residual(&self, x: usize, phi: &SpinorField, psi: &SpinorField) -> Result<f64> {
        self.check(phi)?;
        self.check(psi)?;
        let mut d = self.pointwise_inner(phi, psi).derivative(x);
        d.axpy(-ONE, &self.pointwise_inner(&self.derivative(x, phi)?, psi));
        d.axpy(-ONE, &self.pointwise_inner(phi, &self.derivative(x, psi)?));
        Ok(relative(sup(&d), phi.norm() * psi.norm()))
    }

    /// `‖R^S(e_i,e_j)φ − (∇_i∇_j − ∇_j∇_i)φ‖ / ‖φ‖`.
    pub fn curvature_commutator_residual(&self, i: usize, j: usize, phi: &SpinorField) -> Result<f64> {
        // a fiber-only model prescribes R without a connection realizing it
        self.require(!self.model().flags().fiber_only, "model has no transverse directions")?;
        self.check_protected(phi, 2 * self.connection_raise())?;
        let p = phi.field();
        let mut d = self.rs_raw(i, j, p);
        d.axpy(-ONE, &self.nabla(i, &self.nabla(j, p)));
        d.axpy(ONE, &self.nabla(j, &self.nabla(i, p)));
        Ok(self.rel(&d, phi))
    }

    /// Residuals of both Clifford forms of `R^S(e_i, e_j)` against `Q(R)`.
    pub fn curvature_forms_residual(&self, i: usize, j: usize, phi: &SpinorField) -> Result<(f64, f64)> {
        self.check_protected(phi, 2)?;
        let q = self.spinor_curvature(i, j, phi)?;
        let left = self.spinor_curvature_left(i, j, phi)?.minus(&q);
        let right = self.spinor_curvature_right(i, j, phi)?.minus(&q);
        Ok((relative(self.norm(&left), self.norm(phi)), relative(self.norm(&right), self.norm(phi))))
    }

    /// Agreement of the standard-frame operator with the same operator built
    /// in `frame` and with its unitary-frame form.
    pub fn dirac_frame_residuals(
        &self,
        variant: DiracVariant,
        frame: &SymplecticFrame,
        phi: &SpinorField,
    ) -> Result<(f64, f64)> {
        self.check_protected(phi, self.dirac_raise())?;
        let d = self.dirac(phi, variant)?;
        let f = self.dirac_in_frame(phi, variant, frame)?.minus(&d);
        let u = self.dirac_unitary_form(phi, variant)?.minus(&d);
        Ok((relative(self.norm(&f), self.norm(phi)), relative(self.norm(&u), self.norm(phi))))
    }

    /// `|⟨Aφ,ψ⟩ − ⟨φ,Aψ⟩| / (‖φ‖‖ψ‖)` in the leafwise-weighted `L²` product.
    pub fn adjointness_defect(&self, name: OperatorName, phi: &SpinorField, psi: &SpinorField) -> Result<f64> {
        let raise = self.operator_raise(name);
        self.check_protected(phi, raise)?;
        self.check_protected(psi, raise)?;
        let a_phi = self.wrap(self.apply_named(name, phi.field()));
        let a_psi = self.wrap(self.apply_named(name, psi.field()));
        let d = self.inner(&a_phi, psi) - self.inner(phi, &a_psi);
        Ok(relative(d.norm(), self.norm(phi) * self.norm(psi)))
    }

    /// `‖[D′, f]φ − (Ω df)·φ‖ / ‖φ‖` for a basic function `f`.
    pub fn symbol_residual(&self, f: &ScalarField, phi: &SpinorField) -> Result<f64> {
        self.check_protected(phi, self.dirac_raise())?;
        let p = phi.field();
        let dim = self.model().dim();
        let fp = self.apply_scalar(f, p);
        let mut d = self.dirac_raw(DiracVariant::Dprime, &fp);
        d.axpy(-ONE, &self.apply_scalar(f, &self.dirac_raw(DiracVariant::Dprime, p)));
        let om = self.model().omega_matrix();
        let mut df: VecField = TransverseField::new(dim, f.cutoff());
        for a in 0..dim {
            let col = om.column(a).clone_owned();
            df.axpy(ONE, &f.derivative(a).map(|_, c| &col * *c));
        }
        d.axpy(-ONE, &self.cliff(&df, p));
        Ok(self.rel(&d, phi))
    }

    /// The two Clifford commutator identities for `D` and `D̃`:
    /// `D(s·φ) = s·Dφ + P(s)·φ − i∇_sφ − (i/2)ω(s, κ♯+τ)φ` and
    /// `D̃(s·φ) = s·D̃φ + P̃(s)·φ + i∇_{Js}φ + (i/2)ω(Js, κ♯+τ)φ`.
    pub fn clifford_commutator_residuals(&self, s: &VecField, phi: &SpinorField) -> Result<(f64, f64)> {
        self.check_protected(phi, 1 + self.dirac_raise())?;
        let p = phi.field();
        let cut = self.model().work_cutoff();
        let kt = self.kappa_tau();
        let js = self.apply_j(s);
        let sp = self.cliff(s, p);

        let mut d = self.dirac_raw(DiracVariant::D, &sp);
        d.axpy(-ONE, &self.cliff(s, &self.dirac_raw(DiracVariant::D, p)));
        d.axpy(-ONE, &self.apply_matrix(&self.p_of(s), p));
        d.axpy(I, &self.nabla_along(s, p));
        let w = s.product(kt, cut, omega);
        d.axpy(0.5 * I, &self.apply_scalar(&w, p));

        let mut dt = self.dirac_raw(DiracVariant::Dtilde, &sp);
        dt.axpy(-ONE, &self.cliff(s, &self.dirac_raw(DiracVariant::Dtilde, p)));
        dt.axpy(-ONE, &self.apply_matrix(&self.p_tilde_of(s), p));
        dt.axpy(-I, &self.nabla_along(&js, p));
        let wj = js.product(kt, cut, omega);
        dt.axpy(-0.5 * I, &self.apply_scalar(&wj, p));
        Ok((self.rel(&d, phi), self.rel(&dt, phi)))
    }

    /// Both sides of
    /// `P(s) + P̃(Js) = −P(J)(Js) − i div(s) + Σ_{ij}{e_i ω(e_j,Js) − e_j ω(e_i,Js)} e_i·Je_j
    /// − Σ_{ij} ω(T(e_i,e_j), Js) e_i·Je_j`, compared on levels `≤ L − 2`.
    pub fn p_decomposition_residual(&self, s: &VecField) -> Result<f64> {
        let dim = self.model().dim();
        let cut = self.model().work_cutoff();
        let d = self.fiber().dim();
        let js = self.apply_j(s);
        let mut lhs = self.p_of(s);
        lhs.axpy(ONE, &self.p_tilde_of(&js));

        let mut rhs: MatField = TransverseField::new(dim, cut);
        rhs.axpy(-ONE, &self.p_of_j_field(&js));
        let id = DMatrix::<Complex64>::identity(d, d);
        rhs.axpy(-I, &self.divergence(s).map(|_, c| &id * *c));
        let pair = |i: usize, j: usize| {
            let jej = self.j_matrix().column(j).clone_owned();
            self.fiber().generator(i) * self.fiber().clifford_matrix(&jej)
        };
        let w_e: Vec<ScalarField> = (0..dim)
            .map(|j| {
                let e = standard_frame_vector(dim, j);
                js.map(|_, v| omega(&e, v)).pruned()
            })
            .collect();
        for i in 0..dim {
            for j in 0..dim {
                let mut c = w_e[j].derivative(i);
                c.axpy(-ONE, &w_e[i].derivative(j));
                let t = self.model().torsion(i, j);
                if !t.is_empty() {
                    c.axpy(-ONE, &t.product(&js, cut, omega));
                }
                let c = c.pruned();
                if c.is_empty() {
                    continue;
                }
                let m = pair(i, j);
                rhs.axpy(ONE, &c.map(|_, z| &m * *z));
            }
        }
        let keep = self.basis().dim_up_to(self.protected_level(2)?);
        let diff = lhs.minus(&rhs);
        let worst = diff
            .iter()
            .map(|(_, m)| m.columns(0, keep).camax())
            .fold(0.0, f64::max);
        let scale = lhs.iter().map(|(_, m)| m.columns(0, keep).camax()).fold(0.0, f64::max);
        Ok(relative(worst, scale.max(1.0)))
    }

    /// `|⟨∇*∇φ, ψ⟩ − Σ_a ⟨∇_aφ, ∇_aψ⟩| / (‖φ‖‖ψ‖)`: the local formula
    /// against the defining adjointness, both integrated against `μ_M`.
    pub fn connection_laplacian_two_path_residual(&self, phi: &SpinorField, psi: &SpinorField) -> Result<f64> {
        let raise = 2 * self.connection_raise();
        self.check_protected(phi, raise)?;
        self.check_protected(psi, raise)?;
        let lap = self.connection_laplacian(phi)?;
        let mut d = self.inner(&lap, psi);
        for a in 0..self.model().dim() {
            d -= self.inner(&self.derivative(a, phi)?, &self.derivative(a, psi)?);
        }
        Ok(relative(d.norm(), self.norm(phi) * self.norm(psi)))
    }

    /// `‖ℋ^Jφ − ½Σ e_a·e_a·φ‖ / ‖φ‖` on levels `≤ L − 2`.
    pub fn hamilton_forms_residual(&self, phi: &SpinorField) -> Result<f64> {
        self.check_protected(phi, 2)?;
        let d = self.hamilton_field(phi)?.minus(&self.hamilton_clifford_form(phi)?);
        Ok(relative(self.norm(&d), self.norm(phi)))
    }

    /// `|⟨ℋ^Jφ,ψ⟩ − ⟨φ,ℋ^Jψ⟩|`, exact for any fields.
    pub fn hamilton_symmetry_defect(&self, phi: &SpinorField, psi: &SpinorField) -> Result<f64> {
        let d = self.inner(&self.hamilton_field(phi)?, psi) - self.inner(phi, &self.hamilton_field(psi)?);
        Ok(d.norm())
    }

    /// `‖ℋ^J(s·φ) − s·ℋ^Jφ − iJs·φ‖ / ‖φ‖`.
    pub fn hamilton_clifford_residual(&self, s: &VecField, phi: &SpinorField) -> Result<f64> {
        self.check_protected(phi, 1)?;
        let p = phi.field();
        let mut d = self.hamilton_raw(&self.cliff(s, p));
        d.axpy(-ONE, &self.cliff(s, &self.hamilton_raw(p)));
        d.axpy(-I, &self.cliff(&self.apply_j(s), p));
        Ok(self.rel(&d, phi))
    }

    /// Residual of `∇_X(ℋ^Jφ) = ℋ^J∇_Xφ + ½Σ_j J(∇_XJ)e_j·e_j·φ`, and the
    /// same residual with the last term left out.
    pub fn hamilton_derivative_residuals(&self, x: usize, phi: &SpinorField) -> Result<(f64, f64)> {
        self.check_protected(phi, self.connection_raise().max(2))?;
        let p = phi.field();
        let dim = self.model().dim();
        let mut d = self.nabla(x, &self.hamilton_raw(p));
        d.axpy(-ONE, &self.hamilton_raw(&self.nabla(x, p)));
        let without = self.rel(&d, phi);
        let nj = self.nabla_j(x);
        let j = self.j_matrix().clone();
        for jj in 0..dim {
            let e = standard_frame_vector(dim, jj);
            let v = nj.map(|_, m| &j * (m * &e));
            d.axpy(-0.5 * ONE, &self.cliff(&v, &self.gen(jj, p)));
        }
        Ok((self.rel(&d, phi), without))
    }

    /// Residuals of `ℋ^J D = D ℋ^J + iD̃`, `ℋ^J D̃ = D̃ ℋ^J − iD` and
    /// `ℋ^J 𝒫 = 𝒫 ℋ^J`; these need `∇J = 0`.
    pub fn grading_residuals(&self, phi: &SpinorField) -> Result<[f64; 3]> {
        self.require(self.model().flags().preserves_j, "connection does not preserve J")?;
        self.check_protected(phi, self.p_raise())?;
        let p = phi.field();
        let h = |f: &VecField| self.hamilton_raw(f);
        let dd = |f: &VecField| self.dirac_raw(DiracVariant::D, f);
        let dt = |f: &VecField| self.dirac_raw(DiracVariant::Dtilde, f);
        let mut r1 = h(&dd(p));
        r1.axpy(-ONE, &dd(&h(p)));
        r1.axpy(-I, &dt(p));
        let mut r2 = h(&dt(p));
        r2.axpy(-ONE, &dt(&h(p)));
        r2.axpy(I, &dd(p));
        let mut r3 = h(&self.p_raw(p));
        r3.axpy(-ONE, &self.p_raw(&h(p)));
        Ok([self.rel(&r1, phi), self.rel(&r2, phi), self.rel(&r3, phi)])
    }

    /// `‖Js·φ₀ − i s·φ₀‖ / ‖φ₀‖` on a level-0 field.
    pub fn vacuum_clifford_residual(&self, s: &VecField, phi: &SpinorField) -> Result<f64> {
        self.require_vacuum(phi)?;
        let p = phi.field();
        let mut d = self.cliff(&self.apply_j(s), p);
        d.axpy(-I, &self.cliff(s, p));
        Ok(self.rel(&d, phi))
    }

    /// `‖{P(Js) − P̃(s)}·φ₀ − div(s^c)φ₀‖ / ‖φ₀‖`, for `∇J = 0`.
    pub fn vacuum_divergence_residual(&self, s: &VecField, phi: &SpinorField) -> Result<f64> {
        self.require(self.model().flags().preserves_j, "connection does not preserve J")?;
        self.require_vacuum(phi)?;
        let p = phi.field();
        let mut m = self.p_of(&self.apply_j(s));
        m.axpy(-ONE, &self.p_tilde_of(s));
        let mut d = self.apply_matrix(&m, p);
        d.axpy(-ONE, &self.apply_scalar(&self.divergence(&self.complexified(s)), p));
        Ok(self.rel(&d, phi))
    }

    /// `‖F(φ₀) − (i/4) r φ₀‖ / ‖φ₀‖`, for `∇J = 0`.
    pub fn vacuum_curvature_residual(&self, phi: &SpinorField) -> Result<f64> {
        self.require(self.model().flags().preserves_j, "connection does not preserve J")?;
        self.require_vacuum(phi)?;
        let p = phi.field();
        let mut d = self.f_raw(p);
        d.axpy(-0.25 * I, &self.apply_scalar(&self.ricci().scalar, p));
        Ok(self.rel(&d, phi))
    }

    /// Residuals of `Σ_j R^S(e_j,Je_j)φ = iΣ_j Ric(e_j)·e_j·φ` and
    /// `Σ_j Ric(e_j)·Je_j·φ = −(i/2) r φ` on Kähler models.
    pub fn ricci_clifford_residuals(&self, phi: &SpinorField) -> Result<(f64, f64)> {
        self.require(self.model().flags().kahler, "model is not Kähler")?;
        self.check_protected(phi, 2)?;
        let p = phi.field();
        let dim = self.model().dim();
        let j = self.j_matrix().clone();
        let mut a = TransverseField::new(dim, self.model().work_cutoff());
        let mut b = TransverseField::new(dim, self.model().work_cutoff());
        for jj in 0..dim {
            let e = standard_frame_vector(dim, jj);
            let je = j.column(jj).clone_owned();
            for x in 0..dim {
                for y in 0..dim {
                    let c = e[x] * je[y];
                    if c != Complex64::new(0.0, 0.0) {
                        a.axpy(c, &self.rs_raw(x, y, p));
                    }
                }
            }
            let ric = ricci_vector(self.curvature(), &e);
            a.axpy(-I, &self.cliff(&ric, &self.gen(jj, p)));
            b.axpy(ONE, &self.cliff(&ric, &self.cvec(&je, p)));
        }
        b.axpy(0.5 * I, &self.apply_scalar(&self.ricci().scalar, p));
        Ok((self.rel(&a, phi), self.rel(&b, phi)))
    }

    /// `‖Σ_j Je_j·e_j·φ − i n φ‖ / ‖φ‖`.
    pub fn j_trace_residual(&self, phi: &SpinorField) -> Result<f64> {
        self.check_protected(phi, 2)?;
        let p = phi.field();
        let dim = self.model().dim();
        let mut d = p.scale(-I * self.model().n() as f64);
        for jj in 0..dim {
            d.axpy(ONE, &self.cvec(&self.j_matrix().column(jj).clone_owned(), &self.gen(jj, p)));
        }
        Ok(self.rel(&d, phi))
    }

    /// `max |J∇_Y κ^g − ∇_{JY} κ^g|` over frame directions `Y`.
    pub fn automorphic_defect(&self) -> f64 {
        let dim = self.model().dim();
        let kg = self.model().kappa_sharp_g();
        let j = self.j_matrix();
        let mut worst: f64 = 0.0;
        for y in 0..dim {
            let e = standard_frame_vector(dim, y);
            let a = self.apply_j(&self.vector_derivative(&e, kg));
            let b = self.vector_derivative(&(j * &e), kg);
            for (_, v) in a.minus(&b).iter() {
                worst = worst.max(v.camax());
            }
        }
        worst
    }

    /// `max |P(Jκ♯) − P̃(κ♯) − P(κ^g) − P̃(Jκ^g)|` on levels `≤ L − 2`, for
    /// Kähler models.
    pub fn mean_curvature_p_residual(&self) -> Result<f64> {
        self.require(self.model().flags().kahler, "model is not Kähler")?;
        let ks = self.model().kappa_sharp();
        let kg = self.model().kappa_sharp_g();
        let mut m = self.p_of(&self.apply_j(ks));
        m.axpy(-ONE, &self.p_tilde_of(ks));
        m.axpy(-ONE, &self.p_of(kg));
        m.axpy(-ONE, &self.p_tilde_of(&self.apply_j(kg)));
        self.matrix_field_sup(&m, 2)
    }

    /// `max |P(κ^g) − P̃(Jκ^g)|` on levels `≤ L − 2`, for automorphic `κ`.
    pub fn automorphic_p_residual(&self) -> Result<f64> {
        self.require(self.model().flags().kahler, "model is not Kähler")?;
        let d = self.automorphic_defect();
        self.require(d < 1e-12, &format!("mean curvature is not automorphic ({d:.3e})"))?;
        let kg = self.model().kappa_sharp_g();
        let mut m = self.p_of(kg);
        m.axpy(-ONE, &self.p_tilde_of(&self.apply_j(kg)));
        self.matrix_field_sup(&m, 2)
    }

    /// `max |div((κ^g)^c) − |κ|²|`, when `κ` is basic-harmonic.
    pub fn mean_curvature_divergence_residual(&self) -> Result<f64> {
        self.require(self.model().flags().kahler, "model is not Kähler")?;
        let d = self.mean_curvature_harmonic_defect();
        self.require(d < 1e-12, &format!("mean curvature is not basic-harmonic ({d:.3e})"))?;
        let kg = self.model().kappa_sharp_g();
        let mut f = self.divergence(&self.complexified(kg));
        f.axpy(-ONE, &self.norm_sq_field(kg));
        Ok(sup(&f))
    }

    fn matrix_field_sup(&self, m: &MatField, raise: usize) -> Result<f64> {
        let keep = self.basis().dim_up_to(self.protected_level(raise)?);
        Ok(m.iter().map(|(_, a)| a.columns(0, keep).camax()).fold(0.0, f64::max))
    }

    /// `‖i F(φ) − (h/4)n(n−1)φ + 2h(ℋ^J)²φ‖ / ‖φ‖` under constant
    /// holomorphic sectional curvature `h`.
    pub fn constant_curvature_f_residual(&self, phi: &SpinorField) -> Result<f64> {
        let flags = self.model().flags();
        self.require(flags.kahler, "model is not Kähler")?;
        let h = flags
            .chsc_h
            .ok_or_else(|| Error::Hypothesis("curvature is not of constant holomorphic type".into()))?;
        self.check_protected(phi, 2 + self.connection_raise())?;
        let p = phi.field();
        let n = self.model().n() as f64;
        let mut d = self.f_raw(p).scale(I);
        d.axpy(Complex64::new(-h / 4.0 * n * (n - 1.0), 0.0), p);
        d.axpy(Complex64::new(2.0 * h, 0.0), &self.hamilton_raw(&self.hamilton_raw(p)));
        Ok(self.rel(&d, phi))
    }

    /// Constant vector helper for tests and checks.
    pub fn frame_vector(&self, a: usize) -> DVector<Complex64> {
        standard_frame_vector(self.model().dim(), a)
    }
}
