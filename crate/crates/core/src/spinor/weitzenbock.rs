use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::calculus::{ScalarField, SpinorCalculus, VecField, I, ONE};
use super::field::SpinorField;
use crate::error::{Error, Result};
use crate::geometry::{ModelFlags, TransverseField};

/// Right-hand sides for `𝒫φ`, from the general formula down to the
/// constant-curvature vacuum case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeitzenbockFormula {
    /// `∇*∇ + iF − ¼|κ♯+τ|² + (i/2){P(J(κ♯+τ)) − P̃(κ♯+τ)} + iΣP(J)(Je_i)∇_i + iΣ e_i·Je_j·∇_{T(e_i,e_j)}`
    General,
    /// Torsion-free: the `T` terms drop and `τ = 0`.
    Fedosov,
    /// Torsion-free with `∇J = 0`: the `P(J)` term drops as well.
    FedosovParallelJ,
    /// `κ = 0`.
    MinimalFlow,
    /// `κ = 0`, torsion-free, `∇J = 0`: `𝒫 = ∇*∇ + iF`.
    MinimalFedosovParallelJ,
    /// Level 0 with `∇J = 0`: `∇*∇ − ¼(r + |κ♯+τ|²) + (i/2)div((κ♯+τ)^c) + i∇_τ`.
    VacuumParallelJ,
    /// Level 0, torsion-free, `∇J = 0`: `∇*∇ − ¼(r + |κ♯|²) + (i/2)div((κ♯)^c)`.
    VacuumFedosov,
    /// Level 0, torsion-free, `∇J = 0`, `κ = 0`: `∇*∇ − ¼r`.
    VacuumFedosovMinimal,
    /// Level 0, `∇J = 0`, `κ = 0`: `∇*∇ − ¼(r + |τ|²) + (i/2)div(τ^c) + i∇_τ`.
    VacuumMinimalFlow,
    /// Kähler: `∇*∇ + iF − ¼|κ|² + (i/2){P(κ^g) + P̃(Jκ^g)}`.
    Kahler,
    /// Kähler at level 0: `∇*∇ − ¼(r + |κ|²) + ½div((κ^g)^c)`.
    KahlerVacuum,
    /// Constant holomorphic sectional curvature `h`: as `Kahler` with
    /// `iF = (h/4)n(n−1) − 2hH₀²`.
    ConstantHolomorphic,
    /// Constant `h` at level 0: `∇*∇ − (h/4)n(n+1) − ¼|κ|² + ½div((κ^g)^c)`.
    ConstantHolomorphicVacuum,
    /// Constant `h` at level 0 with `κ` basic-harmonic:
    /// `∇*∇ − (h/4)n(n+1) + ¼|κ|²`.
    ConstantHolomorphicHarmonic,
}

impl WeitzenbockFormula {
    pub const ALL: [WeitzenbockFormula; 14] = [
        WeitzenbockFormula::General,
        WeitzenbockFormula::Fedosov,
        WeitzenbockFormula::FedosovParallelJ,
        WeitzenbockFormula::MinimalFlow,
        WeitzenbockFormula::MinimalFedosovParallelJ,
        WeitzenbockFormula::VacuumParallelJ,
        WeitzenbockFormula::VacuumFedosov,
        WeitzenbockFormula::VacuumFedosovMinimal,
        WeitzenbockFormula::VacuumMinimalFlow,
        WeitzenbockFormula::Kahler,
        WeitzenbockFormula::KahlerVacuum,
        WeitzenbockFormula::ConstantHolomorphic,
        WeitzenbockFormula::ConstantHolomorphicVacuum,
        WeitzenbockFormula::ConstantHolomorphicHarmonic,
    ];

    pub fn vacuum_only(self) -> bool {
        use WeitzenbockFormula::*;
        matches!(
            self,
            VacuumParallelJ
                | VacuumFedosov
                | VacuumFedosovMinimal
                | VacuumMinimalFlow
                | KahlerVacuum
                | ConstantHolomorphicVacuum
                | ConstantHolomorphicHarmonic
        )
    }

    /// The first unmet hypothesis, if any. The harmonic-κ condition of
    /// `ConstantHolomorphicHarmonic` depends on the data and is checked by
    /// [`SpinorCalculus::weitzenbock_rhs`].
    pub fn unmet_hypothesis(self, flags: &ModelFlags) -> Option<&'static str> {
        use WeitzenbockFormula::*;
        let fedosov = (flags.fedosov, "connection is not torsion-free");
        let pj = (flags.preserves_j, "connection does not preserve J");
        let minimal = (flags.minimal, "mean curvature does not vanish");
        let kahler = (flags.kahler, "model is not Kähler");
        let chsc = (flags.chsc_h.is_some(), "curvature is not of constant holomorphic type");
        let needs: &[(bool, &'static str)] = match self {
            General => &[],
            Fedosov => &[fedosov],
            FedosovParallelJ => &[fedosov, pj],
            MinimalFlow => &[minimal],
            MinimalFedosovParallelJ => &[minimal, fedosov, pj],
            VacuumParallelJ => &[pj],
            VacuumFedosov => &[fedosov, pj],
            VacuumFedosovMinimal => &[fedosov, pj, minimal],
            VacuumMinimalFlow => &[minimal, pj],
            Kahler | KahlerVacuum => &[kahler],
            ConstantHolomorphic | ConstantHolomorphicVacuum | ConstantHolomorphicHarmonic => {
                &[kahler, chsc]
            }
        };
        needs.iter().find(|(ok, _)| !ok).map(|(_, why)| *why)
    }
}

/// Relative residuals of the two sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeitzenbockResidual {
    /// `‖𝒫φ − RHS‖ / ‖φ‖`.
    pub relative: f64,
    /// Aliasing energy discarded while assembling both sides.
    pub aliasing: f64,
}

impl SpinorCalculus {
    /// `max |δ_B κ|, |δ_B(Jκ)|` with `δ_B = δ + i(κ^g)`; both vanish exactly
    /// when `κ` is basic-harmonic.
    pub fn mean_curvature_harmonic_defect(&self) -> f64 {
        let kg = self.model().kappa_sharp_g();
        let mut a = self.divergence(kg).scale(-ONE);
        a.axpy(ONE, &self.norm_sq_field(kg));
        let b = self.divergence(&self.apply_j(kg));
        let sup = |f: &ScalarField| f.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
        sup(&a).max(sup(&b))
    }

    fn scalar_curvature(&self) -> ScalarField {
        self.ricci().scalar.clone()
    }

    /// Right-hand side of the chosen formula.
    pub fn weitzenbock_rhs(&self, phi: &SpinorField, formula: WeitzenbockFormula) -> Result<SpinorField> {
        use WeitzenbockFormula::*;
        let flags = self.model().flags();
        if let Some(why) = formula.unmet_hypothesis(&flags) {
            return Err(Error::Hypothesis(why.into()));
        }
        if formula.vacuum_only() && phi.top_level().unwrap_or(0) > 0 {
            return Err(Error::Hypothesis("formula holds on level-0 fields only".into()));
        }
        if formula == ConstantHolomorphicHarmonic {
            let d = self.mean_curvature_harmonic_defect();
            if d > 1e-12 {
                return Err(Error::Hypothesis(format!("mean curvature is not basic-harmonic ({d:.3e})")));
            }
        }
        self.check_protected(phi, self.p_raise())?;
        let p = phi.field();
        let dim = self.model().dim();
        let n = self.model().n() as f64;
        let kt = self.kappa_tau().clone();
        let tau = self.model().tau().clone();
        let ks = self.model().kappa_sharp().clone();
        let kg = self.model().kappa_sharp_g().clone();
        let mut out = self.conn_lap_raw(p);
        let add_scalar = |out: &mut VecField, c: Complex64, f: &ScalarField| {
            out.axpy(c, &self.apply_scalar(f, p));
        };
        let add_matrix = |out: &mut VecField, c: Complex64, m: &super::calculus::MatField| {
            out.axpy(c, &self.apply_matrix(m, p));
        };
        // (i/2){P(Js) − P̃(s)} for s = κ♯+τ, κ♯ or τ
        let p_pair = |s: &VecField| {
            let mut m = self.p_of(&self.apply_j(s));
            m.axpy(-ONE, &self.p_tilde_of(s));
            m
        };
        let p_j_term = |out: &mut VecField| {
            for i in 0..dim {
                let pj = self.p_of_j(&self.j_matrix().column(i).clone_owned());
                if !pj.is_empty() {
                    out.axpy(I, &self.apply_matrix(&pj, &self.nabla(i, p)));
                }
            }
        };
        let torsion_term = |out: &mut VecField| {
            for i in 0..dim {
                for j in 0..dim {
                    let t = self.model().torsion(i, j);
                    if t.is_empty() {
                        continue;
                    }
                    let nt = self.nabla_along(t, p);
                    let jej = self.j_matrix().column(j).clone_owned();
                    let s = self.gen(i, &self.cvec(&jej, &nt));
                    out.axpy(I, &s);
                }
            }
        };
        let constant = |c: f64| TransverseField::constant(dim, self.model().work_cutoff(), Complex64::new(c, 0.0));
        let vacuum_div = |out: &mut VecField, c: Complex64, s: &VecField| {
            let d = self.divergence(&self.complexified(s));
            out.axpy(c, &self.apply_scalar(&d, p));
        };
        match formula {
            General | Fedosov | FedosovParallelJ | MinimalFlow | MinimalFedosovParallelJ => {
                out.axpy(I, &self.f_raw(p));
                if formula == MinimalFedosovParallelJ {
                    return Ok(self.wrap(out));
                }
                let s = match formula {
                    General => kt.clone(),
                    Fedosov | FedosovParallelJ => ks.clone(),
                    _ => tau.clone(),
                };
                add_scalar(&mut out, -0.25 * ONE, &self.norm_sq_field(&s));
                add_matrix(&mut out, 0.5 * I, &p_pair(&s));
                if formula != FedosovParallelJ {
                    p_j_term(&mut out);
                }
                if matches!(formula, General | MinimalFlow) {
                    torsion_term(&mut out);
                }
            }
            VacuumParallelJ | VacuumFedosov | VacuumMinimalFlow => {
                let s = match formula {
                    VacuumParallelJ => kt.clone(),
                    VacuumFedosov => ks.clone(),
                    _ => tau.clone(),
                };
                let mut q = self.scalar_curvature();
                q.axpy(ONE, &self.norm_sq_field(&s));
                add_scalar(&mut out, -0.25 * ONE, &q);
                vacuum_div(&mut out, 0.5 * I, &s);
                if formula != VacuumFedosov {
                    out.axpy(I, &self.nabla_along(&tau, p));
                }
            }
            VacuumFedosovMinimal => {
                add_scalar(&mut out, -0.25 * ONE, &self.scalar_curvature());
            }
            Kahler | ConstantHolomorphic => {
                if formula == Kahler {
                    out.axpy(I, &self.f_raw(p));
                } else {
                    let h = flags.chsc_h.expect("hypothesis checked");
                    add_scalar(&mut out, ONE, &constant(h / 4.0 * n * (n - 1.0)));
                    let hh = self.hamilton_raw(&self.hamilton_raw(p));
                    out.axpy(Complex64::new(-2.0 * h, 0.0), &hh);
                }
                add_scalar(&mut out, -0.25 * ONE, &self.norm_sq_field(&kg));
                let mut m = self.p_of(&kg);
                m.axpy(ONE, &self.p_tilde_of(&self.apply_j(&kg)));
                add_matrix(&mut out, 0.5 * I, &m);
            }
            KahlerVacuum | ConstantHolomorphicVacuum => {
                let mut q = if formula == KahlerVacuum {
                    self.scalar_curvature()
                } else {
                    let h = flags.chsc_h.expect("hypothesis checked");
                    constant(h * n * (n + 1.0))
                };
                q.axpy(ONE, &self.norm_sq_field(&kg));
                add_scalar(&mut out, -0.25 * ONE, &q);
                vacuum_div(&mut out, 0.5 * ONE, &kg);
            }
            ConstantHolomorphicHarmonic => {
                let h = flags.chsc_h.expect("hypothesis checked");
                add_scalar(&mut out, ONE, &constant(-h / 4.0 * n * (n + 1.0)));
                add_scalar(&mut out, 0.25 * ONE, &self.norm_sq_field(&kg));
            }
        }
        Ok(self.wrap(out))
    }

    /// `‖𝒫φ − RHS‖ / ‖φ‖` in the leafwise-weighted `L²` norm.
    pub fn weitzenbock_residual(
        &self,
        phi: &SpinorField,
        formula: WeitzenbockFormula,
    ) -> Result<WeitzenbockResidual> {
        let rhs = self.weitzenbock_rhs(phi, formula)?;
        let lhs = self.p_operator(phi)?;
        let diff = lhs.minus(&rhs);
        Ok(WeitzenbockResidual {
            relative: relative(self.norm(&diff), self.norm(phi)),
            aliasing: lhs.aliasing() + rhs.aliasing(),
        })
    }
}

pub(crate) fn relative(num: f64, den: f64) -> f64 {
    if den > 0.0 { num / den } else { num }
}
