use nalgebra::DVector;
use rand_chacha::ChaCha8Rng;

use super::{at_most, real_vector, relative, sup_scalar, sup_vector, CheckDef, Ctx, Outcome, Suite, VecField};
use crate::error::{Error, Result};
use crate::fiber::{omega, standard_frame_vector};
use crate::geometry::{
    divergence_in_frame, divergence_theorem_residual, metric_defect, ricci_vector, transversal_divergence,
    CurvatureTensor, SymplecticFrame, TransverseField,
};
use crate::Complex64;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(super) fn checks() -> Vec<CheckDef> {
    let s = Suite::Geometry;
    vec![
        at_most("connection_symplectic", s, "∇ω = 0: Γ(X)ᵀΩ + ΩΓ(X) = 0", 1e-12, connection_symplectic),
        at_most("curvature_antisymmetry", s, "R(X,Y) = −R(Y,X)", 1e-12, curvature_antisymmetry),
        at_most(
            "curvature_symplectic_symmetry",
            s,
            "ω(R(X,Y)s, t) = ω(R(X,Y)t, s)",
            1e-12,
            curvature_symplectic_symmetry,
        ),
        at_most("curvature_j_invariance", s, "ω(R(X,Y)Js, Jt) = ω(R(X,Y)s, t)", 1e-12, curvature_j_invariance),
        at_most("curvature_first_bianchi", s, "R(X,Y)Z + R(Y,Z)X + R(Z,X)Y = 0 (T = 0)", 1e-12, first_bianchi),
        at_most("divergence_theorem", s, "∫ div(s) μ_M = ∫ ω(κ♯ + τ, s) μ_M", 1e-10, divergence_theorem),
        at_most(
            "divergence_theorem_minimal",
            s,
            "κ = 0: ∫ div(s) μ_M = ∫ ω(τ, s) μ_M",
            1e-10,
            divergence_theorem_minimal,
        ),
        at_most(
            "divergence_theorem_fedosov",
            s,
            "T = 0: ∫ div(s) μ_M = ∫ ω(κ♯, s) μ_M",
            1e-10,
            divergence_theorem_fedosov,
        ),
        at_most(
            "divergence_frame_independent",
            s,
            "div(s) = Σ_i ω(∇_{v_i}s, w_i) − ω(∇_{w_i}s, v_i) in any symplectic frame",
            1e-12,
            divergence_frame_independent,
        ),
        at_most(
            "j_compatible_connection",
            s,
            "∇ = ∇′ + ½(∇′J)J: ∇ω = 0, ∇J = 0, ∇g_Q = 0",
            1e-12,
            j_compatible_connection,
        ),
        at_most(
            "scalar_curvature_two_forms",
            s,
            "r = Σ_j Sric(ē_j, ē_j) = ½ Σ_{i,j} ω(R(e_i, Je_i)ē_j, ē_j)",
            1e-12,
            scalar_curvature_two_forms,
        ),
        at_most("ricci_j_trace", s, "Ric(X) = ½ Σ_j R(e_j, Je_j)JX", 1e-12, ricci_j_trace),
        at_most("ricci_symplectic_symmetry", s, "ω(Ric(X), Y) = ω(X, Ric(Y))", 1e-12, ricci_symplectic_symmetry),
        at_most(
            "holomorphic_sectional_curvature",
            s,
            "ω(R(X,JX)X, X) = h ω(X,JX)²",
            1e-12,
            holomorphic_sectional_curvature,
        ),
        at_most(
            "constant_curvature_tensor",
            s,
            "ω(R(X,Y)Z,W) = h/4 {ω(X,Z)ω(Y,JW) + ω(X,W)ω(Y,JZ) − ω(Y,Z)ω(X,JW) − ω(Y,W)ω(X,JZ) + 2ω(X,Y)ω(Z,JW)}",
            1e-12,
            constant_curvature_tensor,
        ),
        at_most("scalar_curvature_constant", s, "r = h n(n+1)", 1e-12, scalar_curvature_constant),
    ]
}

fn curvature_scale(r: &CurvatureTensor) -> f64 {
    r.max_abs().max(1.0)
}

fn connection_symplectic(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    Ok(Outcome::new(ctx.model.connection().symplectic_defect()))
}

fn curvature_antisymmetry(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let r = ctx.calc.curvature();
    Ok(Outcome::new(r.antisymmetry_defect() / curvature_scale(r)).aliasing(r.aliasing()))
}

fn curvature_symplectic_symmetry(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let r = ctx.calc.curvature();
    Ok(Outcome::new(r.symplectic_symmetry_defect() / curvature_scale(r)).aliasing(r.aliasing()))
}

fn curvature_j_invariance(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require_parallel_j()?;
    let r = ctx.calc.curvature();
    Ok(Outcome::new(r.j_invariance_defect() / curvature_scale(r)).aliasing(r.aliasing()))
}

fn first_bianchi(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let flags = ctx.model.flags();
    ctx.require(flags.torsion_free, "connection has torsion")?;
    let r = ctx.calc.curvature();
    let dim = ctx.dim();
    let col = |i: usize, j: usize, k: usize| r.get(i, j).map(|_, m| m.column(k).clone_owned());
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in i + 1..dim {
            for k in j + 1..dim {
                let mut s = col(i, j, k);
                s.axpy(ONE, &col(j, k, i));
                s.axpy(ONE, &col(k, i, j));
                worst = worst.max(sup_vector(&s));
            }
        }
    }
    Ok(Outcome::new(worst / curvature_scale(r)))
}

/// Largest relative gap between `∫ div(s)` and `∫ ω(w, s)` over 20 sections.
fn divergence_against(ctx: &Ctx, rng: &mut ChaCha8Rng, w: &VecField) -> Result<Outcome> {
    ctx.require_transverse()?;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let s = ctx.vector_field(rng);
        let lhs = ctx.model.integrate(&transversal_divergence(&ctx.model, &s));
        let rhs = ctx.model.integrate(&w.product(&s, ctx.model.work_cutoff(), omega));
        worst = worst.max((lhs - rhs).norm() / lhs.norm().max(1.0));
    }
    Ok(Outcome::new(worst).note("20 random sections"))
}

fn divergence_theorem(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require_transverse()?;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let s = ctx.vector_field(rng);
        let d = divergence_theorem_residual(&ctx.model, &s);
        worst = worst.max(d.residual / d.lhs.norm().max(1.0));
    }
    Ok(Outcome::new(worst).note("20 random sections"))
}

fn divergence_theorem_minimal(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require(ctx.model.flags().minimal, "mean curvature does not vanish")?;
    divergence_against(ctx, rng, &ctx.model.tau().clone())
}

fn divergence_theorem_fedosov(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require(ctx.model.flags().fedosov, "connection is not torsion-free")?;
    divergence_against(ctx, rng, &ctx.model.kappa_sharp().clone())
}

fn divergence_frame_independent(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let s = ctx.vector_field(rng);
        let frame = SymplecticFrame::random(ctx.n(), rng);
        let a = divergence_in_frame(&ctx.model, &s, &frame);
        let b = transversal_divergence(&ctx.model, &s);
        worst = worst.max(relative(sup_scalar(&a.minus(&b)), sup_scalar(&b).max(1.0)));
    }
    Ok(Outcome::new(worst))
}

fn j_compatible_connection(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require(ctx.model.flags().symplectic, "connection is not symplectic")?;
    let m = ctx.model.with_j_compatible_connection()?;
    let conn = m.connection();
    let mut worst = conn.symplectic_defect().max(conn.j_defect());
    for _ in 0..3 {
        // g_Q is the real inner product; test on real sections
        let s = ctx.vector_field(rng).map(|_, v| v.map(|z| Complex64::new(z.re, 0.0)));
        let t = ctx.vector_field(rng).map(|_, v| v.map(|z| Complex64::new(z.re, 0.0)));
        for x in 0..ctx.dim() {
            worst = worst.max(metric_defect(&m, x, &s, &t));
        }
    }
    Ok(Outcome::new(worst).note(format!("∇J before: {:.3e}", ctx.model.connection().j_defect())))
}

fn scalar_curvature_two_forms(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require_parallel_j()?;
    let ric = ctx.calc.ricci();
    let d = ric.scalar.minus(&ric.scalar_alt);
    Ok(Outcome::new(sup_scalar(&d) / curvature_scale(ctx.calc.curvature())))
}

fn ricci_j_trace(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require_kahler()?;
    let r = ctx.calc.curvature();
    let dim = ctx.dim();
    let j = ctx.model.j_matrix();
    let mut worst: f64 = 0.0;
    for a in 0..dim {
        let x = standard_frame_vector(dim, a);
        let jx = &j * &x;
        let mut rhs: VecField = TransverseField::new(dim, ctx.model.work_cutoff());
        for jj in 0..dim {
            let e = standard_frame_vector(dim, jj);
            let je = &j * &e;
            rhs.axpy(Complex64::new(0.5, 0.0), &r.along(&e, &je).map(|_, m| m * &jx));
        }
        worst = worst.max(sup_vector(&ricci_vector(r, &x).minus(&rhs)));
    }
    Ok(Outcome::new(worst / curvature_scale(r)))
}

fn ricci_symplectic_symmetry(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require_kahler()?;
    let r = ctx.calc.curvature();
    let dim = ctx.dim();
    let ric: Vec<VecField> = (0..dim).map(|a| ricci_vector(r, &standard_frame_vector(dim, a))).collect();
    let mut worst: f64 = 0.0;
    for a in 0..dim {
        let ea = standard_frame_vector(dim, a);
        for b in 0..dim {
            let eb = standard_frame_vector(dim, b);
            let mut d = ric[a].map(|_, v| omega(v, &eb));
            d.axpy(-ONE, &ric[b].map(|_, v| omega(&ea, v)));
            worst = worst.max(sup_scalar(&d));
        }
    }
    Ok(Outcome::new(worst / curvature_scale(r)))
}

/// `ω(R(X,Y)Z, W)` as a scalar field.
fn curvature_form(
    r: &CurvatureTensor,
    x: &DVector<Complex64>,
    y: &DVector<Complex64>,
    z: &DVector<Complex64>,
    w: &DVector<Complex64>,
) -> TransverseField<Complex64> {
    r.along(x, y).map(|_, m| omega(&(m * z), w))
}

fn at_zero(f: &TransverseField<Complex64>, dim: usize, expected: Complex64) -> f64 {
    let mut d = f.clone();
    d.accumulate(crate::geometry::Mode::zero(dim), -ONE, &expected);
    sup_scalar(&d)
}

fn holomorphic_sectional_curvature(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let h = ctx.require_chsc()?;
    let r = ctx.calc.curvature();
    let dim = ctx.dim();
    let j = ctx.model.j_matrix();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let x = real_vector(dim, rng);
        let jx = &j * &x;
        let lhs = curvature_form(r, &x, &jx, &x, &x);
        let w = omega(&x, &jx);
        let scale = x.norm().powi(4);
        worst = worst.max(at_zero(&lhs, dim, w * w * h) / scale);
    }
    Ok(Outcome::new(worst).note(format!("h = {h}")))
}

fn constant_curvature_tensor(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let h = ctx.require_chsc()?;
    let r = ctx.calc.curvature();
    let dim = ctx.dim();
    let j = ctx.model.j_matrix();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let v: Vec<DVector<Complex64>> = (0..4).map(|_| real_vector(dim, rng)).collect();
        let (x, y, z, w) = (&v[0], &v[1], &v[2], &v[3]);
        let (jz, jw) = (&j * z, &j * w);
        let rhs = (omega(x, z) * omega(y, &jw) + omega(x, w) * omega(y, &jz)
            - omega(y, z) * omega(x, &jw)
            - omega(y, w) * omega(x, &jz)
            + omega(x, y) * omega(z, &jw) * 2.0)
            * (h / 4.0);
        let scale: f64 = v.iter().map(|u| u.norm()).product();
        worst = worst.max(at_zero(&curvature_form(r, x, y, z, w), dim, rhs) / scale);
    }
    Ok(Outcome::new(worst))
}

fn scalar_curvature_constant(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let h = ctx.require_chsc()?;
    let n = ctx.n() as f64;
    let expected = Complex64::new(h * n * (n + 1.0), 0.0);
    let ric = ctx.calc.ricci();
    let a = at_zero(&ric.scalar, ctx.dim(), expected);
    let b = at_zero(&ric.scalar_alt, ctx.dim(), expected);
    let r0 = ric.scalar.zero_mode().copied().unwrap_or_default();
    if !r0.re.is_finite() {
        return Err(Error::Numerical("scalar curvature is not finite".into()));
    }
    Ok(Outcome::new(a.max(b)).note(format!("r = {:.6}, h n(n+1) = {:.6}", r0.re, expected.re)))
}
