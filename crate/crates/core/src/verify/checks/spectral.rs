use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;

use super::{at_least, at_most, CheckDef, Ctx, Outcome, Suite};
use crate::error::{Error, Result};
use crate::geometry::Mode;
use crate::spinor::{OperatorName, Spectrum};

pub(super) fn checks() -> Vec<CheckDef> {
    let s = Suite::Spectral;
    vec![
        at_most(
            "flat_golden_spectrum",
            s,
            "flat, κ = 0, τ = 0: spec 𝒫 = {4π²|k|²} with multiplicity dim Sp_{≤ℓ} per k",
            1e-9,
            flat_golden_spectrum,
        ),
        at_most("dirac_spectrum_hermitian", s, "⟨De_j, e_i⟩ = conj⟨De_i, e_j⟩", 1e-10, dirac_spectrum_hermitian),
        at_most("p_spectrum_hermitian", s, "∇J = 0: ⟨𝒫e_j, e_i⟩ = conj⟨𝒫e_i, e_j⟩", 1e-10, p_spectrum_hermitian),
        at_most("p_level_block_diagonal", s, "∇J = 0: 𝒫 preserves Sp_ℓ", 1e-10, p_level_block_diagonal),
        at_least(
            "vacuum_kernel_trivial",
            s,
            "T = 0, ∇J = 0, κ = 0, r < 0 ⇒ ker 𝒫⁰ = {0}",
            1e-8,
            vacuum_kernel_trivial,
        ),
        at_most(
            "vacuum_eigenvalue_bound",
            s,
            "constant h, κ basic-harmonic: λ(𝒫⁰) ≥ −(h/4)n(n+1) + ¼ min|κ|²",
            1e-9,
            vacuum_eigenvalue_bound,
        ),
        at_most(
            "eigenvalue_bound_nonpositive_curvature",
            s,
            "constant h ≤ 0, κ = 0: λ(𝒫) ≥ −(h/4)n(n−1)",
            1e-9,
            eigenvalue_bound_nonpositive_curvature,
        ),
        at_most(
            "constant_curvature_ladder_spectrum",
            s,
            "constant h, point: spec 𝒫|_{Sp_ℓ} = (h/4)n(n−1) − 2h(ℓ + n/2)²",
            1e-10,
            constant_curvature_ladder_spectrum,
        ),
    ]
}

fn spectrum(ctx: &Ctx, op: OperatorName, restrict: Option<usize>) -> Result<Spectrum> {
    ctx.calc.spectrum(op, restrict)
}

fn multiset_gap(mut computed: Vec<f64>, mut expected: Vec<f64>) -> f64 {
    if computed.len() != expected.len() {
        return f64::INFINITY;
    }
    computed.sort_by(f64::total_cmp);
    expected.sort_by(f64::total_cmp);
    let scale = expected.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    computed.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale
}

fn flat_golden_spectrum(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let flags = ctx.model.flags();
    ctx.require_transverse()?;
    ctx.require(ctx.model.connection().is_flat_coefficients(), "connection coefficients do not vanish")?;
    ctx.require(flags.minimal, "mean curvature does not vanish")?;
    ctx.require(ctx.model.tau().is_empty(), "torsion vector does not vanish")?;
    let spec = spectrum(ctx, OperatorName::P, None)?;
    let per_mode = ctx.calc.basis().dim_up_to(spec.max_level);
    let mut expected = Vec::new();
    for k in Mode::cube(ctx.dim(), ctx.model.cutoff()) {
        let lambda = 4.0 * PI * PI * k.norm_sqr() as f64;
        expected.extend(std::iter::repeat_n(lambda, per_mode));
    }
    let gap = multiset_gap(spec.values(), expected);
    let mut distinct: Vec<i64> = Mode::cube(ctx.dim(), ctx.model.cutoff()).iter().map(Mode::norm_sqr).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let note = format!(
        "{} eigenvalues, levels ≤ {}, 4π²·{:?}",
        spec.entries.len(),
        spec.max_level,
        distinct
    );
    Ok(Outcome::new(gap).note(note).spectrum(spec))
}

fn hermitian(ctx: &Ctx, op: OperatorName) -> Result<Outcome> {
    let assembled = ctx.calc.assemble(op, None)?;
    let residual = assembled.hermitian_residual;
    let mut out = Outcome::new(residual);
    match assembled.spectrum() {
        Ok(s) => {
            let note = format!("{} eigenvalues, min {:.6e}", s.entries.len(), s.min().unwrap_or(f64::NAN));
            out = out.note(note).spectrum(s);
        }
        Err(Error::NotHermitian { .. }) => out = out.note("assembly not Hermitian; spectrum skipped"),
        Err(e) => return Err(e),
    }
    Ok(out)
}

fn dirac_spectrum_hermitian(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    hermitian(ctx, OperatorName::D)
}

fn p_spectrum_hermitian(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require_parallel_j()?;
    hermitian(ctx, OperatorName::P)
}

fn p_level_block_diagonal(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require_parallel_j()?;
    let a = ctx.calc.assemble(OperatorName::P, None)?;
    Ok(Outcome::new(a.level_offdiagonal()).note(format!("levels ≤ {}", a.max_level)))
}

/// Upper bound of the scalar curvature over the torus from its coefficients.
fn scalar_curvature_sup(ctx: &Ctx) -> f64 {
    let r = &ctx.calc.ricci().scalar;
    let zero = Mode::zero(ctx.dim());
    let mean = r.get(&zero).map_or(0.0, |z| z.re);
    let ripple: f64 = r.iter().filter(|(k, _)| **k != zero).map(|(_, z)| z.norm()).sum();
    mean + ripple
}

fn vacuum_kernel_trivial(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let flags = ctx.model.flags();
    ctx.require(flags.fedosov, "connection is not torsion-free")?;
    ctx.require_parallel_j()?;
    ctx.require(flags.minimal, "mean curvature does not vanish")?;
    let r_max = scalar_curvature_sup(ctx);
    ctx.require(r_max < 0.0, &format!("hypothesis r < 0 not satisfied (sup r ≤ {r_max:.3e})"))?;
    let spec = spectrum(ctx, OperatorName::P, Some(0))?;
    let smallest = spec.values().iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    Ok(Outcome::new(smallest).note(format!("min |λ(𝒫⁰)| = {smallest:.6e}")).spectrum(spec))
}

/// `min |κ|²` over a `64^{2n}`-point grid (coarser for `n = 2`).
fn min_kappa_sq(ctx: &Ctx) -> f64 {
    let kg = ctx.model.kappa_sharp_g();
    if kg.is_empty() {
        return 0.0;
    }
    let dim = ctx.dim();
    let m: usize = if dim <= 2 { 64 } else { 12 };
    let mut best = f64::INFINITY;
    let total = m.pow(dim as u32);
    for idx in 0..total {
        let mut rest = idx;
        let x: Vec<f64> = (0..dim)
            .map(|_| {
                let c = rest % m;
                rest /= m;
                c as f64 / m as f64
            })
            .collect();
        if let Some(v) = kg.evaluate(&x) {
            best = best.min(v.iter().map(|z| z.norm_sqr()).sum());
        }
    }
    best
}

fn vacuum_eigenvalue_bound(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let h = ctx.require_chsc()?;
    let defect = ctx.calc.mean_curvature_harmonic_defect();
    ctx.require(defect < 1e-12, &format!("mean curvature is not basic-harmonic ({defect:.3e})"))?;
    let n = ctx.n() as f64;
    let bound = -h / 4.0 * n * (n + 1.0) + 0.25 * min_kappa_sq(ctx);
    let spec = spectrum(ctx, OperatorName::P, Some(0))?;
    let lmin = spec.min().unwrap_or(f64::INFINITY);
    let violation = (bound - lmin).max(0.0) / bound.abs().max(1.0);
    Ok(Outcome::new(violation).note(format!("λmin = {lmin:.9e}, bound = {bound:.9e}")).spectrum(spec))
}

fn eigenvalue_bound_nonpositive_curvature(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let h = ctx.require_chsc()?;
    ctx.require(h <= 0.0, "holomorphic sectional curvature is positive")?;
    ctx.require(ctx.model.flags().minimal, "mean curvature does not vanish")?;
    let n = ctx.n() as f64;
    let bound = -h / 4.0 * n * (n - 1.0) + 0.0;
    let spec = spectrum(ctx, OperatorName::P, None)?;
    let lmin = spec.min().unwrap_or(f64::INFINITY);
    let violation = (bound - lmin).max(0.0) / bound.abs().max(1.0);
    Ok(Outcome::new(violation).note(format!("λmin = {lmin:.9e}, bound = {bound:.9e}")).spectrum(spec))
}

fn constant_curvature_ladder_spectrum(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let h = ctx.require_chsc()?;
    ctx.require(ctx.model.flags().fiber_only, "model has transverse directions")?;
    let spec = spectrum(ctx, OperatorName::P, None)?;
    let n = ctx.n() as f64;
    let basis = ctx.calc.basis();
    let mut expected = Vec::new();
    for level in 0..=spec.max_level {
        let e = h / 4.0 * n * (n - 1.0) - 2.0 * h * (level as f64 + n / 2.0).powi(2);
        expected.extend(std::iter::repeat_n(e, basis.level_range(level)?.len()));
    }
    let gap = multiset_gap(spec.values(), expected);
    let vac = -h / 4.0 * n * (n + 1.0) + 0.0;
    Ok(Outcome::new(gap).note(format!("vacuum eigenvalue −(h/4)n(n+1) = {vac}")).spectrum(spec))
}
