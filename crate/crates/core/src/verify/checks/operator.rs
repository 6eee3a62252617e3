use rand_chacha::ChaCha8Rng;

use super::{at_least, at_most, CheckDef, Ctx, Outcome, Suite};
use crate::error::Result;
use crate::geometry::SymplecticFrame;
use crate::spinor::{DiracVariant, OperatorName, WeitzenbockFormula};

pub(super) fn checks() -> Vec<CheckDef> {
    let s = Suite::Operator;
    use WeitzenbockFormula as W;
    let mut v = vec![
        at_most("spinor_leibniz", s, "∇_X(s·φ) = (∇_X s)·φ + s·∇_Xφ", 1e-12, spinor_leibniz),
        at_most(
            "spinor_metric_compatibility",
            s,
            "X⟨φ,ψ⟩ = ⟨∇_Xφ,ψ⟩ + ⟨φ,∇_Xψ⟩",
            1e-11,
            spinor_metric_compatibility,
        ),
        at_most(
            "spinor_curvature_commutator",
            s,
            "R^S(X,Y)φ = [∇_X, ∇_Y]φ − ∇_{[X,Y]}φ",
            1e-9,
            spinor_curvature_commutator,
        ),
        at_most(
            "spinor_curvature_forms",
            s,
            "R^S(X,Y)φ = −(1/2i) Σ_k e_k·R(X,Y)Je_k·φ = Q(R(X,Y))φ",
            1e-12,
            spinor_curvature_forms,
        ),
        at_most(
            "dirac_frame_independence",
            s,
            "D′φ = Σ_i {v_i·∇_{w_i}φ − w_i·∇_{v_i}φ} in any symplectic frame",
            1e-11,
            dirac_frame_independence,
        ),
        at_most(
            "dirac_unitary_form",
            s,
            "D′φ = −Σ_i Jē_i·∇_{e_i}φ, D̃′φ = Σ_i ē_i·∇_{e_i}φ",
            1e-12,
            dirac_unitary_form,
        ),
        at_most("dirac_symbol", s, "[D′, f]φ = (Ω df)·φ", 1e-11, dirac_symbol),
        at_most("dirac_self_adjoint", s, "⟨Dφ,ψ⟩ = ⟨φ,Dψ⟩, D = D′ − ½(κ♯+τ)·", 1e-10, dirac_self_adjoint),
        at_most(
            "dirac_tilde_self_adjoint",
            s,
            "∇J = 0 ⇒ ⟨D̃φ,ψ⟩ = ⟨φ,D̃ψ⟩",
            1e-10,
            dirac_tilde_self_adjoint,
        ),
        at_least(
            "adjoint_negative_control",
            s,
            "κ♯ + τ ≠ 0 ⇒ ⟨D′φ,ψ⟩ ≠ ⟨φ,D′ψ⟩",
            1e-9,
            adjoint_negative_control,
        ),
        at_most("p_self_adjoint", s, "∇J = 0 ⇒ 𝒫 = i[D̃, D] is self-adjoint", 1e-10, p_self_adjoint),
        at_most(
            "curvature_action_self_adjoint",
            s,
            "∇J = 0 ⇒ iF is self-adjoint, F = Σ Jē_i·ē_j·R^S(e_i,e_j)",
            1e-10,
            curvature_action_self_adjoint,
        ),
        at_most(
            "connection_laplacian_self_adjoint",
            s,
            "⟨∇*∇φ,ψ⟩ = ⟨φ,∇*∇ψ⟩",
            1e-10,
            connection_laplacian_self_adjoint,
        ),
        at_most(
            "connection_laplacian_two_path",
            s,
            "∇*∇φ = −Σ_i {∇_i∇_iφ + div(ē_i)∇_iφ} + ∇_{J(κ♯+τ)}φ against ⟨∇*∇φ,ψ⟩ = ⟨∇φ,∇ψ⟩",
            1e-9,
            connection_laplacian_two_path,
        ),
        at_most(
            "connection_laplacian_nonnegative",
            s,
            "⟨∇*∇φ,φ⟩ = ‖∇φ‖² ≥ 0",
            1e-12,
            connection_laplacian_nonnegative,
        ),
        at_most(
            "clifford_commutator_dirac",
            s,
            "D(s·φ) = s·Dφ + P(s)·φ − i∇_sφ − (i/2)ω(s, κ♯+τ)φ",
            1e-10,
            clifford_commutator_dirac,
        ),
        at_most(
            "clifford_commutator_dirac_tilde",
            s,
            "D̃(s·φ) = s·D̃φ + P̃(s)·φ + i∇_{Js}φ + (i/2)ω(Js, κ♯+τ)φ",
            1e-10,
            clifford_commutator_dirac_tilde,
        ),
        at_most(
            "p_decomposition",
            s,
            "P(s) + P̃(Js) = −P(J)(Js) − i div(s) + Σ{e_iω(ē_j,Js) − e_jω(ē_i,Js)}ē_i·Jē_j − Σω(T(e_i,e_j),Js)ē_i·Jē_j",
            1e-10,
            p_decomposition,
        ),
    ];
    let weitzenbock: [(&'static str, &'static str, RunW); 14] = [
        (
            "weitzenbock_general",
            "𝒫 = ∇*∇ + iF − ¼|κ♯+τ|² + (i/2){P(J(κ♯+τ)) − P̃(κ♯+τ)} + iΣP(J)(Jē_i)·∇_i + iΣē_i·Jē_j·∇_{T(e_i,e_j)}",
            |c, r| weitzenbock(c, r, W::General),
        ),
        (
            "weitzenbock_fedosov",
            "T = 0: 𝒫 = ∇*∇ + iF − ¼|κ♯|² + (i/2){P(Jκ♯) − P̃(κ♯)} + iΣP(J)(Jē_i)·∇_i",
            |c, r| weitzenbock(c, r, W::Fedosov),
        ),
        (
            "weitzenbock_fedosov_parallel_j",
            "T = 0, ∇J = 0: 𝒫 = ∇*∇ + iF − ¼|κ♯|² + (i/2){P(Jκ♯) − P̃(κ♯)}",
            |c, r| weitzenbock(c, r, W::FedosovParallelJ),
        ),
        (
            "weitzenbock_minimal_flow",
            "κ = 0: 𝒫 = ∇*∇ + iF − ¼|τ|² + (i/2){P(Jτ) − P̃(τ)} + iΣP(J)(Jē_i)·∇_i + iΣē_i·Jē_j·∇_{T(e_i,e_j)}",
            |c, r| weitzenbock(c, r, W::MinimalFlow),
        ),
        (
            "weitzenbock_minimal_fedosov_parallel_j",
            "κ = 0, T = 0, ∇J = 0: 𝒫 = ∇*∇ + iF",
            |c, r| weitzenbock(c, r, W::MinimalFedosovParallelJ),
        ),
        (
            "weitzenbock_vacuum",
            "∇J = 0, φ ∈ Sp₀: 𝒫⁰ = ∇*∇ − ¼(r + |κ♯+τ|²) + (i/2)div((κ♯+τ)^c) + i∇_τ",
            |c, r| weitzenbock(c, r, W::VacuumParallelJ),
        ),
        (
            "weitzenbock_vacuum_fedosov",
            "T = 0, ∇J = 0, φ ∈ Sp₀: 𝒫⁰ = ∇*∇ − ¼(r + |κ♯|²) + (i/2)div((κ♯)^c)",
            |c, r| weitzenbock(c, r, W::VacuumFedosov),
        ),
        (
            "weitzenbock_vacuum_fedosov_minimal",
            "T = 0, ∇J = 0, κ = 0, φ ∈ Sp₀: 𝒫⁰ = ∇*∇ − ¼r",
            |c, r| weitzenbock(c, r, W::VacuumFedosovMinimal),
        ),
        (
            "weitzenbock_vacuum_minimal_flow",
            "∇J = 0, κ = 0, φ ∈ Sp₀: 𝒫⁰ = ∇*∇ − ¼(r + |τ|²) + (i/2)div(τ^c) + i∇_τ",
            |c, r| weitzenbock(c, r, W::VacuumMinimalFlow),
        ),
        (
            "weitzenbock_kahler",
            "Kähler: 𝒫 = ∇*∇ + iF − ¼|κ|² + (i/2){P(κ^g) + P̃(Jκ^g)}",
            |c, r| weitzenbock(c, r, W::Kahler),
        ),
        (
            "weitzenbock_kahler_vacuum",
            "Kähler, φ ∈ Sp₀: 𝒫⁰ = ∇*∇ − ¼(r + |κ|²) + ½div((κ^g)^c)",
            |c, r| weitzenbock(c, r, W::KahlerVacuum),
        ),
        (
            "weitzenbock_constant_curvature",
            "constant h: 𝒫 = ∇*∇ + (h/4)n(n−1) − 2h(ℋ^J)² − ¼|κ|² + (i/2){P(κ^g) + P̃(Jκ^g)}",
            |c, r| weitzenbock(c, r, W::ConstantHolomorphic),
        ),
        (
            "weitzenbock_constant_curvature_vacuum",
            "constant h, φ ∈ Sp₀: 𝒫⁰ = ∇*∇ − (h/4)n(n+1) − ¼|κ|² + ½div((κ^g)^c)",
            |c, r| weitzenbock(c, r, W::ConstantHolomorphicVacuum),
        ),
        (
            "weitzenbock_constant_curvature_harmonic",
            "constant h, κ basic-harmonic, φ ∈ Sp₀: 𝒫⁰ = ∇*∇ − (h/4)n(n+1) + ¼|κ|²",
            |c, r| weitzenbock(c, r, W::ConstantHolomorphicHarmonic),
        ),
    ];
    for (name, anchor, run) in weitzenbock {
        v.push(at_most(name, s, anchor, 1e-9, run));
    }
    v.extend([
        at_most(
            "hamilton_derivative",
            s,
            "∇_X(ℋ^Jφ) = ℋ^J∇_Xφ + ½Σ_j J(∇_XJ)ē_j·ē_j·φ",
            1e-11,
            hamilton_derivative,
        ),
        at_least(
            "hamilton_derivative_correction_needed",
            s,
            "∇J ≠ 0 ⇒ ∇_X(ℋ^Jφ) ≠ ℋ^J∇_Xφ",
            1e-6,
            hamilton_derivative_correction_needed,
        ),
        at_most("grading_dirac", s, "∇J = 0 ⇒ ℋ^J D = D ℋ^J + i D̃", 1e-11, grading_dirac),
        at_most("grading_dirac_tilde", s, "∇J = 0 ⇒ ℋ^J D̃ = D̃ ℋ^J − i D", 1e-11, grading_dirac_tilde),
        at_most("grading_p", s, "∇J = 0 ⇒ ℋ^J 𝒫 = 𝒫 ℋ^J", 1e-11, grading_p),
        at_most(
            "vacuum_divergence",
            s,
            "∇J = 0, φ ∈ Sp₀: {P(Js) − P̃(s)}·φ = div(s^c)φ, s^c = s − iJs",
            1e-11,
            vacuum_divergence,
        ),
        at_most("vacuum_curvature", s, "∇J = 0, φ ∈ Sp₀: F(φ) = (i/4) r φ", 1e-9, vacuum_curvature),
        at_most(
            "kahler_mean_curvature_terms",
            s,
            "P(Jκ♯) − P̃(κ♯) = P(κ^g) + P̃(Jκ^g)",
            1e-11,
            kahler_mean_curvature_terms,
        ),
        at_most(
            "automorphic_mean_curvature",
            s,
            "J∇_Yκ^g = ∇_{JY}κ^g ⇒ P(κ^g) = P̃(Jκ^g)",
            1e-11,
            automorphic_mean_curvature,
        ),
        at_most(
            "ricci_spinor_curvature",
            s,
            "Σ_j R^S(e_j,Je_j)φ = i Σ_j Ric(e_j)·e_j·φ",
            1e-11,
            ricci_spinor_curvature,
        ),
        at_most(
            "ricci_clifford_scalar",
            s,
            "Σ_j Ric(e_j)·Je_j·φ = −(i/2) r φ",
            1e-11,
            ricci_clifford_scalar,
        ),
        at_most(
            "constant_curvature_action",
            s,
            "constant h: iF(φ) = (h/4)n(n−1)φ − 2h(ℋ^J)²φ",
            1e-11,
            constant_curvature_action,
        ),
        at_most(
            "mean_curvature_divergence",
            s,
            "κ basic-harmonic ⇒ div((κ^g)^c) = |κ|²",
            1e-11,
            mean_curvature_divergence,
        ),
    ]);
    v
}

type RunW = fn(&Ctx, &mut ChaCha8Rng) -> Result<Outcome>;

fn spinor_leibniz(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(1 + ctx.calc.connection_raise(), rng)?;
    let s = ctx.vector_field(rng);
    let mut worst: f64 = 0.0;
    for x in 0..ctx.dim() {
        worst = worst.max(ctx.calc.leibniz_residual(x, &s, &phi)?);
    }
    Ok(Outcome::new(worst))
}

fn spinor_metric_compatibility(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(ctx.calc.connection_raise(), rng)?;
    let psi = ctx.field(ctx.calc.connection_raise(), rng)?;
    let mut worst: f64 = 0.0;
    for x in 0..ctx.dim() {
        worst = worst.max(ctx.calc.metric_compatibility_residual(x, &phi, &psi)?);
    }
    Ok(Outcome::new(worst))
}

fn spinor_curvature_commutator(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require_transverse()?;
    let phi = ctx.field(2 * ctx.calc.connection_raise(), rng)?;
    let mut worst: f64 = 0.0;
    for i in 0..ctx.dim() {
        for j in i + 1..ctx.dim() {
            worst = worst.max(ctx.calc.curvature_commutator_residual(i, j, &phi)?);
        }
    }
    Ok(Outcome::new(worst))
}

fn spinor_curvature_forms(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(2, rng)?;
    let mut worst: f64 = 0.0;
    for i in 0..ctx.dim() {
        for j in 0..ctx.dim() {
            let (a, b) = ctx.calc.curvature_forms_residual(i, j, &phi)?;
            worst = worst.max(a).max(b);
        }
    }
    Ok(Outcome::new(worst))
}

const VARIANTS: [DiracVariant; 4] =
    [DiracVariant::Dprime, DiracVariant::Dtildeprime, DiracVariant::D, DiracVariant::Dtilde];

fn dirac_frame_independence(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(ctx.calc.dirac_raise(), rng)?;
    let frame = SymplecticFrame::random(ctx.n(), rng);
    let mut worst: f64 = 0.0;
    for v in VARIANTS {
        worst = worst.max(ctx.calc.dirac_frame_residuals(v, &frame, &phi)?.0);
    }
    Ok(Outcome::new(worst))
}

fn dirac_unitary_form(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(ctx.calc.dirac_raise(), rng)?;
    let frame = SymplecticFrame::standard(ctx.n());
    let mut worst: f64 = 0.0;
    for v in VARIANTS {
        worst = worst.max(ctx.calc.dirac_frame_residuals(v, &frame, &phi)?.1);
    }
    Ok(Outcome::new(worst))
}

fn dirac_symbol(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require_transverse()?;
    let phi = ctx.field(ctx.calc.dirac_raise(), rng)?;
    let f = ctx.scalar_field(rng);
    Ok(Outcome::new(ctx.calc.symbol_residual(&f, &phi)?))
}

fn adjointness(ctx: &Ctx, rng: &mut ChaCha8Rng, op: OperatorName) -> Result<Outcome> {
    let raise = ctx.calc.operator_raise(op);
    let phi = ctx.field(raise, rng)?;
    let psi = ctx.field(raise, rng)?;
    Ok(Outcome::new(ctx.calc.adjointness_defect(op, &phi, &psi)?))
}

fn dirac_self_adjoint(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    adjointness(ctx, rng, OperatorName::D)
}

fn dirac_tilde_self_adjoint(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require_parallel_j()?;
    adjointness(ctx, rng, OperatorName::Dtilde)
}

fn adjoint_negative_control(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require(!ctx.model.kappa_tau().is_empty(), "κ♯ + τ vanishes, so D′ = D")?;
    // With K = 1 the test sections are constant and κ♯ + τ has zero mean.
    ctx.require(ctx.model.cutoff() >= 2, "Fourier cutoff K = 1 leaves only constant test sections")?;
    let out = adjointness(ctx, rng, OperatorName::Dprime)?;
    let note = format!("uncorrected D′ adjointness defect {:.3e}", out.residual);
    Ok(out.note(note))
}

fn p_self_adjoint(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require_parallel_j()?;
    adjointness(ctx, rng, OperatorName::P)
}

fn curvature_action_self_adjoint(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require_parallel_j()?;
    adjointness(ctx, rng, OperatorName::F)
}

fn connection_laplacian_self_adjoint(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    adjointness(ctx, rng, OperatorName::ConnLaplacian)
}

fn connection_laplacian_two_path(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let raise = 2 * ctx.calc.connection_raise();
    let phi = ctx.field(raise, rng)?;
    let psi = ctx.field(raise, rng)?;
    Ok(Outcome::new(ctx.calc.connection_laplacian_two_path_residual(&phi, &psi)?))
}

fn connection_laplacian_nonnegative(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(2 * ctx.calc.connection_raise(), rng)?;
    let q = ctx.calc.inner(&ctx.calc.connection_laplacian(&phi)?, &phi);
    let n2 = ctx.calc.norm(&phi).powi(2);
    Ok(Outcome::new((-q.re).max(0.0) / n2.max(f64::MIN_POSITIVE))
        .note(format!("⟨∇*∇φ,φ⟩/‖φ‖² = {:.6e}", q.re / n2)))
}

fn clifford_commutator_dirac(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(1 + ctx.calc.dirac_raise(), rng)?;
    let s = ctx.vector_field(rng);
    Ok(Outcome::new(ctx.calc.clifford_commutator_residuals(&s, &phi)?.0))
}

fn clifford_commutator_dirac_tilde(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(1 + ctx.calc.dirac_raise(), rng)?;
    let s = ctx.vector_field(rng);
    Ok(Outcome::new(ctx.calc.clifford_commutator_residuals(&s, &phi)?.1))
}

fn p_decomposition(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let s = ctx.vector_field(rng);
    Ok(Outcome::new(ctx.calc.p_decomposition_residual(&s)?))
}

fn weitzenbock(ctx: &Ctx, rng: &mut ChaCha8Rng, formula: WeitzenbockFormula) -> Result<Outcome> {
    if let Some(why) = formula.unmet_hypothesis(&ctx.model.flags()) {
        return Err(crate::Error::Hypothesis(why.into()));
    }
    let phi = if formula.vacuum_only() {
        ctx.vacuum_field(rng)
    } else {
        ctx.field(ctx.calc.operator_raise(OperatorName::P), rng)?
    };
    let r = ctx.calc.weitzenbock_residual(&phi, formula)?;
    Ok(Outcome::new(r.relative).aliasing(r.aliasing))
}

fn hamilton_derivative(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(ctx.calc.connection_raise().max(2), rng)?;
    let mut worst: f64 = 0.0;
    for x in 0..ctx.dim() {
        worst = worst.max(ctx.calc.hamilton_derivative_residuals(x, &phi)?.0);
    }
    Ok(Outcome::new(worst))
}

fn hamilton_derivative_correction_needed(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    ctx.require(!ctx.model.flags().preserves_j, "connection preserves J, so the correction vanishes")?;
    let phi = ctx.field(ctx.calc.connection_raise().max(2), rng)?;
    let mut worst: f64 = 0.0;
    for x in 0..ctx.dim() {
        worst = worst.max(ctx.calc.hamilton_derivative_residuals(x, &phi)?.1);
    }
    Ok(Outcome::new(worst).note("residual with the ∇J term omitted"))
}

fn grading(ctx: &Ctx, rng: &mut ChaCha8Rng, which: usize) -> Result<Outcome> {
    ctx.require_parallel_j()?;
    let phi = ctx.field(ctx.calc.p_raise(), rng)?;
    Ok(Outcome::new(ctx.calc.grading_residuals(&phi)?[which]))
}

fn grading_dirac(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    grading(ctx, rng, 0)
}

fn grading_dirac_tilde(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    grading(ctx, rng, 1)
}

fn grading_p(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    grading(ctx, rng, 2)
}

fn vacuum_divergence(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.vacuum_field(rng);
    let s = ctx.vector_field(rng);
    Ok(Outcome::new(ctx.calc.vacuum_divergence_residual(&s, &phi)?))
}

fn vacuum_curvature(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.vacuum_field(rng);
    Ok(Outcome::new(ctx.calc.vacuum_curvature_residual(&phi)?))
}

fn kahler_mean_curvature_terms(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    Ok(Outcome::new(ctx.calc.mean_curvature_p_residual()?))
}

fn automorphic_mean_curvature(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    Ok(Outcome::new(ctx.calc.automorphic_p_residual()?))
}

fn ricci_spinor_curvature(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(2, rng)?;
    Ok(Outcome::new(ctx.calc.ricci_clifford_residuals(&phi)?.0))
}

fn ricci_clifford_scalar(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(2, rng)?;
    Ok(Outcome::new(ctx.calc.ricci_clifford_residuals(&phi)?.1))
}

fn constant_curvature_action(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(2 + ctx.calc.connection_raise(), rng)?;
    Ok(Outcome::new(ctx.calc.constant_curvature_f_residual(&phi)?))
}

fn mean_curvature_divergence(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    Ok(Outcome::new(ctx.calc.mean_curvature_divergence_residual()?))
}
