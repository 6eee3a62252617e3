use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;

use super::{at_most, real_vector, relative, CheckDef, Ctx, Outcome, Suite};
use crate::error::Result;
use crate::fiber::{binomial, complex_structure, omega, omega_matrix, FiberBasis, WeylFiber};
use crate::Complex64;

pub(super) fn checks() -> Vec<CheckDef> {
    let s = Suite::Weyl;
    vec![
        at_most("canonical_commutation", s, "σ(v)σ(w) − σ(w)σ(v) = −i ω(v,w)", 1e-12, canonical_commutation),
        at_most("clifford_skew_adjoint", s, "⟨s·φ, ψ⟩ = −⟨φ, s·ψ⟩", 1e-14, clifford_skew_adjoint),
        at_most(
            "hamilton_spectrum",
            s,
            "H₀h_β = −(|β| + n/2)h_β, dim M_ℓ = C(n+ℓ−1, ℓ)",
            1e-12,
            hamilton_spectrum,
        ),
        at_most("metaplectic_commutator", s, "[Q(A), σ(v)] = σ(Av), A ∈ sp(n,ℝ)", 1e-12, metaplectic_commutator),
        at_most("complex_structure_action", s, "Q(J₀) = −i H₀", 1e-12, complex_structure_action),
        at_most("hamilton_clifford_form", s, "ℋ^J φ = ½ Σ_j ē_j·ē_j·φ", 1e-12, hamilton_clifford_form),
        at_most("hamilton_self_adjoint", s, "⟨ℋ^Jφ, ψ⟩ = ⟨φ, ℋ^Jψ⟩", 1e-12, hamilton_self_adjoint),
        at_most(
            "hamilton_clifford_commutator",
            s,
            "ℋ^J(s·φ) = s·ℋ^Jφ + i Js·φ",
            1e-12,
            hamilton_clifford_commutator,
        ),
        at_most("vacuum_clifford_j", s, "Js·φ₀ = i s·φ₀ on Sp₀", 1e-12, vacuum_clifford_j),
        at_most("j_trace_identity", s, "Σ_j Je_j·e_j·φ = i n φ", 1e-12, j_trace_identity),
    ]
}

fn canonical_commutation(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let fiber = ctx.calc.fiber();
    let l = ctx.max_level();
    let cols = fiber.basis().dim_up_to(l.saturating_sub(1));
    let d = fiber.dim();
    let id = DMatrix::<Complex64>::identity(d, d);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let v = real_vector(ctx.dim(), rng);
        let w = real_vector(ctx.dim(), rng);
        let sv = fiber.clifford_matrix(&v);
        let sw = fiber.clifford_matrix(&w);
        let c = &sv * &sw - &sw * &sv + &id * (Complex64::i() * omega(&v, &w));
        let scale = v.norm() * w.norm();
        worst = worst.max(relative(c.columns(0, cols).camax(), scale));
    }
    Ok(Outcome::new(worst).note(format!("50 pairs, columns of level ≤ {}", l.saturating_sub(1))))
}

fn clifford_skew_adjoint(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let fiber = ctx.calc.fiber();
    let mut worst: f64 = 0.0;
    for a in 0..ctx.dim() {
        let g = fiber.generator(a);
        worst = worst.max((g + g.adjoint()).camax());
    }
    for _ in 0..10 {
        let m = fiber.clifford_matrix(&real_vector(ctx.dim(), rng));
        worst = worst.max((&m + m.adjoint()).camax());
    }
    Ok(Outcome::new(worst))
}

fn hamilton_spectrum(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let n = ctx.n();
    let l = ctx.max_level();
    // assemble ½Σσ(e_a)² two levels above L so the compression is exact
    let big = WeylFiber::new(FiberBasis::new(n, l + 2)?);
    let keep = big.basis().dim_up_to(l);
    let mut h = DMatrix::<Complex64>::zeros(big.dim(), big.dim());
    for a in 0..2 * n {
        let g = big.generator(a);
        h += g * g * Complex64::new(0.5, 0.0);
    }
    let block = h.view((0, 0), (keep, keep)).clone_owned();
    let mut computed: Vec<f64> = block.symmetric_eigen().eigenvalues.iter().copied().collect();
    computed.sort_by(f64::total_cmp);

    let mut expected = Vec::with_capacity(keep);
    let mut multiplicity_mismatch = Vec::new();
    for level in 0..=l {
        let mult = if n == 0 { 0 } else { binomial(n + level - 1, level) };
        if big.basis().level_range(level)?.len() != mult {
            multiplicity_mismatch.push(level);
        }
        expected.extend(std::iter::repeat_n(-(level as f64 + n as f64 / 2.0), mult));
    }
    expected.sort_by(f64::total_cmp);
    if computed.len() != expected.len() || !multiplicity_mismatch.is_empty() {
        return Ok(Outcome::new(f64::INFINITY).note(format!(
            "dimension {} against {} expected; mismatched levels {:?}",
            computed.len(),
            expected.len(),
            multiplicity_mismatch
        )));
    }
    let mut worst = computed.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    // the stored diagonal must agree with the same values
    let fiber = ctx.calc.fiber();
    for i in 0..fiber.dim() {
        let want = -(fiber.basis().level_of(i) as f64 + n as f64 / 2.0);
        worst = worst.max((fiber.hamilton_eigenvalue(i) - want).abs());
    }
    Ok(Outcome::new(worst).note(format!("levels 0..={l}, {} eigenvalues", expected.len())))
}

fn metaplectic_commutator(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let fiber = ctx.calc.fiber();
    let dim = ctx.dim();
    let l = ctx.max_level();
    let keep = fiber.basis().dim_up_to(l.saturating_sub(2));
    let om = omega_matrix(ctx.n());
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        // ΩS with S symmetric lies in sp(n,ℝ)
        let mut s = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let x = rand::Rng::gen_range(rng, -1.0..1.0);
                s[(i, j)] = x;
                s[(j, i)] = x;
            }
        }
        let a = &om * s;
        let q = fiber.quadratic_action(&a)?.into_matrix();
        let v = real_vector(dim, rng);
        let sv = fiber.clifford_matrix(&v);
        let av = a.map(|x| Complex64::new(x, 0.0)) * &v;
        let c = &q * &sv - &sv * &q - fiber.clifford_matrix(&av);
        let scale = a.amax().max(1.0) * v.norm();
        worst = worst.max(relative(c.view((0, 0), (keep, keep)).camax(), scale));
    }
    Ok(Outcome::new(worst))
}

fn complex_structure_action(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let fiber = ctx.calc.fiber();
    let q = fiber.quadratic_action(&complex_structure(ctx.n()))?.into_matrix();
    let h = fiber.hamilton_operator().into_matrix();
    let d = q + h * Complex64::i();
    Ok(Outcome::new(d.camax()))
}

fn hamilton_clifford_form(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(2, rng)?;
    Ok(Outcome::new(ctx.calc.hamilton_forms_residual(&phi)?))
}

fn hamilton_self_adjoint(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(0, rng)?;
    let psi = ctx.field(0, rng)?;
    let d = ctx.calc.hamilton_symmetry_defect(&phi, &psi)?;
    Ok(Outcome::new(relative(d, ctx.calc.norm(&phi) * ctx.calc.norm(&psi))))
}

fn hamilton_clifford_commutator(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(1, rng)?;
    let s = ctx.vector_field(rng);
    Ok(Outcome::new(ctx.calc.hamilton_clifford_residual(&s, &phi)?))
}

fn vacuum_clifford_j(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.vacuum_field(rng);
    let s = ctx.vector_field(rng);
    Ok(Outcome::new(ctx.calc.vacuum_clifford_residual(&s, &phi)?))
}

fn j_trace_identity(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let phi = ctx.field(2, rng)?;
    Ok(Outcome::new(ctx.calc.j_trace_residual(&phi)?))
}
