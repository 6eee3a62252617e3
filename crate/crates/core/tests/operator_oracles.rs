use std::f64::consts::PI;

use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsdirac_core::fiber::FiberVector;
use tsdirac_core::spinor::OperatorName;
use tsdirac_core::{
    build_model, Complex64, DiracVariant, FiberBasis, Mode, ModelSpec, SpinorCalculus, SpinorField,
    WeitzenbockFormula,
};

const L: usize = 8;

fn calculus(spec: &ModelSpec, n: usize) -> SpinorCalculus {
    let model = build_model(spec).unwrap();
    SpinorCalculus::new(model, FiberBasis::new(n, L).unwrap()).unwrap()
}

fn random_fiber_vector(calc: &SpinorCalculus, max_level: usize, rng: &mut ChaCha8Rng) -> FiberVector {
    let basis = calc.basis().clone();
    let keep = basis.dim_up_to(max_level);
    let coeffs = DVector::from_fn(basis.dim(), |i, _| {
        if i < keep {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    FiberVector::new(basis, coeffs).unwrap()
}

fn max_diff(a: &SpinorField, b: &SpinorField) -> f64 {
    let d = a.minus(b);
    d.field().iter().map(|(_, v)| v.camax()).fold(0.0, f64::max)
}

#[test]
fn flat_p_and_laplacian_act_by_fourier_symbol() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=2 {
        let cutoff = 2;
        let calc = calculus(&ModelSpec::FlatKahlerTorus { n, cutoff }, n);
        let v = random_fiber_vector(&calc, L - 2, &mut rng);
        for k in Mode::cube(2 * n, 1) {
            let phi = SpinorField::single_mode(&v, k.clone(), cutoff).unwrap();
            let expected = phi.scale(Complex64::new(4.0 * PI * PI * k.norm_sqr() as f64, 0.0));
            let scale = 1.0 + 4.0 * PI * PI * k.norm_sqr() as f64;
            assert!(max_diff(&calc.p_operator(&phi).unwrap(), &expected) < 1e-11 * scale, "P at {k:?}");
            assert!(
                max_diff(&calc.connection_laplacian(&phi).unwrap(), &expected) < 1e-11 * scale,
                "∇*∇ at {k:?}"
            );
        }
    }
}

/// On the flat torus `∇_{e_a}` multiplies mode `k` by `2πi k_a`, so
/// `D(e^{2πik·x}v) = 2πi Σ_j (k_{n+j} σ(e_j) − k_j σ(e_{n+j})) v`.
#[test]
fn flat_dirac_symbol_from_generators() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 1;
    let cutoff = 2;
    let calc = calculus(&ModelSpec::FlatKahlerTorus { n, cutoff }, n);
    let v = random_fiber_vector(&calc, L - 1, &mut rng);
    for k in Mode::cube(2, 2) {
        let ks = k.components();
        let mut sym = calc.fiber().generator(0).map(|z| z * ks[1] as f64);
        sym -= calc.fiber().generator(1).map(|z| z * ks[0] as f64);
        let w = sym.map(|z| z * Complex64::new(0.0, 2.0 * PI)) * v.coeffs();
        let expected = SpinorField::single_mode(&FiberVector::new(calc.basis().clone(), w).unwrap(), k.clone(), cutoff)
            .unwrap();
        let phi = SpinorField::single_mode(&v, k.clone(), cutoff).unwrap();
        let got = calc.dirac(&phi, DiracVariant::D).unwrap();
        assert!(max_diff(&got, &expected) < 1e-11, "mode {k:?}");
    }
}

#[test]
fn flat_golden_spectrum_small_cutoff() {
    let calc = calculus(&ModelSpec::FlatKahlerTorus { n: 1, cutoff: 1 }, 1);
    let spec = calc.spectrum(OperatorName::P, None).unwrap();
    // P raises the level by 2 on a J-parallel model, so the trial levels stop at L − 2.
    let per_mode = L - 2 + 1;
    assert_eq!(spec.max_level, L - 2);
    assert_eq!(spec.entries.len(), 9 * per_mode);
    let mut counts = [0usize; 3];
    for e in &spec.entries {
        let m = (e.value / (4.0 * PI * PI)).round();
        assert!((e.value - 4.0 * PI * PI * m).abs() < 1e-9, "eigenvalue {}", e.value);
        counts[m as usize] += 1;
    }
    assert_eq!(counts, [per_mode, 4 * per_mode, 4 * per_mode]);
    assert!(spec.min().unwrap() >= -1e-10);
}

#[test]
fn constant_curvature_fiber_ladder() {
    for n in 1..=2 {
        for h in [-2.0, 0.0, 1.0] {
            let calc = calculus(&ModelSpec::ChscFiber { n, h }, n);
            let nf = n as f64;
            let r = calc.ricci().scalar.get(&Mode::zero(2 * n)).map_or(0.0, |z| z.re);
            assert!((r - h * nf * (nf + 1.0)).abs() < 1e-12, "scalar curvature n={n} h={h}");

            let vac = calc.spectrum(OperatorName::P, Some(0)).unwrap();
            assert_eq!(vac.entries.len(), 1);
            assert!((vac.entries[0].value + h / 4.0 * nf * (nf + 1.0)).abs() < 1e-12, "vacuum n={n} h={h}");

            let full = calc.spectrum(OperatorName::P, None).unwrap();
            for e in &full.entries {
                let level = e.level as f64;
                let want = h / 4.0 * nf * (nf - 1.0) - 2.0 * h * (level + nf / 2.0).powi(2);
                assert!((e.value - want).abs() < 1e-10 * (1.0 + want.abs()), "level {} n={n} h={h}", e.level);
            }
        }
    }
}

fn adjointness_by_inner(calc: &SpinorCalculus, variant: DiracVariant, rng: &mut ChaCha8Rng) -> f64 {
    let level = calc.protected_level(calc.dirac_raise()).unwrap().min(L - 3);
    let phi = calc.random_field(level, rng);
    let psi = calc.random_field(level, rng);
    let lhs = calc.inner(&calc.dirac(&phi, variant).unwrap(), &psi);
    let rhs = calc.inner(&phi, &calc.dirac(&psi, variant).unwrap());
    (lhs - rhs).norm() / (calc.norm(&phi) * calc.norm(&psi))
}

fn perturbed(which: u8, seed: u64) -> ModelSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match which {
        0 => ModelSpec::warped_cosine(1, 2, 0.3),
        1 => ModelSpec::random_symmetric_fedosov(1, 2, 0.05, &mut rng),
        _ => ModelSpec::random_torsion(1, 2, 0.05, &mut rng),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn dirac_is_self_adjoint_and_uncorrected_is_not(which in 0u8..3, seed in any::<u64>()) {
        let calc = calculus(&perturbed(which, seed), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        prop_assert!(adjointness_by_inner(&calc, DiracVariant::D, &mut rng) < 1e-10);
        if which != 1 {
            // κ♯ + τ ≠ 0 on the warped and torsion models.
            prop_assert!(adjointness_by_inner(&calc, DiracVariant::Dprime, &mut rng) > 1e-9);
        }
    }

    #[test]
    fn laplacian_two_paths_agree(which in 0u8..3, seed in any::<u64>()) {
        let calc = calculus(&perturbed(which, seed), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let level = calc.protected_level(2 * calc.connection_raise()).unwrap().min(L - 3);
        let phi = calc.random_field(level, &mut rng);
        let psi = calc.random_field(level, &mut rng);
        prop_assert!(calc.connection_laplacian_two_path_residual(&phi, &psi).unwrap() < 1e-9);
    }

    #[test]
    fn general_weitzenbock_on_perturbed_models(which in 1u8..3, j_compatible in any::<bool>(), seed in any::<u64>()) {
        let mut model = build_model(&perturbed(which, seed)).unwrap();
        if j_compatible {
            model = model.with_j_compatible_connection().unwrap();
        }
        let calc = SpinorCalculus::new(model, FiberBasis::new(1, L).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let level = calc.protected_level(calc.p_raise()).unwrap().min(L - 3);
        let phi = calc.random_field(level, &mut rng);
        let r = calc.weitzenbock_residual(&phi, WeitzenbockFormula::General).unwrap();
        prop_assert!(r.relative < 1e-8, "residual {}", r.relative);
    }
}
