use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use tsdirac_core::fiber::{binomial, omega, FiberBasis, WeylFiber};
use tsdirac_core::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Position and derivative on orthonormal Hermite functions, n = 1:
/// x h_m = √((m+1)/2) h_{m+1} + √(m/2) h_{m−1},
/// ∂ h_m = −√((m+1)/2) h_{m+1} + √(m/2) h_{m−1}.
fn hermite_x_and_d(size: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut x = DMatrix::zeros(size, size);
    let mut d = DMatrix::zeros(size, size);
    for m in 0..size {
        if m + 1 < size {
            let up = ((m + 1) as f64 / 2.0).sqrt();
            x[(m + 1, m)] = up;
            d[(m + 1, m)] = -up;
        }
        if m > 0 {
            let down = (m as f64 / 2.0).sqrt();
            x[(m - 1, m)] = down;
            d[(m - 1, m)] = down;
        }
    }
    (x, d)
}

#[test]
fn generators_match_hermite_recursion() {
    let l = 8;
    let fiber = WeylFiber::new(FiberBasis::new(1, l).unwrap());
    let (x, d) = hermite_x_and_d(l + 1);
    let ix = x.map(|v| Complex64::new(0.0, v));
    let d = d.map(c);
    assert!((fiber.generator(0) - ix).camax() < 1e-14);
    assert!((fiber.generator(1) - d).camax() < 1e-14);
}

#[test]
fn hamilton_is_minus_oscillator_in_hermite_basis() {
    // ½(σ(e)² + σ(f)²) = ½(∂² − x²) = −(m + ½) on h_m; the truncated
    // product is exact on columns ≤ L − 1.
    let l = 10;
    let fiber = WeylFiber::new(FiberBasis::new(1, l).unwrap());
    let g0 = fiber.generator(0);
    let g1 = fiber.generator(1);
    let half = (g0 * g0 + g1 * g1).map(|z| z * 0.5);
    for m in 0..l {
        for r in 0..=l {
            let want = if r == m { -(m as f64 + 0.5) } else { 0.0 };
            assert!((half[(r, m)] - c(want)).norm() < 1e-13, "entry ({r},{m})");
        }
    }
}

/// Level multiplicities by brute enumeration of multi-indices.
fn enumerate_levels(n: usize, max: usize) -> Vec<usize> {
    let mut counts = vec![0; max + 1];
    let total = (max + 1).pow(n as u32);
    for code in 0..total {
        let mut rest = code;
        let mut level = 0;
        for _ in 0..n {
            level += rest % (max + 1);
            rest /= max + 1;
        }
        if level <= max {
            counts[level] += 1;
        }
    }
    counts
}

#[test]
fn level_multiplicities_match_enumeration() {
    for n in 1..=3 {
        let basis = FiberBasis::new(n, 8).unwrap();
        let counts = enumerate_levels(n, 8);
        for (level, &count) in counts.iter().enumerate() {
            assert_eq!(basis.level_range(level).unwrap().len(), count);
            assert_eq!(binomial(n + level - 1, level), count);
        }
        assert_eq!(basis.dim(), counts.iter().sum::<usize>());
    }
}

#[test]
fn hamilton_diagonal_values() {
    for n in 1..=2 {
        let fiber = WeylFiber::new(FiberBasis::new(n, 8).unwrap());
        let h = fiber.hamilton_operator();
        for i in 0..fiber.dim() {
            let level = fiber.basis().level_of(i) as f64;
            assert_eq!(h.matrix()[(i, i)], c(-(level + n as f64 / 2.0)));
        }
    }
}

fn real_vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0_f64, 2 * n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_commutation_on_lower_levels(n in 1usize..=2, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let l = 6;
        let fiber = WeylFiber::new(FiberBasis::new(n, l).unwrap());
        let v = DVector::from_fn(2 * n, |_, _| c(rng.gen_range(-1.0..1.0)));
        let w = DVector::from_fn(2 * n, |_, _| c(rng.gen_range(-1.0..1.0)));
        let sv = fiber.clifford_matrix(&v);
        let sw = fiber.clifford_matrix(&w);
        let comm = &sv * &sw - &sw * &sv;
        let expected = Complex64::new(0.0, -1.0) * omega(&v, &w);
        let keep = fiber.basis().dim_up_to(l - 1);
        for j in 0..keep {
            for i in 0..fiber.dim() {
                let want = if i == j { expected } else { c(0.0) };
                prop_assert!((comm[(i, j)] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn clifford_multiplication_is_skew_adjoint(v in real_vector(2)) {
        let fiber = WeylFiber::new(FiberBasis::new(2, 6).unwrap());
        let m = fiber.clifford_matrix(&DVector::from_iterator(4, v.into_iter().map(c)));
        prop_assert!((&m + m.adjoint()).camax() == 0.0);
    }
}
