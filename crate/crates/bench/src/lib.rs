//! Fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tsdirac_core::{build_model, FiberBasis, ModelSpec, SpinorCalculus, SpinorField};

/// Calculus for a catalog model at fiber level `level`.
pub fn calculus(spec: &ModelSpec, level: usize) -> SpinorCalculus {
    let model = build_model(spec).expect("catalog model builds");
    let n = model.n();
    SpinorCalculus::new(model, FiberBasis::new(n, level).expect("valid level")).expect("matching n")
}

pub fn warped(n: usize, cutoff: i32) -> ModelSpec {
    ModelSpec::warped_cosine(n, cutoff, 0.3)
}

pub fn torsion(n: usize, cutoff: i32, seed: u64) -> ModelSpec {
    ModelSpec::random_torsion(n, cutoff, 0.05, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A random field protected for an operator raising the level by `raise`.
pub fn protected_field(calc: &SpinorCalculus, raise: usize, seed: u64) -> SpinorField {
    let level = calc.protected_level(raise).expect("level large enough");
    calc.random_field(level, &mut ChaCha8Rng::seed_from_u64(seed))
}
