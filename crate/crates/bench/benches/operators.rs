use criterion::{black_box, criterion_group, criterion_main, Criterion};
use tsdirac_bench::{calculus, protected_field, torsion, warped};
use tsdirac_core::fiber::{FiberBasis, WeylFiber};
use tsdirac_core::spinor::OperatorName;
use tsdirac_core::verify::{run_suite, SuiteConfig};
use tsdirac_core::{DiracVariant, ModelSpec, WeitzenbockFormula};

fn fiber(c: &mut Criterion) {
    for n in [1, 2] {
        c.bench_function(&format!("weyl_fiber n={n} L=8"), |b| {
            b.iter(|| WeylFiber::new(FiberBasis::new(black_box(n), 8).unwrap()))
        });
    }
}

fn operators(c: &mut Criterion) {
    let calc = calculus(&warped(1, 2), 8);
    let phi = protected_field(&calc, calc.p_raise(), 1);
    c.bench_function("dirac warped n=1 K=2", |b| b.iter(|| calc.dirac(black_box(&phi), DiracVariant::D).unwrap()));
    c.bench_function("p_operator warped n=1 K=2", |b| b.iter(|| calc.p_operator(black_box(&phi)).unwrap()));

    let calc = calculus(&torsion(1, 2, 3), 8);
    let phi = protected_field(&calc, calc.p_raise(), 2);
    c.bench_function("weitzenbock_general torsion n=1 K=2", |b| {
        b.iter(|| calc.weitzenbock_residual(black_box(&phi), WeitzenbockFormula::General).unwrap())
    });
}

fn spectra(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectrum");
    g.sample_size(10);
    let flat = calculus(&ModelSpec::FlatKahlerTorus { n: 1, cutoff: 2 }, 8);
    g.bench_function("P flat n=1 K=2", |b| b.iter(|| flat.spectrum(OperatorName::P, None).unwrap()));
    let warped = calculus(&warped(1, 2), 8);
    g.bench_function("D warped n=1 K=2", |b| b.iter(|| warped.spectrum(OperatorName::D, None).unwrap()));
    g.finish();
}

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_suite");
    g.sample_size(10);
    for model in ["flat-kahler-torus", "torsion-perturbed-symplectic", "chsc-fiber"] {
        let cfg = SuiteConfig { model: model.into(), ..Default::default() };
        g.bench_function(model, |b| b.iter(|| run_suite(black_box(&cfg)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, fiber, operators, spectra, suites);
criterion_main!(benches);
