use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use msolab::characterize::{
    check_adtto, recover_symbol, solve_shift_invariant_space, OperatorSpace,
};
use msolab::operators::build_dtto;
use msolab::rng::{case_rng, random_blaschke, random_symbol};
use msolab::{BlaschkeProduct, LaurentPolynomial, RecoveryMethod, SymbolFunction, C64};

fn bench_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_dtto");
    let z2 = BlaschkeProduct::monomial(2).unwrap();
    let phi = SymbolFunction::new(LaurentPolynomial::from_terms([
        (-1, C64::new(1.0, 0.0)),
        (2, C64::new(0.0, 1.0)),
    ]));
    for m in [32, 128, 256] {
        group.bench_with_input(BenchmarkId::new("monomial", m), &m, |b, &m| {
            b.iter(|| build_dtto(black_box(&z2), &z2, &phi, m).unwrap())
        });
    }
    let mut rng = case_rng(1, 0, 0);
    let theta = random_blaschke(&mut rng, 3, 0.8);
    let alpha = random_blaschke(&mut rng, 3, 0.8);
    let phi = SymbolFunction::new(random_symbol(&mut rng, 4));
    let m = theta.guard() + alpha.guard() + phi.degree() + 6;
    group.bench_function(BenchmarkId::new("blaschke", m), |b| {
        b.iter(|| build_dtto(black_box(&theta), &alpha, &phi, m).unwrap())
    });
    group.finish();
}

fn bench_checks(c: &mut Criterion) {
    let mut rng = case_rng(2, 0, 0);
    let theta = random_blaschke(&mut rng, 3, 0.8);
    let alpha = random_blaschke(&mut rng, 3, 0.8);
    let phi = SymbolFunction::new(random_symbol(&mut rng, 4));
    let d = build_dtto(
        &theta,
        &alpha,
        &phi,
        theta.guard() + alpha.guard() + phi.degree() + 6,
    )
    .unwrap();
    c.bench_function("check_adtto", |b| {
        b.iter(|| check_adtto(black_box(&d), None).unwrap())
    });
    for method in [RecoveryMethod::Boundary, RecoveryMethod::Zbar] {
        c.bench_function(&format!("recover_symbol/{method}"), |b| {
            b.iter(|| recover_symbol(black_box(&d), method).unwrap())
        });
    }
}

fn bench_solve(c: &mut Criterion) {
    let z2 = BlaschkeProduct::monomial(2).unwrap();
    let z4 = BlaschkeProduct::monomial(4).unwrap();
    c.bench_function("solve_shift_invariant/model_4x4", |b| {
        b.iter(|| solve_shift_invariant_space(black_box(&z4), &z4, OperatorSpace::Model).unwrap())
    });
    let mut group = c.benchmark_group("solve_shift_invariant");
    group.sample_size(10);
    group.bench_function("kperp_z2_M10", |b| {
        b.iter(|| {
            solve_shift_invariant_space(black_box(&z2), &z2, OperatorSpace::ModelPerp { m: 10 })
                .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_build, bench_checks, bench_solve);
criterion_main!(benches);
