use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gauss_local::functions::FunctionSpec;
use gauss_local::operators::{frac_integral, frac_maximal, sharp_maximal, OperatorParams};
use gauss_local::{Ball, GaussContext, Point, QuadratureConfig};
use std::hint::black_box;

fn bench_gauss_ball(c: &mut Criterion) {
    let mut group = c.benchmark_group("gauss_ball");
    for dim in [1usize, 2, 3] {
        let ctx = GaussContext::new(dim, QuadratureConfig::default()).unwrap();
        let mut center = vec![0.0; dim];
        center[0] = 1.5;
        let ball = Ball::new(Point::new(center).unwrap(), 0.4).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, _| {
            b.iter(|| ctx.gauss_ball(black_box(&ball)).unwrap())
        });
    }
    group.finish();
}

fn bench_integrate(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate_gauss");
    for dim in [1usize, 2, 3] {
        let ctx = GaussContext::new(dim, QuadratureConfig::default()).unwrap();
        let f = FunctionSpec::squared_norm();
        let ball = Ball::new(Point::origin(dim), 0.8).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, _| {
            b.iter(|| gauss_local::integrate_gauss(&ctx, black_box(&f), &ball).unwrap())
        });
    }
    group.finish();
}

fn bench_operators(c: &mut Criterion) {
    let ctx = GaussContext::new(1, QuadratureConfig::default()).unwrap();
    let params = OperatorParams::new(1.0, 0.5).unwrap();
    let one = FunctionSpec::constant(1.0);
    let bump = FunctionSpec::gaussian_bump(Point::origin(1), 0.6);
    let x = Point::new(vec![0.4]).unwrap();
    c.bench_function("frac_integral_1d", |b| {
        b.iter(|| frac_integral(&ctx, &params, black_box(&one), &x).unwrap())
    });
    c.bench_function("frac_maximal_1d", |b| {
        b.iter(|| frac_maximal(&ctx, &params, black_box(&bump), &x).unwrap())
    });
    c.bench_function("sharp_maximal_1d", |b| {
        b.iter(|| sharp_maximal(&ctx, black_box(&bump), &x, &params.grid).unwrap())
    });
}

fn bench_mc(c: &mut Criterion) {
    let mut cfg = QuadratureConfig::default();
    cfg.mc_samples = 10_000;
    let ctx = GaussContext::new(2, cfg).unwrap();
    let ball = Ball::new(Point::new(vec![0.5, -0.2]).unwrap(), 0.7).unwrap();
    let f = FunctionSpec::squared_norm();
    c.bench_function("mc_integrate_10k_2d", |b| {
        b.iter(|| gauss_local::mc_integrate(&ctx, black_box(&f), &ball).unwrap())
    });
}

criterion_group!(benches, bench_gauss_ball, bench_integrate, bench_operators, bench_mc);
criterion_main!(benches);
