use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dlh_bench::{cube, grid, loop_of, point, small_box, window};
use dlh_core::connection::{contract_tangent, window_matrix};
use dlh_core::displaced::displacement_matrix;
use dlh_core::holonomy::{holonomy_path_ordered, HolonomyOptions, PathKind, Scheme};
use dlh_core::linalg::C64;
use dlh_core::oracle::{build_level_grid, wilson_loop_oracle};
use dlh_core::{ControlParam, Couplings, FockBasis, SignConvention, Sigma};

fn displacement(c: &mut Criterion) {
    let mut group = c.benchmark_group("displacement_matrix");
    for n_max in [6usize, 10, 14] {
        let basis = FockBasis::new(n_max, n_max, Sigma::Plus);
        group.bench_with_input(BenchmarkId::from_parameter(n_max), &basis, |b, basis| {
            b.iter(|| displacement_matrix(black_box(C64::new(0.3, -0.2)), basis).unwrap())
        });
    }
    group.finish();
}

fn connection(c: &mut Criterion) {
    let p = point();
    let conv = SignConvention::RESOLVED;
    c.bench_function("window_matrix/lambda/0..16", |b| {
        b.iter(|| window_matrix(ControlParam::Lambda, black_box(&p), &Couplings::NATURAL, window(16), &conv).unwrap())
    });
    c.bench_function("contract_tangent/0..16", |b| {
        b.iter(|| contract_tangent(black_box(&p), [0.1, 0.2, 0.3, 0.4], &Couplings::NATURAL, window(16), &conv).unwrap())
    });
}

fn holonomy(c: &mut Criterion) {
    let path = loop_of(PathKind::Abchefa, &cube());
    let mut group = c.benchmark_group("holonomy_path_ordered");
    for (scheme, steps) in [(Scheme::Midpoint, 1024), (Scheme::Magnus4, 256), (Scheme::Magnus4, 1024)] {
        let opts = HolonomyOptions::default().with_steps(steps).with_scheme(scheme);
        group.bench_with_input(BenchmarkId::new(scheme.to_string(), steps), &opts, |b, opts| {
            b.iter(|| holonomy_path_ordered(black_box(&path), &Couplings::NATURAL, window(3), opts).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    let g = grid(128);
    group.bench_function("build_level_grid/n1/m0..3", |b| {
        b.iter(|| build_level_grid(1, 3, black_box(1.0), Sigma::Plus, &g).unwrap())
    });
    let path = loop_of(PathKind::FourParamBox, &small_box());
    group.bench_function("wilson_loop/box4/16", |b| {
        b.iter(|| wilson_loop_oracle(black_box(&path), 0, window(1), 16, Sigma::Plus, &g).unwrap())
    });
    group.finish();
}

criterion_group!(benches, displacement, connection, holonomy, oracle);
criterion_main!(benches);
