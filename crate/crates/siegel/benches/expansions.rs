//! Benchmarks for the expansion kernels. Group names are prefixed with the
//! active execution mode so that runs with `--features parallel` (the
//! default) and `--no-default-features` land in comparable criterion
//! groups:
//!
//!   cargo bench -p siegel
//!   cargo bench -p siegel --no-default-features

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use siegel::eisenstein::eis_deg2;
use siegel::quadforms::{e8_twice_gram, enumerate_classes, epsilon, Gram};
use siegel::theta::theta_qexp;

fn mode() -> &'static str {
    if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "sequential"
    }
}

fn bench_eisenstein(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("{}/eis_deg2", mode()));
    group.sample_size(10);
    for bound in [4i64, 6] {
        group.bench_with_input(BenchmarkId::from_parameter(bound), &bound, |b, &bound| {
            b.iter(|| eis_deg2(4, bound).unwrap());
        });
    }
    group.finish();
}

fn bench_theta(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("{}/theta", mode()));
    group.sample_size(10);
    let e8 = e8_twice_gram();
    group.bench_function("e8_deg2_b3", |b| {
        b.iter(|| theta_qexp(&e8, 2, 3).unwrap());
    });
    let hex = Gram::binary(1, 1, 2);
    group.bench_function("hex_deg2_b12", |b| {
        b.iter(|| theta_qexp(&hex, 2, 12).unwrap());
    });
    group.finish();
}

fn bench_classes(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("{}/classes", mode()));
    group.sample_size(10);
    group.bench_function("quaternary_det2401", |b| {
        b.iter(|| enumerate_classes(4, 2401, 7).unwrap());
    });
    group.bench_function("epsilon_hex", |b| {
        let hex = Gram::binary(1, 1, 2);
        b.iter(|| epsilon(&hex));
    });
    group.finish();
}

criterion_group!(benches, bench_eisenstein, bench_theta, bench_classes);
criterion_main!(benches);
