use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gmfbm_core::gmfbm::exact_cov_oracle;
use gmfbm_core::mclab::{corr_curve_oracle, estimate_cov, McConfig};
use gmfbm_core::subordinators::tss_moment;
use gmfbm_core::{GmfbmParams, SubordinatorSpec, TimeChangedSpec, TimeGrid, TssParams};

fn bench_tss_moment(c: &mut Criterion) {
    let mut group = c.benchmark_group("tss_moment");
    let p = TssParams::new(0.7, 1.0).unwrap();
    for t in [1.0, 1e2, 1e4] {
        group.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| tss_moment(&p, black_box(t), 1.1).unwrap())
        });
    }
    group.finish();
}

fn bench_oracles(c: &mut Criterion) {
    let spec = TimeChangedSpec::new(
        GmfbmParams::new(1.0, 1.0, 0.55, 0.8).unwrap(),
        SubordinatorSpec::tss(0.7, 1.0).unwrap(),
    );
    c.bench_function("exact_cov_oracle", |b| b.iter(|| exact_cov_oracle(&spec, 1.0, black_box(100.0)).unwrap()));
    let grid = TimeGrid::geometric(1e2, 1e4, 12).unwrap();
    c.bench_function("corr_curve_oracle_12", |b| b.iter(|| corr_curve_oracle(&spec, 1.0, grid.times()).unwrap()));

    let mut group = c.benchmark_group("estimate_cov");
    group.sample_size(10);
    for n in [1_000usize, 10_000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| estimate_cov(&spec, 1.0, 10.0, &McConfig::new(n, 1)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_tss_moment, bench_oracles);
criterion_main!(benches);
