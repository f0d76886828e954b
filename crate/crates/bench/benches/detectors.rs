use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use qcpd_core::cpd::{
    detect_binseg, detect_ecp, detect_pelt, Bandwidth, CostKind, CostModel, EcpConfig,
};
use qcpd_core::harness::{synth_generate, SynthSpec};

fn series(n_months: usize, dims: usize) -> Vec<Vec<f64>> {
    let breaks = vec![n_months / 3, 2 * n_months / 3];
    let spec = SynthSpec::with_random_shifts("bench", n_months, dims, breaks, 5.0, 1.0, 7);
    synth_generate(&spec).unwrap().matrix
}

fn bench_detectors(c: &mut Criterion) {
    let mut group = c.benchmark_group("detectors");
    for &(n, d) in &[(60usize, 8usize), (156, 34)] {
        let data = series(n, d);
        group.bench_with_input(
            BenchmarkId::new("binseg", format!("{n}x{d}")),
            &data,
            |b, data| {
                b.iter(|| {
                    let cost = CostModel::new(data, CostKind::Rbf, Bandwidth::Auto).unwrap();
                    black_box(detect_binseg(&cost, 2, 2))
                })
            },
        );
        group.bench_with_input(
            BenchmarkId::new("pelt", format!("{n}x{d}")),
            &data,
            |b, data| {
                b.iter(|| {
                    let cost = CostModel::new(data, CostKind::Rbf, Bandwidth::Auto).unwrap();
                    black_box(detect_pelt(&cost, 1.0, 2))
                })
            },
        );
        group.bench_with_input(
            BenchmarkId::new("ecp", format!("{n}x{d}")),
            &data,
            |b, data| {
                let config = EcpConfig {
                    permutations: 49,
                    ..EcpConfig::default()
                };
                b.iter(|| black_box(detect_ecp(data, &config).unwrap()))
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_detectors);
criterion_main!(benches);
