use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use hurst_bench::fixture;
use hurst_core::{estimate, FgnGenerator, FgnModel, Method};
use std::hint::black_box;

fn synthesis(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate");
    for log2_n in [10u32, 13, 16] {
        let n = 1usize << log2_n;
        let generator = FgnGenerator::new(FgnModel::new(0.8, 1.0).unwrap(), n).unwrap();
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &generator, |b, g| {
            let mut seed = 0u64;
            b.iter(|| {
                seed += 1;
                black_box(g.generate(seed))
            })
        });
    }
    group.finish();
}

fn estimators(c: &mut Criterion) {
    for log2_n in [10u32, 14] {
        let series = fixture(0.8, log2_n);
        let mut group = c.benchmark_group(format!("estimate/2^{log2_n}"));
        group.throughput(Throughput::Elements(series.len() as u64));
        for method in Method::ALL {
            group.bench_function(method.as_str(), |b| {
                b.iter(|| black_box(estimate(black_box(&series), method).unwrap()))
            });
        }
        group.finish();
    }
}

criterion_group!(benches, synthesis, estimators);
criterion_main!(benches);
