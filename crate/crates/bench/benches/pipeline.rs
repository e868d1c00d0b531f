use criterion::{black_box, criterion_group, criterion_main, Criterion};

use refmeta::meta::{loo_q_sensitivity, pool_fixed_iv, pool_ivhet, pool_random_effects};
use refmeta::report::{render_forest, ForestPlotSpec};

fn pooling(c: &mut Criterion) {
    let regions = refmeta_bench::region_estimates();
    c.bench_function("pool_fixed_iv_13", |b| {
        b.iter(|| pool_fixed_iv(black_box(&regions)).unwrap())
    });
    c.bench_function("pool_ivhet_13", |b| {
        b.iter(|| pool_ivhet(black_box(&regions)).unwrap())
    });
    c.bench_function("pool_random_effects_13", |b| {
        b.iter(|| pool_random_effects(black_box(&regions)).unwrap())
    });
    c.bench_function("loo_q_sensitivity_13", |b| {
        b.iter(|| loo_q_sensitivity(black_box(&regions)).unwrap())
    });
}

fn ingestion(c: &mut Criterion) {
    let csv = refmeta::fixtures::BREXIT_AREAS_CSV;
    c.bench_function("ingest_382_areas", |b| {
        b.iter(|| refmeta::ingest_reader(black_box(csv.as_bytes())).unwrap())
    });
}

fn rendering(c: &mut Criterion) {
    let regions = refmeta_bench::region_estimates();
    let pooled = pool_random_effects(&regions).unwrap();
    let spec = ForestPlotSpec::from_result("bench", &regions, &pooled).unwrap();
    c.bench_function("render_forest_13", |b| {
        b.iter(|| render_forest(black_box(&spec)).unwrap())
    });
}

criterion_group!(benches, pooling, ingestion, rendering);
criterion_main!(benches);
