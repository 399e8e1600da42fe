use criterion::{criterion_group, criterion_main, Criterion};
use gou_core::estimation::{estimate_ruin_batch, McConfig};
use gou_core::simulator::{PathConfig, Simulator, SummaryOptions, ZScheme};
use gou_core::presets;
use std::hint::black_box;

fn paths(c: &mut Criterion) {
    let cont = presets::continuous_example(0.0);
    let sim = Simulator::new(&cont, PathConfig::new(1.0, 1e-3, 1).unwrap()).unwrap();
    c.bench_function("grid path/continuous T=1 step=1e-3", |b| {
        b.iter(|| sim.path_with(black_box(3), 1.0, ZScheme::auto(&cont)))
    });
    c.bench_function("grid summary/continuous T=1 step=1e-3", |b| {
        b.iter(|| sim.summary(black_box(3), &[0.5, 1.0], SummaryOptions::default()))
    });

    let jump = presets::jump_example(1.0, 1.0);
    let sim = Simulator::new(&jump, PathConfig::new(1000.0, 1.0, 1).unwrap()).unwrap();
    c.bench_function("event-driven summary/jump T=1000", |b| {
        b.iter(|| sim.summary(black_box(3), &[0.5, 1.7], SummaryOptions::default()))
    });
}

fn estimators(c: &mut Criterion) {
    let jump = presets::jump_example(1.0, 1.0);
    let cfg = McConfig::new(100.0, 1.0, 1, 1000).unwrap();
    let mut g = c.benchmark_group("estimators");
    g.sample_size(10);
    g.bench_function("ruin/jump T=100 n=1000", |b| b.iter(|| estimate_ruin_batch(&jump, black_box(&[0.5, 1.7]), &cfg)));
    g.finish();
}

criterion_group!(benches, paths, estimators);
criterion_main!(benches);
