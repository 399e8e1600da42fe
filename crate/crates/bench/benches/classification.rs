use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gou_core::classification::{feasible_u_set, is_subordinator_s, no_ruin_threshold};
use gou_core::corpus;
use std::hint::black_box;

fn threshold(c: &mut Criterion) {
    let mut g = c.benchmark_group("no_ruin_threshold");
    for (name, t) in gou_bench::triplets(2) {
        g.bench_with_input(BenchmarkId::from_parameter(&name), &t, |b, t| b.iter(|| no_ruin_threshold(black_box(t))));
    }
    g.finish();
}

fn corpus_sweep(c: &mut Criterion) {
    let ts = corpus::corpus(gou_bench::CORPUS_SEED, 100);
    c.bench_function("feasible_u_set/100 triplets", |b| {
        b.iter(|| ts.iter().map(|t| feasible_u_set(black_box(t)).map(|f| f.set.parts().len()).unwrap_or(0)).sum::<usize>())
    });
    c.bench_function("is_subordinator_s/100 triplets x 11 u", |b| {
        b.iter(|| {
            let mut yes = 0;
            for t in &ts {
                for k in 0..11 {
                    let u = -2.5 + 0.5 * k as f64;
                    yes += usize::from(is_subordinator_s(t, u).map(|c| c.failing_condition.is_none()).unwrap_or(false));
                }
            }
            yes
        })
    });
}

criterion_group!(benches, threshold, corpus_sweep);
criterion_main!(benches);
