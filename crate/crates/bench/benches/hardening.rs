use criterion::{black_box, criterion_group, criterion_main, Criterion};

use chhard_core::analysis::hardening_curve;
use chhard_core::synth::gen_iid_gaussian;
use chhard_core::{hardening, prefix_hardening, OrderLabel, SubsetSelection};

fn bench(c: &mut Criterion) {
    let t = gen_iid_gaussian(1, 300, 129, 128, 1).unwrap();
    let all = SubsetSelection::all(128).unwrap();
    c.bench_function("prefix_hardening 300x129x128", |b| {
        b.iter(|| prefix_hardening(black_box(&t), 0, &all).unwrap())
    });
    c.bench_function("strongest_first curve 300x129x128", |b| {
        b.iter(|| hardening_curve(black_box(&t), 0, OrderLabel::StrongestFirst, None).unwrap())
    });

    let small = gen_iid_gaussian(1, 300, 129, 16, 2).unwrap();
    let subsets: Vec<_> = (1..=16).map(|m| all.prefix(m).unwrap()).collect();
    let small_all = SubsetSelection::all(16).unwrap();
    let mut group = c.benchmark_group("explicit vs prefix, M=16");
    group.bench_function("explicit subsets", |b| {
        b.iter(|| hardening(black_box(&small), 0, &subsets).unwrap())
    });
    group.bench_function("prefix route", |b| {
        b.iter(|| prefix_hardening(black_box(&small), 0, &small_all).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
