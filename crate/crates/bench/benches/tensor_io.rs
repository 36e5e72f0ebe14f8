use criterion::{black_box, criterion_group, criterion_main, Criterion, Throughput};

use chhard_core::io::{decode_tensor, encode_tensor};
use chhard_core::synth::gen_iid_gaussian;

fn bench(c: &mut Criterion) {
    let t = gen_iid_gaussian(1, 300, 129, 128, 4).unwrap();
    let bytes = encode_tensor(&t);
    let mut group = c.benchmark_group("tensor file");
    group.throughput(Throughput::Bytes(bytes.len() as u64));
    group.bench_function("encode 300x129x128", |b| {
        b.iter(|| encode_tensor(black_box(&t)))
    });
    group.bench_function("decode 300x129x128", |b| {
        b.iter(|| decode_tensor(black_box(&bytes)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
