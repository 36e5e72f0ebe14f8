use chhard_core::{ChannelTensor, Complex64, Dims, TensorMeta};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random tensor with a random positive power level per antenna, so that
/// gain-based orders differ from index order.
pub fn fuzz_tensor(dims: Dims, seed: u64) -> ChannelTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels: Vec<f64> = (0..dims.antennas)
        .map(|_| rng.gen_range(0.05..4.0))
        .collect();
    let meta = TensorMeta {
        scenario_label: "fuzz".into(),
        ..TensorMeta::default()
    };
    ChannelTensor::from_fn(dims, meta, |_, _, _, m| {
        let a = levels[m];
        Complex64::new(a * rng.gen_range(-1.0..1.0), a * rng.gen_range(-1.0..1.0))
    })
    .unwrap()
}
