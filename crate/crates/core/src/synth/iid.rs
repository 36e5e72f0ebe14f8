use super::complex_normal;
use super::seed::{rng_from, SeedPath, STREAM_USER};
use crate::error::Result;
use crate::tensor::{ChannelTensor, Dims, TensorMeta};

fn reference_meta(label: &str) -> TensorMeta {
    TensorMeta {
        scenario_label: label.into(),
        array_id: "iid".into(),
        ..TensorMeta::default()
    }
}

/// Independent CN(0,1) samples over every (k, n, f, m).
pub fn gen_iid_gaussian(
    users: usize,
    snapshots: usize,
    freqs: usize,
    antennas: usize,
    seed: u64,
) -> Result<ChannelTensor> {
    let dims = Dims::new(users, snapshots, freqs, antennas);
    let per_user = snapshots * freqs * antennas;
    let root = SeedPath::root(seed).child(STREAM_USER);
    let mut samples = Vec::with_capacity(dims.len());
    for k in 0..users {
        let mut rng = rng_from(root.child(k as u64));
        samples.extend((0..per_user).map(|_| complex_normal(&mut rng)));
    }
    ChannelTensor::new(dims, samples, reference_meta("iid_gaussian"))
}

/// Keyhole channel `h_m(n,f) = g(n,f)·a_m(n,f)`: one scalar CN(0,1)
/// bottleneck shared by all antennas, times i.i.d. CN(0,1) per antenna.
pub fn gen_keyhole(
    snapshots: usize,
    freqs: usize,
    antennas: usize,
    seed: u64,
) -> Result<ChannelTensor> {
    let dims = Dims::new(1, snapshots, freqs, antennas);
    let mut rng = rng_from(SeedPath::root(seed).child(STREAM_USER).child(0));
    let mut samples = Vec::with_capacity(dims.len());
    for _ in 0..snapshots * freqs {
        let g = complex_normal(&mut rng);
        samples.extend((0..antennas).map(|_| g * complex_normal(&mut rng)));
    }
    ChannelTensor::new(dims, samples, reference_meta("keyhole"))
}
