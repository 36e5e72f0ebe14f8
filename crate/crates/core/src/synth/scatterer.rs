//! Finite-scatterer physical channel: P plane waves with CN(0,1)
//! coefficients, directions uniform on the sphere and uniform delays.
//! Each snapshot is an independent redraw of the whole path set, so
//! averages over snapshots are ensemble averages.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, UnitSphere};

use super::complex_normal;
use super::seed::{rng_from, SeedPath, STREAM_DRAW};
use crate::arrays::{dot, ArrayGeometry, Vec3, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::numeric::frequency_grid;
use crate::tensor::{ChannelTensor, Dims, TensorMeta};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScattererOptions {
    pub bandwidth_hz: f64,
    pub max_delay_s: f64,
}

impl Default for ScattererOptions {
    fn default() -> Self {
        Self {
            bandwidth_hz: 40e6,
            max_delay_s: 500e-9,
        }
    }
}

/// One realization of the path set.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    pub gains: Vec<Complex64>,
    pub directions: Vec<Vec3>,
    pub delays: Vec<f64>,
}

impl PathSet {
    pub fn draw<R: Rng + ?Sized>(paths: usize, max_delay_s: f64, rng: &mut R) -> Self {
        let mut set = PathSet {
            gains: Vec::with_capacity(paths),
            directions: Vec::with_capacity(paths),
            delays: Vec::with_capacity(paths),
        };
        for _ in 0..paths {
            set.gains.push(complex_normal(rng));
            set.directions.push(UnitSphere.sample(rng));
            set.delays.push(rng.gen::<f64>() * max_delay_s);
        }
        set
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }
}

pub fn gen_finite_scatterer(
    paths: usize,
    geometry: &ArrayGeometry,
    snapshots: usize,
    freqs: usize,
    seed: u64,
) -> Result<ChannelTensor> {
    gen_finite_scatterer_with(
        paths,
        geometry,
        snapshots,
        freqs,
        seed,
        &ScattererOptions::default(),
    )
}

/// `H_m(f) = Σ_p c_p·a_m(Ω_p)·exp(−j2πfτ_p)`, redrawn for every snapshot.
pub fn gen_finite_scatterer_with(
    paths: usize,
    geometry: &ArrayGeometry,
    snapshots: usize,
    freqs: usize,
    seed: u64,
    options: &ScattererOptions,
) -> Result<ChannelTensor> {
    if paths == 0 {
        return Err(Error::InvalidArgument("path count must be >= 1".into()));
    }
    if geometry.is_empty() {
        return Err(Error::InvalidArgument("array has no elements".into()));
    }
    let antennas = geometry.len();
    let dims = Dims::new(1, snapshots, freqs, antennas);
    let grid = frequency_grid(freqs, options.bandwidth_hz);
    let k = 2.0 * PI * geometry.carrier_hz / SPEED_OF_LIGHT;
    let root = SeedPath::root(seed).child(STREAM_DRAW);
    let mut samples = vec![Complex64::new(0.0, 0.0); dims.len()];
    let mut steer = vec![Complex64::new(0.0, 0.0); antennas];
    for (n, block) in samples.chunks_exact_mut(freqs * antennas).enumerate() {
        let mut rng = rng_from(root.child(n as u64));
        let set = PathSet::draw(paths, options.max_delay_s, &mut rng);
        for p in 0..set.len() {
            for (s, e) in steer.iter_mut().zip(&geometry.elements) {
                *s = Complex64::from_polar(1.0, -k * dot(e.position, set.directions[p]));
            }
            for (f, row) in block.chunks_exact_mut(antennas).enumerate() {
                let w =
                    set.gains[p] * Complex64::from_polar(1.0, -2.0 * PI * grid[f] * set.delays[p]);
                for (h, s) in row.iter_mut().zip(&steer) {
                    *h += w * s;
                }
            }
        }
    }
    let meta = TensorMeta {
        carrier_freq_hz: geometry.carrier_hz,
        bandwidth_hz: options.bandwidth_hz,
        snapshot_rate_hz: 0.0,
        scenario_label: format!("finite_scatterer_p{paths}"),
        array_id: geometry.id.clone(),
    };
    ChannelTensor::new(dims, samples, meta)
}
