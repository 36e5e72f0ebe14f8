//! Per-subset normalization, instantaneous subset gain, its standard
//! deviation and the hardening measure built from them.
//!
//! Every antenna subset is normalized on its own so that the subset gain has
//! unit mean regardless of how many antennas are selected. The standard
//! deviation of that gain is reported in dB as `10 log10(std)`; a zero
//! deviation maps to `-inf`.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{mean, pairwise_sum, population_std};
use crate::tensor::{ChannelTensor, Dims, OrderLabel, SubsetSelection, TensorMeta};

/// Relative deviations below this are floating-point residue of a constant
/// gain and are reported as exactly zero.
const ZERO_STD_FLOOR: f64 = 1e-13;

/// Channel block of one user over one antenna subset, scaled to unit
/// average power. Layout is (valid snapshot, frequency, subset antenna).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedBlock {
    snapshots: usize,
    freqs: usize,
    antennas: usize,
    data: Vec<Complex64>,
    scale: f64,
}

impl NormalizedBlock {
    pub fn snapshots(&self) -> usize {
        self.snapshots
    }

    pub fn freqs(&self) -> usize {
        self.freqs
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// The positive factor that was applied to every raw sample.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    #[inline]
    pub fn get(&self, n: usize, f: usize, m: usize) -> Complex64 {
        self.data[(n * self.freqs + f) * self.antennas + m]
    }

    /// Average of |h|² over the whole block (1 up to rounding).
    pub fn mean_power(&self) -> f64 {
        let p: Vec<f64> = self.data.iter().map(|h| h.norm_sqr()).collect();
        mean(&p)
    }

    /// Repackages the block as a single-user tensor.
    pub fn to_tensor(&self, meta: TensorMeta) -> Result<ChannelTensor> {
        ChannelTensor::new(
            Dims::new(1, self.snapshots, self.freqs, self.antennas),
            self.data.clone(),
            meta,
        )
    }
}

/// Scales the (user, subset) block to unit mean power over all valid
/// snapshots, frequencies and selected antennas.
pub fn normalize(
    tensor: &ChannelTensor,
    user: usize,
    subset: &SubsetSelection,
) -> Result<NormalizedBlock> {
    tensor.check_user(user)?;
    for &m in subset.indices() {
        if m >= tensor.antennas() {
            return Err(Error::IndexOutOfRange {
                index: m,
                antennas: tensor.antennas(),
            });
        }
    }
    let valid = tensor.valid_snapshots(user);
    if valid.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let freqs = tensor.freqs();
    let antennas = subset.len();
    let mut data = Vec::with_capacity(valid.len() * freqs * antennas);
    for &n in &valid {
        for f in 0..freqs {
            data.extend(
                subset
                    .indices()
                    .iter()
                    .map(|&m| tensor.sample(user, n, f, m)),
            );
        }
    }
    let powers: Vec<f64> = data.iter().map(|h| h.norm_sqr()).collect();
    let energy = pairwise_sum(&powers);
    if !energy.is_finite() {
        return Err(Error::NonFinite(0));
    }
    if energy <= 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let scale = 1.0 / (energy / data.len() as f64).sqrt();
    data.iter_mut().for_each(|h| *h *= scale);
    Ok(NormalizedBlock {
        snapshots: valid.len(),
        freqs,
        antennas,
        data,
        scale,
    })
}

/// Instantaneous linear gain of one user over one subset, (n, f) row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSeries {
    pub values: Vec<f64>,
    pub snapshots: usize,
    pub freqs: usize,
    pub subset_size: usize,
}

impl GainSeries {
    pub fn new(
        values: Vec<f64>,
        snapshots: usize,
        freqs: usize,
        subset_size: usize,
    ) -> Result<Self> {
        if values.len() != snapshots * freqs {
            return Err(Error::InvalidDimensions(format!(
                "gain series of length {} is not {snapshots}x{freqs}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "gain values must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            values,
            snapshots,
            freqs,
            subset_size,
        })
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    #[inline]
    pub fn get(&self, n: usize, f: usize) -> f64 {
        self.values[n * self.freqs + f]
    }
}

/// G(n,f) = (1/M) Σ_m |h̄_m(n,f)|².
pub fn subset_gain(block: &NormalizedBlock) -> GainSeries {
    let m = block.antennas;
    let values = block
        .data
        .chunks_exact(m)
        .map(|row| row.iter().map(|h| h.norm_sqr()).sum::<f64>() / m as f64)
        .collect();
    GainSeries {
        values,
        snapshots: block.snapshots,
        freqs: block.freqs,
        subset_size: m,
    }
}

/// Standard deviation of a gain series, linear and in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainStd {
    pub mean: f64,
    pub std: f64,
    /// `10 log10(std)`, `-inf` when the gain is constant.
    pub std_db: f64,
}

pub fn std_gain(series: &GainSeries) -> Result<GainStd> {
    std_of_values(&series.values)
}

fn std_of_values(values: &[f64]) -> Result<GainStd> {
    if values.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: values.len(),
        });
    }
    let (mu, mut std) = population_std(values);
    if std <= ZERO_STD_FLOOR * mu.abs() {
        std = 0.0;
    }
    Ok(GainStd {
        mean: mu,
        std,
        std_db: std_to_db(std),
    })
}

pub fn std_to_db(std: f64) -> f64 {
    if std > 0.0 {
        10.0 * std.log10()
    } else {
        f64::NEG_INFINITY
    }
}

/// Standard deviation (dB) versus subset size for one ordered selection.
#[derive(Debug, Clone, PartialEq)]
pub struct HardeningCurve {
    pub label: OrderLabel,
    /// `std_db[i]` belongs to subset size `i + 1`.
    pub std_db: Vec<f64>,
    /// std_db at the largest size minus std_db at size one.
    pub hardening_db: f64,
    /// Antenna indices in selection order; empty for averaged curves.
    pub selection: Vec<usize>,
}

impl HardeningCurve {
    pub fn from_std_db(label: OrderLabel, std_db: Vec<f64>, selection: Vec<usize>) -> Result<Self> {
        let (first, last) = match (std_db.first(), std_db.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Err(Error::EmptySubset),
        };
        if std_db.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::InvalidArgument(
                "std_db must be finite or -inf".into(),
            ));
        }
        Ok(Self {
            label,
            hardening_db: hardening_difference(first, last),
            std_db,
            selection,
        })
    }

    pub fn max_size(&self) -> usize {
        self.std_db.len()
    }

    /// std_db at subset size `m` (1-based).
    pub fn at(&self, m: usize) -> f64 {
        self.std_db[m - 1]
    }

    /// std_db of the reference (first) element.
    pub fn reference_db(&self) -> f64 {
        self.std_db[0]
    }

    pub fn sizes(&self) -> impl Iterator<Item = usize> {
        1..=self.std_db.len()
    }

    /// Truncates the curve to sizes 1..=m.
    pub fn truncated(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.std_db.len() {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate to size {m}"
            )));
        }
        Self::from_std_db(
            self.label,
            self.std_db[..m].to_vec(),
            self.selection.iter().copied().take(m).collect(),
        )
    }
}

/// Difference of end and start points; a curve that is `-inf` at both ends
/// has no variation to harden and reports 0.
fn hardening_difference(first: f64, last: f64) -> f64 {
    if first == f64::NEG_INFINITY && last == f64::NEG_INFINITY {
        0.0
    } else {
        last - first
    }
}

impl Serialize for HardeningCurve {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let finite = |v: f64| v.is_finite().then_some(v);
        let std_db: Vec<Option<f64>> = self.std_db.iter().map(|&v| finite(v)).collect();
        let mut s = serializer.serialize_struct("HardeningCurve", 4)?;
        s.serialize_field("order", &self.label)?;
        s.serialize_field("std_db", &std_db)?;
        s.serialize_field("hardening_db", &finite(self.hardening_db))?;
        s.serialize_field("selection", &self.selection)?;
        s.end()
    }
}

/// Hardening curve from an explicit list of nested subsets of sizes 1..=M.
///
/// Each subset must extend the previous one by exactly one antenna; every
/// subset is normalized on its own.
pub fn hardening(
    tensor: &ChannelTensor,
    user: usize,
    subsets: &[SubsetSelection],
) -> Result<HardeningCurve> {
    let last = subsets.last().ok_or(Error::EmptySubset)?;
    for (i, s) in subsets.iter().enumerate() {
        if s.len() != i + 1 || s.indices() != &last.indices()[..i + 1] {
            return Err(Error::InconsistentPrefix { size: i + 1 });
        }
    }
    let std_db = subsets
        .iter()
        .map(|s| {
            let block = normalize(tensor, user, s)?;
            Ok(std_gain(&subset_gain(&block))?.std_db)
        })
        .collect::<Result<Vec<_>>>()?;
    HardeningCurve::from_std_db(last.label(), std_db, last.indices().to_vec())
}

/// Hardening curve over every prefix of `selection`.
///
/// Equivalent to normalizing each prefix and computing its subset gain, but
/// accumulates per-sample power once per antenna instead of once per prefix.
pub fn prefix_hardening(
    tensor: &ChannelTensor,
    user: usize,
    selection: &SubsetSelection,
) -> Result<HardeningCurve> {
    tensor.check_user(user)?;
    let valid = tensor.valid_snapshots(user);
    let freqs = tensor.freqs();
    let samples = valid.len() * freqs;
    if samples < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: samples,
        });
    }
    let mut cumulative = vec![0.0; samples];
    let mut gain = vec![0.0; samples];
    let mut std_db = Vec::with_capacity(selection.len());
    for &m in selection.indices() {
        if m >= tensor.antennas() {
            return Err(Error::IndexOutOfRange {
                index: m,
                antennas: tensor.antennas(),
            });
        }
        let mut i = 0;
        for &n in &valid {
            for f in 0..freqs {
                cumulative[i] += tensor.sample(user, n, f, m).norm_sqr();
                i += 1;
            }
        }
        let energy = pairwise_sum(&cumulative);
        if !energy.is_finite() {
            return Err(Error::NonFinite(0));
        }
        if energy <= 0.0 {
            return Err(Error::ZeroEnergy);
        }
        let factor = samples as f64 / energy;
        for (g, c) in gain.iter_mut().zip(&cumulative) {
            *g = c * factor;
        }
        std_db.push(std_of_values(&gain)?.std_db);
    }
    HardeningCurve::from_std_db(selection.label(), std_db, selection.indices().to_vec())
}
