//! The channel tensor: complex transfer samples indexed by
//! (user, snapshot, frequency, antenna) plus the physical metadata needed to
//! interpret them.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical description carried alongside the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorMeta {
    pub carrier_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub snapshot_rate_hz: f64,
    pub scenario_label: String,
    pub array_id: String,
}

impl Default for TensorMeta {
    fn default() -> Self {
        Self {
            carrier_freq_hz: 2.6e9,
            bandwidth_hz: 40e6,
            snapshot_rate_hz: 50.0,
            scenario_label: String::new(),
            array_id: String::new(),
        }
    }
}

/// Tensor extents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub users: usize,
    pub snapshots: usize,
    pub freqs: usize,
    pub antennas: usize,
}

impl Dims {
    pub fn new(users: usize, snapshots: usize, freqs: usize, antennas: usize) -> Self {
        Self {
            users,
            snapshots,
            freqs,
            antennas,
        }
    }

    pub fn len(&self) -> usize {
        self.users * self.snapshots * self.freqs * self.antennas
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        if self.users == 0 || self.snapshots == 0 || self.freqs == 0 || self.antennas == 0 {
            return Err(Error::InvalidDimensions(format!(
                "all dimensions must be >= 1, got {}x{}x{}x{}",
                self.users, self.snapshots, self.freqs, self.antennas
            )));
        }
        Ok(())
    }
}

/// Complex channel samples, k-major then n, f, m.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTensor {
    dims: Dims,
    samples: Vec<Complex64>,
    meta: TensorMeta,
    /// Per (user, snapshot) validity; `None` means every snapshot is valid.
    mask: Option<Vec<bool>>,
}

impl ChannelTensor {
    pub fn new(dims: Dims, samples: Vec<Complex64>, meta: TensorMeta) -> Result<Self> {
        dims.validate()?;
        if samples.len() != dims.len() {
            return Err(Error::InvalidDimensions(format!(
                "expected {} samples, got {}",
                dims.len(),
                samples.len()
            )));
        }
        if let Some(i) = samples
            .iter()
            .position(|s| !(s.re.is_finite() && s.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            dims,
            samples,
            meta,
            mask: None,
        })
    }

    /// Builds a tensor by evaluating `f(k, n, f, m)` at every index.
    pub fn from_fn<F>(dims: Dims, meta: TensorMeta, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize, usize, usize) -> Complex64,
    {
        dims.validate()?;
        let mut samples = Vec::with_capacity(dims.len());
        for k in 0..dims.users {
            for n in 0..dims.snapshots {
                for fi in 0..dims.freqs {
                    for m in 0..dims.antennas {
                        samples.push(f(k, n, fi, m));
                    }
                }
            }
        }
        Self::new(dims, samples, meta)
    }

    /// Attaches a per-(user, snapshot) validity mask of length K·N.
    pub fn with_mask(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.dims.users * self.dims.snapshots {
            return Err(Error::InvalidDimensions(format!(
                "mask length {} does not match K*N = {}",
                mask.len(),
                self.dims.users * self.dims.snapshots
            )));
        }
        self.mask = Some(mask);
        Ok(self)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn users(&self) -> usize {
        self.dims.users
    }

    pub fn snapshots(&self) -> usize {
        self.dims.snapshots
    }

    pub fn freqs(&self) -> usize {
        self.dims.freqs
    }

    pub fn antennas(&self) -> usize {
        self.dims.antennas
    }

    pub fn meta(&self) -> &TensorMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut TensorMeta {
        &mut self.meta
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    #[inline]
    pub fn index(&self, k: usize, n: usize, f: usize, m: usize) -> usize {
        ((k * self.dims.snapshots + n) * self.dims.freqs + f) * self.dims.antennas + m
    }

    #[inline]
    pub fn sample(&self, k: usize, n: usize, f: usize, m: usize) -> Complex64 {
        self.samples[self.index(k, n, f, m)]
    }

    /// Whether snapshot `n` of user `k` takes part in sums.
    #[inline]
    pub fn is_valid(&self, k: usize, n: usize) -> bool {
        self.mask
            .as_ref()
            .map_or(true, |mask| mask[k * self.dims.snapshots + n])
    }

    /// Indices of the valid snapshots of user `k`.
    pub fn valid_snapshots(&self, k: usize) -> Vec<usize> {
        (0..self.dims.snapshots)
            .filter(|&n| self.is_valid(k, n))
            .collect()
    }

    pub fn check_user(&self, k: usize) -> Result<()> {
        if k >= self.dims.users {
            return Err(Error::UserOutOfRange {
                user: k,
                users: self.dims.users,
            });
        }
        Ok(())
    }

    /// Copy with every sample multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.samples.iter_mut().for_each(|s| *s *= factor);
        out
    }

    /// Single-user slice of this tensor.
    pub fn user_tensor(&self, k: usize) -> Result<Self> {
        self.check_user(k)?;
        let per_user = self.dims.snapshots * self.dims.freqs * self.dims.antennas;
        let samples = self.samples[k * per_user..(k + 1) * per_user].to_vec();
        let mask = self
            .mask
            .as_ref()
            .map(|mask| mask[k * self.dims.snapshots..(k + 1) * self.dims.snapshots].to_vec());
        Ok(Self {
            dims: Dims {
                users: 1,
                ..self.dims
            },
            samples,
            meta: self.meta.clone(),
            mask,
        })
    }

    /// Stacks single- or multi-user tensors with identical (N, F, M) along
    /// the user axis. Metadata is taken from the first part.
    pub fn concat_users(parts: Vec<Self>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidDimensions("no tensors to concatenate".into()))?;
        let (n, f, m) = (first.dims.snapshots, first.dims.freqs, first.dims.antennas);
        let meta = first.meta.clone();
        let any_mask = parts.iter().any(|p| p.mask.is_some());
        let mut users = 0;
        let mut samples = Vec::new();
        let mut mask = Vec::new();
        for part in parts {
            if (part.dims.snapshots, part.dims.freqs, part.dims.antennas) != (n, f, m) {
                return Err(Error::InvalidDimensions(
                    "tensors disagree on snapshots/freqs/antennas".into(),
                ));
            }
            users += part.dims.users;
            if any_mask {
                match &part.mask {
                    Some(pm) => mask.extend_from_slice(pm),
                    None => mask.extend(std::iter::repeat(true).take(part.dims.users * n)),
                }
            }
            samples.extend(part.samples);
        }
        Ok(Self {
            dims: Dims::new(users, n, f, m),
            samples,
            meta,
            mask: any_mask.then_some(mask),
        })
    }

    pub fn into_parts(self) -> (Dims, Vec<Complex64>, TensorMeta, Option<Vec<bool>>) {
        (self.dims, self.samples, self.meta, self.mask)
    }
}

/// How an antenna subset was ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderLabel {
    Original,
    StrongestFirst,
    WeakestFirst,
    VerticalOnly,
    HorizontalOnly,
    BothAlternating,
    Explicit,
}

impl OrderLabel {
    pub const ALL_KINDS: [OrderLabel; 6] = [
        OrderLabel::Original,
        OrderLabel::StrongestFirst,
        OrderLabel::WeakestFirst,
        OrderLabel::VerticalOnly,
        OrderLabel::HorizontalOnly,
        OrderLabel::BothAlternating,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            OrderLabel::Original => "original",
            OrderLabel::StrongestFirst => "strongest_first",
            OrderLabel::WeakestFirst => "weakest_first",
            OrderLabel::VerticalOnly => "vertical_only",
            OrderLabel::HorizontalOnly => "horizontal_only",
            OrderLabel::BothAlternating => "both_alternating",
            OrderLabel::Explicit => "explicit",
        }
    }

    pub fn needs_polarization(&self) -> bool {
        matches!(
            self,
            OrderLabel::VerticalOnly | OrderLabel::HorizontalOnly | OrderLabel::BothAlternating
        )
    }
}

impl fmt::Display for OrderLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrderLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let label = match s {
            "original" => OrderLabel::Original,
            "strongest_first" => OrderLabel::StrongestFirst,
            "weakest_first" => OrderLabel::WeakestFirst,
            "vertical_only" => OrderLabel::VerticalOnly,
            "horizontal_only" => OrderLabel::HorizontalOnly,
            "both_alternating" => OrderLabel::BothAlternating,
            "explicit" => OrderLabel::Explicit,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown selection order '{other}'"
                )))
            }
        };
        Ok(label)
    }
}

/// An ordered set of distinct antenna indices (zero-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSelection {
    indices: Vec<usize>,
    label: OrderLabel,
}

impl SubsetSelection {
    pub fn new(indices: Vec<usize>, label: OrderLabel, antennas: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut seen = HashSet::with_capacity(indices.len());
        for &i in &indices {
            if i >= antennas {
                return Err(Error::IndexOutOfRange { index: i, antennas });
            }
            if !seen.insert(i) {
                return Err(Error::DuplicateIndex(i));
            }
        }
        Ok(Self { indices, label })
    }

    /// All antennas in ascending index order.
    pub fn all(antennas: usize) -> Result<Self> {
        Self::new((0..antennas).collect(), OrderLabel::Original, antennas)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn label(&self) -> OrderLabel {
        self.label
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The first `size` antennas of this selection.
    pub fn prefix(&self, size: usize) -> Result<Self> {
        if size == 0 || size > self.indices.len() {
            return Err(Error::InvalidArgument(format!(
                "prefix size {size} outside 1..={}",
                self.indices.len()
            )));
        }
        Ok(Self {
            indices: self.indices[..size].to_vec(),
            label: self.label,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims() -> Dims {
        Dims::new(2, 3, 4, 5)
    }

    #[test]
    fn rejects_zero_dimension() {
        let err = ChannelTensor::new(Dims::new(0, 1, 1, 1), vec![], TensorMeta::default());
        assert!(matches!(err, Err(Error::InvalidDimensions(_))));
    }

    #[test]
    fn rejects_nan() {
        let mut s = vec![Complex64::new(1.0, 0.0); dims().len()];
        s[7] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(
            ChannelTensor::new(dims(), s, TensorMeta::default()),
            Err(Error::NonFinite(7))
        );
    }

    #[test]
    fn index_layout_is_k_major() {
        let t = ChannelTensor::from_fn(dims(), TensorMeta::default(), |k, n, f, m| {
            Complex64::new((k * 1000 + n * 100 + f * 10 + m) as f64, 0.0)
        })
        .unwrap();
        assert_eq!(t.sample(1, 2, 3, 4).re, 1234.0);
        assert_eq!(t.samples()[t.index(1, 0, 0, 0)].re, 1000.0);
        assert_eq!(t.index(0, 0, 0, 1), 1);
    }

    #[test]
    fn selection_rules() {
        assert_eq!(
            SubsetSelection::new(vec![], OrderLabel::Explicit, 4),
            Err(Error::EmptySubset)
        );
        assert_eq!(
            SubsetSelection::new(vec![1, 1], OrderLabel::Explicit, 4),
            Err(Error::DuplicateIndex(1))
        );
        assert!(matches!(
            SubsetSelection::new(vec![4], OrderLabel::Explicit, 4),
            Err(Error::IndexOutOfRange { .. })
        ));
        let s = SubsetSelection::new(vec![3, 0, 2], OrderLabel::Explicit, 4).unwrap();
        assert_eq!(s.prefix(2).unwrap().indices(), &[3, 0]);
    }

    #[test]
    fn user_slice_and_concat() {
        let t = ChannelTensor::from_fn(dims(), TensorMeta::default(), |k, n, f, m| {
            Complex64::new(k as f64, (n + f + m) as f64)
        })
        .unwrap()
        .with_mask(vec![true, false, true, true, true, false])
        .unwrap();
        let u1 = t.user_tensor(1).unwrap();
        assert_eq!(u1.users(), 1);
        assert_eq!(u1.sample(0, 2, 3, 4), t.sample(1, 2, 3, 4));
        assert_eq!(u1.valid_snapshots(0), vec![0, 1]);
        let back = ChannelTensor::concat_users(vec![t.user_tensor(0).unwrap(), u1]).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn order_label_parse_roundtrip() {
        for l in OrderLabel::ALL_KINDS {
            assert_eq!(l.as_str().parse::<OrderLabel>().unwrap(), l);
        }
        assert!("sideways".parse::<OrderLabel>().is_err());
    }
}
