//! Closed-form hardening model for M base-station antennas, P physical paths
//! and one user antenna.
//!
//! With CN(0,1) path coefficients and steering directions uniform on the
//! sphere the coefficient of variation of the channel gain is
//! `CV² = (1/M)(1 − 1/P) + 1/P`, which tends to `1/M` for rich scattering and
//! to zero when both counts grow without bound.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand_distr::{Distribution, UnitSphere};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arrays::{steering_vector, ArrayGeometry};
use crate::error::{Error, Result};
use crate::synth::complex_normal;
use crate::synth::seed::{rng_from, SeedPath};

/// A count that may be unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Count {
    Finite(u64),
    Infinite,
}

impl Count {
    fn reciprocal(self) -> f64 {
        match self {
            Count::Finite(n) => 1.0 / n as f64,
            Count::Infinite => 0.0,
        }
    }

    fn check(self, what: &str) -> Result<()> {
        if self == Count::Finite(0) {
            return Err(Error::InvalidArgument(format!("{what} must be >= 1")));
        }
        Ok(())
    }
}

impl PartialOrd for Count {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Count {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Count::Finite(a), Count::Finite(b)) => a.cmp(b),
            (Count::Finite(_), Count::Infinite) => Less,
            (Count::Infinite, Count::Finite(_)) => Greater,
            (Count::Infinite, Count::Infinite) => Equal,
        }
    }
}

impl From<u64> for Count {
    fn from(n: u64) -> Self {
        Count::Finite(n)
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(n) => write!(f, "{n}"),
            Count::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Count {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinite" | "∞" => Ok(Count::Infinite),
            other => other
                .parse::<u64>()
                .map(Count::Finite)
                .map_err(|_| Error::InvalidArgument(format!("not a count: '{other}'"))),
        }
    }
}

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Count::Finite(n) => s.serialize_u64(*n),
            Count::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Count {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Count::Finite(n)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Closed-form CV² for `antennas` base-station antennas and `paths` paths.
pub fn cv_squared_closed(antennas: Count, paths: Count) -> Result<f64> {
    antennas.check("antenna count")?;
    paths.check("path count")?;
    let inv_p = paths.reciprocal();
    Ok(antennas.reciprocal() * (1.0 - inv_p) + inv_p)
}

/// Large-scale fading term `(1/P)(σ/μ)²` for independent path gains with
/// mean `mean` and standard deviation `std`.
pub fn large_scale_bound(paths: Count, mean: f64, std: f64) -> Result<f64> {
    paths.check("path count")?;
    if mean == 0.0 || !mean.is_finite() {
        return Err(Error::InvalidArgument(
            "path gain mean must be nonzero".into(),
        ));
    }
    if std < 0.0 {
        return Err(Error::InvalidArgument("path gain std must be >= 0".into()));
    }
    Ok(paths.reciprocal() * (std / mean).powi(2))
}

/// `10 log10(sqrt(CV²))`; `-inf` for zero.
pub fn cv_squared_to_std_db(cv2: f64) -> f64 {
    if cv2 > 0.0 {
        5.0 * cv2.log10()
    } else {
        f64::NEG_INFINITY
    }
}

/// Standard deviation (dB) over an antenna-count × path-count grid.
/// Entry `[i][j]` belongs to `(antennas[i], paths[j])`.
pub fn std_surface(antennas: &[Count], paths: &[Count]) -> Result<Vec<Vec<f64>>> {
    if antennas.is_empty() || paths.is_empty() {
        return Err(Error::InvalidArgument("grids must be nonempty".into()));
    }
    antennas
        .iter()
        .map(|&m| {
            paths
                .iter()
                .map(|&p| cv_squared_closed(m, p).map(cv_squared_to_std_db))
                .collect()
        })
        .collect()
}

/// The quantities entering the general CV² decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryTerms {
    pub antennas: Count,
    pub paths: Count,
    pub path_gain_mean: f64,
    pub path_gain_std: f64,
    /// Second moment of the normalized inner product of two base-station
    /// steering vectors.
    pub steering_moment_tx: f64,
    /// Same for the user side; 1 for a single user antenna.
    pub steering_moment_rx: f64,
}

impl TheoryTerms {
    /// Terms for CN(0,1) paths with ideally spread steering vectors.
    pub fn rich_scattering(antennas: Count, paths: Count) -> Self {
        Self {
            antennas,
            paths,
            path_gain_mean: 1.0,
            path_gain_std: 1.0,
            steering_moment_tx: antennas.reciprocal(),
            steering_moment_rx: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.antennas.check("antenna count")?;
        self.paths.check("path count")?;
        for e in [self.steering_moment_tx, self.steering_moment_rx] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidArgument(
                    "steering second moments must lie in [0, 1]".into(),
                ));
            }
        }
        if self.path_gain_std < 0.0 {
            return Err(Error::InvalidArgument("path gain std must be >= 0".into()));
        }
        Ok(())
    }

    /// CV² from the small-scale and large-scale terms, with the accumulated
    /// path-gain factor supplied by the caller (typically a Monte Carlo
    /// estimate from [`path_gain_factors`]).
    pub fn cv_squared(&self, accumulated_gain_factor: f64) -> Result<f64> {
        self.validate()?;
        let large = large_scale_bound(self.paths, self.path_gain_mean, self.path_gain_std)?;
        Ok(self.steering_moment_tx * self.steering_moment_rx * accumulated_gain_factor + large)
    }
}

/// Monte Carlo estimate of `E|⟨a(Ω₁), a(Ω₂)⟩|² / M²` for independent
/// directions uniform on the sphere, evaluated at the array carrier.
pub fn steering_second_moment(geometry: &ArrayGeometry, draws: usize, seed: u64) -> Result<f64> {
    if draws == 0 {
        return Err(Error::InvalidArgument("draws must be >= 1".into()));
    }
    let mut rng = rng_from(SeedPath::root(seed).child(0x5743));
    let m = geometry.len() as f64;
    let mut acc = Vec::with_capacity(draws);
    for _ in 0..draws {
        let d1: [f64; 3] = UnitSphere.sample(&mut rng);
        let d2: [f64; 3] = UnitSphere.sample(&mut rng);
        let a = steering_vector(geometry, d1, geometry.carrier_hz)?;
        let b = steering_vector(geometry, d2, geometry.carrier_hz)?;
        let ip: Complex64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
        acc.push(ip.norm_sqr() / (m * m));
    }
    Ok(crate::numeric::mean(&acc))
}

/// Monte Carlo estimates of the two path-gain factors for `paths` CN(0,1)
/// coefficients: `E{‖c‖⁴ − ‖c‖₄⁴}/E{‖c‖²}²` and `Var{‖c‖²}/E{‖c‖²}²`.
pub fn path_gain_factors(paths: usize, draws: usize, seed: u64) -> Result<(f64, f64)> {
    if paths == 0 || draws < 2 {
        return Err(Error::InvalidArgument(
            "need paths >= 1 and draws >= 2".into(),
        ));
    }
    let mut rng = rng_from(SeedPath::root(seed).child(0xC0EF));
    let mut norm2 = Vec::with_capacity(draws);
    let mut cross = Vec::with_capacity(draws);
    for _ in 0..draws {
        let mut s2 = 0.0;
        let mut s4 = 0.0;
        for _ in 0..paths {
            let p = complex_normal(&mut rng).norm_sqr();
            s2 += p;
            s4 += p * p;
        }
        norm2.push(s2);
        cross.push(s2 * s2 - s4);
    }
    let (mean2, std2) = crate::numeric::population_std(&norm2);
    let mean_cross = crate::numeric::mean(&cross);
    Ok((mean_cross / (mean2 * mean2), (std2 / mean2).powi(2)))
}
