//! Empirical CDFs of normalized gain in dB and the exponential reference.

use crate::error::{Error, Result};
use crate::gain::GainSeries;
use crate::numeric::power_db;

/// Gains at or below this level (including zero) are plotted here.
pub const CDF_FLOOR_DB: f64 = -100.0;

/// Right-continuous step CDF over gain in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted_db: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn from_linear(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::NonFinite(
                values.iter().position(|v| v.is_nan()).unwrap(),
            ));
        }
        let mut sorted_db: Vec<f64> = values.iter().map(|&v| power_db(v, CDF_FLOOR_DB)).collect();
        sorted_db.sort_by(f64::total_cmp);
        Ok(Self { sorted_db })
    }

    pub fn from_series(series: &GainSeries) -> Result<Self> {
        Self::from_linear(&series.values)
    }

    pub fn len(&self) -> usize {
        self.sorted_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_db.is_empty()
    }

    /// F(x) = share of samples ≤ x.
    pub fn eval(&self, x_db: f64) -> f64 {
        self.sorted_db.partition_point(|&v| v <= x_db) as f64 / self.len() as f64
    }

    /// (x_db, F) at every distinct sample value, ascending.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let n = self.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &x) in self.sorted_db.iter().enumerate() {
            let f = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == x => last.1 = f,
                _ => out.push((x, f)),
            }
        }
        out
    }

    /// Kolmogorov–Smirnov distance to a continuous reference CDF.
    pub fn ks_distance(&self, reference: impl Fn(f64) -> f64) -> f64 {
        let mut d: f64 = 0.0;
        let mut below = 0.0;
        for (x, f) in self.steps() {
            let r = reference(x);
            d = d.max((f - r).abs()).max((r - below).abs());
            below = f;
        }
        d
    }
}

/// CDF of a unit-mean exponential gain at `x_db`: 1 − exp(−10^(x/10)).
pub fn exponential_reference_cdf(x_db: f64) -> f64 {
    -(-(10f64.powf(x_db / 10.0))).exp_m1()
}

pub fn ks_distance(cdf: &EmpiricalCdf, reference: impl Fn(f64) -> f64) -> f64 {
    cdf.ks_distance(reference)
}
