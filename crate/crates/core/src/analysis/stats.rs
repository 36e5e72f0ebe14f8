//! Gain maps, time/frequency spreads, polarization ratios and scenario
//! summaries.

use serde::Serialize;

use crate::arrays::ArrayGeometry;
use crate::error::{Error, Result};
use crate::gain::{normalize, subset_gain};
use crate::numeric::{mean, population_std, power_db};
use crate::tensor::{ChannelTensor, SubsetSelection};

use super::order::average_gains;

/// Floor for dB conversions of instantaneous gains.
pub const GAIN_FLOOR_DB: f64 = -100.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainMap {
    /// Un-normalized average gain per port, dB (`-inf` for a silent port).
    pub gain_db: Vec<f64>,
    /// 0-based port at the lower median of `gain_db`.
    pub median_port: usize,
}

pub fn gain_map(tensor: &ChannelTensor, user: usize) -> Result<GainMap> {
    let gain_db: Vec<f64> = average_gains(tensor, user)?
        .into_iter()
        .map(|g| power_db(g, f64::NEG_INFINITY))
        .collect();
    let mut sorted = gain_db.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[(sorted.len() - 1) / 2];
    let median_port = gain_db
        .iter()
        .position(|&g| g == median)
        .expect("median comes from the map");
    Ok(GainMap {
        gain_db,
        median_port,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spread {
    /// Max − min over snapshots of G in dB, averaged over frequency.
    pub time_db: f64,
    /// Max − min over frequency of G in dB, averaged over snapshots.
    pub freq_db: f64,
}

fn range(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    hi - lo
}

pub fn time_freq_spread(
    tensor: &ChannelTensor,
    user: usize,
    subset: &SubsetSelection,
) -> Result<Spread> {
    let series = subset_gain(&normalize(tensor, user, subset)?);
    let (n_count, f_count) = (series.snapshots, series.freqs);
    let db: Vec<f64> = series
        .values
        .iter()
        .map(|&g| power_db(g, GAIN_FLOOR_DB))
        .collect();
    let time: Vec<f64> = (0..f_count)
        .map(|f| range((0..n_count).map(|n| db[n * f_count + f])))
        .collect();
    let freq: Vec<f64> = (0..n_count)
        .map(|n| range(db[n * f_count..(n + 1) * f_count].iter().copied()))
        .collect();
    Ok(Spread {
        time_db: mean(&time),
        freq_db: mean(&freq),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolRatioStats {
    /// Mean of 10·log10(|h_V|²/|h_H|²), dB.
    pub mean_db: f64,
    /// Population std of the same ratio, dB.
    pub std_db: f64,
    pub samples: usize,
}

/// V/H gain ratio over every valid (n, f) and co-located port pair.
pub fn pol_ratio_stats(
    tensor: &ChannelTensor,
    user: usize,
    geometry: &ArrayGeometry,
) -> Result<PolRatioStats> {
    tensor.check_user(user)?;
    if geometry.pol_pairs.is_empty() {
        return Err(Error::UnpairedArray(geometry.id.clone()));
    }
    if geometry.len() != tensor.antennas() {
        return Err(Error::InvalidArgument(format!(
            "geometry '{}' has {} ports but the tensor has {} antennas",
            geometry.id,
            geometry.len(),
            tensor.antennas()
        )));
    }
    let mut ratios = Vec::new();
    for n in tensor.valid_snapshots(user) {
        for f in 0..tensor.freqs() {
            for &(v, h) in &geometry.pol_pairs {
                let pv = power_db(tensor.sample(user, n, f, v).norm_sqr(), GAIN_FLOOR_DB);
                let ph = power_db(tensor.sample(user, n, f, h).norm_sqr(), GAIN_FLOOR_DB);
                ratios.push(pv - ph);
            }
        }
    }
    if ratios.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: ratios.len(),
        });
    }
    let (mean_db, std_db) = population_std(&ratios);
    Ok(PolRatioStats {
        mean_db,
        std_db,
        samples: ratios.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub label: String,
    /// dB of the mean over ports of the linear per-port average gain.
    pub mean_db: f64,
    pub max_db: f64,
}

pub fn scenario_summary(
    tensor: &ChannelTensor,
    user: usize,
    label: &str,
) -> Result<ScenarioSummary> {
    let gains = average_gains(tensor, user)?;
    let max = gains.iter().copied().fold(0.0, f64::max);
    Ok(ScenarioSummary {
        label: label.to_string(),
        mean_db: power_db(mean(&gains), f64::NEG_INFINITY),
        max_db: power_db(max, f64::NEG_INFINITY),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrays::{build_cylindrical, build_linear, build_planar};
    use crate::synth::gen_iid_gaussian;
    use crate::tensor::{Dims, TensorMeta};
    use num_complex::Complex64;

    fn constant(m: usize, amp: impl Fn(usize) -> f64) -> ChannelTensor {
        ChannelTensor::from_fn(
            Dims::new(1, 3, 4, m),
            TensorMeta::default(),
            |_, _, _, m| Complex64::new(amp(m), 0.0),
        )
        .unwrap()
    }

    #[test]
    fn constant_map_is_flat() {
        let g = gain_map(&constant(6, |_| 1.0), 0).unwrap();
        assert!(g.gain_db.iter().all(|v| *v == 0.0));
        assert_eq!(g.median_port, 0);
    }

    #[test]
    fn alternating_imbalance_and_scaling() {
        let a = 10f64.powf(3.0 / 20.0);
        let t = constant(8, |m| if m % 2 == 0 { a } else { 1.0 });
        let g = gain_map(&t, 0).unwrap();
        for w in g.gain_db.windows(2) {
            assert!(((w[0] - w[1]).abs() - 3.0).abs() < 1e-12);
        }
        let s = gain_map(&t.scaled(2.0), 0).unwrap();
        for (x, y) in g.gain_db.iter().zip(&s.gain_db) {
            assert!((y - x - 20.0 * 2f64.log10()).abs() < 1e-12);
        }
        // lower median of [0,0,0,0,3,3,3,3] is 0, first at port 1
        assert_eq!(g.median_port, 1);
    }

    #[test]
    fn ring_illumination_shows_in_map() {
        let t = constant(128, |m| if m / 32 == 2 { 4.0 } else { 1.0 });
        let g = gain_map(&t, 0).unwrap();
        assert!((64..96).all(|m| g.gain_db[m] > g.gain_db[0]));
        assert!((0..64).chain(96..128).all(|m| g.gain_db[m] == 0.0));
    }

    #[test]
    fn constant_gain_has_no_spread() {
        let t = constant(4, |_| 2.0);
        let s = time_freq_spread(&t, 0, &SubsetSelection::all(4).unwrap()).unwrap();
        assert_eq!((s.time_db, s.freq_db), (0.0, 0.0));
    }

    #[test]
    fn spreads_shrink_with_more_antennas() {
        let t = gen_iid_gaussian(1, 100, 40, 64, 5).unwrap();
        let one =
            time_freq_spread(&t, 0, &SubsetSelection::all(64).unwrap().prefix(1).unwrap()).unwrap();
        let all = time_freq_spread(&t, 0, &SubsetSelection::all(64).unwrap()).unwrap();
        assert!(all.time_db < one.time_db);
        assert!(all.freq_db < one.freq_db);
    }

    #[test]
    fn identical_and_scaled_polarizations() {
        let g = build_cylindrical();
        let same = constant(128, |_| 1.5);
        let s = pol_ratio_stats(&same, 0, &g).unwrap();
        assert_eq!((s.mean_db, s.std_db), (0.0, 0.0));
        let a = 2f64.sqrt();
        let t = constant(128, |m| if m % 2 == 0 { a } else { 1.0 });
        let s = pol_ratio_stats(&t, 0, &g).unwrap();
        assert!((s.mean_db - 10.0 * 2f64.log10()).abs() < 1e-12);
        assert!(s.std_db < 1e-12);
    }

    #[test]
    fn swapping_polarizations_negates_mean() {
        let mut g = build_planar();
        let t = gen_iid_gaussian(1, 20, 5, 100, 3).unwrap();
        let s = pol_ratio_stats(&t, 0, &g).unwrap();
        g.pol_pairs.iter_mut().for_each(|p| *p = (p.1, p.0));
        let r = pol_ratio_stats(&t, 0, &g).unwrap();
        assert_eq!(r.mean_db, -s.mean_db);
        assert!((r.std_db - s.std_db).abs() < 1e-12);
    }

    #[test]
    fn unpaired_array_rejected() {
        let g = build_linear(4, 0.5, 2.6e9);
        assert!(matches!(
            pol_ratio_stats(&constant(4, |_| 1.0), 0, &g),
            Err(Error::UnpairedArray(_))
        ));
    }

    #[test]
    fn summary_max_not_below_mean() {
        let t = gen_iid_gaussian(1, 10, 10, 16, 1).unwrap();
        let s = scenario_summary(&t, 0, "x").unwrap();
        assert!(s.max_db >= s.mean_db);
    }
}
