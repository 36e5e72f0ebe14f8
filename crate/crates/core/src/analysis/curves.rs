//! Hardening curves per order, their step decrements and cross-user or
//! cross-run averages.

use crate::arrays::ArrayGeometry;
use crate::error::{Error, Result};
use crate::gain::{prefix_hardening, HardeningCurve};
use crate::numeric::mean;
use crate::tensor::{ChannelTensor, OrderLabel};

use super::order::order_antennas;

pub fn hardening_curve(
    tensor: &ChannelTensor,
    user: usize,
    label: OrderLabel,
    geometry: Option<&ArrayGeometry>,
) -> Result<HardeningCurve> {
    let selection = order_antennas(tensor, user, label, geometry)?;
    prefix_hardening(tensor, user, &selection)
}

/// `Δ(m) = std_db(m) − std_db(m−1)` for m = 2..=M. Steps between two `-inf`
/// values are 0.
pub fn curve_delta(curve: &HardeningCurve) -> Result<Vec<f64>> {
    if curve.std_db.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: curve.std_db.len(),
        });
    }
    Ok(curve
        .std_db
        .windows(2)
        .map(|w| {
            if w[0] == f64::NEG_INFINITY && w[1] == f64::NEG_INFINITY {
                0.0
            } else {
                w[1] - w[0]
            }
        })
        .collect())
}

fn check_lengths(lengths: impl Iterator<Item = usize>) -> Result<usize> {
    let mut lengths = lengths;
    let first = lengths.next().ok_or(Error::EmptySubset)?;
    if lengths.any(|l| l != first) {
        return Err(Error::InvalidArgument("curves differ in length".into()));
    }
    Ok(first)
}

/// Arithmetic mean of std_db per subset size. The label is kept when all
/// curves share it; the selection is dropped.
pub fn average_curves(curves: &[HardeningCurve]) -> Result<HardeningCurve> {
    let len = check_lengths(curves.iter().map(|c| c.std_db.len()))?;
    let std_db = (0..len)
        .map(|i| {
            let column: Vec<f64> = curves.iter().map(|c| c.std_db[i]).collect();
            mean(&column)
        })
        .collect();
    let label = curves[0].label;
    let label = if curves.iter().all(|c| c.label == label) {
        label
    } else {
        OrderLabel::Explicit
    };
    HardeningCurve::from_std_db(label, std_db, Vec::new())
}

pub fn average_deltas(deltas: &[Vec<f64>]) -> Result<Vec<f64>> {
    let len = check_lengths(deltas.iter().map(Vec::len))?;
    Ok((0..len)
        .map(|i| mean(&deltas.iter().map(|d| d[i]).collect::<Vec<_>>()))
        .collect())
}

/// (user, hardening_db) for every user, most hardening (most negative)
/// first; ties keep ascending user index.
pub fn rank_users_by_hardening(
    tensor: &ChannelTensor,
    label: OrderLabel,
    geometry: Option<&ArrayGeometry>,
) -> Result<Vec<(usize, f64)>> {
    let mut ranked = (0..tensor.users())
        .map(|k| Ok((k, hardening_curve(tensor, k, label, geometry)?.hardening_db)))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::gen_iid_gaussian;
    use crate::tensor::{Dims, TensorMeta};
    use num_complex::Complex64;

    fn curve(values: &[f64]) -> HardeningCurve {
        HardeningCurve::from_std_db(OrderLabel::Original, values.to_vec(), vec![]).unwrap()
    }

    #[test]
    fn flat_and_monotone_deltas() {
        assert_eq!(
            curve_delta(&curve(&[-1.0, -1.0, -1.0])).unwrap(),
            vec![0.0, 0.0]
        );
        let d = curve_delta(&curve(&[0.0, -1.5, -2.0, -2.1])).unwrap();
        assert!(d.iter().all(|v| *v <= 0.0));
        assert!(curve_delta(&curve(&[0.0])).is_err());
    }

    #[test]
    fn closed_form_gaussian_deltas() {
        let line: Vec<f64> = (1..=16).map(|m| -5.0 * (m as f64).log10()).collect();
        let d = curve_delta(&curve(&line)).unwrap();
        for (i, v) in d.iter().enumerate() {
            let m = (i + 2) as f64;
            assert!((v - 5.0 * ((m - 1.0) / m).log10()).abs() < 1e-12);
        }
    }

    #[test]
    fn average_is_mean_of_db() {
        let avg = average_curves(&[curve(&[0.0, -2.0]), curve(&[-1.0, -4.0])]).unwrap();
        assert_eq!(avg.std_db, vec![-0.5, -3.0]);
        assert_eq!(avg.hardening_db, -2.5);
        assert!(average_curves(&[curve(&[0.0]), curve(&[0.0, 1.0])]).is_err());
        assert_eq!(
            average_deltas(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap(),
            vec![2.0, 3.0]
        );
    }

    #[test]
    fn correlated_array_is_flat() {
        let base = gen_iid_gaussian(1, 50, 4, 1, 2).unwrap();
        let t = ChannelTensor::from_fn(
            Dims::new(1, 50, 4, 8),
            TensorMeta::default(),
            |k, n, f, _| base.sample(k, n, f, 0),
        )
        .unwrap();
        let c = hardening_curve(&t, 0, OrderLabel::Original, None).unwrap();
        assert!(c.hardening_db.abs() < 1e-9);
        assert!(c.std_db.iter().all(|v| (v - c.std_db[0]).abs() < 1e-9));
    }

    #[test]
    fn ranking_puts_most_hardening_first() {
        // user 0 gaussian, user 1 fully correlated
        let g = gen_iid_gaussian(1, 40, 5, 8, 1).unwrap();
        let t = ChannelTensor::from_fn(
            Dims::new(2, 40, 5, 8),
            TensorMeta::default(),
            |k, n, f, m| {
                if k == 0 {
                    g.sample(0, n, f, m)
                } else {
                    g.sample(0, n, f, 0) * Complex64::new(1.0, 0.0)
                }
            },
        )
        .unwrap();
        let r = rank_users_by_hardening(&t, OrderLabel::Original, None).unwrap();
        assert_eq!(r[0].0, 0);
        assert_eq!(r[1].0, 1);
    }
}
