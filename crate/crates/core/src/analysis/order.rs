//! Antenna selection orders.

use crate::arrays::{ArrayGeometry, Polarization};
use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::tensor::{ChannelTensor, OrderLabel, SubsetSelection};

/// Linear |h|² per antenna, averaged over all valid snapshots and
/// frequencies of `user`.
pub fn average_gains(tensor: &ChannelTensor, user: usize) -> Result<Vec<f64>> {
    tensor.check_user(user)?;
    let valid = tensor.valid_snapshots(user);
    if valid.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let (freqs, antennas) = (tensor.freqs(), tensor.antennas());
    let mut per_antenna = vec![Vec::with_capacity(valid.len() * freqs); antennas];
    for &n in &valid {
        for f in 0..freqs {
            for (m, bucket) in per_antenna.iter_mut().enumerate() {
                bucket.push(tensor.sample(user, n, f, m).norm_sqr());
            }
        }
    }
    Ok(per_antenna
        .iter()
        .map(|v| pairwise_sum(v) / v.len() as f64)
        .collect())
}

fn polarized_geometry<'a>(
    tensor: &ChannelTensor,
    label: OrderLabel,
    geometry: Option<&'a ArrayGeometry>,
) -> Result<&'a ArrayGeometry> {
    let g = geometry.ok_or_else(|| {
        Error::MissingPolarization(format!("order '{label}' needs an array geometry"))
    })?;
    if g.len() != tensor.antennas() {
        return Err(Error::InvalidArgument(format!(
            "geometry '{}' has {} ports but the tensor has {} antennas",
            g.id,
            g.len(),
            tensor.antennas()
        )));
    }
    if !g.is_polarized() {
        return Err(Error::MissingPolarization(format!(
            "array '{}' has no polarization tags",
            g.id
        )));
    }
    Ok(g)
}

/// One port per physical position in traversal order, vertical at even
/// positions and horizontal at odd ones. Single-port positions contribute
/// their only port.
fn alternating(g: &ArrayGeometry) -> Vec<usize> {
    g.position_groups
        .iter()
        .enumerate()
        .filter_map(|(i, group)| {
            if group.len() == 1 {
                return Some(group[0]);
            }
            let want = if i % 2 == 0 {
                Polarization::V
            } else {
                Polarization::H
            };
            group
                .iter()
                .copied()
                .find(|&p| g.elements[p].polarization == Some(want))
        })
        .collect()
}

/// Antenna order for `label`. Ranked orders use linear average gain with
/// ties broken by ascending index; `weakest_first` is the exact reverse of
/// `strongest_first`.
pub fn order_antennas(
    tensor: &ChannelTensor,
    user: usize,
    label: OrderLabel,
    geometry: Option<&ArrayGeometry>,
) -> Result<SubsetSelection> {
    let antennas = tensor.antennas();
    let indices = match label {
        OrderLabel::Original => (0..antennas).collect(),
        OrderLabel::StrongestFirst | OrderLabel::WeakestFirst => {
            let gains = average_gains(tensor, user)?;
            let mut idx: Vec<usize> = (0..antennas).collect();
            idx.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]).then(a.cmp(&b)));
            if label == OrderLabel::WeakestFirst {
                idx.reverse();
            }
            idx
        }
        OrderLabel::VerticalOnly => {
            polarized_geometry(tensor, label, geometry)?.ports_with(Polarization::V)
        }
        OrderLabel::HorizontalOnly => {
            polarized_geometry(tensor, label, geometry)?.ports_with(Polarization::H)
        }
        OrderLabel::BothAlternating => alternating(polarized_geometry(tensor, label, geometry)?),
        OrderLabel::Explicit => {
            return Err(Error::InvalidArgument(
                "explicit selections are built with SubsetSelection::new".into(),
            ))
        }
    };
    SubsetSelection::new(indices, label, antennas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrays::{build_cylindrical, build_linear, build_planar};
    use crate::tensor::{Dims, TensorMeta};
    use num_complex::Complex64;

    fn per_antenna(values: &[f64]) -> ChannelTensor {
        ChannelTensor::from_fn(
            Dims::new(1, 2, 2, values.len()),
            TensorMeta::default(),
            |_, _, _, m| Complex64::new(values[m], 0.0),
        )
        .unwrap()
    }

    #[test]
    fn strongest_and_weakest_are_reverses() {
        let t = per_antenna(&[1.0, 3.0, 2.0, 3.0, 0.5]);
        let s = order_antennas(&t, 0, OrderLabel::StrongestFirst, None).unwrap();
        let w = order_antennas(&t, 0, OrderLabel::WeakestFirst, None).unwrap();
        assert_eq!(s.indices(), &[1, 3, 2, 0, 4]);
        let mut r = w.indices().to_vec();
        r.reverse();
        assert_eq!(r, s.indices());
    }

    #[test]
    fn constant_gain_keeps_ascending_order() {
        let t = per_antenna(&[1.0; 6]);
        let s = order_antennas(&t, 0, OrderLabel::StrongestFirst, None).unwrap();
        assert_eq!(s.indices(), &[0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn cylinder_polarization_orders() {
        let g = build_cylindrical();
        let t = per_antenna(&[1.0; 128]);
        let v = order_antennas(&t, 0, OrderLabel::VerticalOnly, Some(&g)).unwrap();
        let h = order_antennas(&t, 0, OrderLabel::HorizontalOnly, Some(&g)).unwrap();
        assert_eq!(v.len(), 64);
        assert_eq!(h.len(), 64);
        let mut all: Vec<usize> = v.indices().iter().chain(h.indices()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..128).collect::<Vec<_>>());

        let b = order_antennas(&t, 0, OrderLabel::BothAlternating, Some(&g)).unwrap();
        assert_eq!(b.len(), 64);
        for (i, &p) in b.indices().iter().enumerate() {
            let want = if i % 2 == 0 {
                Polarization::V
            } else {
                Polarization::H
            };
            assert_eq!(g.elements[p].polarization, Some(want));
            // one port per physical position
            assert_eq!(p / 2, i);
        }
    }

    #[test]
    fn planar_alternating_covers_all_ports() {
        let g = build_planar();
        let t = per_antenna(&[1.0; 100]);
        let b = order_antennas(&t, 0, OrderLabel::BothAlternating, Some(&g)).unwrap();
        assert_eq!(b.len(), 100);
    }

    #[test]
    fn polarization_order_needs_tags() {
        let t = per_antenna(&[1.0; 4]);
        assert!(matches!(
            order_antennas(&t, 0, OrderLabel::VerticalOnly, None),
            Err(Error::MissingPolarization(_))
        ));
        let g = build_linear(4, 0.5, 2.6e9);
        assert!(matches!(
            order_antennas(&t, 0, OrderLabel::BothAlternating, Some(&g)),
            Err(Error::MissingPolarization(_))
        ));
    }
}
