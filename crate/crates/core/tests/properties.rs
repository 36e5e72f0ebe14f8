mod common;

use chhard_core::analysis::{hardening_curve, order_antennas};
use chhard_core::io::{decode_tensor, encode_tensor};
use chhard_core::{
    build_cylindrical, hardening, normalize, prefix_hardening, std_gain, subset_gain, Dims,
    OrderLabel, SubsetSelection,
};
use common::fuzz_tensor;
use proptest::prelude::*;

fn small_dims() -> impl Strategy<Value = Dims> {
    (1usize..3, 2usize..6, 1usize..4, 1usize..9).prop_map(|(k, n, f, m)| Dims::new(k, n, f, m))
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_prefix_has_unit_mean(dims in small_dims(), seed in any::<u64>()) {
        let t = fuzz_tensor(dims, seed);
        for label in [OrderLabel::Original, OrderLabel::StrongestFirst, OrderLabel::WeakestFirst] {
            let sel = order_antennas(&t, 0, label, None).unwrap();
            for size in 1..=sel.len() {
                let block = normalize(&t, 0, &sel.prefix(size).unwrap()).unwrap();
                prop_assert!(rel_close(block.mean_power(), 1.0, 1e-9));
                prop_assert!(rel_close(subset_gain(&block).mean(), 1.0, 1e-9));
            }
        }
    }

    #[test]
    fn std_db_is_scale_invariant(dims in small_dims(), seed in any::<u64>(), exp in -30i32..30) {
        let t = fuzz_tensor(dims, seed);
        let c = 10f64.powi(exp);
        let sel = SubsetSelection::all(dims.antennas).unwrap();
        let a = prefix_hardening(&t, 0, &sel).unwrap();
        let b = prefix_hardening(&t.scaled(c), 0, &sel).unwrap();
        for (x, y) in a.std_db.iter().zip(&b.std_db) {
            prop_assert!(x == y || (x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn full_set_std_ignores_antenna_order(dims in small_dims(), seed in any::<u64>(), shift in 0usize..8) {
        let t = fuzz_tensor(dims, seed);
        let m = dims.antennas;
        let rotated: Vec<usize> = (0..m).map(|i| (i + shift) % m).collect();
        let sel = SubsetSelection::new(rotated, OrderLabel::Explicit, m).unwrap();
        let a = std_gain(&subset_gain(&normalize(&t, 0, &sel).unwrap())).unwrap();
        let b = std_gain(&subset_gain(&normalize(&t, 0, &SubsetSelection::all(m).unwrap()).unwrap())).unwrap();
        prop_assert!(a.std_db == b.std_db || (a.std_db - b.std_db).abs() < 1e-9);
    }

    #[test]
    fn normalization_is_idempotent(dims in small_dims(), seed in any::<u64>()) {
        let t = fuzz_tensor(dims, seed);
        let sel = SubsetSelection::all(dims.antennas).unwrap();
        let once = normalize(&t, 0, &sel).unwrap();
        let again = normalize(&once.to_tensor(t.meta().clone()).unwrap(), 0, &sel).unwrap();
        prop_assert!((again.scale() - 1.0).abs() < 1e-9);
        for (a, b) in once.data().iter().zip(again.data()) {
            prop_assert!((a - b).norm() < 1e-9 * a.norm().max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn fast_prefix_route_matches_explicit_subsets(dims in small_dims(), seed in any::<u64>()) {
        let t = fuzz_tensor(dims, seed);
        let sel = order_antennas(&t, 0, OrderLabel::StrongestFirst, None).unwrap();
        let subsets: Vec<_> = (1..=sel.len()).map(|s| sel.prefix(s).unwrap()).collect();
        let slow = hardening(&t, 0, &subsets).unwrap();
        let fast = prefix_hardening(&t, 0, &sel).unwrap();
        for (x, y) in slow.std_db.iter().zip(&fast.std_db) {
            prop_assert!(x == y || (x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn tensor_file_roundtrip_is_bit_exact(dims in small_dims(), seed in any::<u64>(), masked in any::<bool>()) {
        let mut t = fuzz_tensor(dims, seed);
        if masked {
            let mask = (0..dims.users * dims.snapshots).map(|i| (i as u64 ^ seed) % 3 != 0).collect();
            t = t.with_mask(mask).unwrap();
        }
        let back = decode_tensor(&encode_tensor(&t)).unwrap();
        prop_assert_eq!(back.dims(), t.dims());
        prop_assert_eq!(back.meta(), t.meta());
        prop_assert_eq!(back.mask(), t.mask());
        for (a, b) in t.samples().iter().zip(back.samples()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}

#[test]
fn full_permutation_orders_share_their_endpoint() {
    let g = build_cylindrical();
    for seed in 0..10 {
        let t = fuzz_tensor(Dims::new(1, 4, 3, g.len()), seed);
        let ends: Vec<f64> = [
            OrderLabel::Original,
            OrderLabel::StrongestFirst,
            OrderLabel::WeakestFirst,
        ]
        .iter()
        .map(|&l| {
            *hardening_curve(&t, 0, l, Some(&g))
                .unwrap()
                .std_db
                .last()
                .unwrap()
        })
        .collect();
        for e in &ends[1..] {
            assert!((e - ends[0]).abs() < 1e-9, "{ends:?}");
        }
    }
}

#[test]
fn half_span_orders_cover_each_polarization_once() {
    let g = build_cylindrical();
    let t = fuzz_tensor(Dims::new(1, 3, 2, g.len()), 4);
    let v = order_antennas(&t, 0, OrderLabel::VerticalOnly, Some(&g)).unwrap();
    let h = order_antennas(&t, 0, OrderLabel::HorizontalOnly, Some(&g)).unwrap();
    assert_eq!(v.len() + h.len(), g.len());
    let mut all: Vec<usize> = v.indices().iter().chain(h.indices()).copied().collect();
    all.sort_unstable();
    assert_eq!(all, (0..g.len()).collect::<Vec<_>>());

    let alt = order_antennas(&t, 0, OrderLabel::BothAlternating, Some(&g)).unwrap();
    assert_eq!(alt.len(), g.position_groups.len());
    for (i, group) in g.position_groups.iter().enumerate() {
        assert!(group.contains(&alt.indices()[i]));
    }
}

#[test]
fn constant_channel_has_no_variation() {
    let t = chhard_core::ChannelTensor::from_fn(
        Dims::new(1, 5, 3, 4),
        Default::default(),
        |_, _, _, m| chhard_core::Complex64::new(1.0 + m as f64, 0.5),
    )
    .unwrap();
    let c = prefix_hardening(&t, 0, &SubsetSelection::all(4).unwrap()).unwrap();
    assert!(c.std_db.iter().all(|v| *v == f64::NEG_INFINITY));
    assert_eq!(c.hardening_db, 0.0);
}
