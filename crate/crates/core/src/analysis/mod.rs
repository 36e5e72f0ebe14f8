//! Selection orders, hardening curves, CDFs, gain maps, spreads and
//! polarization statistics.

pub mod cdf;
pub mod curves;
pub mod order;
pub mod stats;

pub use cdf::{exponential_reference_cdf, ks_distance, EmpiricalCdf, CDF_FLOOR_DB};
pub use curves::{
    average_curves, average_deltas, curve_delta, hardening_curve, rank_users_by_hardening,
};
pub use order::{average_gains, order_antennas};
pub use stats::{
    gain_map, pol_ratio_stats, scenario_summary, time_freq_spread, GainMap, PolRatioStats,
    ScenarioSummary, Spread, GAIN_FLOOR_DB,
};
