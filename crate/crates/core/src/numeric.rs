//! Small numerical helpers shared across modules.

const PAIRWISE_BLOCK: usize = 64;

/// Pairwise (cascade) summation; error grows as O(log n) instead of O(n).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

/// Population standard deviation about the sample mean.
pub fn population_std(values: &[f64]) -> (f64, f64) {
    let mu = mean(values);
    let sq: Vec<f64> = values.iter().map(|v| (v - mu) * (v - mu)).collect();
    (mu, mean(&sq).sqrt())
}

/// Linear power to dB, clamped at `floor_db`.
pub fn power_db(power: f64, floor_db: f64) -> f64 {
    if power <= 0.0 {
        return floor_db;
    }
    (10.0 * power.log10()).max(floor_db)
}

/// Evenly spaced baseband frequency offsets covering `bandwidth_hz`,
/// centred on zero. A single point sits at zero.
pub fn frequency_grid(freqs: usize, bandwidth_hz: f64) -> Vec<f64> {
    if freqs <= 1 {
        return vec![0.0; freqs];
    }
    let step = bandwidth_hz / (freqs - 1) as f64;
    (0..freqs)
        .map(|i| -0.5 * bandwidth_hz + step * i as f64)
        .collect()
}
