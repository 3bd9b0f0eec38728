//! Noise-robustness and timing studies.

mod noise;
mod rng;
mod timing;

pub use noise::{
    false_edge_rate, gaussian_noise, noise_study, noise_study_tuned, salt_pepper, NoiseReport,
    NoiseRow, NoiseSummary,
};
pub use rng::SplitMix64;
pub use timing::{timing_scene, timing_study, MemoryProbe, TimingReport, TimingRow};

/// Median of `values`; the mean of the middle pair for even lengths, NaN
/// when empty.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::median;

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }
}
