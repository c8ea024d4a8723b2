//! Batch-parallel Monte Carlo. Batches use the same per-batch streams as the
//! sequential estimator in `heatlab_core::montecarlo`, and moments are
//! combined in batch order, so results do not depend on the thread count.

use heatlab_core::montecarlo::{batch_count, batch_moments, combine_moments, McEstimate, SampleBox, MIN_SAMPLES};
use rayon::prelude::*;

use crate::error::{HarnessError, HarnessResult};

pub fn mc_integral<F>(bbox: &SampleBox, n: u64, seed: u64, f: F) -> HarnessResult<McEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if n < MIN_SAMPLES {
        return Err(HarnessError::config("samples", "Monte Carlo needs at least 10^4 samples"));
    }
    let moments: Vec<(f64, f64)> = (0..batch_count(n))
        .into_par_iter()
        .map(|b| batch_moments(bbox, n, seed, b, &f))
        .collect();
    Ok(combine_moments(bbox, n, &moments))
}

/// Hit-or-miss volume of `{x in bbox : inside(x)}` with
/// `std_error = |bbox|·sqrt(p(1-p)/n)`.
pub fn mc_volume<F>(bbox: &SampleBox, n: u64, seed: u64, inside: F) -> HarnessResult<McEstimate>
where
    F: Fn(&[f64]) -> bool + Sync,
{
    mc_integral(bbox, n, seed, |x| if inside(x) { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_sequential_estimator() {
        let sb = SampleBox::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        let disk = |x: &[f64]| (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2) < 0.25;
        let par = mc_volume(&sb, 100_000, 7, disk).unwrap();
        let seq = heatlab_core::montecarlo::mc_volume(&sb, 100_000, 7, disk).unwrap();
        assert_eq!(par, seq);
        let full = mc_volume(&sb, 10_000, 1, |_| true).unwrap();
        assert_eq!((full.estimate, full.std_error), (1.0, 0.0));
        assert!(mc_volume(&sb, 9_999, 1, |_| true).is_err());
    }

    #[test]
    fn disk_area_within_four_sigma() {
        let sb = SampleBox::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        let est = mc_volume(&sb, 1_000_000, 42, |x| (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2) < 0.25).unwrap();
        let p = est.estimate;
        assert!((p - std::f64::consts::FRAC_PI_4).abs() < 4.0 * est.std_error);
        // indicator moments reproduce the binomial standard error
        assert!((est.std_error - (p * (1.0 - p) / 1e6).sqrt()).abs() < 1e-12);
    }
}
