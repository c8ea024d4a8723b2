//! Seeded hit-or-miss volume estimation.
//!
//! Samples are drawn in fixed-size batches and batch `k` draws from its own
//! stream seeded by `(seed, k)`. The estimate therefore depends only on
//! `(predicate, bounding box, n, seed)` and not on how batches are scheduled,
//! which lets the std side fan batches out over threads and still reproduce
//! the sequential answer bit for bit.

use alloc::vec::Vec;
use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;

use crate::error::out_of_range;
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

/// Number of samples per independently seeded batch.
pub const BATCH_SIZE: u64 = 8192;

/// Smallest admissible sample count for [`mc_volume`].
pub const MIN_SAMPLES: u64 = 10_000;

/// Axis-aligned sampling box.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        debug_assert_eq!(lo.len(), hi.len());
        Self { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Uniform double in `[0, 1)` from the top 53 bits.
#[inline]
pub fn unit_f64<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Deterministic stream for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> Pcg64Mcg {
    // splitmix64 finaliser keeps neighbouring streams decorrelated
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    Pcg64Mcg::seed_from_u64(z)
}

/// Number of batches needed for `n` samples.
pub fn batch_count(n: u64) -> u64 {
    n.div_ceil(BATCH_SIZE)
}

fn batch_len(n: u64, batch: u64) -> u64 {
    let start = batch * BATCH_SIZE;
    BATCH_SIZE.min(n.saturating_sub(start))
}

/// Sums `f` over the sample points of one batch; returns `(Σf, Σf²)`.
pub fn batch_moments<F: FnMut(&[f64]) -> f64>(
    bbox: &SampleBox,
    n: u64,
    seed: u64,
    batch: u64,
    mut f: F,
) -> (f64, f64) {
    let mut rng = stream_rng(seed, batch);
    let mut x = alloc::vec![0.0; bbox.dim()];
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..batch_len(n, batch) {
        for (k, xk) in x.iter_mut().enumerate() {
            *xk = bbox.lo[k] + (bbox.hi[k] - bbox.lo[k]) * unit_f64(&mut rng);
        }
        let v = f(&x);
        s1 += v;
        s2 += v * v;
    }
    (s1, s2)
}

/// Combines per-batch moments (in batch order) into a mean estimate of
/// `|box|·E[f]`.
pub fn combine_moments(bbox: &SampleBox, n: u64, moments: &[(f64, f64)]) -> McEstimate {
    let (s1, s2) = moments.iter().fold((0.0, 0.0), |acc, m| (acc.0 + m.0, acc.1 + m.1));
    let nf = n as f64;
    let mean = s1 / nf;
    let var = (s2 / nf - mean * mean).max(0.0);
    let vol = bbox.volume();
    McEstimate {
        estimate: vol * mean,
        std_error: vol * (var / nf).sqrt(),
        samples: n,
    }
}

/// Integral of `f` over the box by plain Monte Carlo.
pub fn mc_integral<F: FnMut(&[f64]) -> f64>(bbox: &SampleBox, n: u64, seed: u64, mut f: F) -> Result<McEstimate> {
    if n == 0 {
        return Err(out_of_range("n", "need at least one sample"));
    }
    let moments: Vec<(f64, f64)> = (0..batch_count(n))
        .map(|b| batch_moments(bbox, n, seed, b, &mut f))
        .collect();
    Ok(combine_moments(bbox, n, &moments))
}

/// Hit-or-miss volume of `{x in box : inside(x)}`.
///
/// The standard error is `|box|·sqrt(p(1-p)/n)`, which is exactly what the
/// moment formula gives for an indicator.
pub fn mc_volume<F: FnMut(&[f64]) -> bool>(bbox: &SampleBox, n: u64, seed: u64, mut inside: F) -> Result<McEstimate> {
    if n < MIN_SAMPLES {
        return Err(out_of_range("n", "Monte Carlo volume needs n >= 10^4"));
    }
    mc_integral(bbox, n, seed, |x| if inside(x) { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit_square() -> SampleBox {
        SampleBox::new(vec![0.0, 0.0], vec![1.0, 1.0])
    }

    #[test]
    fn full_box_is_exact() {
        let e = mc_volume(&unit_square(), 20_000, 7, |_| true).unwrap();
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn disk_area_within_four_sigma() {
        let e = mc_volume(&unit_square(), 1_000_000, 42, |x| {
            (x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2) < 0.25
        })
        .unwrap();
        let exact = core::f64::consts::PI / 4.0;
        assert!((e.estimate - exact).abs() <= 4.0 * e.std_error, "{e:?}");
        let p = e.estimate;
        assert!((e.std_error - (p * (1.0 - p) / 1e6).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_answer() {
        let pred = |x: &[f64]| x[0] * x[0] + x[1] < 0.7;
        let a = mc_volume(&unit_square(), 50_000, 3, pred).unwrap();
        let b = mc_volume(&unit_square(), 50_000, 3, pred).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        let c = mc_volume(&unit_square(), 50_000, 4, pred).unwrap();
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn too_few_samples_rejected() {
        assert!(mc_volume(&unit_square(), 9_999, 1, |_| true).is_err());
    }

    #[test]
    fn unit_f64_range() {
        let mut r = stream_rng(1, 2);
        for _ in 0..10_000 {
            let u = unit_f64(&mut r);
            assert!((0.0..1.0).contains(&u));
        }
    }
}
