//! Adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Intervals are bisected in order of largest error estimate until the summed
//! error estimate falls below the absolute target. Running out of the
//! subdivision budget is an error, never a silently degraded answer.

use alloc::vec::Vec;

use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integration controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    /// Absolute error target for the whole integral.
    pub abs_tol: f64,
    /// Relative error target; the effective target is `max(abs_tol, rel_tol·|I|)`.
    pub rel_tol: f64,
    /// Maximum number of subintervals.
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn abs(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = h * x;
        let sum = f(c - dx) + f(c + dx);
        kronrod += w * sum;
        // odd Kronrod abscissae are the Gauss nodes
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Quadrature> {
    integrate_with_breaks(f, a, b, &[], opts)
}

/// Integrates `f` over `[a, b]`, splitting first at the given interior
/// breakpoints (kinks, jumps, peaks). Breakpoints outside `(a, b)` are ignored.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    cuts.push(lo);
    cuts.extend(breaks.iter().copied().filter(|&x| x > lo && x < hi));
    cuts.push(hi);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();

    let mut segs: Vec<Segment> = cuts.windows(2).map(|w| gk15(&mut f, w[0], w[1])).collect();
    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(Quadrature {
                value: sign * value,
                error,
                intervals: segs.len(),
            });
        }
        if segs.len() >= opts.max_intervals {
            return Err(Error::QuadratureFailure {
                estimate: sign * value,
                error,
            });
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc });
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if !(mid > s.a && mid < s.b) {
            return Err(Error::QuadratureFailure {
                estimate: sign * value,
                error,
            });
        }
        segs.push(gk15(&mut f, s.a, mid));
        segs.push(gk15(&mut f, mid, s.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let q = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, QuadOptions::abs(1e-13)).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((q.value - exact).abs() < 1e-13);
    }

    #[test]
    fn gaussian_integral() {
        let q = integrate(|x| (-x * x).exp(), -10.0, 10.0, QuadOptions::abs(1e-13)).unwrap();
        assert!((q.value - core::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn kink_with_breakpoint() {
        let q = integrate_with_breaks(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], QuadOptions::abs(1e-14)).unwrap();
        assert!((q.value - (0.045 + 0.245)).abs() < 1e-14);
        assert!(q.intervals <= 2);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let q = integrate(|x| x, 1.0, 0.0, QuadOptions::default()).unwrap();
        assert!((q.value + 0.5).abs() < 1e-15);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let opts = QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 0.0,
            max_intervals: 3,
        };
        let r = integrate(|x: f64| if x < 0.123_456 { 0.0 } else { 1.0 }, 0.0, 1.0, opts);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}
