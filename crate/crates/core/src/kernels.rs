//! Neumann heat kernels that can be evaluated exactly: free space, the
//! half-space, the interval `[0, L]` and axis boxes `Π [0, L_i]`.
//!
//! Interval kernels come in two forms with certified truncation errors:
//! the method of images (fast for small `t`) and the cosine eigen-expansion
//! (fast for large `t`). Box kernels are tensor products of interval kernels.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::out_of_range;
use crate::quadrature::{integrate_with_breaks, QuadOptions};
use crate::{Error, Result};

pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-14;
/// Longest cosine series the spectral branch will sum.
pub const MAX_SPECTRAL_TERMS: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum KernelVariant {
    Free(usize),
    /// `{x_d > 0}` in dimension `d`.
    HalfSpace(usize),
    Interval(f64),
    Box(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    variant: KernelVariant,
    truncation_tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    /// Certified bound on the absolute truncation error.
    pub tail_bound: f64,
}

impl KernelValue {
    fn exact(value: f64) -> Self {
        KernelValue { value, tail_bound: 0.0 }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonpositiveTime)
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= 1e-6 {
        Ok(())
    } else {
        Err(out_of_range("truncation_tol", "must lie in (0, 1e-6]"))
    }
}

/// 1-D Gaussian `(4πt)^{-1/2} e^{-z²/4t}`.
#[inline]
fn gauss(z: f64, t: f64) -> f64 {
    (-z * z / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// `(4πt)^{-d/2} e^{-|x-y|²/4t}`.
pub fn free_kernel(t: f64, x: &[f64], y: &[f64]) -> Result<KernelValue> {
    check_time(t)?;
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    let d = x.len() as f64;
    Ok(KernelValue::exact((4.0 * PI * t).powf(-0.5 * d) * (-r2 / (4.0 * t)).exp()))
}

/// Diagonal of the half-space Neumann kernel at height `h` above the wall.
pub fn halfspace_diag(t: f64, h: f64, d: usize) -> Result<KernelValue> {
    check_time(t)?;
    if !(h >= 0.0) {
        return Err(Error::OutOfDomain);
    }
    Ok(KernelValue::exact(
        (4.0 * PI * t).powf(-0.5 * d as f64) * (1.0 + (-h * h / t).exp()),
    ))
}

fn check_interval(l: f64, x: f64, y: f64) -> Result<()> {
    if !(l > 0.0) {
        return Err(out_of_range("L", "interval length must be positive"));
    }
    if !(0.0..=l).contains(&x) || !(0.0..=l).contains(&y) {
        return Err(Error::OutOfDomain);
    }
    Ok(())
}

/// Bound on the image terms with `|n| > n_max`.
fn image_tail(l: f64, t: f64, n_max: u64) -> f64 {
    let a = l * l / t;
    let n = n_max as f64;
    4.0 / (4.0 * PI * t).sqrt() * (-n * n * a).exp() / (1.0 - (-(2.0 * n + 1.0) * a).exp())
}

/// Method of images: `Σ_n g(x - y - 2nL) + g(x + y - 2nL)`.
pub fn interval_kernel_images(l: f64, t: f64, x: f64, y: f64, tol: f64) -> Result<KernelValue> {
    check_time(t)?;
    check_interval(l, x, y)?;
    check_tol(tol)?;
    let mut n_max = 1u64;
    while image_tail(l, t, n_max) > tol {
        n_max += 1;
    }
    let mut value = gauss(x - y, t) + gauss(x + y, t);
    for n in 1..=n_max {
        let s = 2.0 * n as f64 * l;
        value += gauss(x - y - s, t) + gauss(x - y + s, t) + gauss(x + y - s, t) + gauss(x + y + s, t);
    }
    Ok(KernelValue { value, tail_bound: image_tail(l, t, n_max) })
}

fn spectral_tail(l: f64, b: f64, n_max: u64) -> f64 {
    let n = n_max as f64;
    2.0 / l * (-b * (n + 1.0) * (n + 1.0)).exp() / (1.0 - (-b * (2.0 * n + 3.0)).exp())
}

/// Smallest `N` with the cosine tail below `tol`, or `SeriesTooLong`.
fn spectral_terms(l: f64, t: f64, tol: f64) -> Result<u64> {
    let b = t * PI * PI / (l * l);
    let guess = ((2.0 / (l * tol)).max(1.0).ln() / b).sqrt();
    if guess > MAX_SPECTRAL_TERMS as f64 {
        return Err(Error::SeriesTooLong { terms: guess as u64 });
    }
    let mut n = (guess as u64).saturating_sub(2);
    while spectral_tail(l, b, n) > tol {
        n += 1;
    }
    if n > MAX_SPECTRAL_TERMS {
        return Err(Error::SeriesTooLong { terms: n });
    }
    Ok(n)
}

/// Cosine expansion `1/L + (2/L) Σ cos(nπx/L) cos(nπy/L) e^{-tn²π²/L²}`.
pub fn interval_kernel_spectral(l: f64, t: f64, x: f64, y: f64, tol: f64) -> Result<KernelValue> {
    check_time(t)?;
    check_interval(l, x, y)?;
    check_tol(tol)?;
    let n_max = spectral_terms(l, t, tol)?;
    let b = t * PI * PI / (l * l);
    let mut sum = 0.0;
    for n in 1..=n_max {
        let k = n as f64 * PI / l;
        sum += (k * x).cos() * (k * y).cos() * (-b * (n * n) as f64).exp();
    }
    Ok(KernelValue {
        value: (1.0 + 2.0 * sum) / l,
        tail_bound: spectral_tail(l, b, n_max),
    })
}

/// Interval kernel choosing images for `t <= L²/4` and the cosine series
/// otherwise.
pub fn interval_kernel(l: f64, t: f64, x: f64, y: f64, tol: f64) -> Result<KernelValue> {
    if t <= 0.25 * l * l {
        interval_kernel_images(l, t, x, y, tol)
    } else {
        interval_kernel_spectral(l, t, x, y, tol)
    }
}

/// Tensor product of interval kernels on `Π [0, L_i]`. Per-factor tolerances
/// are tightened so the propagated bound stays below `tol`.
pub fn box_kernel(lengths: &[f64], t: f64, x: &[f64], y: &[f64], tol: f64) -> Result<KernelValue> {
    check_time(t)?;
    check_tol(tol)?;
    let d = lengths.len();
    if x.len() != d || y.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len().min(y.len()) });
    }
    let factors = |ftol: f64| -> Result<Vec<KernelValue>> {
        (0..d).map(|i| interval_kernel(lengths[i], t, x[i], y[i], ftol)).collect()
    };
    let first = factors(tol)?;
    let scale: f64 = first.iter().map(|f| f.value + 1.0).product();
    let ftol = (tol / (d as f64 * scale)).min(tol);
    let fs = if d == 1 { first } else { factors(ftol)? };
    let value: f64 = fs.iter().map(|f| f.value).product();
    // |Π v - Π w| <= Π(|w| + e) - Π|w|
    let upper: f64 = fs.iter().map(|f| f.value.abs() + f.tail_bound).product();
    let lower: f64 = fs.iter().map(|f| f.value.abs()).product();
    Ok(KernelValue { value, tail_bound: upper - lower })
}

pub fn box_kernel_diag(lengths: &[f64], t: f64, x: &[f64], tol: f64) -> Result<KernelValue> {
    box_kernel(lengths, t, x, x, tol)
}

/// `√(4πt)·k(t, x, x) - 1` on `[0, L]` without the cancellation of the
/// direct difference: in the image regime the central term is left out of
/// the sum instead of being subtracted.
pub fn interval_diag_excess(l: f64, t: f64, x: f64, tol: f64) -> Result<KernelValue> {
    check_time(t)?;
    check_interval(l, x, x)?;
    check_tol(tol)?;
    let scale = (4.0 * PI * t).sqrt();
    if t > 0.25 * l * l {
        let v = interval_kernel_spectral(l, t, x, x, tol)?;
        return Ok(KernelValue { value: scale * v.value - 1.0, tail_bound: scale * v.tail_bound });
    }
    let mut n_max = 1u64;
    while image_tail(l, t, n_max) > tol {
        n_max += 1;
    }
    let e = |z: f64| (-z * z / (4.0 * t)).exp();
    let mut value = e(2.0 * x);
    for n in 1..=n_max {
        let s = 2.0 * n as f64 * l;
        value += 2.0 * e(s) + e(2.0 * x - s) + e(2.0 * x + s);
    }
    Ok(KernelValue { value, tail_bound: scale * image_tail(l, t, n_max) })
}

/// `(4πt)^{d/2}·k(t, x, x) - 1` on a box, as `expm1(Σ ln(1 + a_i))`.
pub fn box_diag_excess(lengths: &[f64], t: f64, x: &[f64], tol: f64) -> Result<KernelValue> {
    if x.len() != lengths.len() {
        return Err(Error::DimensionMismatch { expected: lengths.len(), got: x.len() });
    }
    let parts: Vec<KernelValue> = lengths
        .iter()
        .zip(x)
        .map(|(&l, &xi)| interval_diag_excess(l, t, xi, tol))
        .collect::<Result<_>>()?;
    let value = parts.iter().map(|a| a.value.ln_1p()).sum::<f64>().exp_m1();
    let upper: f64 = parts.iter().map(|a| 1.0 + a.value + a.tail_bound).product();
    Ok(KernelValue { value, tail_bound: upper - 1.0 - value })
}

impl KernelSpec {
    pub fn new(variant: KernelVariant, truncation_tol: f64) -> Result<Self> {
        check_tol(truncation_tol)?;
        match &variant {
            KernelVariant::Free(d) | KernelVariant::HalfSpace(d) if *d == 0 => {
                return Err(out_of_range("d", "dimension must be >= 1"));
            }
            KernelVariant::Interval(l) if !(*l > 0.0 && l.is_finite()) => {
                return Err(out_of_range("L", "interval length must be positive"));
            }
            KernelVariant::Box(ls) if ls.is_empty() || ls.iter().any(|l| !(*l > 0.0 && l.is_finite())) => {
                return Err(out_of_range("lengths", "box lengths must be positive"));
            }
            _ => {}
        }
        Ok(KernelSpec { variant, truncation_tol })
    }

    pub fn interval(l: f64) -> Result<Self> {
        Self::new(KernelVariant::Interval(l), DEFAULT_TRUNCATION_TOL)
    }

    pub fn boxed(lengths: Vec<f64>) -> Result<Self> {
        Self::new(KernelVariant::Box(lengths), DEFAULT_TRUNCATION_TOL)
    }

    pub fn variant(&self) -> &KernelVariant {
        &self.variant
    }

    pub fn truncation_tol(&self) -> f64 {
        self.truncation_tol
    }

    pub fn dim(&self) -> usize {
        match &self.variant {
            KernelVariant::Free(d) | KernelVariant::HalfSpace(d) => *d,
            KernelVariant::Interval(_) => 1,
            KernelVariant::Box(ls) => ls.len(),
        }
    }

    /// One-dimensional factor in coordinate `i`; every supported kernel is a
    /// product of these.
    fn factor(&self, i: usize, t: f64, xi: f64, yi: f64) -> Result<KernelValue> {
        let tol = self.truncation_tol;
        match &self.variant {
            KernelVariant::Free(_) => Ok(KernelValue::exact(gauss(xi - yi, t))),
            KernelVariant::HalfSpace(d) if i + 1 == *d => {
                if xi < 0.0 || yi < 0.0 {
                    return Err(Error::OutOfDomain);
                }
                Ok(KernelValue::exact(gauss(xi - yi, t) + gauss(xi + yi, t)))
            }
            KernelVariant::HalfSpace(_) => Ok(KernelValue::exact(gauss(xi - yi, t))),
            KernelVariant::Interval(l) => interval_kernel(*l, t, xi, yi, tol),
            KernelVariant::Box(ls) => interval_kernel(ls[i], t, xi, yi, tol),
        }
    }

    pub fn eval(&self, t: f64, x: &[f64], y: &[f64]) -> Result<KernelValue> {
        check_time(t)?;
        let d = self.dim();
        if x.len() != d || y.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len().min(y.len()) });
        }
        match &self.variant {
            KernelVariant::Box(ls) => box_kernel(ls, t, x, y, self.truncation_tol),
            _ => {
                let mut value = 1.0;
                let mut tail = 0.0;
                for i in 0..d {
                    let f = self.factor(i, t, x[i], y[i])?;
                    tail = tail * (f.value.abs() + f.tail_bound) + value.abs() * f.tail_bound;
                    value *= f.value;
                }
                Ok(KernelValue { value, tail_bound: tail })
            }
        }
    }

    /// Integration range of coordinate `i` for a kernel centred at `xi`.
    fn support(&self, i: usize, t: f64, xi: f64) -> (f64, f64) {
        let w = 40.0 * t.sqrt();
        match &self.variant {
            KernelVariant::Free(_) => (xi - w, xi + w),
            KernelVariant::HalfSpace(d) if i + 1 == *d => (0.0, xi + w),
            KernelVariant::HalfSpace(_) => (xi - w, xi + w),
            KernelVariant::Interval(l) => (0.0, *l),
            KernelVariant::Box(ls) => (0.0, ls[i]),
        }
    }
}

/// `∫_Ω k(t, x, y) dy`, computed as a product of 1-D adaptive quadratures
/// (each kernel here is a tensor product). Equals 1 for a Neumann kernel.
pub fn mass_integral(spec: &KernelSpec, t: f64, x: &[f64]) -> Result<f64> {
    check_time(t)?;
    if x.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: x.len() });
    }
    let opts = QuadOptions::abs(1e-12);
    let mut mass = 1.0;
    for (i, &xi) in x.iter().enumerate() {
        let (a, b) = spec.support(i, t, xi);
        let mut err = None;
        let q = integrate_with_breaks(
            |y| match spec.factor(i, t, xi, y) {
                Ok(v) => v.value,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            },
            a,
            b,
            &[xi],
            opts,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        mass *= q.value;
    }
    Ok(mass)
}

/// `|∫_0^L k(t,x,z) k(s,z,y) dz - k(t+s,x,y)|` for the interval kernel.
pub fn semigroup_residual(l: f64, t: f64, s: f64, x: f64, y: f64) -> Result<f64> {
    check_time(t)?;
    check_time(s)?;
    check_interval(l, x, y)?;
    let tol = DEFAULT_TRUNCATION_TOL;
    let q = integrate_with_breaks(
        |z| {
            let a = interval_kernel(l, t, x, z, tol).map(|v| v.value).unwrap_or(f64::NAN);
            let b = interval_kernel(l, s, z, y, tol).map(|v| v.value).unwrap_or(f64::NAN);
            a * b
        },
        0.0,
        l,
        &[x, y],
        QuadOptions::abs(1e-12),
    )?;
    if !q.value.is_finite() {
        return Err(Error::QuadratureFailure { estimate: q.value, error: q.error });
    }
    Ok((q.value - interval_kernel(l, t + s, x, y, tol)?.value).abs())
}

/// Grid lower estimate of the weighted norm
/// `sup_{s,y} k(s,x,y) s^{d/2} e^{|x-y|²/(4(1+δ)s)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GNormEstimate {
    pub value: f64,
    /// Time at which the grid maximum was attained.
    pub argmax_s: f64,
    pub s_points: usize,
    /// Grid points per coordinate.
    pub y_points: usize,
    pub refinements: u32,
    /// Relative change of the last refinement.
    pub last_change: f64,
}

/// Evaluates the weighted sup on explicit grids. The weight and the kernel
/// both factor over coordinates, so for each `s` the `y`-sup is a product of
/// 1-D sups over the per-coordinate grid.
pub fn g_norm_on_grid(spec: &KernelSpec, delta: f64, x: &[f64], s_grid: &[f64], y_grid: &[Vec<f64>]) -> Result<(f64, f64)> {
    if !(delta > 0.0) {
        return Err(out_of_range("delta", "must be positive"));
    }
    let d = spec.dim();
    if x.len() != d || y_grid.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    let mut best = (0.0f64, s_grid.first().copied().unwrap_or(0.0));
    for &s in s_grid {
        check_time(s)?;
        let mut prod = 1.0;
        for i in 0..d {
            let mut m: f64 = 0.0;
            for &yi in &y_grid[i] {
                let k = spec.factor(i, s, x[i], yi)?.value;
                let w = ((x[i] - yi) * (x[i] - yi) / (4.0 * (1.0 + delta) * s)).exp();
                m = m.max(s.sqrt() * k * w);
            }
            prod *= m;
        }
        if prod > best.0 {
            best = (prod, s);
        }
    }
    Ok(best)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return alloc::vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

/// Refined G-norm estimate over `s ∈ [s_min, t_max]` and `y ∈ closure(Ω)`
/// (a window of width `12√((1+δ)t_max)` around `x` for unbounded domains).
/// Grids double until the relative change drops below `1e-3` or
/// `max_refinements` is reached.
pub fn g_norm_estimate(
    spec: &KernelSpec,
    delta: f64,
    x: &[f64],
    s_min: f64,
    t_max: f64,
    max_refinements: u32,
) -> Result<GNormEstimate> {
    check_time(s_min)?;
    check_time(t_max)?;
    if s_min > t_max {
        return Err(out_of_range("s_min", "must not exceed t_max"));
    }
    let d = spec.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    let half_window = 6.0 * ((1.0 + delta) * t_max).sqrt();
    let ranges: Vec<(f64, f64)> = (0..d)
        .map(|i| match &spec.variant {
            KernelVariant::Interval(l) => (0.0, *l),
            KernelVariant::Box(ls) => (0.0, ls[i]),
            KernelVariant::HalfSpace(dd) if i + 1 == *dd => (0.0, x[i] + half_window),
            _ => (x[i] - half_window, x[i] + half_window),
        })
        .collect();
    let build = |ns: usize, ny: usize| {
        let s_grid = log_grid(s_min, t_max, ns);
        let y_grid: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let (a, b) = ranges[i];
                let mut g: Vec<f64> = (0..=ny).map(|k| a + (b - a) * k as f64 / ny as f64).collect();
                g.push(x[i]);
                g
            })
            .collect();
        (s_grid, y_grid)
    };
    let (mut ns, mut ny) = (16usize, 16usize);
    let (s_grid, y_grid) = build(ns, ny);
    let (mut value, mut argmax) = g_norm_on_grid(spec, delta, x, &s_grid, &y_grid)?;
    let mut refinements = 0;
    let mut last_change = f64::INFINITY;
    while refinements < max_refinements {
        ns *= 2;
        ny *= 2;
        let (s_grid, y_grid) = build(ns, ny);
        let (v, a) = g_norm_on_grid(spec, delta, x, &s_grid, &y_grid)?;
        refinements += 1;
        last_change = (v - value).abs() / v.abs().max(f64::MIN_POSITIVE);
        value = v;
        argmax = a;
        if last_change < 1e-3 {
            break;
        }
    }
    Ok(GNormEstimate {
        value,
        argmax_s: argmax,
        s_points: ns,
        y_points: ny + 2,
        refinements,
        last_change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use alloc::vec;

    const TOL: f64 = DEFAULT_TRUNCATION_TOL;

    #[test]
    fn diagonal_excess_matches_direct_difference() {
        for &(t, x) in &[(0.01, 0.3), (0.2, 0.05), (0.7, 0.5)] {
            let e = interval_diag_excess(1.0, t, x, TOL).unwrap().value;
            let k = interval_kernel(1.0, t, x, x, TOL).unwrap().value;
            assert!((e - ((4.0 * PI * t).sqrt() * k - 1.0)).abs() < 1e-13);
        }
        // deep inside at tiny t the excess is e^{-1/t}-sized, far below rounding of k
        let e = box_diag_excess(&[1.0, 1.0], 1e-3, &[0.5, 0.5], TOL).unwrap().value;
        assert!((e / (4.0 * (-250.0f64).exp()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn free_kernel_examples() {
        let v = free_kernel(1.0 / (4.0 * PI), &[0.3], &[0.3]).unwrap();
        assert!((v.value - 1.0).abs() < 1e-15);
        let t = 0.07;
        let v = free_kernel(t, &[0.0, 0.0], &[2.0 * t.sqrt(), 0.0]).unwrap();
        assert!((v.value - (-1.0f64).exp() / (4.0 * PI * t)).abs() < 1e-14);
        let a = free_kernel(0.2, &[0.1, 0.5], &[0.4, -0.3]).unwrap();
        let b = free_kernel(0.2, &[0.4, -0.3], &[0.1, 0.5]).unwrap();
        assert_eq!(a, b);
        assert_eq!(free_kernel(0.0, &[0.0], &[0.0]), Err(Error::NonpositiveTime));
    }

    #[test]
    fn halfspace_examples() {
        let t = 0.3;
        let base = (4.0 * PI * t).powf(-1.5);
        assert!((halfspace_diag(t, 0.0, 3).unwrap().value - 2.0 * base).abs() < 1e-15);
        let v = halfspace_diag(t, t.sqrt(), 3).unwrap().value;
        assert!((v - base * (1.0 + (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(halfspace_diag(t, 1e3, 3).unwrap().value, base);
    }

    #[test]
    fn interval_cross_method_examples() {
        let v = interval_kernel_images(1.0, 10.0, 0.3, 0.7, TOL).unwrap();
        assert!((v.value - 1.0).abs() < 1e-8);
        for &(t, x, y) in &[(0.01, 0.5, 0.5), (0.05, 0.2, 0.9)] {
            let a = interval_kernel_images(1.0, t, x, y, TOL).unwrap();
            let b = interval_kernel_spectral(1.0, t, x, y, TOL).unwrap();
            assert!((a.value - b.value).abs() < 1e-12, "{a:?} {b:?}");
            assert!(a.tail_bound <= TOL && b.tail_bound <= TOL);
        }
        let a = interval_kernel_images(1.0, 0.02, 0.1, 0.35, TOL).unwrap().value;
        let b = interval_kernel_images(1.0, 0.02, 0.9, 0.65, TOL).unwrap().value;
        assert!((a - b).abs() < 1e-14);
        assert_eq!(interval_kernel_images(1.0, 0.1, 1.2, 0.5, TOL), Err(Error::OutOfDomain));
    }

    #[test]
    fn spectral_refuses_tiny_times() {
        assert!(matches!(
            interval_kernel_spectral(1.0, 1e-16, 0.5, 0.5, TOL),
            Err(Error::SeriesTooLong { .. })
        ));
        let v = interval_kernel_spectral(2.0, 50.0, 0.1, 1.9, TOL).unwrap();
        assert!((v.value - 0.5).abs() < 1e-13);
    }

    #[test]
    fn diagonal_integral_is_trace() {
        let t = 0.03;
        let q = integrate(|x| interval_kernel_spectral(1.0, t, x, x, TOL).unwrap().value, 0.0, 1.0, QuadOptions::abs(1e-13)).unwrap();
        // oracle: Σ_{n>=0} e^{-tπ²n²}, summed to machine precision
        let mut trace = 0.0;
        for n in 0..200 {
            trace += (-t * PI * PI * (n * n) as f64).exp();
        }
        assert!((q.value - trace).abs() < 1e-10);
    }

    #[test]
    fn box_examples() {
        let t = 0.005;
        let v = box_kernel_diag(&[1.0, 1.0], t, &[0.5, 0.5], TOL).unwrap();
        // the nearest images sit at distance 1 from the centre
        let main = 1.0 / (4.0 * PI * t);
        let images = main * 4.0 * (-0.25 / t).exp();
        assert!((v.value - main - images).abs() / main < 1e-12);
        let face = box_kernel_diag(&[1.0, 1.0], 1e-4, &[0.5, 0.0], TOL).unwrap().value;
        assert!((face * 4.0 * PI * 1e-4 - 2.0).abs() < 1e-12);
        let sep = box_kernel_diag(&[2.0, 1.0], 0.07, &[0.3, 0.8], TOL).unwrap().value;
        let a = interval_kernel(2.0, 0.07, 0.3, 0.3, TOL).unwrap().value;
        let b = interval_kernel(1.0, 0.07, 0.8, 0.8, TOL).unwrap().value;
        assert!((sep - a * b).abs() <= 1e-15 * sep);
    }

    #[test]
    fn mass_examples() {
        let m = mass_integral(&KernelSpec::interval(1.0).unwrap(), 0.01, &[0.3]).unwrap();
        assert!((m - 1.0).abs() < 1e-10);
        let m = mass_integral(&KernelSpec::boxed(vec![1.0, 2.0]).unwrap(), 0.1, &[0.2, 1.1]).unwrap();
        assert!((m - 1.0).abs() < 1e-9);
        let hs = KernelSpec::new(KernelVariant::HalfSpace(2), TOL).unwrap();
        let m = mass_integral(&hs, 0.2, &[0.3, 0.1]).unwrap();
        assert!((m - 1.0).abs() < 1e-10);
    }

    #[test]
    fn semigroup_examples() {
        let r = semigroup_residual(1.0, 0.01, 0.02, 0.2, 0.8).unwrap();
        assert!(r <= 1e-8, "{r}");
        let a = semigroup_residual(1.0, 0.03, 0.01, 0.3, 0.6).unwrap();
        let b = semigroup_residual(1.0, 0.01, 0.03, 0.6, 0.3).unwrap();
        assert!(a <= 1e-8 && b <= 1e-8);
    }

    #[test]
    fn g_norm_of_free_kernel_is_gaussian_constant() {
        let spec = KernelSpec::new(KernelVariant::Free(2), TOL).unwrap();
        let g = g_norm_estimate(&spec, 0.1, &[0.0, 0.0], 1e-4, 0.01, 3).unwrap();
        assert!((g.value - 1.0 / (4.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn g_norm_interval_and_delta_monotonicity() {
        let spec = KernelSpec::interval(1.0).unwrap();
        let g = g_norm_estimate(&spec, 0.1, &[0.5], 1e-5, 0.01, 4).unwrap();
        assert!(g.value >= (4.0 * PI).powf(-0.5));
        let s_grid = log_grid(1e-4, 0.05, 40);
        let y_grid = vec![(0..=64).map(|k| k as f64 / 64.0).collect::<Vec<_>>()];
        let mut prev = f64::INFINITY;
        for delta in [0.05, 0.1, 0.2, 0.4, 0.8] {
            let (v, _) = g_norm_on_grid(&spec, delta, &[0.3], &s_grid, &y_grid).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }
}
