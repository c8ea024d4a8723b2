//! Neumann heat traces of boxes and the two-term remainder
//! `R(t) = (4πt)^{d/2} Tr e^{tΔ} - |Ω| - (√(πt)/2) H^{d-1}(∂Ω)`,
//! together with the comparator functions it is measured against.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::out_of_range;
use crate::geometry::ConvexBody;
use crate::{Error, Result};

/// Target absolute truncation error for every theta series.
pub const TRACE_TAIL_TOL: f64 = 1e-13;
const MAX_THETA_TERMS: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceValue {
    pub t: f64,
    pub value: f64,
    pub tail_bound: f64,
}

/// Both evaluations of `Σ_{n>=0} e^{-tπ²n²/L²}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theta {
    /// Eigenvalue series; `None` when it would need more than 10⁷ terms.
    pub direct: Option<TraceValue>,
    /// Poisson-summed Gaussian-image form; `None` in the mirror situation.
    pub poisson: Option<TraceValue>,
}

impl Theta {
    /// The form that converges fastest at this `t`.
    pub fn best(&self) -> TraceValue {
        match (self.direct, self.poisson) {
            (Some(d), Some(p)) => {
                if p.tail_bound <= d.tail_bound {
                    p
                } else {
                    d
                }
            }
            (Some(d), None) => d,
            (None, Some(p)) => p,
            (None, None) => unreachable!("one of the two series always converges"),
        }
    }
}

/// Sums `Σ_{n>=1} e^{-q n²}` until the next term is below `1e-16` of the
/// running total and the geometric tail bound `scale·e^{-q(N+1)²}/(1-e^{-q(2N+3)})`
/// is below [`TRACE_TAIL_TOL`].
fn gaussian_sum(q: f64, scale: f64, base: f64) -> Option<(f64, f64)> {
    let tail = |n: f64| scale * (-q * (n + 1.0) * (n + 1.0)).exp() / (1.0 - (-q * (2.0 * n + 3.0)).exp());
    let needed = ((scale / TRACE_TAIL_TOL).max(1.0).ln() / q).sqrt();
    if needed > MAX_THETA_TERMS as f64 {
        return None;
    }
    let mut sum = 0.0;
    let mut n = 0u64;
    loop {
        let nf = n as f64;
        let next = (-q * (nf + 1.0) * (nf + 1.0)).exp();
        if scale * next < 1e-16 * (base + scale * sum) && tail(nf) < TRACE_TAIL_TOL {
            return Some((sum, tail(nf)));
        }
        n += 1;
        if n > MAX_THETA_TERMS {
            return None;
        }
        sum += next;
    }
}

pub fn theta_1d(l: f64, t: f64) -> Result<Theta> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonpositiveTime);
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(out_of_range("L", "length must be positive"));
    }
    let b = t * PI * PI / (l * l);
    let direct = gaussian_sum(b, 1.0, 1.0).map(|(s, tail)| TraceValue { t, value: 1.0 + s, tail_bound: tail });
    let u = l / (PI * t).sqrt();
    let base = 0.5 + 0.5 * u;
    let poisson = gaussian_sum(l * l / t, u, base).map(|(s, tail)| TraceValue {
        t,
        value: base + u * s,
        tail_bound: tail,
    });
    Ok(Theta { direct, poisson })
}

fn box_lengths(body: &ConvexBody) -> Result<&[f64]> {
    match body {
        ConvexBody::Box(b) => Ok(b.lengths()),
        _ => Err(Error::UnsupportedVariant("heat traces are available for boxes only")),
    }
}

/// `Tr e^{tΔ}` of a box as a product of 1-D thetas.
pub fn heat_trace(body: &ConvexBody, t: f64) -> Result<TraceValue> {
    let ls = box_lengths(body)?;
    let mut value = 1.0;
    let mut upper = 1.0;
    for &l in ls {
        let th = theta_1d(l, t)?.best();
        value *= th.value;
        upper *= th.value + th.tail_bound;
    }
    Ok(TraceValue { t, value, tail_bound: upper - value })
}

/// `H√t[(√t/r_in)^{1/2-ε} + (√t/r_in)^{d-1}]`.
pub fn small_time_rhs(body: &ConvexBody, t: f64, eps: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime);
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(out_of_range("epsilon", "must lie in (0, 1/2)"));
    }
    let m = body.metrics();
    let q = t.sqrt() / m.inradius;
    let d = body.dim() as f64;
    Ok(m.surface * t.sqrt() * (q.powf(0.5 - eps) + q.powf(d - 1.0)))
}

/// `H√t(√t/r_in)^{d-1}`.
pub fn large_time_rhs(body: &ConvexBody, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime);
    }
    let m = body.metrics();
    let q = t.sqrt() / m.inradius;
    Ok(m.surface * t.sqrt() * q.powf(body.dim() as f64 - 1.0))
}

/// Log-corrected small-time comparator `H√t(√t/r_in)^{1/2} ln(r_in²/t)^{1/2}`,
/// defined for `t < r_in²`.
pub fn log_corrected_rhs(body: &ConvexBody, t: f64) -> Result<Option<f64>> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime);
    }
    let m = body.metrics();
    let r2 = m.inradius * m.inradius;
    if t >= r2 {
        return Ok(None);
    }
    let q = t.sqrt() / m.inradius;
    Ok(Some(m.surface * t.sqrt() * q.sqrt() * (r2 / t).ln().sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemainderRecord {
    pub t: f64,
    pub trace: f64,
    pub tail_bound: f64,
    pub remainder: f64,
    pub rhs_small_time: f64,
    pub rhs_large_time: f64,
    pub rhs_log_corrected: Option<f64>,
    pub ratio_small_time: f64,
    pub ratio_large_time: f64,
    pub ratio_log_corrected: Option<f64>,
}

pub fn trace_remainder(body: &ConvexBody, t: f64, eps: f64) -> Result<RemainderRecord> {
    let tr = heat_trace(body, t)?;
    let m = body.metrics();
    let d = body.dim() as f64;
    let weyl = (4.0 * PI * t).powf(0.5 * d);
    let remainder = weyl * tr.value - m.volume - 0.5 * (PI * t).sqrt() * m.surface;
    let rhs_small_time = small_time_rhs(body, t, eps)?;
    let rhs_large_time = large_time_rhs(body, t)?;
    let rhs_log_corrected = log_corrected_rhs(body, t)?;
    Ok(RemainderRecord {
        t,
        trace: tr.value,
        tail_bound: tr.tail_bound,
        remainder,
        rhs_small_time,
        rhs_large_time,
        rhs_log_corrected,
        ratio_small_time: remainder.abs() / rhs_small_time,
        ratio_large_time: remainder.abs() / rhs_large_time,
        ratio_log_corrected: rhs_log_corrected.map(|r| remainder.abs() / r),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrogerCheck {
    pub margin: f64,
    pub holds: bool,
}

/// `(4πt)^{d/2} Tr - |Ω|`, which must be nonnegative.
pub fn kroger_check(body: &ConvexBody, t: f64) -> Result<KrogerCheck> {
    let tr = heat_trace(body, t)?;
    let margin = (4.0 * PI * t).powf(0.5 * body.dim() as f64) * tr.value - body.volume();
    Ok(KrogerCheck { margin, holds: margin >= -1e-12 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in log space.
    pub max_residual: f64,
}

/// Least squares fit of `ln v = slope·ln t + intercept`.
pub fn fit_power_law(pairs: &[(f64, f64)]) -> Result<PowerLawFit> {
    if pairs.len() < 3 || pairs.iter().any(|&(t, v)| !(t > 0.0 && v > 0.0)) {
        return Err(Error::NonpositiveData);
    }
    let pts: Vec<(f64, f64)> = pairs.iter().map(|&(t, v)| (t.ln(), v.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::NonpositiveData);
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).abs())
        .fold(0.0, f64::max);
    Ok(PowerLawFit { slope, intercept, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit_square() -> ConvexBody {
        ConvexBody::cuboid(vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn theta_forms_agree() {
        let th = theta_1d(1.0, 0.02).unwrap();
        let (d, p) = (th.direct.unwrap(), th.poisson.unwrap());
        assert!((d.value - p.value).abs() < 1e-13);
        assert!((theta_1d(1.0, 50.0).unwrap().best().value - 1.0).abs() < 1e-15);
        let a = theta_1d(3.0, 0.45).unwrap().best().value;
        let b = theta_1d(1.0, 0.05).unwrap().best().value;
        assert!((a - b).abs() < 1e-14);
        assert!(theta_1d(1.0, 1e-16).unwrap().direct.is_none());
    }

    #[test]
    fn trace_examples() {
        let v = heat_trace(&unit_square(), 10.0).unwrap().value;
        assert!((1.0..=1.0 + 1e-8).contains(&v));
        let rect = ConvexBody::cuboid(vec![2.0, 1.0]).unwrap();
        let t = 0.03;
        let a = heat_trace(&rect, t).unwrap().value;
        let b = theta_1d(2.0, t).unwrap().best().value * theta_1d(1.0, t).unwrap().best().value;
        assert_eq!(a, b);
        let ball = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(matches!(heat_trace(&ball, 0.1), Err(Error::UnsupportedVariant(_))));
    }

    #[test]
    fn remainder_examples() {
        let r = trace_remainder(&unit_square(), 0.01, 0.25).unwrap();
        assert!((r.remainder - PI * 0.01).abs() <= 1e-12);
        let cube = ConvexBody::cuboid(vec![1.0, 1.0, 1.0]).unwrap();
        let t = 0.005;
        let r = trace_remainder(&cube, t, 0.25).unwrap();
        assert!((r.remainder - 3.0 * PI * t - (PI * t).powf(1.5)).abs() <= 1e-10);
    }

    #[test]
    fn comparator_examples() {
        let sq = unit_square();
        let v = small_time_rhs(&sq, 0.01, 0.25).unwrap();
        let direct = 0.4 * (0.2f64.powf(0.25) + 0.2);
        let via_logs = 0.4 * ((0.25 * 0.2f64.ln()).exp() + 0.2);
        assert!((v - direct).abs() < 1e-15 && (v - via_logs).abs() < 1e-14);
        assert!((large_time_rhs(&sq, 0.25).unwrap() - 2.0).abs() < 1e-15);
        let big = ConvexBody::cuboid(vec![3.0, 3.0]).unwrap();
        let scaled = small_time_rhs(&big, 0.09, 0.25).unwrap();
        assert!((scaled - 9.0 * v).abs() < 1e-13);
        assert!(log_corrected_rhs(&sq, 0.3).unwrap().is_none());
    }

    #[test]
    fn kroger_margin_matches_poisson_expansion() {
        let k = kroger_check(&unit_square(), 0.01).unwrap();
        let u = (PI * 0.01).sqrt();
        assert!(k.holds);
        assert!((k.margin - 2.0 * u - u * u).abs() < 1e-12);
    }

    #[test]
    fn power_law_examples() {
        let lin: Vec<_> = [1e-3, 1e-2, 0.1, 1.0].iter().map(|&t| (t, 7.0 * t)).collect();
        assert!((fit_power_law(&lin).unwrap().slope - 1.0).abs() < 1e-12);
        let p: Vec<_> = [0.5, 0.25, 0.125].iter().map(|&t: &f64| (t, t.powf(1.5))).collect();
        assert!((fit_power_law(&p).unwrap().slope - 1.5).abs() < 1e-12);
        assert_eq!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]), Err(Error::NonpositiveData));
    }
}
