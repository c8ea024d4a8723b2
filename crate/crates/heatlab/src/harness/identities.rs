//! Two integral identities checked by independent quadratures.

use heatlab_core::geometry::Polygon;
use heatlab_core::kernels::{interval_kernel, DEFAULT_TRUNCATION_TOL};
use heatlab_core::quadrature::{integrate_with_breaks, QuadOptions};
use heatlab_core::{ConvexBody, Error, Vec2};

use crate::error::{HarnessError, HarnessResult};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerCakeCheck {
    /// `∫_{d_Ω < r} e^{-d_Ω²/t} dx` by 2-D quadrature.
    pub lhs: f64,
    /// `2∫_0^{r/√t} |{d_Ω < √t s}| s e^{-s²} ds + |{d_Ω < r}| e^{-r²/t}`.
    pub rhs: f64,
    pub residual: f64,
}

/// Horizontal chord `{x : (x, y) ∈ Ω}` of a convex polygon.
fn chord(poly: &Polygon, y: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for h in poly.planes() {
        let rhs = h.offset - h.normal.y * y;
        if h.normal.x > 0.0 {
            hi = hi.min(rhs / h.normal.x);
        } else if h.normal.x < 0.0 {
            lo = lo.max(rhs / h.normal.x);
        } else if rhs < 0.0 {
            return None;
        }
    }
    (lo < hi).then_some((lo, hi))
}

/// Heights at which the integrand over horizontal chords can change form:
/// vertices of `Ω` and of the level set `{d_Ω = r}`, and crossings of
/// equidistance lines between edge pairs.
fn height_breaks(poly: &Polygon, r: f64) -> Vec<f64> {
    let mut ys: Vec<f64> = poly.vertices().iter().map(|v| v.y).collect();
    if let Some(q) = poly.erode(r) {
        ys.extend(q.vertices().iter().map(|v| v.y));
    }
    let planes = poly.planes();
    let mut bisectors = Vec::new();
    for i in 0..planes.len() {
        for j in i + 1..planes.len() {
            bisectors.push((planes[j].normal - planes[i].normal, planes[j].offset - planes[i].offset));
        }
    }
    for a in 0..bisectors.len() {
        for b in a + 1..bisectors.len() {
            let ((n1, c1), (n2, c2)) = (bisectors[a], bisectors[b]);
            let det = n1.cross(n2);
            if det.abs() > 1e-14 {
                let p = Vec2::new((c1 * n2.y - c2 * n1.y) / det, (n1.x * c2 - n2.x * c1) / det);
                if poly.distance_to_complement(p) > 0.0 {
                    ys.push(p.y);
                }
            }
        }
    }
    ys
}

fn layer_cake_lhs(poly: &Polygon, t: f64, r: f64) -> Result<f64, Error> {
    let planes = poly.planes();
    let (ymin, ymax) = poly
        .vertices()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v.y), b.max(v.y)));
    let ybreaks = height_breaks(poly, r);
    let inner = |y: f64| -> Result<f64, Error> {
        let Some((xl, xr)) = chord(poly, y) else {
            return Ok(0.0);
        };
        // along the chord every edge distance is affine in x
        let lin: Vec<(f64, f64)> = planes.iter().map(|h| (h.offset - h.normal.y * y, h.normal.x)).collect();
        let mut xb = Vec::new();
        for i in 0..lin.len() {
            if lin[i].1 != 0.0 {
                xb.push((lin[i].0 - r) / lin[i].1);
            }
            for j in i + 1..lin.len() {
                let den = lin[i].1 - lin[j].1;
                if den != 0.0 {
                    xb.push((lin[i].0 - lin[j].0) / den);
                }
            }
        }
        let f = |x: f64| {
            let d = lin.iter().map(|(c, a)| c - a * x).fold(f64::INFINITY, f64::min);
            if d < r {
                (-d * d / t).exp()
            } else {
                0.0
            }
        };
        Ok(integrate_with_breaks(f, xl, xr, &xb, QuadOptions::abs(1e-13))?.value)
    };
    let mut failure = None;
    let q = integrate_with_breaks(
        |y| match inner(y) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        ymin,
        ymax,
        &ybreaks,
        QuadOptions::abs(1e-12),
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(q.value),
    }
}

/// Layer-cake identity for `e^{-d_Ω²/t}` on the strip `{d_Ω < r}`.
pub fn layer_cake_identity_check(body: &ConvexBody, t: f64, r: f64) -> HarnessResult<LayerCakeCheck> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime.into());
    }
    if !(r > 0.0) {
        return Err(HarnessError::config("r", "must be positive"));
    }
    let poly = body
        .as_polygon()
        .ok_or(Error::UnsupportedVariant("layer-cake check needs a polygon or a 2-D box"))?;
    let lhs = layer_cake_lhs(&poly, t, r)?;
    let st = t.sqrt();
    let upper = r / st;
    let saturation = body.inradius() / st;
    let rhs_int = integrate_with_breaks(
        |s| body.boundary_neighborhood_volume(st * s) * s * (-s * s).exp(),
        0.0,
        upper,
        &[saturation],
        QuadOptions::abs(1e-13),
    )?;
    let rhs = 2.0 * rhs_int.value + body.boundary_neighborhood_volume(r) * (-r * r / t).exp();
    Ok(LayerCakeCheck { lhs, rhs, residual: (lhs - rhs).abs() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DuhamelCheck {
    pub t: f64,
    pub mass: f64,
    pub expected: f64,
    pub residual: f64,
    /// `max |u(x) - u(L - x)|` over a grid.
    pub symmetry: f64,
    /// `(x, u(t, x))` on the symmetry grid.
    pub profile: Vec<(f64, f64)>,
}

/// `u(t,x) = ∫_0^t k(τ,x,0) + k(τ,x,L) dτ`, written with `τ = w²` to remove
/// the `τ^{-1/2}` singularity at the wall.
fn duhamel_u(l: f64, t: f64, x: f64) -> Result<f64, Error> {
    let mut failure = None;
    let q = integrate_with_breaks(
        |w| {
            let tau = w * w;
            let k = interval_kernel(l, tau, x, 0.0, DEFAULT_TRUNCATION_TOL)
                .and_then(|a| interval_kernel(l, tau, x, l, DEFAULT_TRUNCATION_TOL).map(|b| a.value + b.value));
            match k {
                Ok(v) => 2.0 * w * v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        t.sqrt(),
        &[],
        QuadOptions::abs(1e-12),
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(q.value),
    }
}

/// Mass of the Duhamel solution with unit flux through both ends of
/// `[0, L]`; equals `2t`.
pub fn duhamel_mass_check(l: f64, t: f64) -> HarnessResult<DuhamelCheck> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime.into());
    }
    if !(l > 0.0) {
        return Err(HarnessError::config("L", "must be positive"));
    }
    let mut failure = None;
    let q = integrate_with_breaks(
        |x| match duhamel_u(l, t, x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        l,
        &[0.5 * l],
        QuadOptions::abs(1e-10),
    )?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    let mut profile = Vec::new();
    let mut symmetry: f64 = 0.0;
    for k in 0..=10 {
        let x = l * k as f64 / 10.0;
        let u = duhamel_u(l, t, x)?;
        let v = duhamel_u(l, t, l - x)?;
        symmetry = symmetry.max((u - v).abs());
        profile.push((x, u));
    }
    Ok(DuhamelCheck {
        t,
        mass: q.value,
        expected: 2.0 * t,
        residual: (q.value - 2.0 * t).abs(),
        symmetry,
        profile,
    })
}
