//! Flat-boundary machinery: `(ε, r)`-good points, the rolling-ball good set
//! `G_{ε,r}`, sawtooth membership, normal oscillation `ν̄_p` and the
//! threshold `a*(β)` controlling normal variation on `G`.
//!
//! Polygons (and 2-D boxes, which are converted) get the exact treatment.
//! Boxes in higher dimension and balls get closed forms for the good-set
//! measure and sawtooth membership only.

use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::out_of_range;
use crate::geometry::{clip_line, segment_in_disk, ConvexBody, Polygon, Vec2};
use crate::montecarlo::{mc_integral, SampleBox};
use crate::{Error, Result};

/// Distance from a vertex below which the normal is treated as undefined.
pub const VERTEX_EXCLUSION: f64 = 1e-9;
const ON_BOUNDARY_TOL: f64 = 1e-10;

/// Outcome of the exact cone test at a boundary point.
#[derive(Clone, Debug, PartialEq)]
pub struct GoodPointCertificate {
    pub x0: Vec2,
    pub normal: Vec2,
    pub epsilon: f64,
    pub r: f64,
    /// `sup |(y - x0)·ν(x0)| / |y - x0|` over `∂Ω ∩ B_r(x0)`.
    pub max_ratio: f64,
    pub verified_cone: bool,
}

/// Sawtooth membership witness.
#[derive(Clone, Debug, PartialEq)]
pub struct SawtoothQuery {
    pub x: Vec<f64>,
    pub matched_x0: Option<Vec<f64>>,
    pub member: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalOscillation {
    pub x0: Vec2,
    pub s: f64,
    pub p: f64,
    pub value: f64,
    /// Number of radii at which the inner average was evaluated.
    pub grid_points: usize,
}

/// Piece of `G_{ε,r}` on one polygon edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoodSegment {
    pub edge: usize,
    pub start: Vec2,
    pub end: Vec2,
}

impl GoodSegment {
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(out_of_range("epsilon", "must lie in (0, 1/2]"));
    }
    Ok(())
}

fn polygon_of(body: &ConvexBody) -> Result<Polygon> {
    body.as_polygon()
        .ok_or(Error::UnsupportedVariant("exact good-point tests need a polygon or a 2-D box"))
}

/// Locates the edge carrying a boundary point; rejects points at vertices.
fn boundary_edge(poly: &Polygon, x: Vec2) -> Result<usize> {
    let scale = poly.diameter().max(1.0);
    let mut best = (usize::MAX, f64::INFINITY);
    for i in 0..poly.len() {
        let (a, b) = poly.edge(i);
        let d = b - a;
        let t = ((x - a).dot(d) / d.norm_sq()).clamp(0.0, 1.0);
        let dist = (a + d * t - x).norm();
        if dist < best.1 {
            best = (i, dist);
        }
    }
    if best.1 > ON_BOUNDARY_TOL * scale {
        return Err(Error::NotOnBoundary);
    }
    if poly.vertices().iter().any(|v| (*v - x).norm() <= VERTEX_EXCLUSION) {
        return Err(Error::NormalUndefined);
    }
    Ok(best.0)
}

/// Outward unit normal `ν(x)` at a boundary point of an edge interior.
pub fn outward_normal(body: &ConvexBody, x: &[f64]) -> Result<Vec<f64>> {
    match body {
        ConvexBody::Ball(b) => {
            let r: f64 = x.iter().zip(b.center()).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
            if (r - b.radius()).abs() > ON_BOUNDARY_TOL * b.radius().max(1.0) {
                return Err(Error::NotOnBoundary);
            }
            Ok(x.iter().zip(b.center()).map(|(a, c)| (a - c) / r).collect())
        }
        ConvexBody::Box(b) if b.lengths().len() != 2 => {
            let tol = ON_BOUNDARY_TOL * body.metrics().diameter.max(1.0);
            let mut face = None;
            for (i, ((o, l), xi)) in b.origin().iter().zip(b.lengths()).zip(x).enumerate() {
                if *xi < o - tol || *xi > o + l + tol {
                    return Err(Error::NotOnBoundary);
                }
                let lowd = (xi - o).abs();
                let highd = (o + l - xi).abs();
                if lowd <= tol || highd <= tol {
                    if face.is_some() {
                        return Err(Error::NormalUndefined);
                    }
                    face = Some((i, if lowd <= tol { -1.0 } else { 1.0 }));
                }
            }
            let (i, sign) = face.ok_or(Error::NotOnBoundary)?;
            let mut n = alloc::vec![0.0; x.len()];
            n[i] = sign;
            Ok(n)
        }
        _ => {
            let poly = polygon_of(body)?;
            let i = boundary_edge(&poly, Vec2::from_slice(x))?;
            Ok(poly.planes()[i].normal.to_array().to_vec())
        }
    }
}

/// `sup |(y - x0)·ν| / |y - x0|` over the part of segment `[a, b]` in the open
/// disk `B_r(x0)`.
///
/// Along the segment the signed ratio `(α + βt)/|w0 + t d|` has exactly one
/// stationary point, so endpoints plus that point are the only candidates.
fn max_cone_ratio_on_segment(a: Vec2, b: Vec2, x0: Vec2, nu: Vec2, r: f64) -> f64 {
    let Some((t1, t2)) = segment_in_disk(a, b, x0, r) else {
        return 0.0;
    };
    let d = b - a;
    let w0 = a - x0;
    let alpha = w0.dot(nu);
    let beta = d.dot(nu);
    let ratio = |t: f64| {
        let w = w0 + d * t;
        let n = w.norm();
        if n <= 1e-15 {
            0.0
        } else {
            (w.dot(nu) / n).abs()
        }
    };
    let mut best = ratio(t1).max(ratio(t2));
    let den = beta * w0.dot(d) - alpha * d.norm_sq();
    if den.abs() > 0.0 {
        let ts = (alpha * w0.dot(d) - beta * w0.norm_sq()) / den;
        if ts > t1 && ts < t2 {
            best = best.max(ratio(ts));
        }
    }
    best
}

/// Exact cone test of the good-point definition at `x0`.
pub fn is_good_point(body: &ConvexBody, x0: &[f64], eps: f64, r: f64) -> Result<GoodPointCertificate> {
    check_epsilon(eps)?;
    if !(r > 0.0) {
        return Err(out_of_range("r", "must be positive"));
    }
    let poly = polygon_of(body)?;
    let x0 = Vec2::from_slice(x0);
    let own = boundary_edge(&poly, x0)?;
    let nu = poly.planes()[own].normal;
    let max_ratio = (0..poly.len())
        .filter(|&j| j != own)
        .map(|j| {
            let (a, b) = poly.edge(j);
            max_cone_ratio_on_segment(a, b, x0, nu, r)
        })
        .fold(0.0, f64::max);
    Ok(GoodPointCertificate {
        x0,
        normal: nu,
        epsilon: eps,
        r,
        max_ratio,
        verified_cone: max_ratio < eps,
    })
}

#[derive(Clone, Debug)]
enum GoodShape {
    /// Per-edge parameter interval `[lo, hi]` measured from the edge start.
    Polygon { poly: Polygon, intervals: Vec<Option<(f64, f64)>> },
    Box,
    Ball,
}

/// The rolling-ball good set `G_{ε,r} = G⁰_R` with `R = r/ε`: boundary points
/// touched by a ball of radius `R` inside `Ω`.
#[derive(Clone, Debug)]
pub struct GoodSet {
    body: ConvexBody,
    epsilon: f64,
    r: f64,
    rolling_radius: f64,
    measure: f64,
    shape: GoodShape,
}

/// Builds `G_{ε,r}`; requires `0 < r <= ε·r_in`.
pub fn good_boundary_set(body: &ConvexBody, eps: f64, r: f64) -> Result<GoodSet> {
    check_epsilon(eps)?;
    let rin = body.inradius();
    if !(r > 0.0) || r > eps * rin * (1.0 + 1e-12) {
        return Err(out_of_range("r", "need 0 < r <= epsilon * r_in"));
    }
    let big_r = (r / eps).min(rin);
    match body {
        ConvexBody::Ball(_) => Ok(GoodSet {
            body: body.clone(),
            epsilon: eps,
            r,
            rolling_radius: big_r,
            measure: body.surface(),
            shape: GoodShape::Ball,
        }),
        ConvexBody::Box(b) if b.lengths().len() != 2 => {
            let l = b.lengths();
            let measure = (0..l.len())
                .map(|i| {
                    2.0 * (0..l.len())
                        .filter(|&j| j != i)
                        .map(|j| (l[j] - 2.0 * big_r).max(0.0))
                        .product::<f64>()
                })
                .sum();
            Ok(GoodSet {
                body: body.clone(),
                epsilon: eps,
                r,
                rolling_radius: big_r,
                measure,
                shape: GoodShape::Box,
            })
        }
        _ => {
            let poly = polygon_of(body)?;
            let tol = 1e-12 * poly.diameter();
            let mut measure = 0.0;
            let intervals: Vec<Option<(f64, f64)>> = (0..poly.len())
                .map(|i| {
                    // centers y = x - Rν(x) of admissible balls run along the
                    // offset line of edge i inside the eroded body
                    let (a, _) = poly.edge(i);
                    let u = poly.edge_tangent(i);
                    let nu = poly.planes()[i].normal;
                    let p0 = a - nu * big_r;
                    let others: Vec<_> = poly
                        .planes()
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, h)| *h)
                        .collect();
                    let (lo, hi) = clip_line(&others, big_r, p0, u)
                        .or_else(|| {
                            // R = r_in can leave a single touching point that
                            // rounding pushes just outside
                            let mut relaxed = None;
                            for shrink in [tol, 1e3 * tol] {
                                relaxed = clip_line(&others, big_r - shrink, p0, u);
                                if relaxed.is_some() {
                                    break;
                                }
                            }
                            relaxed
                        })?;
                    let lo = lo.max(0.0);
                    let hi = hi.min(poly.edge_length(i));
                    if lo > hi + tol {
                        return None;
                    }
                    let (lo, hi) = if lo > hi { (0.5 * (lo + hi), 0.5 * (lo + hi)) } else { (lo, hi) };
                    measure += hi - lo;
                    Some((lo, hi))
                })
                .collect();
            Ok(GoodSet {
                body: body.clone(),
                epsilon: eps,
                r,
                rolling_radius: big_r,
                measure,
                shape: GoodShape::Polygon { poly, intervals },
            })
        }
    }
}

/// Monte Carlo estimate of `|{d_Ω < s} \ 𝒢_{ε,r}|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BadSetEstimate {
    pub estimate: f64,
    pub std_error: f64,
    /// Exact `|{d_Ω < s}|`.
    pub strip_volume: f64,
}

impl BadSetEstimate {
    pub fn ratio(&self) -> f64 {
        self.estimate / self.strip_volume
    }
}

impl GoodSet {
    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `R = r/ε`.
    pub fn rolling_radius(&self) -> f64 {
        self.rolling_radius
    }

    /// `H^{d-1}(G_{ε,r})`.
    pub fn measure(&self) -> f64 {
        self.measure
    }

    /// Polygon pieces of `G` (empty for boxes in d ≠ 2 and balls).
    pub fn segments(&self) -> Vec<GoodSegment> {
        match &self.shape {
            GoodShape::Polygon { poly, intervals } => intervals
                .iter()
                .enumerate()
                .filter_map(|(i, iv)| {
                    let (lo, hi) = (*iv)?;
                    let (a, _) = poly.edge(i);
                    let u = poly.edge_tangent(i);
                    Some(GoodSegment {
                        edge: i,
                        start: a + u * lo,
                        end: a + u * hi,
                    })
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Nearest-point sawtooth witness: `x` is reported inside `𝒢_{ε,r}` when
    /// its foot point `p(x)` is unique, lies in `G`, and `|x - p(x)| < r/2`.
    pub fn sawtooth_contains(&self, x: &[f64]) -> SawtoothQuery {
        let miss = || SawtoothQuery {
            x: x.to_vec(),
            matched_x0: None,
            member: false,
        };
        let half_r = 0.5 * self.r;
        match &self.shape {
            GoodShape::Polygon { poly, intervals } => {
                let p = Vec2::from_slice(x);
                if !poly.contains(p) {
                    return miss();
                }
                let tol = 1e-12 * poly.diameter();
                let (i, d1, d2) = poly.nearest_edges(p);
                if d2 - d1 <= tol || d1 >= half_r {
                    return miss();
                }
                let foot = p + poly.planes()[i].normal * d1;
                let (a, _) = poly.edge(i);
                let tau = (foot - a).dot(poly.edge_tangent(i));
                match intervals[i] {
                    Some((lo, hi)) if tau >= lo - tol && tau <= hi + tol => SawtoothQuery {
                        x: x.to_vec(),
                        matched_x0: Some(foot.to_array().to_vec()),
                        member: true,
                    },
                    _ => miss(),
                }
            }
            GoodShape::Box => {
                let ConvexBody::Box(b) = &self.body else { unreachable!() };
                let dim = x.len();
                let tol = 1e-12 * self.body.metrics().diameter;
                let mut best = (0, f64::INFINITY, 0.0);
                let mut second = f64::INFINITY;
                for i in 0..dim {
                    let (o, l) = (b.origin()[i], b.lengths()[i]);
                    for (dist, side) in [(x[i] - o, o), (o + l - x[i], o + l)] {
                        if dist < best.1 {
                            second = best.1;
                            best = (i, dist, side);
                        } else if dist < second {
                            second = dist;
                        }
                    }
                }
                let (i, d, side) = best;
                if d <= 0.0 || second - d <= tol || d >= half_r {
                    return miss();
                }
                let rr = self.rolling_radius;
                let inside_face = (0..dim).filter(|&j| j != i).all(|j| {
                    let (o, l) = (b.origin()[j], b.lengths()[j]);
                    x[j] >= o + rr - tol && x[j] <= o + l - rr + tol
                });
                if !inside_face {
                    return miss();
                }
                let mut foot = x.to_vec();
                foot[i] = side;
                SawtoothQuery {
                    x: x.to_vec(),
                    matched_x0: Some(foot),
                    member: true,
                }
            }
            GoodShape::Ball => {
                let ConvexBody::Ball(b) = &self.body else { unreachable!() };
                let rad: f64 = x.iter().zip(b.center()).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
                let d = b.radius() - rad;
                if rad <= 0.0 || d <= 0.0 || d >= half_r {
                    return miss();
                }
                let foot = x
                    .iter()
                    .zip(b.center())
                    .map(|(a, c)| c + (a - c) * b.radius() / rad)
                    .collect();
                SawtoothQuery {
                    x: x.to_vec(),
                    matched_x0: Some(foot),
                    member: true,
                }
            }
        }
    }

    /// Seeded Monte Carlo estimate of the bad part of the boundary strip
    /// `{d_Ω < s}`, for `0 < s <= r/2`.
    pub fn bad_set_volume(&self, s: f64, n: u64, seed: u64) -> Result<BadSetEstimate> {
        if !(s > 0.0 && s <= 0.5 * self.r * (1.0 + 1e-12)) {
            return Err(out_of_range("s", "need 0 < s <= r/2"));
        }
        let (lo, hi) = self.body.bounding_box();
        let sb = SampleBox::new(lo, hi);
        let est = mc_integral(&sb, n, seed, |x| {
            let d = self.body.distance_to_complement(x);
            if d > 0.0 && d < s && !self.sawtooth_contains(x).member {
                1.0
            } else {
                0.0
            }
        })?;
        Ok(BadSetEstimate {
            estimate: est.estimate,
            std_error: est.std_error,
            strip_volume: self.body.boundary_neighborhood_volume(s),
        })
    }

    /// Closed-form bad volume for axis-aligned rectangles: each edge loses the
    /// two end pieces of its strip outside `[R, ℓ - R]`, `2Rs - s²` per edge.
    pub fn bad_set_volume_rectangle(&self, s: f64) -> Option<f64> {
        match &self.body {
            ConvexBody::Box(b) if b.lengths().len() == 2 && s > 0.0 && s <= 0.5 * self.r => {
                let rr = self.rolling_radius;
                Some(4.0 * (2.0 * rr * s - s * s))
            }
            _ => None,
        }
    }
}

/// `ν̄_p(x0, s)`: sup over `η < s` of the `L^p` mean of `|ν(x0) - ν|` over
/// `∂Ω ∩ B_η(x0)`.
///
/// Normals are constant per edge, so each inner average is exact. The sup is
/// taken over all breakpoints (distances from `x0` to edges and vertices) plus
/// `2^refine` uniform radii between consecutive breakpoints; the value is a
/// lower estimate of the true sup.
pub fn nu_bar_p(body: &ConvexBody, x0: &[f64], s: f64, p: f64, refine: u32) -> Result<NormalOscillation> {
    if !(p >= 1.0) {
        return Err(out_of_range("p", "exponent must be >= 1"));
    }
    if !(s > 0.0) {
        return Err(out_of_range("s", "radius must be positive"));
    }
    let poly = polygon_of(body)?;
    let x0v = Vec2::from_slice(x0);
    let own = boundary_edge(&poly, x0v)?;
    let nu0 = poly.planes()[own].normal;
    let weights: Vec<f64> = poly
        .planes()
        .iter()
        .map(|h| (h.normal - nu0).norm().powf(p))
        .collect();
    let mean_at = |eta: f64| {
        let (mut num, mut den) = (0.0, 0.0);
        for (j, w) in weights.iter().enumerate() {
            let (a, b) = poly.edge(j);
            if let Some((t1, t2)) = segment_in_disk(a, b, x0v, eta) {
                let len = (t2 - t1) * (b - a).norm();
                num += w * len;
                den += len;
            }
        }
        if den > 0.0 {
            (num / den).powf(1.0 / p)
        } else {
            0.0
        }
    };
    let mut breaks: Vec<f64> = Vec::new();
    for j in 0..poly.len() {
        let (a, b) = poly.edge(j);
        let d = b - a;
        let t = ((x0v - a).dot(d) / d.norm_sq()).clamp(0.0, 1.0);
        breaks.push((a + d * t - x0v).norm());
        breaks.push((a - x0v).norm());
    }
    breaks.retain(|&e| e > 0.0 && e < s);
    breaks.push(s);
    breaks.push(0.0);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let sub = 1usize << refine;
    let mut value: f64 = 0.0;
    let mut count = 0;
    for w in breaks.windows(2) {
        for k in 1..=sub {
            let eta = w[0] + (w[1] - w[0]) * k as f64 / sub as f64;
            value = value.max(mean_at(eta));
            count += 1;
        }
    }
    Ok(NormalOscillation {
        x0: x0v,
        s,
        p,
        value,
        grid_points: count,
    })
}

/// Closed-form switch point of `a >= 1 - β²a/2 - β√(1-a²)` on `[0, 1]`.
pub fn a_star(beta: f64) -> f64 {
    let b2 = beta * beta;
    (4.0 + 2.0 * b2 - 2.0 * b2 * (8.0 + b2).sqrt()) / (4.0 + 8.0 * b2 + b2 * b2)
}

/// `a - (1 - β²a/2 - β√(1-a²))`; nonnegative exactly on `[a*(β), 1]`.
pub fn a_star_residual(a: f64, beta: f64) -> f64 {
    a - (1.0 - 0.5 * beta * beta * a - beta * (1.0 - a * a).max(0.0).sqrt())
}

/// Constant `c` with `a*(β) >= 1 - cβ²` on `(0, 1)`: the `β → 0` limit of
/// `(1 - a*(β))/β²`, which is also its supremum.
pub fn normal_variation_constant() -> f64 {
    1.5 + SQRT_2
}

/// Left-minus-right residuals of the distance inequalities for `x` in a
/// sawtooth cone over the good point `x0` and `y ∈ ∂Ω ∩ B_r(x0)`. All are
/// `<= 0` when the configuration is certified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceResiduals {
    pub inner_product: f64,
    pub expansion: f64,
    pub reflected_expansion: f64,
    pub lower_distance: f64,
    pub upper_distance: f64,
}

impl DistanceResiduals {
    pub fn max(&self) -> f64 {
        [
            self.inner_product,
            self.expansion,
            self.reflected_expansion,
            self.lower_distance,
            self.upper_distance,
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Residuals of the good-set distance inequalities; `d_omega` is `d_Ω(x)`.
pub fn good_set_distance_inequalities(
    x0: &[f64],
    eps: f64,
    x: &[f64],
    y: &[f64],
    d_omega: f64,
) -> DistanceResiduals {
    let xs: Vec<f64> = x0.iter().zip(x).map(|(a, b)| 2.0 * a - b).collect();
    let dx = diff(x, x0);
    let dy = diff(y, x0);
    let nx2 = dot(&dx, &dx);
    let ny2 = dot(&dy, &dy);
    let (nx, ny) = (nx2.sqrt(), ny2.sqrt());
    let xy = diff(x, y);
    let xsy = diff(&xs, y);
    let bound = 2.0 * eps * (nx2 + ny2);
    DistanceResiduals {
        inner_product: dot(&dx, &dy).abs() - 2.0 * eps * nx * ny,
        expansion: (dot(&xy, &xy) - nx2 - ny2).abs() - bound,
        reflected_expansion: (dot(&xsy, &xsy) - nx2 - ny2).abs() - bound,
        lower_distance: d_omega - nx,
        upper_distance: nx - d_omega / (1.0 - 2.0 * eps).sqrt(),
    }
}

/// Boundary of a polygon near a good point, written as a graph over the
/// tangent line after rotating `ν(x0)` to `(0, -1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalGraph {
    /// Graph vertices `(ξ, φ(ξ))` in increasing `ξ`, including the exit
    /// points on `∂B_r(x0)`.
    pub points: Vec<(f64, f64)>,
    pub slopes: Vec<f64>,
    pub max_slope: f64,
    pub is_graph: bool,
    pub is_convex: bool,
    /// `max φ(ξ)/|ξ|`.
    pub cone_ratio: f64,
}

/// Local parametrization of `∂Ω ∩ B_r(x0)` for a polygon boundary point.
pub fn local_graph(body: &ConvexBody, x0: &[f64], r: f64) -> Result<LocalGraph> {
    let poly = polygon_of(body)?;
    let x0v = Vec2::from_slice(x0);
    let own = boundary_edge(&poly, x0v)?;
    let nu0 = poly.planes()[own].normal;
    let u = poly.edge_tangent(own);
    let to_graph = |y: Vec2| ((y - x0v).dot(u), -(y - x0v).dot(nu0));
    let n = poly.len();
    let walk = |forward: bool| {
        let mut pts = Vec::new();
        let mut k = own;
        for _ in 0..n {
            let (a, b) = poly.edge(k);
            let (start, end) = if forward { (a, b) } else { (b, a) };
            if (end - x0v).norm() < r {
                pts.push(to_graph(end));
                k = if forward { (k + 1) % n } else { (k + n - 1) % n };
                continue;
            }
            // exit through the sphere along this edge
            let d = end - start;
            let w = start - x0v;
            let (dd, wd) = (d.norm_sq(), w.dot(d));
            let disc = (wd * wd - dd * (w.norm_sq() - r * r)).max(0.0);
            let t = (-wd + disc.sqrt()) / dd;
            pts.push(to_graph(start + d * t.clamp(0.0, 1.0)));
            break;
        }
        pts
    };
    let mut points: Vec<(f64, f64)> = walk(false).into_iter().rev().collect();
    points.push((0.0, 0.0));
    points.extend(walk(true));
    let slopes: Vec<f64> = points
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    let is_graph = points.windows(2).all(|w| w[1].0 > w[0].0);
    let is_convex = slopes.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let max_slope = slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let cone_ratio = points
        .iter()
        .filter(|p| p.0 != 0.0)
        .fold(0.0f64, |m, p| m.max(p.1 / p.0.abs()));
    Ok(LocalGraph {
        points,
        slopes,
        max_slope,
        is_graph,
        is_convex,
        cone_ratio,
    })
}

/// Largest `|ν(x0) - ν_e|` over edges `e` meeting `B_s(x0)`, and the smallest
/// margin `ν(x0)·ν_e - a*(dist(x0, e)/R)` over the same edges.
pub fn normal_variation(body: &ConvexBody, x0: &[f64], s: f64, big_r: f64) -> Result<(f64, f64)> {
    let poly = polygon_of(body)?;
    let x0v = Vec2::from_slice(x0);
    let own = boundary_edge(&poly, x0v)?;
    let nu0 = poly.planes()[own].normal;
    let mut worst: f64 = 0.0;
    let mut margin = f64::INFINITY;
    for j in 0..poly.len() {
        let (a, b) = poly.edge(j);
        if segment_in_disk(a, b, x0v, s).is_none() {
            continue;
        }
        let nu = poly.planes()[j].normal;
        worst = worst.max((nu - nu0).norm());
        let d = b - a;
        let t = ((x0v - a).dot(d) / d.norm_sq()).clamp(0.0, 1.0);
        let beta = (a + d * t - x0v).norm() / big_r;
        if beta > 0.0 {
            margin = margin.min(nu.dot(nu0) - a_star(beta));
        }
    }
    Ok((worst, margin))
}

/// Lower estimate of `Θ[∂Ω] = sup_{z, ρ} H¹(∂Ω ∩ B_ρ(z))/ρ` over vertices and
/// `per_edge` points per edge, with radii at all vertex distances.
pub fn boundary_density(body: &ConvexBody, per_edge: usize) -> Result<f64> {
    let poly = polygon_of(body)?;
    let mut centers: Vec<Vec2> = poly.vertices().to_vec();
    for i in 0..poly.len() {
        let (a, b) = poly.edge(i);
        for k in 1..=per_edge {
            centers.push(a + (b - a) * (k as f64 / (per_edge + 1) as f64));
        }
    }
    let mut best: f64 = 0.0;
    for &z in &centers {
        for v in poly.vertices() {
            let rho = (*v - z).norm() * (1.0 + 1e-12);
            if rho > 0.0 {
                best = best.max(poly.boundary_length_in_disk(z, rho) / rho);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn square() -> ConvexBody {
        ConvexBody::cuboid(vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn normals_on_square() {
        assert_eq!(outward_normal(&square(), &[0.5, 0.0]).unwrap(), vec![0.0, -1.0]);
        assert_eq!(outward_normal(&square(), &[1.0, 0.3]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(outward_normal(&square(), &[0.0, 0.0]), Err(Error::NormalUndefined));
        assert_eq!(outward_normal(&square(), &[0.5, 0.5]), Err(Error::NotOnBoundary));
    }

    #[test]
    fn normals_on_cube_and_ball() {
        let cube = ConvexBody::cuboid(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(outward_normal(&cube, &[0.5, 0.5, 1.0]).unwrap(), vec![0.0, 0.0, 1.0]);
        assert_eq!(outward_normal(&cube, &[0.0, 0.5, 1.0]), Err(Error::NormalUndefined));
        let ball = ConvexBody::ball(vec![0.0, 0.0], 2.0).unwrap();
        assert_eq!(outward_normal(&ball, &[0.0, -2.0]).unwrap(), vec![0.0, -1.0]);
    }

    #[test]
    fn good_point_examples() {
        let c = is_good_point(&square(), &[0.5, 0.0], 0.1, 0.4).unwrap();
        assert!(c.verified_cone);
        assert_eq!(c.max_ratio, 0.0);
        let c = is_good_point(&square(), &[0.5, 0.0], 0.1, 1.2).unwrap();
        assert!(!c.verified_cone);
        // the top edge passes within distance 1 of x0, directly above it
        assert!((c.max_ratio - 1.0).abs() < 1e-14);
        assert!(is_good_point(&square(), &[0.0, 0.0], 0.1, 0.4).is_err());
        assert!(is_good_point(&square(), &[0.5, 0.0], 0.6, 0.4).is_err());
    }

    #[test]
    fn good_set_measures() {
        let g = good_boundary_set(&square(), 0.25, 0.1).unwrap();
        assert!((g.measure() - 0.8).abs() < 1e-12);
        assert_eq!(g.segments().len(), 4);
        let g = good_boundary_set(&square(), 0.25, 0.125).unwrap();
        assert!(g.measure().abs() < 1e-12);
        // the four touching points survive as degenerate segments
        assert_eq!(g.segments().len(), 4);
        let rect = ConvexBody::cuboid(vec![2.0, 1.0]).unwrap();
        let g = good_boundary_set(&rect, 0.25, 0.1).unwrap();
        assert!((g.measure() - 2.8).abs() < 1e-12);
        assert!(matches!(
            good_boundary_set(&square(), 0.25, 0.2),
            Err(Error::ParamOutOfRange { name: "r", .. })
        ));
    }

    #[test]
    fn box_closed_form_matches_polygon_route() {
        let cube = ConvexBody::cuboid(vec![1.0, 1.0, 1.0]).unwrap();
        let g = good_boundary_set(&cube, 0.25, 0.1).unwrap();
        assert!((g.measure() - 6.0 * 0.2 * 0.2).abs() < 1e-14);
        let rect = ConvexBody::cuboid(vec![2.0, 1.0]).unwrap();
        let poly = ConvexBody::Polygon(rect.as_polygon().unwrap());
        let a = good_boundary_set(&rect, 0.3, 0.12).unwrap().measure();
        let b = good_boundary_set(&poly, 0.3, 0.12).unwrap().measure();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn sawtooth_examples() {
        let g = good_boundary_set(&square(), 0.25, 0.1).unwrap();
        let q = g.sawtooth_contains(&[0.5, 0.04]);
        assert!(q.member);
        let m = q.matched_x0.unwrap();
        assert!((m[0] - 0.5).abs() < 1e-15 && m[1].abs() < 1e-15);
        assert!(!g.sawtooth_contains(&[0.01, 0.01]).member);
        assert!(!g.sawtooth_contains(&[0.5, 0.06]).member);
        assert!(!g.sawtooth_contains(&[1.5, 0.5]).member);
    }

    #[test]
    fn sawtooth_on_degenerate_good_set_hits_midpoints() {
        let g = good_boundary_set(&square(), 0.25, 0.125).unwrap();
        assert!(g.sawtooth_contains(&[0.5, 0.02]).member);
        assert!(g.sawtooth_contains(&[0.98, 0.5]).member);
        assert!(!g.sawtooth_contains(&[0.45, 0.02]).member);
    }

    #[test]
    fn bad_set_square_against_closed_form() {
        let g = good_boundary_set(&square(), 0.25, 0.1).unwrap();
        let exact = g.bad_set_volume_rectangle(0.05).unwrap();
        assert!((exact - 0.15).abs() < 1e-15);
        let est = g.bad_set_volume(0.05, 200_000, 42).unwrap();
        assert!((est.estimate - exact).abs() < 4.0 * est.std_error, "{est:?}");
        assert!(g.bad_set_volume(0.06, 10_000, 1).is_err());
    }

    #[test]
    fn nu_bar_examples() {
        let sq = square();
        let v = nu_bar_p(&sq, &[0.5, 0.0], 0.4, 1.0, 6).unwrap();
        assert_eq!(v.value, 0.0);
        let v = nu_bar_p(&sq, &[0.5, 0.0], 0.6, 1.0, 6).unwrap();
        // for η ∈ (1/2, 0.6) the disk holds the whole bottom edge and
        // sqrt(η² - 1/4) of each side edge, where |ν - ν0| = √2
        let side = (0.36f64 - 0.25).sqrt();
        let exact = SQRT_2 * 2.0 * side / (1.0 + 2.0 * side);
        assert!((v.value - exact).abs() < 1e-14, "{} vs {exact}", v.value);
        assert!(nu_bar_p(&sq, &[0.0, 0.0], 0.6, 1.0, 6).is_err());
    }

    #[test]
    fn a_star_examples() {
        assert_eq!(a_star(1.0), 0.0);
        assert!((a_star(1e-8) - 1.0).abs() < 1e-12);
        let a = a_star(0.5);
        assert!(a_star_residual(a, 0.5).abs() < 1e-14);
        assert!(a_star_residual(a - 1e-6, 0.5) < 0.0);
    }

    #[test]
    fn distance_inequality_examples() {
        let res = good_set_distance_inequalities(&[0.5, 0.0], 0.25, &[0.5, 0.03], &[0.6, 0.0], 0.03);
        assert!(res.max() <= 0.0, "{res:?}");
        let res = good_set_distance_inequalities(&[0.5, 0.0], 0.25, &[0.5, 0.03], &[0.5, 0.0], 0.03);
        assert_eq!(res.inner_product, 0.0);
        // y = x0: both expansions are exact equalities
        assert!((res.expansion + 2.0 * 0.25 * 0.0009).abs() < 1e-18);
        assert!((res.reflected_expansion + 2.0 * 0.25 * 0.0009).abs() < 1e-18);
    }

    #[test]
    fn local_graph_on_square_midpoint() {
        let g = local_graph(&square(), &[0.5, 0.0], 0.3).unwrap();
        assert!(g.is_graph && g.is_convex);
        assert_eq!(g.max_slope, 0.0);
        assert_eq!(g.points.len(), 3);
    }

    #[test]
    fn boundary_density_of_square() {
        let th = boundary_density(&square(), 8).unwrap();
        assert!(th >= 2.0 && th <= 2.0 * core::f64::consts::PI);
    }
}
