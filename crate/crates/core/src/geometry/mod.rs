//! Exact convex geometry for polygons, axis-aligned boxes and balls.
//!
//! Polygon quantities are exact up to rounding: areas by the shoelace formula,
//! inner parallel bodies by clipping against inward-offset edge lines,
//! disk intersections by signed disk–triangle decomposition. Boxes and balls
//! use closed forms. The only stochastic path is the local volume of a ball
//! in a box or ball of dimension four and up, which falls back to seeded
//! Monte Carlo and reports its standard error.

mod polygon;
pub mod random;
mod vec2;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

pub use polygon::{convex_hull, Polygon};
pub(crate) use polygon::{clip_line, segment_in_disk};
pub use vec2::Vec2;

use crate::error::out_of_range;
use crate::montecarlo::{mc_integral, SampleBox};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Half-plane `{x : n·x < offset}` with unit outward normal `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub normal: Vec2,
    pub offset: f64,
}

impl HalfPlane {
    pub fn new(normal: Vec2, offset: f64) -> Result<Self> {
        if (normal.norm() - 1.0).abs() > 1e-12 {
            return Err(out_of_range("normal", "half-plane normal must have unit length"));
        }
        Ok(Self { normal, offset })
    }

    /// `offset - n·p`: positive inside, the distance to the line for unit `n`.
    #[inline]
    pub fn slack(&self, p: Vec2) -> f64 {
        self.offset - self.normal.dot(p)
    }

    /// The same half-plane moved inward by `s`.
    #[inline]
    pub fn shifted(&self, s: f64) -> Self {
        Self {
            normal: self.normal,
            offset: self.offset - s,
        }
    }
}

/// Axis-aligned box `Π [origin_i, origin_i + lengths_i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cuboid {
    origin: Vec<f64>,
    lengths: Vec<f64>,
}

impl Cuboid {
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        let origin = vec![0.0; lengths.len()];
        Self::with_origin(origin, lengths)
    }

    pub fn with_origin(origin: Vec<f64>, lengths: Vec<f64>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::Degenerate("box needs at least one side"));
        }
        if origin.len() != lengths.len() {
            return Err(Error::DimensionMismatch {
                expected: lengths.len(),
                got: origin.len(),
            });
        }
        if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::Degenerate("box side lengths must be positive"));
        }
        Ok(Self { origin, lengths })
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }
}

/// Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::Degenerate("ball needs a center"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Degenerate("ball radius must be positive"));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// A bounded open convex domain.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexBody {
    Polygon(Polygon),
    Box(Cuboid),
    Ball(Ball),
}

/// Derived size quantities of a body.
#[derive(Clone, Debug, PartialEq)]
pub struct BodyMetrics {
    /// `|Ω|`
    pub volume: f64,
    /// `H^{d-1}(∂Ω)`
    pub surface: f64,
    pub inradius: f64,
    pub incenter: Vec<f64>,
    pub diameter: f64,
}

/// Local volume `|Ω ∩ B_r(x)|`; `std_error` is zero on exact paths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalVolume {
    pub value: f64,
    pub std_error: f64,
}

impl LocalVolume {
    fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0 }
    }
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * PI / d as f64,
    }
}

/// Elementary symmetric polynomials `e_0..e_d` of the values.
fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (k, &v) in values.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            e[j] += e[j - 1] * v;
        }
    }
    e
}

fn box_surface(lengths: &[f64]) -> f64 {
    (0..lengths.len())
        .map(|i| {
            2.0 * lengths
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, l)| l)
                .product::<f64>()
        })
        .sum()
}

fn ball_ball_volume(d: usize, big: f64, small: f64, dist: f64) -> Option<f64> {
    if dist >= big + small {
        return Some(0.0);
    }
    if dist <= (big - small).abs() {
        return Some(unit_ball_volume(d) * big.min(small).powi(d as i32));
    }
    match d {
        1 => Some((big.min(dist + small) - (-big).max(dist - small)).max(0.0)),
        2 => {
            let (r, rr, dd) = (small, big, dist);
            let a1 = ((dd * dd + r * r - rr * rr) / (2.0 * dd * r)).clamp(-1.0, 1.0).acos();
            let a2 = ((dd * dd + rr * rr - r * r) / (2.0 * dd * rr)).clamp(-1.0, 1.0).acos();
            let k = ((-dd + r + rr) * (dd + r - rr) * (dd - r + rr) * (dd + r + rr)).max(0.0).sqrt();
            Some(r * r * a1 + rr * rr * a2 - 0.5 * k)
        }
        3 => {
            let (r, rr, dd) = (small, big, dist);
            Some(
                PI * (rr + r - dd).powi(2) * (dd * dd + 2.0 * dd * r - 3.0 * r * r + 2.0 * dd * rr + 6.0 * r * rr
                    - 3.0 * rr * rr)
                    / (12.0 * dd),
            )
        }
        _ => None,
    }
}

/// Sample count and seed of the Monte Carlo fallback in [`ConvexBody::local_volume`].
pub const LOCAL_VOLUME_MC_SAMPLES: u64 = 200_000;
const LOCAL_VOLUME_MC_SEED: u64 = 0x5EED_0A11;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl ConvexBody {
    pub fn polygon(vertices: Vec<Vec2>) -> Result<Self> {
        Polygon::new(vertices).map(Self::Polygon)
    }

    pub fn cuboid(lengths: Vec<f64>) -> Result<Self> {
        Cuboid::new(lengths).map(Self::Box)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        Ball::new(center, radius).map(Self::Ball)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Polygon(_) => 2,
            Self::Box(b) => b.lengths.len(),
            Self::Ball(b) => b.center.len(),
        }
    }

    /// Exact metrics; polygon inradius comes from the edge-triple enumeration
    /// done at construction.
    pub fn metrics(&self) -> BodyMetrics {
        match self {
            Self::Polygon(p) => BodyMetrics {
                volume: p.area(),
                surface: p.perimeter(),
                inradius: p.inradius(),
                incenter: p.incenter().to_array().to_vec(),
                diameter: p.diameter(),
            },
            Self::Box(b) => {
                let min = b.lengths.iter().copied().fold(f64::INFINITY, f64::min);
                BodyMetrics {
                    volume: b.lengths.iter().product(),
                    surface: box_surface(&b.lengths),
                    inradius: 0.5 * min,
                    incenter: b.origin.iter().zip(&b.lengths).map(|(o, l)| o + 0.5 * l).collect(),
                    diameter: norm(&b.lengths),
                }
            }
            Self::Ball(b) => {
                let d = b.center.len();
                BodyMetrics {
                    volume: unit_ball_volume(d) * b.radius.powi(d as i32),
                    surface: d as f64 * unit_ball_volume(d) * b.radius.powi(d as i32 - 1),
                    inradius: b.radius,
                    incenter: b.center.clone(),
                    diameter: 2.0 * b.radius,
                }
            }
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Self::Polygon(p) => p.area(),
            _ => self.metrics().volume,
        }
    }

    pub fn surface(&self) -> f64 {
        match self {
            Self::Polygon(p) => p.perimeter(),
            _ => self.metrics().surface,
        }
    }

    pub fn inradius(&self) -> f64 {
        match self {
            Self::Polygon(p) => p.inradius(),
            Self::Box(b) => 0.5 * b.lengths.iter().copied().fold(f64::INFINITY, f64::min),
            Self::Ball(b) => b.radius,
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Self::Polygon(p) => {
                let (mut lo, mut hi) = (vec![f64::INFINITY; 2], vec![f64::NEG_INFINITY; 2]);
                for v in p.vertices() {
                    lo[0] = lo[0].min(v.x);
                    lo[1] = lo[1].min(v.y);
                    hi[0] = hi[0].max(v.x);
                    hi[1] = hi[1].max(v.y);
                }
                (lo, hi)
            }
            Self::Box(b) => (b.origin.clone(), b.origin.iter().zip(&b.lengths).map(|(o, l)| o + l).collect()),
            Self::Ball(b) => (
                b.center.iter().map(|c| c - b.radius).collect(),
                b.center.iter().map(|c| c + b.radius).collect(),
            ),
        }
    }

    /// A 2-D body as a polygon (boxes are converted).
    pub fn as_polygon(&self) -> Option<Polygon> {
        match self {
            Self::Polygon(p) => Some(p.clone()),
            Self::Box(b) if b.lengths.len() == 2 => Polygon::rectangle(
                Vec2::new(b.origin[0], b.origin[1]),
                b.lengths[0],
                b.lengths[1],
            )
            .ok(),
            _ => None,
        }
    }

    /// `d_Ω(x) = dist(x, Ω^c)`, zero for exterior points.
    pub fn distance_to_complement(&self, x: &[f64]) -> f64 {
        match self {
            Self::Polygon(p) => p.distance_to_complement(Vec2::from_slice(x)),
            Self::Box(b) => b
                .origin
                .iter()
                .zip(&b.lengths)
                .zip(x)
                .map(|((o, l), xi)| (xi - o).min(o + l - xi))
                .fold(f64::INFINITY, f64::min)
                .max(0.0),
            Self::Ball(b) => (b.radius - dist(x, &b.center)).max(0.0),
        }
    }

    /// `dist(x, Ω)`, zero for points of the closure.
    pub fn exterior_distance(&self, x: &[f64]) -> f64 {
        match self {
            Self::Polygon(p) => p.exterior_distance(Vec2::from_slice(x)),
            Self::Box(b) => b
                .origin
                .iter()
                .zip(&b.lengths)
                .zip(x)
                .map(|((o, l), xi)| {
                    let e = (o - xi).max(xi - o - l).max(0.0);
                    e * e
                })
                .sum::<f64>()
                .sqrt(),
            Self::Ball(b) => (dist(x, &b.center) - b.radius).max(0.0),
        }
    }

    /// Open-set membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.distance_to_complement(x) > 0.0
    }

    /// Inner parallel body `{d_Ω > s}`; `Ok(None)` when it is empty (`s >= r_in`).
    pub fn inner_parallel_body(&self, s: f64) -> Result<Option<ConvexBody>> {
        if !(s > 0.0) {
            return Err(out_of_range("s", "erosion depth must be positive"));
        }
        match self {
            Self::Polygon(p) => Ok(p.erode(s).map(Self::Polygon)),
            Self::Box(b) => {
                if s >= self.inradius() {
                    return Ok(None);
                }
                let cub = Cuboid {
                    origin: b.origin.iter().map(|o| o + s).collect(),
                    lengths: b.lengths.iter().map(|l| l - 2.0 * s).collect(),
                };
                Ok(Some(Self::Box(cub)))
            }
            Self::Ball(_) => Err(Error::UnsupportedVariant("ball erosion is handled in closed form")),
        }
    }

    /// `|{x ∈ Ω : d_Ω(x) < s}|`.
    pub fn boundary_neighborhood_volume(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let vol = self.volume();
        match self {
            Self::Ball(b) => {
                let d = b.center.len() as i32;
                vol - unit_ball_volume(d as usize) * (b.radius - s).max(0.0).powi(d)
            }
            Self::Box(b) => {
                let inner: f64 = b.lengths.iter().map(|l| (l - 2.0 * s).max(0.0)).product();
                vol - inner
            }
            Self::Polygon(p) => vol - p.erode(s).map_or(0.0, |q| q.area()),
        }
    }

    /// `H^{d-1}({d_Ω = s})`, for `0 <= s < r_in`.
    pub fn inner_level_perimeter(&self, s: f64) -> Result<f64> {
        if s < 0.0 {
            return Err(out_of_range("s", "level must be nonnegative"));
        }
        if s >= self.inradius() {
            return Err(Error::LevelEmpty);
        }
        if s == 0.0 {
            return Ok(self.surface());
        }
        match self {
            Self::Polygon(p) => p.erode(s).map(|q| q.perimeter()).ok_or(Error::LevelEmpty),
            Self::Box(b) => Ok(box_surface(&b.lengths.iter().map(|l| l - 2.0 * s).collect::<Vec<_>>())),
            Self::Ball(b) => {
                let d = b.center.len();
                Ok(d as f64 * unit_ball_volume(d) * (b.radius - s).powi(d as i32 - 1))
            }
        }
    }

    /// `ϑ_Ω(s) = |{d_Ω < s}| / (s·H^{d-1}(∂Ω)) - 1`, which lies in `[-1, 0]`.
    pub fn theta_omega(&self, s: f64) -> f64 {
        self.boundary_neighborhood_volume(s) / (s * self.surface()) - 1.0
    }

    /// `V_Ω(x, r) = |Ω ∩ B_r(x)|`.
    pub fn local_volume(&self, x: &[f64], r: f64) -> LocalVolume {
        if r <= 0.0 {
            return LocalVolume::exact(0.0);
        }
        let d = self.dim();
        match self {
            Self::Polygon(p) => LocalVolume::exact(p.disk_intersection_area(Vec2::from_slice(x), r)),
            Self::Box(b) if d == 1 => {
                let lo = (x[0] - r).max(b.origin[0]);
                let hi = (x[0] + r).min(b.origin[0] + b.lengths[0]);
                LocalVolume::exact((hi - lo).max(0.0))
            }
            Self::Box(_) if d == 2 => {
                let p = self.as_polygon().expect("2-D box");
                LocalVolume::exact(p.disk_intersection_area(Vec2::from_slice(x), r))
            }
            Self::Ball(b) => match ball_ball_volume(d, b.radius, r, dist(x, &b.center)) {
                Some(v) => LocalVolume::exact(v),
                None => self.local_volume_mc(x, r),
            },
            Self::Box(_) => self.local_volume_mc(x, r),
        }
    }

    fn local_volume_mc(&self, x: &[f64], r: f64) -> LocalVolume {
        let (lo, hi) = self.bounding_box();
        let sb = SampleBox::new(
            lo.iter().zip(x).map(|(l, xi)| l.max(xi - r)).collect(),
            hi.iter().zip(x).map(|(h, xi)| h.min(xi + r)).collect(),
        );
        if sb.lo.iter().zip(&sb.hi).any(|(a, b)| a >= b) {
            return LocalVolume::exact(0.0);
        }
        let est = mc_integral(&sb, LOCAL_VOLUME_MC_SAMPLES, LOCAL_VOLUME_MC_SEED, |y| {
            if dist(y, x) < r && self.distance_to_complement(y) > 0.0 {
                1.0
            } else {
                0.0
            }
        })
        .expect("positive sample count");
        LocalVolume {
            value: est.estimate,
            std_error: est.std_error,
        }
    }

    /// `|Ω + B_r|` by the Steiner formula.
    pub fn minkowski_volume(&self, r: f64) -> f64 {
        match self {
            Self::Polygon(p) => p.area() + r * p.perimeter() + PI * r * r,
            Self::Box(b) => {
                let d = b.lengths.len();
                elementary_symmetric(&b.lengths)
                    .iter()
                    .enumerate()
                    .map(|(j, e)| e * unit_ball_volume(d - j) * r.powi((d - j) as i32))
                    .sum()
            }
            Self::Ball(b) => {
                let d = b.center.len();
                unit_ball_volume(d) * (b.radius + r).powi(d as i32)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexBody {
        ConvexBody::cuboid(vec![1.0, 1.0]).unwrap()
    }

    fn triangle() -> ConvexBody {
        ConvexBody::polygon(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let m = unit_square().metrics();
        assert_eq!((m.volume, m.surface, m.inradius), (1.0, 4.0, 0.5));
        assert_eq!(m.incenter, vec![0.5, 0.5]);

        let m = ConvexBody::cuboid(vec![2.0, 1.0]).unwrap().metrics();
        assert_eq!((m.volume, m.surface, m.inradius), (2.0, 6.0, 0.5));

        let m = triangle().metrics();
        let sqrt2 = 2f64.sqrt();
        assert!((m.volume - 0.5).abs() < 1e-15);
        assert!((m.surface - (2.0 + sqrt2)).abs() < 1e-15);
        // incircle: r = area / semiperimeter
        let r = 0.5 / (0.5 * (2.0 + sqrt2));
        assert!((m.inradius - r).abs() < 1e-14);
        assert!((m.inradius - (2.0 - sqrt2) / 2.0).abs() < 1e-14);
        assert!((m.incenter[0] - r).abs() < 1e-14 && (m.incenter[1] - r).abs() < 1e-14);
    }

    #[test]
    fn invalid_boxes_and_balls() {
        assert!(matches!(ConvexBody::cuboid(vec![1.0, 0.0]), Err(Error::Degenerate(_))));
        assert!(matches!(ConvexBody::cuboid(vec![]), Err(Error::Degenerate(_))));
        assert!(matches!(ConvexBody::ball(vec![0.0, 0.0], -1.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn distance_examples() {
        let sq = unit_square();
        assert_eq!(sq.distance_to_complement(&[0.5, 0.5]), 0.5);
        assert!((sq.distance_to_complement(&[0.1, 0.3]) - 0.1).abs() < 1e-16);
        assert_eq!(sq.distance_to_complement(&[2.0, 0.5]), 0.0);
        let poly = ConvexBody::Polygon(sq.as_polygon().unwrap());
        assert!((poly.distance_to_complement(&[0.1, 0.3]) - 0.1).abs() < 1e-16);
        assert_eq!(poly.distance_to_complement(&[2.0, 0.5]), 0.0);
        let ball = ConvexBody::ball(vec![0.0, 0.0, 0.0], 2.0).unwrap();
        assert_eq!(ball.distance_to_complement(&[1.0, 0.0, 0.0]), 1.0);
        assert_eq!(ball.distance_to_complement(&[3.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn erosion_examples() {
        let sq = unit_square();
        match sq.inner_parallel_body(0.25).unwrap().unwrap() {
            ConvexBody::Box(b) => {
                assert_eq!(b.lengths(), &[0.5, 0.5]);
                assert_eq!(b.origin(), &[0.25, 0.25]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(sq.inner_parallel_body(0.5).unwrap().is_none());
        let poly = ConvexBody::Polygon(sq.as_polygon().unwrap());
        let q = poly.inner_parallel_body(0.25).unwrap().unwrap();
        assert!((q.volume() - 0.25).abs() < 1e-15);
        assert!(poly.inner_parallel_body(0.5).unwrap().is_none());
        let ball = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(matches!(ball.inner_parallel_body(0.1), Err(Error::UnsupportedVariant(_))));
        assert!(sq.inner_parallel_body(0.0).is_err());
    }

    #[test]
    fn eroded_triangle_vertices() {
        // offset lines: y = s, x = s, x + y = 1 - s√2
        let s = 0.1;
        let q = triangle().inner_parallel_body(s).unwrap().unwrap();
        let ConvexBody::Polygon(q) = q else { panic!() };
        let c = 1.0 - s * 2f64.sqrt();
        let expected = [Vec2::new(s, s), Vec2::new(c - s, s), Vec2::new(s, c - s)];
        assert_eq!(q.len(), 3);
        for e in expected {
            assert!(q.vertices().iter().any(|v| (*v - e).norm() < 1e-14), "{e:?} not in {:?}", q.vertices());
        }
        let leg = c - 2.0 * s;
        assert!((q.area() - 0.5 * leg * leg).abs() < 1e-15);
    }

    #[test]
    fn boundary_neighborhood_examples() {
        let sq = unit_square();
        assert!((sq.boundary_neighborhood_volume(0.1) - 0.36).abs() < 1e-15);
        assert_eq!(sq.boundary_neighborhood_volume(0.5), 1.0);
        assert_eq!(sq.boundary_neighborhood_volume(0.9), 1.0);
        let rect = ConvexBody::cuboid(vec![2.0, 1.0]).unwrap();
        assert!((rect.boundary_neighborhood_volume(0.1) - 0.56).abs() < 1e-15);
        let poly = ConvexBody::Polygon(rect.as_polygon().unwrap());
        assert!((poly.boundary_neighborhood_volume(0.1) - 0.56).abs() < 1e-14);
    }

    #[test]
    fn level_perimeter_examples() {
        let sq = unit_square();
        assert!((sq.inner_level_perimeter(0.1).unwrap() - 3.2).abs() < 1e-15);
        assert_eq!(sq.inner_level_perimeter(0.0).unwrap(), 4.0);
        assert!(matches!(sq.inner_level_perimeter(0.5), Err(Error::LevelEmpty)));
        let tri = triangle();
        let (p, rin) = (tri.surface(), tri.inradius());
        let s = 0.05;
        let v = tri.inner_level_perimeter(s).unwrap();
        assert!((1.0 - s / rin) * p <= v + 1e-12 && v <= p + 1e-12);
        // homothetic about the incenter with ratio (1 - s/r_in)
        assert!((v - (1.0 - s / rin) * p).abs() < 1e-13);
    }

    #[test]
    fn theta_examples() {
        let sq = unit_square();
        assert!((sq.theta_omega(0.1) + 0.1).abs() < 1e-15);
        assert!((sq.theta_omega(0.5) + 0.5).abs() < 1e-15);
        for k in 1..40 {
            let s = 0.5 * 0.8f64.powi(k);
            let th = sq.theta_omega(s);
            assert!((-1.0..=0.0).contains(&th));
            assert!(th.abs() <= 2.0 * s / 0.5 + 1e-15);
        }
    }

    #[test]
    fn local_volume_examples() {
        let sq = unit_square();
        let disk = PI * 0.0625;
        assert!((sq.local_volume(&[0.5, 0.5], 0.25).value - disk).abs() < 1e-15);
        assert!((sq.local_volume(&[0.0, 0.0], 0.25).value - disk / 4.0).abs() < 1e-15);
        assert!((sq.local_volume(&[0.5, 0.0], 0.25).value - disk / 2.0).abs() < 1e-15);
        let iv = ConvexBody::cuboid(vec![1.0]).unwrap();
        assert_eq!(iv.local_volume(&[0.1], 0.3).value, 0.4);
    }

    #[test]
    fn local_volume_three_box_is_monte_carlo_with_error() {
        let cube = ConvexBody::cuboid(vec![1.0, 1.0, 1.0]).unwrap();
        let lv = cube.local_volume(&[0.0, 0.0, 0.0], 0.5);
        let exact = unit_ball_volume(3) * 0.125 / 8.0;
        assert!(lv.std_error > 0.0);
        assert!((lv.value - exact).abs() < 5.0 * lv.std_error, "{lv:?} vs {exact}");
    }

    #[test]
    fn ball_local_volume_closed_forms() {
        let b2 = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        // disk of radius 1 centred on the boundary of the unit disk
        let lens = 2.0 * PI / 3.0 - 3f64.sqrt() / 2.0;
        assert!((b2.local_volume(&[1.0, 0.0], 1.0).value - lens).abs() < 1e-14);
        let b3 = ConvexBody::ball(vec![0.0, 0.0, 0.0], 1.0).unwrap();
        // two unit balls at distance 1: 5π/12
        assert!((b3.local_volume(&[1.0, 0.0, 0.0], 1.0).value - 5.0 * PI / 12.0).abs() < 1e-14);
    }

    #[test]
    fn minkowski_examples() {
        let sq = unit_square();
        assert!((sq.minkowski_volume(0.1) - (1.4 + 0.01 * PI)).abs() < 1e-15);
        assert!((ConvexBody::Polygon(sq.as_polygon().unwrap()).minkowski_volume(0.1) - 1.431_415_926_535_897_9).abs() < 1e-14);
        let ball = ConvexBody::ball(vec![0.0; 3], 1.0).unwrap();
        assert!((ball.minkowski_volume(1.0) - unit_ball_volume(3) * 8.0).abs() < 1e-13);
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }
}
