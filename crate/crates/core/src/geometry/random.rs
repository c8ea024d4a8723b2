//! Seeded random convex polygons for property sweeps.

use alloc::vec::Vec;
use rand_core::Rng;

use super::{convex_hull, Polygon, Vec2};
use crate::montecarlo::unit_f64;
#[allow(unused_imports)]
use num_traits::Float;

/// Convex hull of `points` uniform samples from an ellipse-ish cloud.
///
/// The cloud is the unit square stretched by a random aspect ratio in
/// `[1, 4]` and rotated by a random angle, so the sweep sees elongated,
/// skewed and nearly triangular shapes. Retries until the hull is a valid
/// strictly convex polygon.
pub fn random_convex_polygon<R: Rng + ?Sized>(rng: &mut R, points: usize) -> Polygon {
    let points = points.max(3);
    loop {
        let aspect = 1.0 + 3.0 * unit_f64(rng);
        let angle = core::f64::consts::PI * unit_f64(rng);
        let (s, c) = angle.sin_cos();
        let cloud: Vec<Vec2> = (0..points)
            .map(|_| {
                let u = Vec2::new(aspect * unit_f64(rng), unit_f64(rng));
                Vec2::new(c * u.x - s * u.y, s * u.x + c * u.y)
            })
            .collect();
        let hull = convex_hull(&cloud);
        if hull.len() < 3 {
            continue;
        }
        if let Ok(p) = Polygon::new(hull) {
            // skip slivers whose inradius is lost in rounding
            if p.inradius() > 1e-3 * p.diameter() {
                return p;
            }
        }
    }
}

/// Uniform point of the closed segment `[a, b]`.
pub fn point_on_segment<R: Rng + ?Sized>(rng: &mut R, a: Vec2, b: Vec2) -> Vec2 {
    a + (b - a) * unit_f64(rng)
}
