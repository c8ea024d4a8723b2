use heatlab_core::geometry::random::{point_on_segment, random_convex_polygon};
use heatlab_core::geometry::{convex_hull, Polygon};
use heatlab_core::montecarlo::{stream_rng, unit_f64};
use heatlab_core::quadrature::{integrate_with_breaks, QuadOptions};
use heatlab_core::{ConvexBody, Vec2};
use proptest::prelude::*;
use std::f64::consts::PI;

fn polygon_from_seed(seed: u64, points: usize) -> Polygon {
    random_convex_polygon(&mut stream_rng(seed, 0), points)
}

fn vertex_count(p: &Polygon, s: f64) -> usize {
    p.erode(s).map_or(0, |q| q.vertices().len())
}

/// Depths in `(0, s)` where an edge of the eroded polygon collapses; the
/// level perimeter has a kink at each one.
fn collapse_depths(p: &Polygon, s: f64) -> Vec<f64> {
    let n = 400;
    let mut out = Vec::new();
    for k in 0..n {
        let (mut lo, mut hi) = (s * k as f64 / n as f64, s * (k + 1) as f64 / n as f64);
        if vertex_count(p, lo.max(1e-300)) == vertex_count(p, hi) {
            continue;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if vertex_count(p, mid) == vertex_count(p, hi) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(hi);
    }
    out
}

fn depth_grid(rin: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| rin * k as f64 / (n + 1) as f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn perimeter_monotone_under_inclusion(seed in any::<u64>(), keep in 3usize..8) {
        let p = polygon_from_seed(seed, 12);
        for s in depth_grid(p.inradius(), 10) {
            if let Some(q) = p.erode(s) {
                prop_assert!(q.perimeter() <= p.perimeter() + 1e-12);
            }
        }
        // hull of a vertex subset is another convex subset
        let sub: Vec<Vec2> = p.vertices().iter().step_by(2).take(keep).copied().collect();
        let hull = convex_hull(&sub);
        if hull.len() >= 3 {
            if let Ok(q) = Polygon::new(hull) {
                prop_assert!(q.perimeter() <= p.perimeter() + 1e-12);
            }
        }
    }

    #[test]
    fn boundary_in_disk_bounded_by_circle(seed in any::<u64>(), cx in -1.0f64..2.0, cy in -1.0f64..2.0, r in 0.01f64..3.0) {
        let p = polygon_from_seed(seed, 10);
        let len = p.boundary_length_in_disk(Vec2::new(cx, cy), r);
        prop_assert!(len <= 2.0 * PI * r + 1e-12);
    }

    #[test]
    fn level_perimeter_and_strip_sandwich(seed in any::<u64>()) {
        let body = ConvexBody::Polygon(polygon_from_seed(seed, 15));
        let m = body.metrics();
        for s in depth_grid(m.inradius, 50) {
            let lvl = body.inner_level_perimeter(s).unwrap();
            let f = 1.0 - s / m.inradius;
            prop_assert!(f * m.surface <= lvl + 1e-10 && lvl <= m.surface + 1e-10);
            let strip = body.boundary_neighborhood_volume(s);
            prop_assert!(s * m.surface * f <= strip + 1e-10 && strip <= s * m.surface + 1e-10);
        }
    }

    #[test]
    fn strip_volume_is_integral_of_level_perimeters(seed in any::<u64>(), frac in 0.05f64..0.95) {
        let p = polygon_from_seed(seed, 9);
        let body = ConvexBody::Polygon(p.clone());
        let s = frac * body.inradius();
        let breaks = collapse_depths(&p, s);
        let q = integrate_with_breaks(
            |tau| body.inner_level_perimeter(tau).unwrap(),
            0.0, s, &breaks, QuadOptions::abs(1e-11),
        ).unwrap();
        prop_assert!((q.value - body.boundary_neighborhood_volume(s)).abs() < 1e-9);
    }

    #[test]
    fn local_volume_ratio_nonincreasing(seed in any::<u64>(), which in 0usize..3) {
        let p = polygon_from_seed(seed, 10);
        let mut rng = stream_rng(seed, 1);
        let x = match which {
            0 => p.vertices()[0],
            1 => { let (a, b) = p.edge(1); point_on_segment(&mut rng, a, b) }
            _ => p.incenter() + Vec2::new(0.3, -0.2) * p.inradius(),
        };
        let body = ConvexBody::Polygon(p);
        let mut prev = f64::INFINITY;
        let mut r = 1e-3 * body.metrics().diameter;
        for _ in 0..40 {
            let v = body.local_volume(&x.to_array(), r).value;
            prop_assert!(v <= PI * r * r * (1.0 + 1e-12));
            let ratio = v / (r * r);
            prop_assert!(ratio <= prev + 1e-9);
            prev = ratio;
            r *= 1.25;
        }
    }

    #[test]
    fn steiner_lower_bound_and_erosion_membership(seed in any::<u64>()) {
        let p = polygon_from_seed(seed, 11);
        let body = ConvexBody::Polygon(p.clone());
        let m = body.metrics();
        for k in 0..20 {
            let r = m.inradius * 0.01 * 1.5f64.powi(k);
            prop_assert!(body.minkowski_volume(r) - m.volume >= r * m.surface - 1e-12);
        }
        let s = 0.4 * m.inradius;
        let q = p.erode(s).unwrap();
        let mut rng = stream_rng(seed, 2);
        let (lo, hi) = body.bounding_box();
        for _ in 0..200 {
            let x = Vec2::new(lo[0] + (hi[0] - lo[0]) * unit_f64(&mut rng), lo[1] + (hi[1] - lo[1]) * unit_f64(&mut rng));
            let d = p.distance_to_complement(x);
            if (d - s).abs() > 1e-9 {
                prop_assert_eq!(q.contains(x), d > s);
            }
        }
    }
}

#[test]
fn steiner_matches_disk_intersection_far_field() {
    // |Ω + B_r| for a square against the exact rounded-square formula
    let sq = ConvexBody::cuboid(vec![1.0, 1.0]).unwrap();
    for r in [0.1, 0.5, 2.0] {
        let exact = 1.0 + 4.0 * r + PI * r * r;
        assert!((sq.minkowski_volume(r) - exact).abs() < 1e-13);
    }
}
