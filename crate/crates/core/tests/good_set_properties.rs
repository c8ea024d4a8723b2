use heatlab_core::geometry::random::{point_on_segment, random_convex_polygon};
use heatlab_core::good_sets::{
    a_star, a_star_residual, good_boundary_set, good_set_distance_inequalities, is_good_point, local_graph,
    normal_variation, normal_variation_constant,
};
use heatlab_core::montecarlo::{stream_rng, unit_f64};
use heatlab_core::{ConvexBody, Vec2};
use proptest::prelude::*;

fn bisection_root(beta: f64) -> f64 {
    // the residual is negative below the root and nonnegative above it
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if a_star_residual(0.0, beta) >= 0.0 {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if a_star_residual(mid, beta) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[test]
fn a_star_against_bisection_on_grid() {
    assert_eq!(a_star(1.0), 0.0);
    let mut prev = f64::INFINITY;
    for k in 1..=100 {
        let beta = k as f64 / 101.0;
        let a = a_star(beta);
        assert!((a - bisection_root(beta)).abs() < 1e-10, "beta {beta}");
        assert!(a < prev);
        prev = a;
        assert!(a_star_residual(a, beta) >= -1e-14);
        assert!(a_star_residual(a - 1e-6, beta) < 0.0);
        assert!((1.0 - a) / (beta * beta) <= normal_variation_constant() + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn good_set_points_are_good(seed in any::<u64>(), eps in 0.05f64..0.5, frac in 0.1f64..1.0) {
        let p = random_convex_polygon(&mut stream_rng(seed, 0), 14);
        let body = ConvexBody::Polygon(p.clone());
        let r = frac * eps * p.inradius();
        let g = good_boundary_set(&body, eps, r).unwrap();
        let mut rng = stream_rng(seed, 1);
        for seg in g.segments() {
            if seg.length() == 0.0 {
                continue;
            }
            for _ in 0..4 {
                let x0 = point_on_segment(&mut rng, seg.start, seg.end);
                if p.vertices().iter().any(|v| (*v - x0).norm() < 1e-8) {
                    continue;
                }
                let cert = is_good_point(&body, &x0.to_array(), eps, r).unwrap();
                prop_assert!(cert.verified_cone, "{cert:?}");

                let big_r = g.rolling_radius();
                let s = 0.9 * r;
                let (dev, margin) = normal_variation(&body, &x0.to_array(), s, big_r).unwrap();
                prop_assert!(dev <= (2.0 * normal_variation_constant()).sqrt() * s / big_r + 1e-12);
                prop_assert!(margin >= -1e-12);

                let graph = local_graph(&body, &x0.to_array(), r).unwrap();
                let a = a_star(eps);
                prop_assert!(graph.is_graph && graph.is_convex);
                prop_assert!(graph.max_slope <= (1.0 - a * a).sqrt() / a + 1e-9);
                prop_assert!(graph.cone_ratio < eps / (1.0 - eps * eps).sqrt() + 1e-12);
            }
        }
    }

    #[test]
    fn distance_inequalities_in_sawtooth_cones(seed in any::<u64>(), eps in 0.02f64..0.5) {
        let p = random_convex_polygon(&mut stream_rng(seed, 0), 10);
        let body = ConvexBody::Polygon(p.clone());
        let r = eps * p.inradius();
        let g = good_boundary_set(&body, eps, r).unwrap();
        let mut rng = stream_rng(seed, 3);
        for seg in g.segments().into_iter().filter(|s| s.length() > 0.0) {
            let x0 = point_on_segment(&mut rng, seg.start, seg.end);
            let nu = p.planes()[seg.edge].normal;
            let tangent = p.edge_tangent(seg.edge);
            for _ in 0..25 {
                // x in the open cone of half-angle asin(ε) about -ν, radius r/2
                let angle = (2.0 * unit_f64(&mut rng) - 1.0) * eps.asin() * 0.999;
                let len = 0.5 * r * unit_f64(&mut rng).max(1e-6);
                let x = x0 + (nu * (-angle.cos()) + tangent * angle.sin()) * len;
                // y on ∂Ω ∩ B_r(x0)
                let e = (unit_f64(&mut rng) * p.len() as f64) as usize % p.len();
                let (a, b) = p.edge(e);
                let y = point_on_segment(&mut rng, a, b);
                if (y - x0).norm() >= r {
                    continue;
                }
                let res = good_set_distance_inequalities(
                    &x0.to_array(), eps, &x.to_array(), &y.to_array(), p.distance_to_complement(x),
                );
                prop_assert!(res.max() <= 1e-12, "{res:?}");
            }
        }
    }
}

#[test]
fn normal_variation_constant_is_the_small_beta_limit() {
    let beta: f64 = 1e-4;
    let series = 1.0 - (1.5 + 2f64.sqrt()) * beta * beta;
    assert!((a_star(beta) - series).abs() < 1e-12);
    let x0 = Vec2::new(0.5, 0.0);
    let sq = ConvexBody::cuboid(vec![1.0, 1.0]).unwrap();
    let (dev, _) = normal_variation(&sq, &x0.to_array(), 0.3, 0.4).unwrap();
    assert_eq!(dev, 0.0);
}
