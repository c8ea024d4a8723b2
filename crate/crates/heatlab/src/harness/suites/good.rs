use heatlab_core::geometry::random::random_convex_polygon;
use heatlab_core::good_sets::{
    a_star, a_star_residual, good_boundary_set, good_set_distance_inequalities, is_good_point, nu_bar_p, GoodSet,
};
use heatlab_core::montecarlo::{stream_rng, unit_f64};
use heatlab_core::{ConvexBody, Vec2};
use rayon::prelude::*;

use super::{box_lengths, boxed, unit_box};
use crate::error::{HarnessError, HarnessResult};
use crate::harness::{Assertion, SuiteInfo, SuiteInput, SuiteReport};

pub(super) const GOOD_SETS: SuiteInfo = SuiteInfo {
    name: "good_sets",
    summary: "Rolling-ball good boundary sets, their sawtooth regions and the bad part of boundary strips",
    statement: "For eps in (0, 1/2] and 0 < r <= eps r_in, the set G of boundary points touched \
                by an inscribed ball of radius R = r/eps consists of (eps, r)-good points, and \
                the strip {d < s}, s <= r/2, outside the sawtooth region over G has volume at \
                most C (r/(eps r_in)) |{d < s}|. Checked here: the measure of G on rectangles \
                against 2(a - 2R) + 2(b - 2R); the Monte Carlo bad volume against the planar \
                value 8Rs - 4s^2; one fitted C over rectangles and random polygons; the \
                threshold a*(beta) against bisection; the distance inequalities for points in \
                sawtooth cones; the normal oscillation on a square; and the bias of the \
                foot-point membership witness against a brute-force search over G.",
    params: &[
        ("epsilon", "default 0.25"),
        ("r", "cone radius on the rectangles, default 0.1"),
        ("s", "strip width on the rectangles, default 0.05"),
        ("polygons", "number of random polygons, default 20"),
        ("polygon_samples", "Monte Carlo samples per random polygon, default 200000"),
        ("r_fraction", "r / (eps r_in) on random polygons, default 0.8"),
        ("configurations", "distance-inequality configurations, default 10000"),
        ("witness_samples", "strip points for the witness comparison, default 20000"),
    ],
    tolerances: &[
        ("measure", 1e-12, "|H(G) - closed form| on rectangles"),
        ("sigmas", 4.0, "Monte Carlo standard errors allowed"),
        ("a_star", 1e-10, "|a* - bisection root|"),
        ("distance", 1e-12, "largest distance-inequality residual"),
        ("oscillation", 1e-12, "|normal oscillation - exact value|"),
    ],
    assertions: &[
        "rectangle_measure",
        "rectangle_bad_volume",
        "bad_volume_constant",
        "a_star_at_one",
        "a_star_bisection",
        "distance_inequalities",
        "good_points_certified",
        "normal_oscillation",
        "witness_one_sided",
    ],
    run: good_sets,
};

/// Closed form of `H¹(G)` for a rectangle.
fn rectangle_measure(lengths: &[f64], big_r: f64) -> f64 {
    lengths.iter().map(|l| 2.0 * (l - 2.0 * big_r).max(0.0)).sum()
}

fn bisection_root(beta: f64) -> f64 {
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

/// Membership in the union of cones over a dense sample of `G`, together
/// with the orthogonal projection onto each good segment.
fn brute_force_member(g: &GoodSet, poly: &heatlab_core::geometry::Polygon, x: Vec2, per_segment: usize) -> bool {
    let eps = g.epsilon();
    let half_r = 0.5 * g.r();
    let c = (1.0 - eps * eps).sqrt();
    let inside = |x0: Vec2, nu: Vec2| {
        let v = x - x0;
        let n = v.norm();
        n > 0.0 && n < half_r && v.dot(nu) < -c * n
    };
    g.segments().iter().any(|seg| {
        let nu = poly.planes()[seg.edge].normal;
        let d = seg.end - seg.start;
        let proj = if d.norm_sq() > 0.0 {
            seg.start + d * ((x - seg.start).dot(d) / d.norm_sq()).clamp(0.0, 1.0)
        } else {
            seg.start
        };
        inside(proj, nu) || (0..=per_segment).any(|k| inside(seg.start + d * (k as f64 / per_segment as f64), nu))
    })
}

struct BodyCase {
    body: ConvexBody,
    r: f64,
    s: f64,
    samples: u64,
    rectangle: Option<Vec<f64>>,
}

fn good_sets(input: &SuiteInput) -> HarnessResult<SuiteReport> {
    let p = input.params()?;
    let eps = p.f64("epsilon", 0.25)?;
    let r = p.f64("r", 0.1)?;
    let s = p.f64("s", 0.05)?;
    let n_poly = p.usize("polygons", 20)?;
    let poly_samples = p.usize("polygon_samples", 200_000)? as u64;
    let frac = p.f64("r_fraction", 0.8)?;
    let n_conf = p.usize("configurations", 10_000)?;
    let n_witness = p.usize("witness_samples", 20_000)?;
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(HarnessError::config("epsilon", "must lie in (0, 1/2]"));
    }
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(HarnessError::config("r_fraction", "must lie in (0, 1]"));
    }
    if !(s > 0.0 && s <= 0.5 * r) {
        return Err(HarnessError::config("s", "need 0 < s <= r/2"));
    }
    let seed = input.seed;
    let n_rect = input.samples_or(1_000_000);

    let mut cases = Vec::new();
    for body in input.bodies_or(|| vec![unit_box(2), boxed(&[2.0, 1.0])]) {
        if body.as_polygon().is_none() {
            return Err(HarnessError::config("bodies", "good sets are computed for planar bodies"));
        }
        if r > eps * body.inradius() * (1.0 + 1e-12) {
            return Err(HarnessError::config(
                "r",
                format!("r = {r} exceeds epsilon * r_in = {}", eps * body.inradius()),
            ));
        }
        let rectangle = box_lengths(&body);
        cases.push(BodyCase { body, r, s, samples: n_rect, rectangle });
    }
    for k in 0..n_poly as u64 {
        let poly = random_convex_polygon(&mut stream_rng(seed, 5000 + k), 6 + (k as usize) % 10);
        let rr = frac * eps * poly.inradius();
        cases.push(BodyCase {
            body: ConvexBody::Polygon(poly),
            r: rr,
            s: 0.5 * rr,
            samples: poly_samples,
            rectangle: None,
        });
    }

    let mut report = SuiteReport::new(
        GOOD_SETS.name,
        seed,
        &[
            "body", "vertices", "inradius", "r", "R", "measure", "measure_oracle", "s", "strip", "bad", "bad_std_error",
            "bad_oracle", "ratio", "constant",
        ],
    );
    let rows: Vec<HarnessResult<(Vec<f64>, f64, f64)>> = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let g = good_boundary_set(&c.body, eps, c.r)?;
            let est = g.bad_set_volume(c.s, c.samples, seed.wrapping_add(i as u64))?;
            let rin = c.body.inradius();
            let oracle = c.rectangle.as_ref().map(|_| 8.0 * g.rolling_radius() * c.s - 4.0 * c.s * c.s);
            let m_oracle = c.rectangle.as_ref().map(|l| rectangle_measure(l, g.rolling_radius()));
            let scale = c.r / (eps * rin);
            let constant = est.ratio() / scale;
            // margin against the elementary bound C <= 1/(1 - s/r_in), in standard errors
            let cap = scale / (1.0 - c.s / rin) * est.strip_volume;
            let z_cap = (est.estimate - cap) / est.std_error.max(f64::MIN_POSITIVE);
            let z_oracle = oracle.map_or(f64::NEG_INFINITY, |o| (est.estimate - o).abs() / est.std_error.max(f64::MIN_POSITIVE));
            let nv = c.body.as_polygon().map_or(0, |q| q.len()) as f64;
            Ok((
                vec![
                    i as f64,
                    nv,
                    rin,
                    c.r,
                    g.rolling_radius(),
                    g.measure(),
                    m_oracle.unwrap_or(f64::NAN),
                    c.s,
                    est.strip_volume,
                    est.estimate,
                    est.std_error,
                    oracle.unwrap_or(f64::NAN),
                    est.ratio(),
                    constant,
                ],
                z_cap,
                z_oracle,
            ))
        })
        .collect();
    let (mut z_cap, mut z_oracle, mut measure_err) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for row in rows {
        let (row, zc, zo) = row?;
        if !row[6].is_nan() {
            measure_err = measure_err.max((row[5] - row[6]).abs());
        }
        z_cap = z_cap.max(zc);
        z_oracle = z_oracle.max(zo);
        report.row(row);
    }
    let sigmas = input.tol("sigmas");
    report.check(Assertion::at_most("rectangle_measure", measure_err, 0.0, input.tol("measure")));
    report.check(
        Assertion::at_most("rectangle_bad_volume", z_oracle, sigmas, 0.0)
            .with_detail("largest |estimate - 8Rs + 4s^2| / std_error"),
    );
    report.check(
        Assertion::at_most("bad_volume_constant", z_cap, sigmas, 0.0)
            .with_detail("largest (estimate - cap) / std_error with cap from C = 1/(1 - s/r_in)"),
    );
    let c_global = report.column("constant").unwrap().into_iter().fold(0.0, f64::max);
    report.fit("bad_volume_constant", c_global);

    // threshold a*(beta)
    report.check(Assertion::at_most("a_star_at_one", a_star(1.0).abs(), 0.0, 0.0));
    let a_err = (1..=100)
        .map(|k| {
            let beta = k as f64 / 101.0;
            (a_star(beta) - bisection_root(beta)).abs()
        })
        .fold(0.0, f64::max);
    report.check(Assertion::at_most("a_star_bisection", a_err, 0.0, input.tol("a_star")));

    // distance inequalities and certificates on random polygons
    let polys: Vec<&BodyCase> = cases.iter().filter(|c| c.rectangle.is_none()).collect();
    let (worst, configs, uncertified, certified) = if polys.is_empty() {
        (f64::NEG_INFINITY, 0, 0, 0)
    } else {
        let per = n_conf.div_ceil(polys.len());
        let parts: Vec<HarnessResult<(f64, usize, usize, usize)>> = polys
            .par_iter()
            .enumerate()
            .map(|(k, c)| {
                let mut rng = stream_rng(seed, 7000 + k as u64);
                distance_sweep(c, eps, per, move || unit_f64(&mut rng))
            })
            .collect();
        let mut acc = (f64::NEG_INFINITY, 0, 0, 0);
        for part in parts {
            let (w, n, u, ok) = part?;
            acc = (acc.0.max(w), acc.1 + n, acc.2 + u, acc.3 + ok);
        }
        acc
    };
    report.check(
        Assertion::at_most("distance_inequalities", worst, 0.0, input.tol("distance"))
            .with_detail(format!("{configs} configurations")),
    );
    report.check(
        Assertion::count_zero("good_points_certified", uncertified)
            .with_detail(format!("{certified} sampled points of G checked")),
    );

    // normal oscillation on the unit square
    let square = unit_box(2);
    let flat = nu_bar_p(&square, &[0.5, 0.0], 0.4, 1.0, 6)?.value;
    let corner = nu_bar_p(&square, &[0.5, 0.0], 0.6, 1.0, 6)?.value;
    let h = (0.6f64 * 0.6 - 0.25).sqrt();
    let exact = 2f64.sqrt() * 2.0 * h / (1.0 + 2.0 * h);
    report.check(Assertion::at_most(
        "normal_oscillation",
        flat.abs().max((corner - exact).abs()),
        0.0,
        input.tol("oscillation"),
    ));
    report.fit("normal_oscillation_square", corner);

    // foot-point witness against a brute-force search, on the first body
    let first = &cases[0];
    let g = good_boundary_set(&first.body, eps, first.r)?;
    let poly = first.body.as_polygon().unwrap();
    let (lo, hi) = first.body.bounding_box();
    let mut rng = stream_rng(seed, 9000);
    let (mut foot_only, mut brute_only, mut both, mut in_strip) = (0usize, 0usize, 0usize, 0usize);
    while in_strip < n_witness {
        let x = Vec2::new(
            lo[0] + (hi[0] - lo[0]) * unit_f64(&mut rng),
            lo[1] + (hi[1] - lo[1]) * unit_f64(&mut rng),
        );
        let d = poly.distance_to_complement(x);
        if !(d > 0.0 && d < first.s) {
            continue;
        }
        in_strip += 1;
        let foot = g.sawtooth_contains(&x.to_array()).member;
        let brute = brute_force_member(&g, &poly, x, 400);
        match (foot, brute) {
            (true, true) => both += 1,
            (true, false) => foot_only += 1,
            (false, true) => brute_only += 1,
            _ => {}
        }
    }
    report.check(Assertion::count_zero("witness_one_sided", foot_only));
    let bias = brute_only as f64 / in_strip as f64;
    report.fit("witness_bias_fraction", bias);
    report.note(format!(
        "witness comparison on body 0: {both} points in both, {brute_only} found only by brute force, out of {in_strip} strip points"
    ));
    report.plot("constant", "bad-volume constant per body", "body", &["constant"], None);
    Ok(report)
}

/// Random certified configurations `(x0, x, y)` on one polygon; returns the
/// largest residual, the number of configurations, and the number of
/// sampled good points that failed and passed the exact cone test.
fn distance_sweep(
    c: &BodyCase,
    eps: f64,
    wanted: usize,
    mut unit: impl FnMut() -> f64,
) -> HarnessResult<(f64, usize, usize, usize)> {
    let poly = c.body.as_polygon().unwrap();
    let g = good_boundary_set(&c.body, eps, c.r)?;
    let segs: Vec<_> = g.segments().into_iter().filter(|s| s.length() > 0.0).collect();
    if segs.is_empty() {
        return Ok((f64::NEG_INFINITY, 0, 0, 0));
    }
    let (mut worst, mut done, mut bad, mut ok) = (f64::NEG_INFINITY, 0usize, 0usize, 0usize);
    let mut attempts = 0usize;
    while done < wanted && attempts < 100 * wanted {
        attempts += 1;
        let seg = segs[(unit() * segs.len() as f64) as usize % segs.len()];
        let x0 = seg.start + (seg.end - seg.start) * unit();
        if poly.vertices().iter().any(|v| (*v - x0).norm() < 1e-8) {
            continue;
        }
        if done % 50 == 0 {
            if is_good_point(&c.body, &x0.to_array(), eps, c.r)?.verified_cone {
                ok += 1;
            } else {
                bad += 1;
            }
        }
        let nu = poly.planes()[seg.edge].normal;
        let tangent = poly.edge_tangent(seg.edge);
        let angle = (2.0 * unit() - 1.0) * eps.asin() * 0.999;
        let len = 0.5 * c.r * unit().max(1e-6);
        let x = x0 + (nu * (-angle.cos()) + tangent * angle.sin()) * len;
        let e = (unit() * poly.len() as f64) as usize % poly.len();
        let (a, b) = poly.edge(e);
        let y = a + (b - a) * unit();
        if (y - x0).norm() >= c.r {
            continue;
        }
        let res = good_set_distance_inequalities(&x0.to_array(), eps, &x.to_array(), &y.to_array(), poly.distance_to_complement(x));
        worst = worst.max(res.max());
        done += 1;
    }
    Ok((worst, done, bad, ok))
}
