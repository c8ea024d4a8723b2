//! Heat-kernel diagonal against its free-space and half-space approximations.
//!
//! Everything is phrased through the excess `E = (4πt)^{d/2} k(t,x,x) - 1`,
//! which the core library evaluates without cancellation. Points where the
//! comparators would underflow (`d_Ω(x)²/t` above [`MAX_EXPONENT`]) are
//! refused and counted in the notes.

use std::f64::consts::PI;

use heatlab_core::geometry::Vec2;
use heatlab_core::good_sets::{good_boundary_set, nu_bar_p};
use heatlab_core::kernels::{box_diag_excess, g_norm_estimate, KernelSpec, DEFAULT_TRUNCATION_TOL};
use heatlab_core::montecarlo::{stream_rng, unit_f64};
use rayon::prelude::*;

use super::{box_grid, box_lengths, unit_box, xy};
use crate::error::{HarnessError, HarnessResult};
use crate::harness::{Assertion, SuiteInfo, SuiteInput, SuiteReport};

const MAX_EXPONENT: f64 = 600.0;

fn lengths_of(body: &heatlab_core::ConvexBody) -> HarnessResult<Vec<f64>> {
    box_lengths(body).ok_or_else(|| HarnessError::config("bodies", "kernel diagonals are exact for boxes only"))
}

pub(super) const BULK_DIAGONAL: SuiteInfo = SuiteInfo {
    name: "bulk_diagonal",
    summary: "Interior diagonal: |k(t,x,x) - (4 pi t)^{-d/2}| <= C t^{-d/2} exp(-d(x)^2/((1+delta)t))",
    statement: "For any open convex set, delta > 0 and eta > 0, points with d(x) >= eta sqrt t \
                satisfy |k(t,x,x) - (4 pi t)^{-d/2}| <= C t^{-d/2} exp(-d(x)^2 / ((1+delta) t)). \
                The ratio of the two sides is swept over a tensor grid plus points exactly at \
                d(x) = eta sqrt t; its sup must stay below the bound, and at each fixed x it \
                must not increase as t decreases.",
    params: &[
        ("delta", "default 0.1"),
        ("eta", "default 1"),
        ("points", "grid points per axis, default 41"),
        ("bound", "constant C asserted, default 4"),
    ],
    tolerances: &[("monotone", 1e-9, "relative increase allowed at fixed x")],
    assertions: &["sup_ratio", "ratio_monotone_at_fixed_x"],
    run: bulk_diagonal,
};

fn bulk_diagonal(input: &SuiteInput) -> HarnessResult<SuiteReport> {
    let p = input.params()?;
    let delta = p.f64("delta", 0.1)?;
    let eta = p.f64("eta", 1.0)?;
    let n = p.usize("points", 41)?;
    let bound = p.f64("bound", 4.0)?;
    if !(delta > 0.0) {
        return Err(HarnessError::config("delta", "must be positive"));
    }
    if !(eta > 0.0) {
        return Err(HarnessError::config("eta", "must be positive"));
    }
    let bodies = input.bodies_or(|| vec![unit_box(1), unit_box(2)]);
    let ts = input.grid_or(|| (2..=10).map(|k| 2f64.powi(-k)).collect());
    let mut report = SuiteReport::new(
        BULK_DIAGONAL.name,
        input.seed,
        &["body", "point", "t", "x1", "x2", "dist", "excess", "ratio"],
    );
    let mut refused = 0usize;
    let mut sup = 0.0f64;
    let mut increases = 0usize;
    for (bi, body) in bodies.iter().enumerate() {
        let ls = lengths_of(body)?;
        let d = ls.len();
        let mut pts = box_grid(&ls, n);
        // boundary cases d(x) = eta sqrt t along the first axis, centred otherwise
        for &t in &ts {
            let h = eta * t.sqrt();
            if 2.0 * h <= ls[0] {
                let mut x: Vec<f64> = ls.iter().map(|l| 0.5 * l).collect();
                x[0] = h;
                pts.push(x);
            }
        }
        let results: Vec<HarnessResult<Vec<Option<(f64, f64, f64)>>>> = pts
            .par_iter()
            .map(|x| {
                let dist = body.distance_to_complement(x);
                ts.iter()
                    .map(|&t| {
                        if dist < eta * t.sqrt() * (1.0 - 1e-12) || dist * dist / t > MAX_EXPONENT {
                            return Ok(None);
                        }
                        let e = box_diag_excess(&ls, t, x, DEFAULT_TRUNCATION_TOL)?.value;
                        let ratio = (4.0 * PI).powf(-0.5 * d as f64) * e.abs() * (dist * dist / ((1.0 + delta) * t)).exp();
                        Ok(Some((dist, e, ratio)))
                    })
                    .collect()
            })
            .collect();
        for (pi, (x, res)) in pts.iter().zip(results).enumerate() {
            let (x1, x2) = xy(x);
            let mut last: Option<f64> = None;
            for (&t, r) in ts.iter().zip(res?) {
                match r {
                    Some((dist, e, ratio)) => {
                        sup = sup.max(ratio);
                        if let Some(prev) = last {
                            if ratio > prev * (1.0 + input.tol("monotone")) {
                                increases += 1;
                            }
                        }
                        last = Some(ratio);
                        report.row(vec![bi as f64, pi as f64, t, x1, x2, dist, e, ratio]);
                    }
                    None => refused += 1,
                }
            }
        }
    }
    report.check(Assertion::at_most("sup_ratio", sup, bound, 0.0));
    report.check(Assertion::count_zero("ratio_monotone_at_fixed_x", increases));
    report.fit("sup_ratio", sup);
    report.note(format!("{refused} (x, t) pairs outside d(x) >= eta sqrt t or below underflow were refused"));
    report.plot("ratio", "interior diagonal ratio", "t", &["ratio"], Some("body"));
    Ok(report)
}

pub(super) const BOUNDARY_DIAGONAL: SuiteInfo = SuiteInfo {
    name: "boundary_diagonal",
    summary: "Near good boundary points the diagonal follows the half-space kernel",
    statement: "There is a set of good boundary points whose sawtooth region satisfies, for \
                t <= r^2/2, |(4 pi t)^{d/2} k(t,x,x) - 1 - exp(-d(x)^2/t)| <= C exp(-c d(x)^2/t) \
                (eps + exp(-c r^2/t)). With c = 1/8 and C = 3 the inequality is checked at \
                points along the inward normals of the good set and at random points that \
                pass the sawtooth membership test; candidates that fail it are excluded. The \
                normal oscillation vanishes at every foot point since box faces are flat. The \
                largest c for which C = 3 still works and the smallest C at c = 1/8 are \
                reported.",
    params: &[
        ("epsilon", "flatness, in (0, 1/4], default 0.25"),
        ("r", "cone radius, at most epsilon * r_in, default 0.125"),
        ("c", "exponent constant, default 0.125"),
        ("constant", "C asserted, default 3"),
        ("depths", "points per normal, default 8"),
        ("random_candidates", "seeded candidates near the boundary, default 2000"),
        ("points", "number of dyadic times, default 12"),
    ],
    tolerances: &[("oscillation", 1e-12, "normal oscillation at feet")],
    assertions: &["half_space_bound", "flat_faces", "corner_excluded"],
    run: boundary_diagonal,
};

fn boundary_diagonal(input: &SuiteInput) -> HarnessResult<SuiteReport> {
    let p = input.params()?;
    let eps = p.f64("epsilon", 0.25)?;
    let r = p.f64("r", 0.125)?;
    let c = p.f64("c", 0.125)?;
    let big_c = p.f64("constant", 3.0)?;
    let depths = p.usize("depths", 8)?;
    let n_random = p.usize("random_candidates", 2000)?;
    let n_t = p.usize("points", 12)?;
    if !(eps > 0.0 && eps <= 0.25) {
        return Err(HarnessError::config("epsilon", "must lie in (0, 1/4]"));
    }
    if !(c > 0.0) {
        return Err(HarnessError::config("c", "must be positive"));
    }
    let body = input.bodies_or(|| vec![unit_box(2)]).remove(0);
    let ls = lengths_of(&body)?;
    if !(r > 0.0) || r > eps * body.inradius() * (1.0 + 1e-12) {
        return Err(HarnessError::config(
            "r",
            format!("r = {r} must lie in (0, epsilon * r_in] = (0, {}]", eps * body.inradius()),
        ));
    }
    let ts = match &input.t_grid {
        Some(g) => {
            if let Some(t) = g.iter().find(|t| **t > 0.5 * r * r * (1.0 + 1e-12)) {
                return Err(HarnessError::config("t_grid", format!("t = {t} exceeds r^2/2")));
            }
            g.clone()
        }
        None => {
            let k0 = (2.0 / (r * r)).log2().ceil() as i32;
            (0..n_t as i32).map(|j| 2f64.powi(-(k0 + j))).collect()
        }
    };
    let good = good_boundary_set(&body, eps, r).map_err(|e| HarnessError::config("r", e.to_string()))?;

    // candidate points: along inward normals of good feet, then random ones
    let mut feet: Vec<(Vec2, Vec2)> = Vec::new();
    let poly = body.as_polygon().ok_or_else(|| HarnessError::config("bodies", "need a planar box"))?;
    for seg in good.segments() {
        let normal = poly.planes()[seg.edge].normal;
        let m = if seg.length() > 0.0 { 5 } else { 1 };
        for k in 0..m {
            let s = if m == 1 { 0.5 } else { k as f64 / (m - 1) as f64 };
            feet.push((seg.start + (seg.end - seg.start) * s, normal));
        }
    }
    let mut oscillation = 0.0f64;
    for (foot, _) in &feet {
        let v = nu_bar_p(&body, &foot.to_array(), r, 2.0, 4)?.value;
        oscillation = oscillation.max(v);
    }
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for (foot, normal) in &feet {
        for j in 1..=depths {
            let h = 0.5 * r * j as f64 / (depths + 1) as f64;
            candidates.push((*foot - *normal * h).to_array().to_vec());
        }
    }
    let mut rng = stream_rng(input.seed, 0);
    for _ in 0..n_random {
        let x: Vec<f64> = ls.iter().map(|l| l * unit_f64(&mut rng)).collect();
        candidates.push(x);
    }
    let corner: Vec<f64> = vec![0.25 * r, 0.25 * r];
    let corner_member = good.sawtooth_contains(&corner).member;
    candidates.push(corner);
    let mut members = Vec::new();
    let mut excluded = 0usize;
    for x in candidates {
        if good.sawtooth_contains(&x).member {
            members.push(x);
        } else {
            excluded += 1;
        }
    }

    let mut report = SuiteReport::new(
        BOUNDARY_DIAGONAL.name,
        input.seed,
        &["t", "x1", "x2", "dist", "lhs", "rhs", "ratio"],
    );
    let rows: Vec<HarnessResult<Vec<Vec<f64>>>> = ts
        .par_iter()
        .map(|&t| {
            let mut out = Vec::new();
            for x in &members {
                let dist = body.distance_to_complement(x);
                if dist * dist / t > MAX_EXPONENT {
                    continue;
                }
                let e = box_diag_excess(&ls, t, x, DEFAULT_TRUNCATION_TOL)?.value;
                let lhs = (e - (-dist * dist / t).exp()).abs();
                let rhs = big_c * (-c * dist * dist / t).exp() * (eps + (-c * r * r / t).exp());
                out.push(vec![t, x[0], x[1], dist, lhs, rhs, lhs / rhs]);
            }
            Ok(out)
        })
        .collect();
    for block in rows {
        block?.into_iter().for_each(|r| report.row(r));
    }
    let evaluated = report.rows.len();
    let refused = ts.len() * members.len() - evaluated;
    let sup = report.rows.iter().map(|r| r[6]).fold(0.0, f64::max);
    report.check(Assertion::at_most("half_space_bound", sup, 1.0, 0.0).with_detail(format!(
        "{evaluated} evaluations at {} sawtooth points",
        members.len()
    )));
    report.check(Assertion::at_most("flat_faces", oscillation, 0.0, input.tol("oscillation")));
    report.check(Assertion::count_zero("corner_excluded", corner_member as usize));
    report.fit("constant_at_c", sup * big_c);

    // largest c in [c, 1] for which the asserted constant still holds
    let holds = |cc: f64| {
        report.rows.iter().all(|row| {
            let (t, dist, lhs) = (row[0], row[3], row[4]);
            lhs <= big_c * (-cc * dist * dist / t).exp() * (eps + (-cc * r * r / t).exp())
        })
    };
    let fitted_c = if holds(c) {
        let (mut lo, mut hi) = (c, 1.0);
        if holds(hi) {
            lo = hi;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if holds(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    } else {
        f64::NAN
    };
    report.fit("largest_c", fitted_c);
    report.note(format!(
        "{} good feet, {excluded} candidates outside the sawtooth region, {refused} evaluations refused below underflow",
        feet.len()
    ));
    report.plot("ratio", "half-space comparison ratio", "t", &["ratio"], None);
    Ok(report)
}

pub(super) const BULK_REFINED: SuiteInfo = SuiteInfo {
    name: "bulk_refined",
    summary: "Interior diagonal against the G-norm: |E| <~ (1 + log+(sqrt t/R))^kappa ||k||_G exp(-R^2/((1+delta')t))",
    statement: "For 0 < R <= d(x) and delta' > delta > 0, |(4 pi t)^{d/2} k(t,x,x) - 1| is \
                bounded by a constant times (1 + log+(sqrt t / R))^kappa ||k||_G exp(-R^2 / \
                ((1+delta') t)), with kappa = 0 for d >= 3 and a logarithm possibly needed in \
                the plane. The G-norm is estimated over s in [t/1000, t] with weight \
                exp(|x-y|^2/(4(1+delta)s)). Ratios are reported for kappa = 0 and kappa = 1; \
                they must be finite and the ratio at t/2 must be at most 1.5 times the ratio at t.",
    params: &[
        ("x", "evaluation point, default the centre"),
        ("radii", "R grid, default [0.5, 0.25, 0.1]"),
        ("delta", "default 0.1"),
        ("delta_prime", "default 0.2"),
        ("refinements", "G-norm grid doublings, default 4"),
    ],
    tolerances: &[("stability", 1.5, "allowed growth factor per halving of t")],
    assertions: &["finite_ratios", "stability"],
    run: bulk_refined,
};

fn bulk_refined(input: &SuiteInput) -> HarnessResult<SuiteReport> {
    let p = input.params()?;
    let body = input.bodies_or(|| vec![unit_box(2)]).remove(0);
    let ls = lengths_of(&body)?;
    let d = ls.len();
    let centre: Vec<f64> = ls.iter().map(|l| 0.5 * l).collect();
    let x = p.f64_list("x", &centre)?;
    if x.len() != d || !body.contains(&x) {
        return Err(HarnessError::config("x", "must be an interior point of the body"));
    }
    let radii = p.f64_list("radii", &[0.5, 0.25, 0.1])?;
    let delta = p.f64("delta", 0.1)?;
    let delta_p = p.f64("delta_prime", 0.2)?;
    let refinements = p.usize("refinements", 4)? as u32;
    if !(delta > 0.0) {
        return Err(HarnessError::config("delta", "must be positive"));
    }
    if !(delta_p > delta) {
        return Err(HarnessError::config("delta_prime", "must exceed delta"));
    }
    let dist = body.distance_to_complement(&x);
    if let Some(rr) = radii.iter().find(|rr| !(**rr > 0.0 && **rr <= dist * (1.0 + 1e-12))) {
        return Err(HarnessError::config("radii", format!("R = {rr} must lie in (0, d(x)] = (0, {dist}]")));
    }
    let ts = input.grid_or(|| (3..=10).map(|k| 2f64.powi(-k)).collect());
    let spec = KernelSpec::boxed(ls.clone())?;
    let per_t: Vec<HarnessResult<(f64, f64, f64)>> = ts
        .par_iter()
        .map(|&t| {
            let e = box_diag_excess(&ls, t, &x, DEFAULT_TRUNCATION_TOL)?.value;
            let g = g_norm_estimate(&spec, delta, &x, 1e-3 * t, t, refinements)?;
            Ok((e, g.value, g.last_change))
        })
        .collect();
    let mut report = SuiteReport::new(
        BULK_REFINED.name,
        input.seed,
        &["R", "t", "excess", "gnorm", "gnorm_change", "log_factor", "ratio_kappa0", "ratio_kappa1"],
    );
    let per_t: Vec<(f64, f64, f64)> = per_t.into_iter().collect::<HarnessResult<_>>()?;
    let mut nonfinite = 0;
    let mut growth = 0.0f64;
    for &rr in &radii {
        let mut prev: Option<(f64, f64)> = None;
        for (&t, &(e, g, change)) in ts.iter().zip(&per_t) {
            let log_factor = 1.0 + (t.sqrt() / rr).ln().max(0.0);
            let base = g * (-rr * rr / ((1.0 + delta_p) * t)).exp();
            let r0 = e.abs() / base;
            let r1 = r0 / log_factor;
            if !(r0.is_finite() && r1.is_finite()) {
                nonfinite += 1;
            }
            if let Some((p0, p1)) = prev {
                if p0 > 0.0 {
                    growth = growth.max(r0 / p0);
                }
                if p1 > 0.0 {
                    growth = growth.max(r1 / p1);
                }
            }
            prev = Some((r0, r1));
            report.row(vec![rr, t, e, g, change, log_factor, r0, r1]);
        }
    }
    report.check(Assertion::count_zero("finite_ratios", nonfinite));
    report.check(
        Assertion::at_most("stability", growth, input.tol("stability"), 0.0)
            .with_detail("largest ratio(t/2) / ratio(t) over both kappa values"),
    );
    let r0 = report.column("ratio_kappa0").unwrap();
    let r1 = report.column("ratio_kappa1").unwrap();
    report.fit("sup_ratio_kappa0", r0.iter().cloned().fold(0.0, f64::max));
    report.fit("sup_ratio_kappa1", r1.iter().cloned().fold(0.0, f64::max));
    let log_active = report.rows.iter().any(|r| r[5] > 1.0);
    report.note(if log_active {
        "the logarithmic factor is active on part of the grid"
    } else {
        "sqrt t <= R on the whole grid, so both comparators coincide"
    });
    report.plot("ratio", "refined interior ratio", "t", &["ratio_kappa0", "ratio_kappa1"], Some("R"));
    Ok(report)
}
