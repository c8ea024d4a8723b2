use std::f64::consts::PI;

use heatlab_core::spectra::{fit_power_law, kroger_check, large_time_rhs, trace_remainder, RemainderRecord};
use heatlab_core::ConvexBody;
use rayon::prelude::*;

use super::{box_lengths, boxed, unit_box};
use crate::error::{HarnessError, HarnessResult};
use crate::harness::{Assertion, SuiteInfo, SuiteInput, SuiteReport};

fn lengths_of(body: &ConvexBody) -> HarnessResult<Vec<f64>> {
    box_lengths(body).ok_or_else(|| HarnessError::config("bodies", "heat traces are computed for boxes only"))
}

fn dyadic(k0: i32, n: usize) -> Vec<f64> {
    (0..n as i32).map(|j| 2f64.powi(-(k0 + j))).collect()
}

fn remainders(body: &ConvexBody, ts: &[f64], eps: f64) -> HarnessResult<Vec<RemainderRecord>> {
    ts.par_iter()
        .map(|&t| trace_remainder(body, t, eps).map_err(HarnessError::from))
        .collect()
}

/// Two-term remainder predicted by Poisson summation with the exponentially
/// small image terms dropped: `Π(L_i+u) - ΠL_i - u Σ_i Π_{j≠i} L_j`, `u = √(πt)`.
pub(crate) fn poisson_remainder(lengths: &[f64], t: f64) -> f64 {
    let u = (PI * t).sqrt();
    let full: f64 = lengths.iter().map(|l| l + u).product();
    let vol: f64 = lengths.iter().product();
    let faces: f64 = (0..lengths.len())
        .map(|i| lengths.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| l).product::<f64>())
        .sum();
    full - vol - u * faces
}

pub(super) const REMAINDER_ORACLE: SuiteInfo = SuiteInfo {
    name: "remainder_oracle",
    summary: "Box heat-trace remainder against the closed-form polynomial in sqrt(pi t)",
    statement: "For a box with side lengths L_i the remainder R(t) = (4 pi t)^{d/2} Tr e^{t Delta} \
                - |Omega| - (sqrt(pi t)/2) H^{d-1}(boundary) equals prod(L_i + u) - prod L_i \
                - u sum_i prod_{j != i} L_j with u = sqrt(pi t), up to terms of order \
                exp(-min L_i^2 / t). For the unit square this is pi t, for the unit cube \
                3 pi t + (pi t)^{3/2}. Times with t > min L_i^2 / 50 are refused.",
    params: &[
        ("square_times", "times for the first body, default [0.02, 0.01, 0.005, 0.001]"),
        ("cube_times", "times for later bodies, default [0.005, 0.002, 0.001, 0.0005]"),
    ],
    tolerances: &[
        ("planar", 1e-12, "|R - oracle| for two-dimensional boxes"),
        ("spatial", 1e-10, "|R - oracle| for higher-dimensional boxes"),
        ("kroger", 1e-12, "margin must be >= -kroger"),
    ],
    assertions: &["planar_oracle", "spatial_oracle", "kroger_margin"],
    run: remainder_oracle,
};

fn remainder_oracle(input: &SuiteInput) -> HarnessResult<SuiteReport> {
    let p = input.params()?;
    let sq = p.f64_list("square_times", &[0.02, 0.01, 0.005, 0.001])?;
    let cu = p.f64_list("cube_times", &[0.005, 0.002, 0.001, 0.0005])?;
    let bodies = input.bodies_or(|| vec![unit_box(2), unit_box(3)]);
    let mut report = SuiteReport::new(
        REMAINDER_ORACLE.name,
        input.seed,
        &["body", "dim", "t", "trace", "tail", "R", "oracle", "abs_diff", "kroger_margin"],
    );
    let (mut planar, mut spatial, mut margin) = (0.0f64, 0.0f64, f64::INFINITY);
    for (bi, body) in bodies.iter().enumerate() {
        let ls = lengths_of(body)?;
        let ts = if bi == 0 { &sq } else { &cu };
        let lmin = ls.iter().cloned().fold(f64::INFINITY, f64::min);
        if let Some(t) = ts.iter().find(|t| !(**t > 0.0 && **t <= lmin * lmin / 50.0)) {
            let key = if bi == 0 { "square_times" } else { "cube_times" };
            return Err(HarnessError::config(key, format!("t = {t} is outside (0, min L^2/50]")));
        }
        for rec in remainders(body, ts, 0.25)? {
            let oracle = poisson_remainder(&ls, rec.t);
            let diff = (rec.remainder - oracle).abs();
            let k = kroger_check(body, rec.t)?.margin;
            margin = margin.min(k);
            if ls.len() <= 2 {
                planar = planar.max(diff);
            } else {
                spatial = spatial.max(diff);
            }
            report.row(vec![bi as f64, ls.len() as f64, rec.t, rec.trace, rec.tail_bound, rec.remainder, oracle, diff, k]);
        }
    }
    report.check(Assertion::at_most("planar_oracle", planar, 0.0, input.tol("planar")));
    report.check(Assertion::at_most("spatial_oracle", spatial, 0.0, input.tol("spatial")));
    report.check(Assertion::at_least("kroger_margin", margin, 0.0, input.tol("kroger")));
    report.fit("max_planar_diff", planar);
    report.fit("max_spatial_diff", spatial);
    Ok(report)
}

pub(super) const REMAINDER_SCALING: SuiteInfo = SuiteInfo {
    name: "remainder_scaling",
    summary: "The remainder is o(sqrt t): log-log slope of |R(t)| for a box",
    statement: "The normalised remainder |R(t)| / (H^{d-1}(boundary) sqrt t) tends to 0 as t \
                tends to 0. On the dyadic grid t = 2^-k, k = 7..20, the sequence must be \
                strictly decreasing, and a least-squares fit of log |R| against log t over \
                [2^-14, 2^-7] must give slope 1 for the unit square, where R = pi t.",
    params: &[
        ("k_range", "dyadic exponents [k_min, k_max] of the sweep, default [7, 20]"),
        ("fit_range", "dyadic exponents [k_min, k_max] of the fit window, default [7, 14]"),
        ("expected_slope", "default 1"),
    ],
    tolerances: &[
        ("slope", 0.01, "|slope - expected_slope|"),
        ("kroger", 1e-12, "margin must be >= -kroger"),
    ],
    assertions: &["normalised_remainder_decreasing", "slope", "kroger_margin"],
    run: remainder_scaling,
};

fn k_pair(list: Vec<f64>, key: &str) -> HarnessResult<(i32, i32)> {
    match list.as_slice() {
        [a, b] if a.fract() == 0.0 && b.fract() == 0.0 && a < b => Ok((*a as i32, *b as i32)),
        _ => Err(HarnessError::config(key, "expected two increasing integers")),
    }
}

fn remainder_scaling(input: &SuiteInput) -> HarnessResult<SuiteReport> {
    let p = input.params()?;
    let (k0, k1) = k_pair(p.f64_list("k_range", &[7.0, 20.0])?, "k_range")?;
    let (f0, f1) = k_pair(p.f64_list("fit_range", &[7.0, 14.0])?, "fit_range")?;
    let expected = p.f64("expected_slope", 1.0)?;
    let bodies = input.bodies_or(|| vec![unit_box(2)]);
    let ts = input.grid_or(|| dyadic(k0, (k1 - k0 + 1) as usize));
    let mut report = SuiteReport::new(
        REMAINDER_SCALING.name,
        input.seed,
        &["body", "t", "trace", "tail", "R", "normalised", "kroger_margin"],
    );
    let mut not_decreasing = 0;
    let mut worst_slope = 0.0f64;
    let mut margin = f64::INFINITY;
    for (bi, body) in bodies.iter().enumerate() {
        lengths_of(body)?;
        let h = body.surface();
        let recs = remainders(body, &ts, 0.25)?;
        let mut norm = Vec::new();
        let mut pairs = Vec::new();
        for rec in &recs {
            let n = rec.remainder.abs() / (h * rec.t.sqrt());
            let k = kroger_check(body, rec.t)?.margin;
            margin = margin.min(k);
            norm.push(n);
            let kk = -rec.t.log2();
            if kk >= f0 as f64 - 1e-9 && kk <= f1 as f64 + 1e-9 {
                pairs.push((rec.t, rec.remainder.abs()));
            }
            report.row(vec![bi as f64, rec.t, rec.trace, rec.tail_bound, rec.remainder, n, k]);
        }
        // times are ordered coarse to fine
        not_decreasing += norm.windows(2).filter(|w| !(w[1] < w[0])).count();
        let fit = fit_power_law(&pairs)?;
        report.fit(&format!("slope_body{bi}"), fit.slope);
        report.fit(&format!("intercept_body{bi}"), fit.intercept);
        worst_slope = worst_slope.max((fit.slope - expected).abs());
    }
    report.check(Assertion::count_zero("normalised_remainder_decreasing", not_decreasing));
    report.check(Assertion::at_most("slope", worst_slope, 0.0, input.tol("slope")));
    report.check(Assertion::at_least("kroger_margin", margin, 0.0, input.tol("kroger")));
    report.plot("remainder", "|R(t)|", "t", &["R", "normalised"], Some("body"));
    Ok(report)
}

pub(super) const REMAINDER_SMALL_TIME: SuiteInfo = SuiteInfo {
    name: "remainder_small_time",
    summary: "Small-time remainder bound |R(t)| <= C H sqrt t [(sqrt t/r_in)^{1/2-eps} + (sqrt t/r_in)^{d-1}]",
    statement: "For a convex body and eps in (0, 1/2) there is C(d, eps) with |R(t)| <= C H \
                sqrt t [(sqrt t / r_in)^{1/2 - eps} + (sqrt t / r_in)^{d-1}]. With the constant \
                unknown, the ratio of |R| to the bracket is computed on 14 dyadic times with \
                sqrt t <= r_in / 4 and must not increase (up to the slack) as t decreases; the \
                ratio at the coarsest time is the fitted constant. The half-power comparator \
                H sqrt t (sqrt t/r_in)^{1/2} ln(r_in^2/t)^{1/2} and the large-time comparator \
                are reported without assertion.",
    params: &[
        ("epsilon", "exponent loss, default 0.25"),
        ("points", "number of dyadic times, default 14"),
    ],
    tolerances: &[
        ("slack", 0.05, "relative increase allowed between consecutive ratios"),
        ("kroger", 1e-12, "margin must be >= -kroger"),
    ],
    assertions: &["ratio_nonincreasing", "kroger_margin"],
    run: remainder_small_time,
};

fn remainder_small_time(input: &SuiteInput) -> HarnessResult<SuiteReport> {
    let p = input.params()?;
    let eps = p.f64("epsilon", 0.25)?;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(HarnessError::config("epsilon", "must lie in (0, 1/2)"));
    }
    let n = p.usize("points", 14)?;
    let bodies = input.bodies_or(|| {
        vec![boxed(&[1.0, 1.0]), boxed(&[2.0, 1.0]), boxed(&[1.0, 1.0, 1.0]), boxed(&[3.0, 1.0, 1.0])]
    });
    let mut report = SuiteReport::new(
        REMAINDER_SMALL_TIME.name,
        input.seed,
        &["body", "t", "trace", "tail", "R", "rhs", "ratio", "ratio_half", "ratio_log", "kroger_margin"],
    );
    let mut violations = 0;
    let mut margin = f64::INFINITY;
    for (bi, body) in bodies.iter().enumerate() {
        lengths_of(body)?;
        let r_in = body.inradius();
        let ts = match &input.t_grid {
            Some(g) => {
                if let Some(t) = g.iter().find(|t| t.sqrt() > r_in / 4.0 * (1.0 + 1e-12)) {
                    return Err(HarnessError::config("t_grid", format!("t = {t} violates sqrt t <= r_in/4")));
                }
                g.clone()
            }
            None => dyadic((16.0 / (r_in * r_in)).log2().ceil() as i32, n),
        };
        let recs = remainders(body, &ts, eps)?;
        let mut ratios = Vec::new();
        for rec in &recs {
            let k = kroger_check(body, rec.t)?.margin;
            margin = margin.min(k);
            ratios.push(rec.ratio_small_time);
            report.row(vec![
                bi as f64,
                rec.t,
                rec.trace,
                rec.tail_bound,
                rec.remainder,
                rec.rhs_small_time,
                rec.ratio_small_time,
                rec.ratio_large_time,
                rec.ratio_log_corrected.unwrap_or(f64::NAN),
                k,
            ]);
        }
        violations += ratios.windows(2).filter(|w| w[1] > w[0] * (1.0 + input.tol("slack"))).count();
        report.fit(&format!("constant_body{bi}"), ratios[0]);
        let logs: Vec<f64> = recs.iter().filter_map(|r| r.ratio_log_corrected).collect();
        let half = recs.last().map(|r| r.ratio_small_time).unwrap_or(f64::NAN);
        report.note(format!(
            "body {bi}: finest ratio {half:.3e}; log-corrected ratio range [{:.3e}, {:.3e}]",
            logs.iter().cloned().fold(f64::INFINITY, f64::min),
            logs.iter().cloned().fold(0.0, f64::max)
        ));
    }
    report.check(Assertion::count_zero("ratio_nonincreasing", violations));
    report.check(Assertion::at_least("kroger_margin", margin, 0.0, input.tol("kroger")));
    report.plot("remainder", "|R(t)| and comparator", "t", &["R", "rhs"], Some("body"));
    report.plot("ratio", "|R(t)| / comparator", "t", &["ratio", "ratio_log"], Some("body"));
    Ok(report)
}

pub(super) const REMAINDER_LARGE_TIME: SuiteInfo = SuiteInfo {
    name: "remainder_large_time",
    summary: "Large-time remainder bound |R(t)| <= C H sqrt t (sqrt t/r_in)^{d-1} for sqrt t >= r_in",
    statement: "For sqrt t >= r_in the remainder satisfies |R(t)| <= C H sqrt t (sqrt t / \
                r_in)^{d-1}, a comparator that is sharp as t grows since (4 pi t)^{d/2} Tr \
                tends to (4 pi t)^{d/2}. On a log grid sqrt t in [r_in, 100 r_in] the ratio \
                must stay below twice the larger of its value at sqrt t = r_in and its limit \
                (4 pi)^{d/2} r_in^{d-1} / H.",
    params: &[
        ("points", "grid size, default 14"),
        ("span", "largest sqrt t / r_in, default 100"),
    ],
    tolerances: &[
        ("factor", 2.0, "allowed multiple of the reference ratio"),
        ("kroger", 1e-12, "margin must be >= -kroger"),
    ],
    assertions: &["ratio_bounded", "kroger_margin"],
    run: remainder_large_time,
};

fn remainder_large_time(input: &SuiteInput) -> HarnessResult<SuiteReport> {
    let p = input.params()?;
    let n = p.usize("points", 14)?;
    let span = p.f64("span", 100.0)?;
    if !(span > 1.0) || n < 2 {
        return Err(HarnessError::config("span", "need span > 1 and at least two points"));
    }
    let bodies = input.bodies_or(|| {
        vec![boxed(&[1.0, 1.0]), boxed(&[2.0, 1.0]), boxed(&[1.0, 1.0, 1.0]), boxed(&[3.0, 1.0, 1.0])]
    });
    let mut report = SuiteReport::new(
        REMAINDER_LARGE_TIME.name,
        input.seed,
        &["body", "t", "sqrt_t_over_rin", "trace", "tail", "R", "rhs", "ratio", "kroger_margin"],
    );
    let mut worst = 0.0f64;
    let mut margin = f64::INFINITY;
    for (bi, body) in bodies.iter().enumerate() {
        lengths_of(body)?;
        let r_in = body.inradius();
        let d = body.dim();
        let ts: Vec<f64> = (0..n)
            .rev()
            .map(|j| {
                let q = span.powf(j as f64 / (n - 1) as f64);
                (q * r_in).powi(2)
            })
            .collect();
        let recs = remainders(body, &ts, 0.25)?;
        let limit = (4.0 * PI).powf(0.5 * d as f64) * r_in.powi(d as i32 - 1) / body.surface();
        let at_rin = recs.last().unwrap().remainder.abs() / large_time_rhs(body, r_in * r_in)?;
        let reference = at_rin.max(limit);
        let mut sup = 0.0f64;
        for rec in &recs {
            let k = kroger_check(body, rec.t)?.margin;
            margin = margin.min(k);
            sup = sup.max(rec.ratio_large_time);
            report.row(vec![
                bi as f64,
                rec.t,
                rec.t.sqrt() / r_in,
                rec.trace,
                rec.tail_bound,
                rec.remainder,
                rec.rhs_large_time,
                rec.ratio_large_time,
                k,
            ]);
        }
        worst = worst.max(sup / reference);
        report.fit(&format!("constant_body{bi}"), sup);
    }
    report.check(
        Assertion::at_most("ratio_bounded", worst, input.tol("factor"), 0.0)
            .with_detail("sup ratio over the reference max(ratio at r_in, large-time limit)"),
    );
    report.check(Assertion::at_least("kroger_margin", margin, 0.0, input.tol("kroger")));
    report.plot("ratio", "|R(t)| / large-time comparator", "t", &["ratio"], Some("body"));
    Ok(report)
}

pub(super) const KROGER: SuiteInfo = SuiteInfo {
    name: "kroger",
    summary: "Lower Weyl bound (4 pi t)^{d/2} Tr e^{t Delta} >= |Omega| on boxes",
    statement: "For the Neumann Laplacian on a convex domain (4 pi t)^{d/2} Tr e^{t Delta} >= \
                |Omega| for every t > 0. Checked on a log grid of t from 1e-6 to 1e2.",
    params: &[("points", "grid size, default 40")],
    tolerances: &[("kroger", 1e-12, "margin must be >= -kroger")],
    assertions: &["kroger_margin"],
    run: kroger,
};

fn kroger(input: &SuiteInput) -> HarnessResult<SuiteReport> {
    let p = input.params()?;
    let n = p.usize("points", 40)?.max(2);
    let bodies = input.bodies_or(|| {
        vec![boxed(&[1.0, 1.0]), boxed(&[2.0, 1.0]), boxed(&[1.0, 1.0, 1.0]), boxed(&[3.0, 1.0, 1.0])]
    });
    let ts = input.grid_or(|| (0..n).map(|j| 10f64.powf(2.0 - 8.0 * j as f64 / (n - 1) as f64)).collect());
    let mut report = SuiteReport::new(KROGER.name, input.seed, &["body", "t", "margin", "relative_margin"]);
    let mut margin = f64::INFINITY;
    for (bi, body) in bodies.iter().enumerate() {
        lengths_of(body)?;
        let rows: Vec<HarnessResult<f64>> = ts.par_iter().map(|&t| Ok(kroger_check(body, t)?.margin)).collect();
        for (t, m) in ts.iter().zip(rows) {
            let m = m?;
            margin = margin.min(m);
            report.row(vec![bi as f64, *t, m, m / body.volume()]);
        }
    }
    report.check(Assertion::at_least("kroger_margin", margin, 0.0, input.tol("kroger")));
    report.plot("margin", "Weyl margin", "t", &["margin"], Some("body"));
    Ok(report)
}
