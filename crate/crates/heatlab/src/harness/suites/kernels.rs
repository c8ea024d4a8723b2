use std::f64::consts::PI;

use heatlab_core::kernels::{
    g_norm_estimate, g_norm_on_grid, interval_kernel_images, interval_kernel_spectral, mass_integral,
    semigroup_residual, KernelSpec, DEFAULT_TRUNCATION_TOL,
};
use heatlab_core::montecarlo::{stream_rng, unit_f64};
use rayon::prelude::*;

use super::{box_grid, box_lengths, linspace, unit_box, xy};
use crate::error::{HarnessError, HarnessResult};
use crate::harness::{Assertion, SuiteInfo, SuiteInput, SuiteReport};

pub(super) const CROSS_METHOD: SuiteInfo = SuiteInfo {
    name: "kernel_cross_method",
    summary: "Interval Neumann kernel: method of images against the cosine expansion",
    statement: "For each interval length L, k(t,x,y) evaluated as a Gaussian image sum and as a \
                cosine eigen-series agree on a points x points x points grid of (t,x,y), with t \
                log-spaced in [1e-3 L^2, 2 L^2] and x, y spanning [0, L] including the ends. \
                Both truncations carry certified tail bounds below 1e-14. Positivity is \
                checked on the form used in each regime (images for t <= L^2/4).",
    params: &[
        ("lengths", "interval lengths, default [1, 2, 0.5]"),
        ("points", "grid points per axis, default 10"),
    ],
    tolerances: &[
        ("agreement", 1e-12, "max |images - spectral|"),
        ("positivity", 1e-15, "kernel values must be >= -positivity"),
    ],
    assertions: &["images_vs_spectral", "within_tail_bounds", "positivity"],
    run: cross_method,
};

fn cross_method(input: &SuiteInput) -> HarnessResult<SuiteReport> {
    let p = input.params()?;
    let lengths = p.f64_list("lengths", &[1.0, 2.0, 0.5])?;
    let n = p.usize("points", 10)?;
    if lengths.iter().any(|l| !(*l > 0.0)) {
        return Err(HarnessError::config("lengths", "must be positive"));
    }
    let tol = DEFAULT_TRUNCATION_TOL;
    let agreement = input.tol("agreement");
    let mut report = SuiteReport::new(
        CROSS_METHOD.name,
        input.seed,
        &["L", "t", "x", "y", "images", "spectral", "abs_diff", "images_tail", "spectral_tail"],
    );
    let mut jobs = Vec::new();
    for &l in &lengths {
        let ts = input.grid_or(|| {
            let (a, b) = ((1e-3 * l * l).ln(), (2.0 * l * l).ln());
            (0..n).map(|k| (b + (a - b) * k as f64 / (n.max(2) - 1) as f64).exp()).collect()
        });
        for t in ts {
            jobs.push((l, t));
        }
    }
    let blocks: Vec<HarnessResult<Vec<Vec<f64>>>> = jobs
        .par_iter()
        .map(|&(l, t)| {
            let xs = linspace(l, n);
            let mut rows = Vec::new();
            for &x in &xs {
                for &y in &xs {
                    let a = interval_kernel_images(l, t, x, y, tol)?;
                    let b = interval_kernel_spectral(l, t, x, y, tol)?;
                    rows.push(vec![l, t, x, y, a.value, b.value, (a.value - b.value).abs(), a.tail_bound, b.tail_bound]);
                }
            }
            Ok(rows)
        })
        .collect();
    for block in blocks {
        for row in block? {
            report.row(row);
        }
    }
    let diff = report.column("abs_diff").unwrap();
    let max_diff = diff.iter().cloned().fold(0.0, f64::max);
    let beyond_tails = report
        .rows
        .iter()
        .filter(|r| r[6] > r[7].max(r[8]) + agreement)
        .count();
    let min_value = report
        .rows
        .iter()
        .map(|r| if r[1] <= 0.25 * r[0] * r[0] { r[4] } else { r[5] })
        .fold(f64::INFINITY, f64::min);
    report.check(Assertion::at_most("images_vs_spectral", max_diff, agreement, 0.0));
    report.check(Assertion::count_zero("within_tail_bounds", beyond_tails));
    report.check(Assertion::at_least("positivity", min_value, 0.0, input.tol("positivity")));
    report.fit("max_abs_diff", max_diff);
    report.plot("abs_diff", "images vs cosine series", "t", &["abs_diff"], Some("L"));
    Ok(report)
}

pub(super) const CONSERVATION: SuiteInfo = SuiteInfo {
    name: "conservation",
    summary: "Mass conservation and the semigroup property of the Neumann kernels",
    statement: "The Neumann semigroup preserves constants: the integral of k(t,x,.) over the \
                domain is 1. It also composes: the integral of k(t,x,z)k(s,z,y) over z equals \
                k(t+s,x,y). Samples of (t,x) are drawn from the seed with t log-uniform in \
                [1e-3, 1], alternating between an interval and a rectangle.",
    params: &[
        ("mass_samples", "number of (t,x) mass samples, default 100"),
        ("semigroup_samples", "number of (t,s,x,y) samples, default 20"),
        ("interval_length", "default 1"),
        ("box_lengths", "default [1, 2]"),
    ],
    tolerances: &[
        ("mass", 1e-9, "|mass - 1|"),
        ("semigroup", 1e-8, "semigroup residual"),
    ],
    assertions: &["mass_conservation", "semigroup_residual"],
    run: conservation,
};

fn conservation(input: &SuiteInput) -> HarnessResult<SuiteReport> {
    let p = input.params()?;
    let n_mass = p.usize("mass_samples", 100)?;
    let n_semi = p.usize("semigroup_samples", 20)?;
    let l = p.f64("interval_length", 1.0)?;
    let bl = p.f64_list("box_lengths", &[1.0, 2.0])?;
    let interval = KernelSpec::interval(l).map_err(|e| HarnessError::config("interval_length", e.to_string()))?;
    let boxk = KernelSpec::boxed(bl.clone()).map_err(|e| HarnessError::config("box_lengths", e.to_string()))?;
    let seed = input.seed;
    let mut report = SuiteReport::new(
        CONSERVATION.name,
        seed,
        &["kind", "t", "s", "x1", "x2", "y", "value", "deviation"],
    );
    let mass_rows: Vec<HarnessResult<Vec<f64>>> = (0..n_mass as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k);
            let t = 10f64.powf(-3.0 + 3.0 * unit_f64(&mut rng));
            let (kind, x) = if k % 2 == 0 {
                (0.0, vec![l * unit_f64(&mut rng)])
            } else {
                (1.0, bl.iter().map(|b| b * unit_f64(&mut rng)).collect::<Vec<_>>())
            };
            let spec = if k % 2 == 0 { &interval } else { &boxk };
            let m = mass_integral(spec, t, &x)?;
            let (x1, x2) = xy(&x);
            Ok(vec![kind, t, f64::NAN, x1, x2, f64::NAN, m, (m - 1.0).abs()])
        })
        .collect();
    let semi_rows: Vec<HarnessResult<Vec<f64>>> = (0..n_semi as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, 1_000_000 + k);
            let t = 10f64.powf(-3.0 + 2.0 * unit_f64(&mut rng));
            let s = 10f64.powf(-3.0 + 2.0 * unit_f64(&mut rng));
            let x = l * unit_f64(&mut rng);
            let y = l * unit_f64(&mut rng);
            let r = semigroup_residual(l, t, s, x, y)?;
            Ok(vec![2.0, t, s, x, f64::NAN, y, r, r])
        })
        .collect();
    for r in mass_rows.into_iter().chain(semi_rows) {
        report.row(r?);
    }
    let worst = |kind: &dyn Fn(f64) -> bool| {
        report
            .rows
            .iter()
            .filter(|r| kind(r[0]))
            .map(|r| r[7])
            .fold(0.0, f64::max)
    };
    let mass_dev = worst(&|k| k < 2.0);
    let semi = worst(&|k| k == 2.0);
    report.check(Assertion::at_most("mass_conservation", mass_dev, 0.0, input.tol("mass")));
    report.check(Assertion::at_most("semigroup_residual", semi, 0.0, input.tol("semigroup")));
    report.fit("max_mass_deviation", mass_dev);
    report.fit("max_semigroup_residual", semi);
    Ok(report)
}

pub(super) const KERNEL_BOUNDS: SuiteInfo = SuiteInfo {
    name: "kernel_bounds",
    summary: "Gaussian upper bounds for interval and box kernels, and the weighted G-norm",
    statement: "Gaussian domination: k(t,x,y) <= C t^{-d/2} exp(-|x-y|^2/(4(1+delta)t)) with C \
                fitted at the coarsest t and then fixed for all finer t. Local-volume form: \
                k(t,x,y) <= C exp(-|x-y|^2/(4(1+delta)t)) / V(x, sqrt t) where V(x,rho) is the \
                volume of the domain inside B_rho(x); the constant fitted on the coarsest \
                levels must cover every finer level, and one constant per dimension is \
                reported. The G-norm \
                sup k(s,x,y) s^{d/2} exp(|x-y|^2/(4(1+delta)s)) is estimated on refined grids \
                (a lower estimate of the true sup), must be at least (4 pi)^{-d/2}, and must \
                not increase with delta.",
    params: &[
        ("delta", "Gaussian widening, default 0.1"),
        ("points", "sample points per axis for x and y, default 11 in 1-D and 6 in 2-D"),
        ("fit_levels", "coarsest time levels used to fit the local-volume constant, default 3"),
        ("gnorm_x", "evaluation point for the G-norm on the first body, default its centre"),
        ("gnorm_t_max", "time window of the G-norm, default 0.01"),
        ("gnorm_deltas", "delta grid for the monotonicity check, default [0.05, 0.1, 0.2, 0.4, 0.8]"),
    ],
    tolerances: &[
        ("fit", 1e-12, "relative slack on the fixed Gaussian constant"),
        ("slack", 0.05, "relative excess allowed over the coarse-level local-volume constant"),
        ("gnorm_change", 1e-3, "relative change at the last G-norm refinement"),
    ],
    assertions: &[
        "gaussian_domination",
        "local_volume_constant_stable",
        "gnorm_at_least_free_value",
        "gnorm_converged",
        "gnorm_monotone_in_delta",
    ],
    run: kernel_bounds,
};

fn kernel_bounds(input: &SuiteInput) -> HarnessResult<SuiteReport> {
    let p = input.params()?;
    let delta = p.f64("delta", 0.1)?;
    if !(delta > 0.0) {
        return Err(HarnessError::config("delta", "must be positive"));
    }
    let fit_levels = p.usize("fit_levels", 3)?.max(1);
    let bodies = input.bodies_or(|| vec![unit_box(1), unit_box(2)]);
    let ts = input.grid_or(|| (1..=12).map(|k| 2f64.powi(-k)).collect());
    let mut report = SuiteReport::new(
        KERNEL_BOUNDS.name,
        input.seed,
        &["body", "t", "x1", "x2", "y1", "y2", "kernel", "gaussian_ratio", "local_volume_ratio"],
    );
    let mut per_dim_c: std::collections::BTreeMap<usize, f64> = Default::default();
    let mut dom_violations = 0;
    let mut growth_violations = 0;
    for (bi, body) in bodies.iter().enumerate() {
        let ls = box_lengths(body).ok_or_else(|| HarnessError::config("bodies", "kernel bounds need boxes"))?;
        let d = ls.len();
        if d > 2 {
            return Err(HarnessError::config("bodies", "local volumes are exact only for d <= 2"));
        }
        let n = p.usize("points", if d == 1 { 11 } else { 6 })?;
        let spec = KernelSpec::boxed(ls.clone())?;
        let pts = box_grid(&ls, n);
        let levels: Vec<HarnessResult<(Vec<Vec<f64>>, f64, f64)>> = ts
            .par_iter()
            .map(|&t| {
                let mut rows = Vec::new();
                let (mut g_max, mut v_max) = (0.0f64, 0.0f64);
                for x in &pts {
                    let vol = body.local_volume(x, t.sqrt()).value;
                    for y in &pts {
                        let k = spec.eval(t, x, y)?.value;
                        let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                        let w = (-r2 / (4.0 * (1.0 + delta) * t)).exp();
                        let gr = k / (t.powf(-0.5 * d as f64) * w);
                        let lr = k * vol / w;
                        g_max = g_max.max(gr);
                        v_max = v_max.max(lr);
                        let (x1, x2) = xy(x);
                        let (y1, y2) = xy(y);
                        rows.push(vec![bi as f64, t, x1, x2, y1, y2, k, gr, lr]);
                    }
                }
                Ok((rows, g_max, v_max))
            })
            .collect();
        let mut g_levels = Vec::new();
        let mut v_levels = Vec::new();
        for lvl in levels {
            let (rows, g, v) = lvl?;
            rows.into_iter().for_each(|r| report.row(r));
            g_levels.push(g);
            v_levels.push(v);
        }
        let c_gauss = g_levels[0];
        dom_violations += g_levels.iter().filter(|g| **g > c_gauss * (1.0 + input.tol("fit"))).count();
        let c_coarse = v_levels[..fit_levels.min(v_levels.len())].iter().cloned().fold(0.0, f64::max);
        growth_violations += v_levels
            .iter()
            .filter(|v| **v > c_coarse * (1.0 + input.tol("slack")))
            .count();
        report.fit(&format!("gaussian_constant_body{bi}"), c_gauss);
        let c = per_dim_c.entry(d).or_insert(0.0);
        *c = v_levels.iter().cloned().fold(*c, f64::max);
    }
    for (d, c) in &per_dim_c {
        report.fit(&format!("local_volume_constant_d{d}"), *c);
    }
    report.check(Assertion::count_zero("gaussian_domination", dom_violations));
    report.check(Assertion::count_zero("local_volume_constant_stable", growth_violations));

    // G-norm on the first body
    let ls = box_lengths(&bodies[0]).unwrap();
    let d = ls.len();
    let spec = KernelSpec::boxed(ls.clone())?;
    let centre: Vec<f64> = ls.iter().map(|l| 0.5 * l).collect();
    let x = p.f64_list("gnorm_x", &centre)?;
    if x.len() != d {
        return Err(HarnessError::config("gnorm_x", "dimension mismatch"));
    }
    let t_max = p.f64("gnorm_t_max", 0.01)?;
    if !(t_max > 0.0) {
        return Err(HarnessError::config("gnorm_t_max", "must be positive"));
    }
    let g = g_norm_estimate(&spec, delta, &x, 1e-3 * t_max, t_max, 5)?;
    let free = (4.0 * PI).powf(-0.5 * d as f64);
    report.check(
        Assertion::at_least("gnorm_at_least_free_value", g.value, free, 0.0)
            .with_detail("grid lower estimate compared from above with the free-space value"),
    );
    report.check(Assertion::at_most("gnorm_converged", g.last_change, input.tol("gnorm_change"), 0.0));
    report.fit("gnorm", g.value);
    let vol = bodies[0].local_volume(&x, t_max.sqrt()).value;
    let c_d = per_dim_c.get(&d).copied().unwrap_or(f64::NAN);
    report.fit("gnorm_over_local_volume_bound", g.value / (c_d * t_max.powf(0.5 * d as f64) / vol));
    report.note(format!(
        "G-norm grid: {} times x {} points per axis after {} refinements",
        g.s_points, g.y_points, g.refinements
    ));
    let deltas = p.f64_list("gnorm_deltas", &[0.05, 0.1, 0.2, 0.4, 0.8])?;
    let s_grid: Vec<f64> = (0..64).map(|k| t_max * 1e-3f64.powf(k as f64 / 63.0)).collect();
    let y_grid: Vec<Vec<f64>> = ls
        .iter()
        .zip(&x)
        .map(|(&l, &xi)| {
            let mut g = linspace(l, 129);
            g.push(xi);
            g
        })
        .collect();
    let mut values = Vec::new();
    for &dl in &deltas {
        values.push(g_norm_on_grid(&spec, dl, &x, &s_grid, &y_grid)?.0);
    }
    let increases = values.windows(2).filter(|w| w[1] > w[0]).count();
    report.check(Assertion::count_zero("gnorm_monotone_in_delta", increases));
    report.plot("gaussian_ratio", "Gaussian domination ratio", "t", &["gaussian_ratio"], Some("body"));
    Ok(report)
}
