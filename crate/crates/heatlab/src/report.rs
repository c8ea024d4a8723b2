//! On-disk artifacts of a run: one CSV and one SVG per plot for each suite,
//! `summary.json` and `manifest.json`.
//!
//! CSV bodies depend only on the configuration and the seed. Numbers are
//! written as `{:.16e}` (17 significant digits), missing values as `NaN`,
//! lines end in `\n`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::Serialize;
use serde_json::Value;

use crate::error::HarnessResult;
use crate::harness::{Assertion, Plot, SuiteReport};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Relative change of a fitted constant that the regression gate accepts.
pub const REGRESSION_TOL: f64 = 1e-6;

pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn csv_string(report: &SuiteReport) -> String {
    let mut out = report.columns.join(",");
    out.push('\n');
    for row in &report.rows {
        let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

/// Self-contained log-log line plot. Nonpositive and non-finite values are
/// skipped; returns `None` when nothing is left to draw.
pub fn svg_plot(report: &SuiteReport, plot: &Plot) -> Option<String> {
    let col = |name: &str| report.columns.iter().position(|c| c == name);
    let xi = col(&plot.x)?;
    let gi = plot.group_by.as_deref().and_then(col);
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for y in &plot.ys {
        let Some(yi) = col(y) else { continue };
        let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        for row in &report.rows {
            let (x, v) = (row[xi], row[yi]);
            if x > 0.0 && v > 0.0 && x.is_finite() && v.is_finite() {
                let key = match gi {
                    Some(g) => format!("{y} [{} {}]", plot.group_by.as_deref().unwrap(), row[g]),
                    None => y.clone(),
                };
                groups.entry(key).or_default().push((x.log10(), v.log10()));
            }
        }
        for (k, mut pts) in groups {
            pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            series.push((k, pts));
        }
    }
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.1.iter().copied()).collect();
    if all.is_empty() {
        return None;
    }
    let span = |f: fn(&(f64, f64)) -> f64| {
        let lo = all.iter().map(f).fold(f64::INFINITY, f64::min).floor();
        let hi = all.iter().map(f).fold(f64::NEG_INFINITY, f64::max).ceil();
        if hi > lo { (lo, hi) } else { (lo - 1.0, lo + 1.0) }
    };
    let (x0, x1) = span(|p| p.0);
    let (y0, y1) = span(|p| p.1);
    let (w, h, left, right, top, bottom) = (720.0, 480.0, 70.0, 230.0, 40.0, 50.0);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" font-size="14" text-anchor="middle">{}</text>"#, (left + w - right) / 2.0, escape(&plot.title));
    let step = |lo: f64, hi: f64| ((hi - lo) / 8.0).ceil().max(1.0);
    let sx = step(x0, x1);
    let mut k = x0;
    while k <= x1 + 1e-9 {
        let x = px(k);
        let _ = writeln!(s, r##"<line x1="{x:.1}" y1="{top}" x2="{x:.1}" y2="{:.1}" stroke="#e0e0e0"/>"##, h - bottom);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{k}</text>"#, h - bottom + 16.0);
        k += sx;
    }
    let sy = step(y0, y1);
    let mut k = y0;
    while k <= y1 + 1e-9 {
        let y = py(k);
        let _ = writeln!(s, r##"<line x1="{left}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#e0e0e0"/>"##, w - right);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{k}</text>"#, left - 6.0, y + 4.0);
        k += sy;
    }
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        w - left - right,
        h - top - bottom
    );
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, (left + w - right) / 2.0, h - 12.0, escape(&plot.x));
    for (i, (name, pts)) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", px(p.0), py(p.1))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        for p in pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{colour}"/>"#, px(p.0), py(p.1));
        }
        let ly = top + 14.0 * i as f64 + 8.0;
        let lx = w - right + 10.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/>"#, lx + 18.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 24.0, ly + 4.0, escape(name));
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[derive(Debug, Serialize)]
pub struct SuiteSummary<'a> {
    pub suite: &'a str,
    pub seed: u64,
    pub passed: bool,
    pub rows: usize,
    pub wall_clock_s: f64,
    pub assertions: &'a [Assertion],
    pub fitted: &'a BTreeMap<String, f64>,
    pub notes: &'a [String],
    pub artifacts: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct RunSummary<'a> {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub config_hash: &'a str,
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteSummary<'a>>,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub tool_version: &'static str,
    pub timestamp: String,
    pub seed: u64,
    pub artifacts: Vec<String>,
}

/// Compares fitted constants with those of an earlier `summary.json` written
/// for the same configuration hash, and appends a `regression_gate`
/// assertion to each suite that has a previous record. Returns whether a
/// previous summary was used.
pub fn regression_gate(out_dir: &Path, config_hash: &str, reports: &mut [SuiteReport]) -> bool {
    let Ok(text) = fs::read_to_string(out_dir.join(SUMMARY_FILE)) else {
        return false;
    };
    let Ok(prev) = serde_json::from_str::<Value>(&text) else {
        return false;
    };
    if prev.get("config_hash").and_then(Value::as_str) != Some(config_hash) {
        return false;
    }
    let Some(suites) = prev.get("suites").and_then(Value::as_array) else {
        return false;
    };
    for report in reports.iter_mut() {
        let Some(old) = suites.iter().find(|s| {
            s.get("suite").and_then(Value::as_str) == Some(report.suite.as_str())
                && s.get("seed").and_then(Value::as_u64) == Some(report.seed)
        }) else {
            continue;
        };
        let Some(fitted) = old.get("fitted").and_then(Value::as_object) else {
            continue;
        };
        let mut worst = 0.0f64;
        let mut changed = Vec::new();
        for (name, new) in &report.fitted {
            let Some(entry) = fitted.get(name) else { continue };
            // non-finite constants are stored as null
            let rel = match (entry.as_f64(), new.is_finite()) {
                (Some(o), true) => {
                    if o == *new {
                        0.0
                    } else {
                        (new - o).abs() / o.abs().max(new.abs())
                    }
                }
                (None, false) => 0.0,
                _ => f64::INFINITY,
            };
            if rel > REGRESSION_TOL {
                changed.push(name.clone());
            }
            worst = worst.max(rel);
        }
        let mut a = Assertion::at_most("regression_gate", worst, 0.0, REGRESSION_TOL);
        if !changed.is_empty() {
            a = a.with_detail(format!("changed: {}", changed.join(", ")));
        }
        report.check(a);
    }
    true
}

/// Writes every artifact and returns the paths relative to `out_dir`.
pub fn write_all(out_dir: &Path, config_hash: &str, seed: u64, reports: &[SuiteReport]) -> HarnessResult<Vec<String>> {
    fs::create_dir_all(out_dir)?;
    let mut artifacts = Vec::new();
    let mut per_suite = Vec::new();
    for (i, report) in reports.iter().enumerate() {
        // repeated suites get an index suffix so files do not collide
        let stem = if reports[..i].iter().any(|r| r.suite == report.suite) {
            format!("{}_{i}", report.suite)
        } else {
            report.suite.clone()
        };
        let mut own = Vec::new();
        let csv = format!("{stem}.csv");
        fs::write(out_dir.join(&csv), csv_string(report))?;
        own.push(csv);
        for plot in &report.plots {
            if let Some(svg) = svg_plot(report, plot) {
                let name = format!("{stem}_{}.svg", plot.name);
                fs::write(out_dir.join(&name), svg)?;
                own.push(name);
            }
        }
        artifacts.extend(own.iter().cloned());
        per_suite.push(own);
    }
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        config_hash,
        seed,
        passed: reports.iter().all(SuiteReport::passed),
        suites: reports
            .iter()
            .zip(per_suite)
            .map(|(r, own)| SuiteSummary {
                suite: &r.suite,
                seed: r.seed,
                passed: r.passed(),
                rows: r.rows.len(),
                wall_clock_s: r.wall_clock_s,
                assertions: &r.assertions,
                fitted: &r.fitted,
                notes: &r.notes,
                artifacts: own,
            })
            .collect(),
    };
    write_json(&out_dir.join(SUMMARY_FILE), &summary)?;
    artifacts.push(SUMMARY_FILE.to_string());
    let manifest = RunManifest {
        config_hash: config_hash.to_string(),
        tool_version: TOOL_VERSION,
        timestamp: humantime::format_rfc3339_seconds(SystemTime::now()).to_string(),
        seed,
        artifacts: artifacts.clone(),
    };
    write_json(&out_dir.join(MANIFEST_FILE), &manifest)?;
    artifacts.push(MANIFEST_FILE.to_string());
    Ok(artifacts)
}

fn write_json<T: Serialize>(path: &PathBuf, value: &T) -> HarnessResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("summary serialises");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SuiteReport {
        let mut r = SuiteReport::new("demo", 7, &["t", "v"]);
        r.row(vec![0.5, 1.0]);
        r.row(vec![0.25, f64::NAN]);
        r.fit("c", 2.0);
        r.plot("v", "v(t)", "t", &["v"], None);
        r
    }

    #[test]
    fn csv_uses_fixed_formatting() {
        let csv = csv_string(&tiny());
        assert_eq!(csv, "t,v\n5.0000000000000000e-1,1.0000000000000000e0\n2.5000000000000000e-1,NaN\n");
    }

    #[test]
    fn svg_skips_nonpositive_values() {
        let mut r = tiny();
        r.row(vec![0.125, -1.0]);
        let svg = svg_plot(&r, &r.plots[0]).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 1);
    }

    #[test]
    fn regression_gate_flags_changed_constants() {
        let dir = tempfile::tempdir().unwrap();
        let reports = vec![tiny()];
        write_all(dir.path(), "abc", 7, &reports).unwrap();
        let mut same = vec![tiny()];
        assert!(regression_gate(dir.path(), "abc", &mut same));
        assert!(same[0].assertion("regression_gate").unwrap().passed);
        let mut moved = vec![tiny()];
        moved[0].fit("c", 2.1);
        regression_gate(dir.path(), "abc", &mut moved);
        assert!(!moved[0].assertion("regression_gate").unwrap().passed);
        let mut other = vec![tiny()];
        assert!(!regression_gate(dir.path(), "other", &mut other));
    }
}
