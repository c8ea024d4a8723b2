//! Experiment suites. Each suite turns a [`SuiteConfig`] into a
//! [`SuiteReport`] holding one CSV row per grid or sample point, named
//! assertions with their tolerances, and fitted constants.

use std::collections::BTreeMap;
use std::time::Instant;

use heatlab_core::ConvexBody;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Params, SuiteConfig};
use crate::error::{HarnessError, HarnessResult};

pub mod identities;
pub mod mc;
mod suites;

pub use identities::{duhamel_mass_check, layer_cake_identity_check, DuhamelCheck, LayerCakeCheck};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Assertion {
    /// `value <= bound + tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Assertion {
            name: name.into(),
            passed: value.is_finite() && value <= bound + tolerance,
            value,
            bound,
            tolerance,
            detail: String::new(),
        }
    }

    /// `value >= bound - tolerance`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Assertion {
            name: name.into(),
            passed: value.is_finite() && value >= bound - tolerance,
            value,
            bound,
            tolerance,
            detail: String::new(),
        }
    }

    /// Boolean outcome; `value` holds the number of violations.
    pub fn count_zero(name: impl Into<String>, violations: usize) -> Self {
        Assertion {
            name: name.into(),
            passed: violations == 0,
            value: violations as f64,
            bound: 0.0,
            tolerance: 0.0,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// A log-log line plot over CSV columns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Plot {
    pub name: String,
    pub title: String,
    pub x: String,
    pub ys: Vec<String>,
    /// Optional column whose distinct values split the data into series.
    pub group_by: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub columns: Vec<String>,
    #[serde(skip)]
    pub rows: Vec<Vec<f64>>,
    pub assertions: Vec<Assertion>,
    pub fitted: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub plots: Vec<Plot>,
    pub wall_clock_s: f64,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, columns: &[&str]) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            seed,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            assertions: Vec::new(),
            fitted: BTreeMap::new(),
            notes: Vec::new(),
            plots: Vec::new(),
            wall_clock_s: 0.0,
        }
    }

    pub fn row(&mut self, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(values);
    }

    pub fn check(&mut self, a: Assertion) {
        self.assertions.push(a);
    }

    pub fn fit(&mut self, name: &str, value: f64) {
        self.fitted.insert(name.to_string(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn plot(&mut self, name: &str, title: &str, x: &str, ys: &[&str], group_by: Option<&str>) {
        self.plots.push(Plot {
            name: name.to_string(),
            title: title.to_string(),
            x: x.to_string(),
            ys: ys.iter().map(|s| s.to_string()).collect(),
            group_by: group_by.map(str::to_string),
        });
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// Resolved inputs handed to a suite.
pub struct SuiteInput {
    pub bodies: Option<Vec<ConvexBody>>,
    pub t_grid: Option<Vec<f64>>,
    pub params: BTreeMap<String, Value>,
    pub samples: Option<u64>,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    info: &'static SuiteInfo,
}

impl SuiteInput {
    pub fn params(&self) -> HarnessResult<Params<'_>> {
        let names: Vec<&str> = self.info.params.iter().map(|p| p.0).collect();
        Params::new(&self.params, &names)
    }

    /// Configured tolerance, or the suite default.
    pub fn tol(&self, name: &str) -> f64 {
        if let Some(v) = self.tolerances.get(name) {
            return *v;
        }
        self.info
            .tolerances
            .iter()
            .find(|t| t.0 == name)
            .map(|t| t.1)
            .unwrap_or_else(|| panic!("suite {} has no tolerance {name}", self.info.name))
    }

    pub fn bodies_or(&self, default: impl FnOnce() -> Vec<ConvexBody>) -> Vec<ConvexBody> {
        self.bodies.clone().unwrap_or_else(default)
    }

    pub fn grid_or(&self, default: impl FnOnce() -> Vec<f64>) -> Vec<f64> {
        self.t_grid.clone().unwrap_or_else(default)
    }

    pub fn samples_or(&self, default: u64) -> u64 {
        self.samples.unwrap_or(default)
    }
}

/// Static description of a suite, shown by `heatlab describe`.
pub struct SuiteInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub statement: &'static str,
    /// `(name, meaning and default)`.
    pub params: &'static [(&'static str, &'static str)],
    /// `(name, default, meaning)`.
    pub tolerances: &'static [(&'static str, f64, &'static str)],
    pub assertions: &'static [&'static str],
    pub run: fn(&SuiteInput) -> HarnessResult<SuiteReport>,
}

pub fn registry() -> &'static [SuiteInfo] {
    suites::REGISTRY
}

pub fn find_suite(name: &str) -> Option<&'static SuiteInfo> {
    registry().iter().find(|s| s.name == name)
}

/// Runs one configured suite. `seed_override` (from the command line) beats
/// the suite seed, which beats `default_seed`.
pub fn run_suite(cfg: &SuiteConfig, default_seed: u64, seed_override: Option<u64>) -> HarnessResult<SuiteReport> {
    let info = find_suite(&cfg.suite)
        .ok_or_else(|| HarnessError::config("suite", format!("unknown suite `{}`", cfg.suite)))?;
    if let Some(k) = cfg.tolerances.keys().find(|k| !info.tolerances.iter().any(|t| t.0 == k.as_str())) {
        return Err(HarnessError::config(k.clone(), "not a tolerance of this suite"));
    }
    let bodies = cfg
        .bodies
        .as_ref()
        .map(|bs| bs.iter().map(|b| b.build()).collect::<HarnessResult<Vec<_>>>())
        .transpose()?;
    let t_grid = cfg.t_grid.as_ref().map(|g| g.values()).transpose()?;
    let input = SuiteInput {
        bodies,
        t_grid,
        params: cfg.params.clone(),
        samples: cfg.samples,
        seed: seed_override.or(cfg.seed).unwrap_or(default_seed),
        tolerances: cfg.tolerances.clone(),
        info,
    };
    input.params()?;
    let start = Instant::now();
    let mut report = (info.run)(&input)?;
    report.wall_clock_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Runs a suite with all defaults.
pub fn run_default(name: &str) -> HarnessResult<SuiteReport> {
    run_suite(&SuiteConfig::named(name), DEFAULT_SEED, None)
}
