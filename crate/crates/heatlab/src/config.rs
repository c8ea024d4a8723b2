//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "seed": 42,
//!   "output_dir": "out",
//!   "suites": [
//!     { "suite": "remainder_small_time",
//!       "bodies": [ { "type": "box", "lengths": [1, 1] } ],
//!       "t_grid": { "dyadic": { "k_min": 6, "k_max": 19 } },
//!       "params": { "epsilon": 0.25 },
//!       "tolerances": { "slack": 0.05 } }
//!   ]
//! }
//! ```
//!
//! Unknown keys anywhere are rejected. Every suite has defaults for all of
//! its fields, so `{ "suite": "<name>" }` is a complete entry.

use std::collections::BTreeMap;

use heatlab_core::{ConvexBody, Vec2};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, HarnessResult};

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    pub suites: Vec<SuiteConfig>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bodies: Option<Vec<BodySpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<TGrid>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

impl SuiteConfig {
    pub fn named(suite: &str) -> Self {
        SuiteConfig {
            suite: suite.to_string(),
            bodies: None,
            t_grid: None,
            params: BTreeMap::new(),
            samples: None,
            seed: None,
            tolerances: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodySpec {
    Polygon { vertices: Vec<[f64; 2]> },
    Box { lengths: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl BodySpec {
    pub fn unit_box(d: usize) -> Self {
        BodySpec::Box { lengths: vec![1.0; d] }
    }

    pub fn build(&self) -> HarnessResult<ConvexBody> {
        let body = match self {
            BodySpec::Polygon { vertices } => {
                ConvexBody::polygon(vertices.iter().map(|v| Vec2::from(*v)).collect())
            }
            BodySpec::Box { lengths } => ConvexBody::cuboid(lengths.clone()),
            BodySpec::Ball { center, radius } => ConvexBody::ball(center.clone(), *radius),
        };
        body.map_err(|e| HarnessError::config("bodies", e.to_string()))
    }
}

/// Time grids, always returned from coarse (large `t`) to fine.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum TGrid {
    /// `t = 2^{-k}` for `k = k_min..=k_max`.
    Dyadic { k_min: i32, k_max: i32 },
    List(Vec<f64>),
    /// `n` log-spaced points in `[min, max]`.
    Log { min: f64, max: f64, n: usize },
}

impl TGrid {
    pub fn values(&self) -> HarnessResult<Vec<f64>> {
        let mut v = match self {
            TGrid::Dyadic { k_min, k_max } => {
                if k_min > k_max {
                    return Err(HarnessError::config("t_grid", "k_min exceeds k_max"));
                }
                (*k_min..=*k_max).map(|k| 2f64.powi(-k)).collect::<Vec<_>>()
            }
            TGrid::List(ts) => ts.clone(),
            TGrid::Log { min, max, n } => {
                if !(*min > 0.0 && max >= min && *n >= 1) {
                    return Err(HarnessError::config("t_grid", "need 0 < min <= max and n >= 1"));
                }
                if *n == 1 {
                    vec![*max]
                } else {
                    let (a, b) = (min.ln(), max.ln());
                    (0..*n).map(|k| (a + (b - a) * k as f64 / (*n - 1) as f64).exp()).collect()
                }
            }
        };
        if v.is_empty() || v.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(HarnessError::config("t_grid", "times must be positive and finite"));
        }
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(v)
    }
}

/// Parses and schema-checks a configuration document.
pub fn parse_config(text: &str) -> HarnessResult<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        HarnessError::config(offending_key(&msg).unwrap_or("<document>"), msg.clone())
    })?;
    if cfg.suites.is_empty() {
        return Err(HarnessError::config("suites", "at least one suite is required"));
    }
    Ok(cfg)
}

/// serde reports unknown or missing fields as "... field `name` ...".
fn offending_key(msg: &str) -> Option<&str> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(&msg[start..start + len])
}

/// SHA-256 of the compact JSON form with sorted keys.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let canonical = serde_json::to_value(cfg).expect("config serialises").to_string();
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Typed access to a suite's `params` object. Every read is checked against
/// the keys the suite declares, so stray keys surface as config errors.
pub struct Params<'a> {
    map: &'a BTreeMap<String, Value>,
}

impl<'a> Params<'a> {
    pub fn new(map: &'a BTreeMap<String, Value>, accepted: &[&str]) -> HarnessResult<Self> {
        if let Some(k) = map.keys().find(|k| !accepted.contains(&k.as_str())) {
            return Err(HarnessError::config(k.clone(), "not a parameter of this suite"));
        }
        Ok(Params { map })
    }

    pub fn f64(&self, key: &str, default: f64) -> HarnessResult<f64> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| HarnessError::config(key, "expected a finite number")),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> HarnessResult<usize> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| HarnessError::config(key, "expected a nonnegative integer")),
        }
    }

    pub fn f64_list(&self, key: &str, default: &[f64]) -> HarnessResult<Vec<f64>> {
        match self.map.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| HarnessError::config(key, "expected numbers")))
                .collect(),
            Some(_) => Err(HarnessError::config(key, "expected an array of numbers")),
        }
    }

    pub fn string(&self, key: &str, default: &str) -> HarnessResult<String> {
        match self.map.get(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(HarnessError::config(key, "expected a string")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_named() {
        let err = parse_config(r#"{"suites":[{"suite":"kroger","bogus":1}]}"#).unwrap_err();
        match err {
            HarnessError::ConfigInvalid { key, .. } => assert_eq!(key, "bogus"),
            e => panic!("{e}"),
        }
        let err = parse_config(r#"{"suites":[{"suite":"x","bodies":[{"type":"box","lengths":[1],"r":2}]}]}"#).unwrap_err();
        assert!(matches!(err, HarnessError::ConfigInvalid { ref key, .. } if key == "r"));
        assert!(parse_config(r#"{"suites":[]}"#).is_err());
    }

    #[test]
    fn grids_run_coarse_to_fine() {
        let g = TGrid::Dyadic { k_min: 2, k_max: 4 }.values().unwrap();
        assert_eq!(g, vec![0.25, 0.125, 0.0625]);
        let g = TGrid::Log { min: 1e-3, max: 1e-1, n: 3 }.values().unwrap();
        assert!((g[1] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn hash_ignores_key_order() {
        let a = parse_config(r#"{"seed":1,"suites":[{"suite":"kroger","seed":3}]}"#).unwrap();
        let b = parse_config(r#"{"suites":[{"seed":3,"suite":"kroger"}],"seed":1}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        let c = parse_config(r#"{"suites":[{"seed":4,"suite":"kroger"}],"seed":1}"#).unwrap();
        assert_ne!(config_hash(&a), config_hash(&c));
    }

    #[test]
    fn params_reject_stray_keys() {
        let mut m = BTreeMap::new();
        m.insert("epsilon".to_string(), Value::from(0.25));
        m.insert("eta".to_string(), Value::from(1.0));
        assert!(Params::new(&m, &["epsilon"]).is_err());
        let p = Params::new(&m, &["epsilon", "eta"]).unwrap();
        assert_eq!(p.f64("epsilon", 0.0).unwrap(), 0.25);
        assert_eq!(p.f64("r", 0.1).unwrap(), 0.1);
    }
}
