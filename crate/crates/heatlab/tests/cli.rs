use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn heatlab(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_heatlab"));
    cmd.args(args).env_remove("HEATLAB_OUT");
    if let Some(dir) = out_env {
        cmd.env("HEATLAB_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_names_every_suite() {
    let o = heatlab(&["list"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["kernel_cross_method", "boundary_diagonal", "good_sets", "duhamel_mass"] {
        assert!(text.contains(name), "{name} missing from list");
    }
}

#[test]
fn describe_known_and_unknown_suites() {
    let o = heatlab(&["describe", "remainder_scaling"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("tolerances:"));

    let o = heatlab(&["describe", "no_such_suite"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oversized_rolling_radius_is_a_config_error_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"suites":[{"suite":"boundary_diagonal","params":{"r":0.3}}]}"#);
    let out = tmp.path().join("out");
    let o = heatlab(&["run", &cfg, "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`r`"), "stderr: {}", stderr(&o));
    assert!(!out.exists() || fs::read_dir(&out).unwrap().next().is_none());
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"suites":[{"suite":"duhamel_mass","bogus":1}]}"#);
    let o = heatlab(&["run", &cfg, "--out", tmp.path().join("o").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"));
}

#[test]
fn unknown_suite_in_config_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"suites":[{"suite":"nope"}]}"#);
    let o = heatlab(&["run", &cfg, "--out", tmp.path().join("o").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rerun_gives_identical_csv_and_passes_regression_gate() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"seed":7,"suites":[{"suite":"good_sets","samples":20000},{"suite":"remainder_scaling"}]}"#,
    );
    let out = tmp.path().join("out");
    let args = ["run", cfg.as_str(), "--out", out.to_str().unwrap(), "--parallel", "2"];
    let first = heatlab(&args, None);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let csv1 = fs::read(out.join("good_sets.csv")).unwrap();
    assert!(out.join("summary.json").exists());

    let second = heatlab(&args, None);
    assert_eq!(second.status.code(), Some(0), "{}", stderr(&second));
    assert_eq!(csv1, fs::read(out.join("good_sets.csv")).unwrap());
    let summary = fs::read_to_string(out.join("summary.json")).unwrap();
    assert!(summary.contains("regression_gate"));
}

#[test]
fn environment_overrides_out_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"suites":[{"suite":"duhamel_mass"}]}"#);
    let flag_dir = tmp.path().join("flag");
    let env_dir = tmp.path().join("env");
    let o = heatlab(&["run", &cfg, "--out", flag_dir.to_str().unwrap()], Some(&env_dir));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(env_dir.join("duhamel_mass.csv").exists());
    assert!(!flag_dir.exists());
}
