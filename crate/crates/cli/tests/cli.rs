use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heightlab"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str], cfg: &Path) -> Output {
    bin().args(args).arg("--config").arg(cfg).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("cfg.json");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn roth_solve_finds_solutions_and_covers_them_by_points() {
    let out = run(&["solve"], &config("roth_sqrt2.json"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["command"], "solve");
    assert_eq!(r["indeterminate"], false);
    let pts = r["result"]["solutions"]["points"].as_array().unwrap();
    assert!(pts.contains(&serde_json::json!([5, 7])));
    assert!(pts.contains(&serde_json::json!([12, 17])));
    let cover = &r["result"]["cover"];
    let subs = cover["subspaces"].as_array().unwrap();
    // on P^1 the proper subspaces are points
    assert!(subs.iter().all(|s| s["dim"] == 0));
    assert_eq!(subs.len(), pts.len());
    assert_eq!(cover["assignment"].as_array().unwrap().len(), pts.len());
    assert!(r["result"]["density"]["verdict_text"].as_str().unwrap().contains("never dense"));
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let cfg = config("roth_sqrt2.json");
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let jobs = ["1", "2", "4"];
    for (d, j) in dirs.iter().zip(jobs) {
        let out = bin()
            .args(["scatter", "--jobs", j, "--out"])
            .arg(d.path())
            .arg("--config")
            .arg(&cfg)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    for name in ["scatter.json", "scatter.csv"] {
        let first = fs::read(dirs[0].path().join(name)).unwrap();
        assert!(!first.is_empty());
        for d in &dirs[1..] {
            assert_eq!(first, fs::read(d.path().join(name)).unwrap(), "{name}");
        }
    }
}

#[test]
fn identity_audit_passes() {
    let out = run(&["audit"], &config("identity_audit.json"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["result"]["pass"], true);
    assert!(r["result"]["max_residual"].as_f64().unwrap() < 1e-9);
    let checks: Vec<&str> = r["result"]["checks"].as_array().unwrap().iter().map(|c| c["check"].as_str().unwrap()).collect();
    assert!(checks.contains(&"height_weil"));
    assert!(checks.contains(&"product_formula"));
}

#[test]
fn weights_that_do_not_sum_to_zero_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{
  "mode": "parametric", "n": 1, "epsilon": "1/10", "q": "10", "height_bound": 5,
  "places": [{ "v": "inf", "forms": [["1", "0"], ["0", "1"]], "weights": ["1/2", "1/3"] }]
}"#,
    );
    let out = run(&["solve"], &cfg);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ConfigInvalid"), "{err}");
    assert!(err.contains("places[0].weights"), "{err}");
}

#[test]
fn unknown_fields_and_mode_mismatch_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{ "mode": "schmidt", "n": 1, "bogus": 3 }"#);
    let out = run(&["solve"], &cfg);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ConfigInvalid"));

    let out = run(&["ruvojta"], &config("roth_sqrt2.json"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ConfigInvalid"));
}

#[test]
fn a_tie_below_interval_resolution_exits_with_two() {
    // epsilon agrees with the exact threshold of [5:7] to 20 digits
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{
  "mode": "schmidt", "field": [-2, 0, 1], "n": 1,
  "places": [{ "v": "inf", "w_index": 1, "forms": [[["0", "-1"], "1"], ["1", "0"]] }],
  "epsilon": "53172180078655698038/100000000000000000000",
  "points": [[5, 7], [12, 17]]
}"#,
    );
    let out = run(&["solve"], &cfg);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["indeterminate"], true);
    assert_eq!(r["result"]["solutions"]["indeterminate"], serde_json::json!([[5, 7]]));
}

#[test]
fn ruvojta_reports_constants_and_profiles() {
    let out = run(&["ruvojta"], &config("ruvojta_p2.json"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &report(&out)["result"];
    // h^0(P^2, O(4)) = C(6, 2)
    assert_eq!(r["h0"], "15");
    // a_0 + a_1 = 3 with a_i >= 0
    assert_eq!(r["delta_sigma"].as_array().unwrap().len(), 4);
    // capped by max_profiles
    assert_eq!(r["profiles"].as_array().unwrap().len(), 4);
    assert_eq!(r["gamma"]["gamma"], "3");
    assert!(r["feasible"].is_boolean());
}

#[test]
fn precision_flag_overrides_config_and_is_recorded() {
    let out = run(&["places", "--precision", "25"], &config("identity_audit.json"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["precision"], 25);
    let out = run(&["places", "--precision", "0"], &config("identity_audit.json"));
    assert_eq!(out.status.code(), Some(1));
}
