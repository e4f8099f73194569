use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn nlft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlft")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn zero_potential_file_gives_identity_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.json", &format!(r#"{{"potential":{:?},"grid":{{"n":21}}}}"#, data("zero.json")));
    let out = nlft(&["transform", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("xi,re_a,im_a,re_b,im_b,log_a2\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|r| r[1..] == [1.0, 0.0, 0.0, 0.0, 0.0]));
}

#[test]
fn single_layer_row_at_zero_frequency() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.json", &format!(r#"{{"potential":{:?},"grid":{{"n":5}}}}"#, data("box.json")));
    let text = String::from_utf8(nlft(&["transform", "--config", &cfg]).stdout).unwrap();
    let row = csv_rows(&text).into_iter().find(|r| r[0] == 0.0).unwrap();
    assert!((row[1] - 1f64.cosh()).abs() < 1e-14 && row[2].abs() < 1e-14);
    assert!((row[3] - 1f64.sinh()).abs() < 1e-14 && row[4].abs() < 1e-14);
}

#[test]
fn transform_rerun_is_byte_identical_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.json", &format!(r#"{{"potential":{:?}}}"#, data("two_layer.json")));
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(nlft(&["transform", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(nlft(&["transform", "--config", &cfg, "--out", b.to_str().unwrap()]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.csv.config.json")).unwrap()).unwrap();
    assert_eq!(side["command"], "transform");
    assert_eq!(side["config"]["grid"]["n"], 201);
    assert_eq!(side["config"]["rtol"], 1e-6);
}

#[test]
fn linear_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "c.json",
        &format!(r#"{{"potential":{:?},"grid":{{"n":11}},"transform":{{"table":"linear"}}}}"#, data("box.json")),
    );
    let text = String::from_utf8(nlft(&["transform", "--config", &cfg]).stdout).unwrap();
    assert!(text.starts_with("xi,abs_fhat,fstar,fstar_err\n"));
    for r in csv_rows(&text) {
        assert!(r[2] >= r[1] - 1e-15 && r[3] >= 0.0);
    }
}

#[test]
fn verify_passes_and_reruns_identically() {
    let a = nlft(&["verify", "--seed", "7", "--threads", "2"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    let b = nlft(&["verify", "--seed", "7", "--threads", "2"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
    assert!(text.contains("plancherel") && text.contains("symmetry.additivity") && text.contains("lemma.q=4"));
}

#[test]
fn injected_phase_bug_fails_translation() {
    let out = nlft(&["verify", "--inject-phase-bug"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL symmetry.translation")));
    assert!(String::from_utf8(out.stderr).unwrap().contains("symmetry.translation"));
}

#[test]
fn expansion_identity_residual() {
    let dir = tempfile::tempdir().unwrap();
    let cfg =
        config(dir.path(), "c.json", &format!(r#"{{"potential":{:?},"grid":{{"n":41}}}}"#, data("small_box.json")));
    let out = nlft(&["expansion", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("xi,log_a2,fhat_sq,q_op,e_residual,bound_q,bound_e\n"));
    for r in csv_rows(&text) {
        assert!((r[2] - r[3] + r[4] - r[1]).abs() <= 1e-12);
        assert!(r[3].abs() <= r[5] + 1e-13 && r[4].abs() <= r[6] + 1e-13);
    }
}

#[test]
fn sweep_reports_positive_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.csv");
    let out = nlft(&["sweep", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8(out.stderr).unwrap();
    let eps: f64 = err.split("eps_hat=").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!(eps > 0.0);
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("c,l1,lp,linear_ratio,nonlinear_ratio,deficit,altineq_slack\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[5] > 0.0 && r[4] < r[3] && r[6] >= -1e-8));
}

#[test]
fn search_is_reproducible() {
    let a = nlft(&["search", "--seed", "1", "--threads", "3"]);
    let b = nlft(&["search", "--seed", "1", "--threads", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["iterations"], 100);
    let log = v["log"].as_array().unwrap();
    let rhos: Vec<f64> = log.iter().map(|s| s["best_rho"].as_f64().unwrap()).collect();
    assert!(rhos.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn dist_report_shape() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.json", &format!(r#"{{"potential":{:?},"p":1.5}}"#, data("two_layer.json")));
    let out = nlft(&["dist", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["dist"].as_f64().unwrap() > 0.0);
    assert_eq!(v["starts"], 8);
    assert!(v["gaussian"]["alpha"].as_f64().unwrap() > 0.0);
}

#[test]
fn hypotheses_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = config(dir.path(), "ok.json", &format!(r#"{{"potential":{:?}}}"#, data("small_box.json")));
    assert_eq!(nlft(&["hypotheses", "--config", &ok]).status.code(), Some(0));
    let bad = config(dir.path(), "bad.json", &format!(r#"{{"potential":{:?}}}"#, data("box.json")));
    assert_eq!(nlft(&["hypotheses", "--config", &bad]).status.code(), Some(1));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(nlft(&["bogus"]).status.code(), Some(2));
    assert_eq!(nlft(&[]).status.code(), Some(2));
    let unknown = config(dir.path(), "u.json", r#"{"colour": 1}"#);
    assert_eq!(nlft(&["transform", "--config", &unknown]).status.code(), Some(2));
    let badp = config(dir.path(), "p.json", r#"{"p": 2.5}"#);
    assert_eq!(nlft(&["sweep", "--config", &badp]).status.code(), Some(2));
    let missing = config(dir.path(), "m.json", r#"{"potential": "/no/such/file.json"}"#);
    let out = nlft(&["transform", "--config", &missing]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("/no/such/file.json"));
    let even = config(dir.path(), "g.json", r#"{"grid": {"n": 10}}"#);
    assert_eq!(nlft(&["transform", "--config", &even]).status.code(), Some(2));
    assert_eq!(nlft(&["verify", "--threads", "0"]).status.code(), Some(2));
}
