use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sp4rep")).args(args).output().expect("run sp4rep")
}

fn json_lines(o: &Output) -> Vec<Value> {
    String::from_utf8(o.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("valid json line"))
        .collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn identity_element_is_one_via_b0() {
    let o = run(&["element", "--in", "1,0,1", "--out", "1,0,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = &json_lines(&o)[0];
    assert!((r["value_re"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    assert_eq!(r["value_im"].as_f64().unwrap(), 0.0);
    assert_eq!(r["value"]["re"], r["value_re"]);
    assert_eq!(r["route"], "b0");
    assert_eq!(r["in"]["j_x2"], 2);
    assert_eq!(r["config"]["s_x2"], 0);
    assert_eq!(r["config"]["element"], "identity");
}

#[test]
fn boost_element_is_finite_with_small_tail() {
    let o = run(&["--element", "boost:0.1", "--varsigma", "4", "element", "--in", "0,0,0", "--out", "0,0,0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = &json_lines(&o)[0];
    assert_eq!(r["route"], "series");
    assert!(r["tail_estimate"].as_f64().unwrap() < 1e-6);
    let v = r["value_re"].as_f64().unwrap();
    assert!((v - 0.1f64.cosh().powf(-8.0)).abs() < 1e-12, "{v}");
}

#[test]
fn malformed_index_exits_2_naming_the_constraint() {
    let o = run(&["element", "--in", "2,2,0", "--out", "0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("0 <= k <= l/2"), "{}", stderr(&o));
    let o = run(&["--spin-x2", "1", "element", "--in", "1,0,0", "--out", "0,0,1,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_of_regime_and_bad_flags_exit_2() {
    let o = run(&["--varsigma", "2.5", "--spin-x2", "1", "character"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("varsigma > s + 2"), "{}", stderr(&o));
    assert_eq!(run(&["--element", "nonsense", "character"]).status.code(), Some(2));
    assert_eq!(run(&["--abel-t", "1.5", "character"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn unknown_suite_exits_2() {
    let o = run(&["verify", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope"));
}

#[test]
fn verify_cquat_passes_with_records() {
    let o = run(&["verify", "cquat"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = json_lines(&o);
    assert!(recs.len() > 5);
    assert!(recs.iter().all(|r| r["passed"] == true && r["suite"] == "cquat"));
    assert_eq!(recs.last().unwrap()["check"], "summary");
}

#[test]
fn config_file_with_flag_overrides() {
    let path = std::env::temp_dir().join(format!("sp4rep-cli-test-{}.cfg", std::process::id()));
    std::fs::write(&path, "# test\nvarsigma = 5\nspin_x2 = 1\nelement = random:4:0.1\nformat = csv\n").unwrap();
    let p = path.to_str().unwrap();
    let o = run(&["--config", p, "--format", "json", "block", "--l-in", "0", "--l-out", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let recs = json_lines(&o);
    // 2 inputs (J = 1/2) times 3 * 2 outputs at degree 1
    assert_eq!(recs.len(), 2 * 6);
    assert_eq!(recs[0]["config"]["varsigma"], 5.0);
    assert_eq!(recs[0]["config"]["s_x2"], 1);
    assert_eq!(recs[0]["config"]["format"], "json");
    std::fs::write(&path, "bogus = 1\n").unwrap();
    assert_eq!(run(&["--config", p, "character"]).status.code(), Some(2));
    std::fs::remove_file(&path).ok();
}

#[test]
fn csv_has_the_documented_header() {
    let o = run(&["--format", "csv", "--element", "random:2:0.1", "block", "--l-in", "1", "--l-out", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "l_in,k_in,j_x2_in,m_x2_in,l_out,k_out,j_x2_out,m_x2_out,value_re,value_im,tail_estimate,l_max_used,route,config"
    );
    assert_eq!(lines.count(), 9);
}

#[test]
fn character_reports_partial_sums_and_verdict() {
    let diag = "diag:0.8775825618903728,0.479425538604203/0.8775825618903728,-0.479425538604203";
    let o = run(&["--element", diag, "--abel-t", "0.5", "--lmax", "40", "character"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = &json_lines(&o)[0];
    assert_eq!(r["verdict"], "converged");
    let sums = r["partial_sums"].as_array().unwrap();
    assert_eq!(sums.len(), 41);
    let last = sums.last().unwrap()["re"].as_f64().unwrap();
    assert!((last - sp4rep::verify::CHARACTER_REGRESSION).abs() < 1e-10);
    // the plain sums at the identity grow without bound: record written, exit 3
    let o = run(&["--abel-t", "1", "--lmax", "8", "character"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json_lines(&o)[0]["verdict"], "diverging");
}

#[test]
fn output_is_deterministic() {
    let args = ["--element", "random:9:0.2", "--spin-x2", "1", "block", "--l-in", "1", "--l-out", "2"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
