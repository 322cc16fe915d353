use std::fs;

use assert_cmd::Command;
use serde_json::Value;

fn nilflow() -> Command {
    Command::cargo_bin("nilflow").unwrap()
}

fn json_of(args: &[&str]) -> (String, Value, i32) {
    let out = nilflow().args(args).args(["--format", "json"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{args:?}: {e}\n{text}"));
    (text, v, out.status.code().unwrap())
}

#[test]
fn bracket_matches_right_invariant() {
    let out = nilflow().args(["bracket", "h3", "right:X1", "right:Y1"]).assert().success();
    let s = String::from_utf8(out.get_output().stdout.clone()).unwrap();
    assert!(s.trim_end().ends_with("= right:Z"), "{s}");
}

#[test]
fn abelian_file_derivations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("custom.alg");
    fs::write(&path, "name = \"r4\"\ndim = 4\n").unwrap();
    let (_, v, code) = json_of(&["derivations", "--file", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["dim"], 6);
    assert_eq!(v["basis"].as_array().unwrap().len(), 6);
}

#[test]
fn json_reports_round_trip() {
    let runs: &[&[&str]] = &[
        &["catalog"],
        &["catalog", "n6_19(1)"],
        &["check", "n3", "right:e2", "lin:e1"],
        &["derivations", "h5"],
        &["killing2", "n23"],
        &["bracket", "n3", "right:e1", "right:e2"],
        &["involution", "n6_26"],
        &["independence", "n2", "--samples", "20"],
        &["geodesic", "h3", "--t", "0.5", "--y0", "1,-1/2,2"],
        &["quotient", "h3", "--samples", "20"],
        &["verify-paper", "--entries", "h3", "--samples", "20"],
    ];
    for args in runs {
        let (text, v, _) = json_of(args);
        let again = nilflow::report::canonical_json(&v).unwrap();
        assert_eq!(again, text, "{args:?}");
        assert_eq!(nilflow::report::rerender(&text).unwrap(), text);
    }
}

#[test]
fn rationals_are_strings() {
    let (_, v, _) = json_of(&["catalog", "n6_19(1/2)"]);
    let br = &v["algebra"]["brackets"];
    assert!(br.as_array().unwrap().iter().any(|b| b[3] == "1/2"), "{br}");
}

#[test]
fn exit_codes_follow_verdicts() {
    let (_, v, code) = json_of(&["involution", "n1"]);
    assert_eq!(code, 1);
    assert_eq!(v["passed"], false);
    let (_, v, code) = json_of(&["involution", "n3"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
    let (_, v, code) = json_of(&["check", "h3", "lin:X1"]);
    assert_eq!(code, 1);
    assert_eq!(v["integrals"][0]["first_integral"], false);
}

#[test]
fn input_errors_exit_two() {
    nilflow()
        .args(["check", "n9"])
        .assert()
        .code(2)
        .stderr(predicates::str::contains("unknown algebra"));
    nilflow().args(["check", "n6_19"]).assert().code(2);
    nilflow().args(["bracket", "h3", "right:Q", "E"]).assert().code(2);
    nilflow().args(["bracket", "h3", "E"]).assert().code(2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "name = \"x\"\ndim = 3\nbrackets = [[1, 2, 3, \"1\"], [1, 2, 3, \"2\"]]\n").unwrap();
    nilflow().args(["derivations", "--file", bad.to_str().unwrap()]).assert().code(2);
    nilflow().args(["frobnicate"]).assert().code(2);
    nilflow().args(["derivations", "h3", "--format", "csv"]).assert().success();
    nilflow().args(["bracket", "h3", "E", "E", "--format", "csv"]).assert().code(2);
}

#[test]
fn export_and_reload() {
    let dir = tempfile::tempdir().unwrap();
    nilflow()
        .args(["catalog", "--export", dir.path().to_str().unwrap()])
        .assert()
        .success();
    let file = dir.path().join("n6_22_1.toml");
    assert!(file.exists());
    let (_, from_file, _) = json_of(&["derivations", "--file", file.to_str().unwrap()]);
    let (_, from_name, _) = json_of(&["derivations", "n6_22(1)"]);
    assert_eq!(from_file["basis"], from_name["basis"]);
    assert_eq!(from_file["dim"], 2);
}

#[test]
fn geodesic_csv_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let out = nilflow()
        .args(["geodesic", "n3", "--t", "0.1", "--dt", "0.01", "--format", "csv"])
        .args(["--csv-out", path.to_str().unwrap()])
        .assert()
        .success();
    let stdout = String::from_utf8(out.get_output().stdout.clone()).unwrap();
    assert_eq!(stdout.lines().next().unwrap(), "t,w1,w2,w3,w4,w5,y1,y2,y3,y4,y5");
    assert_eq!(stdout.lines().count(), 12);
    assert_eq!(fs::read_to_string(path).unwrap(), stdout);
}

#[test]
fn custom_lattice_breaks_invariance() {
    let (_, v, code) = json_of(&[
        "quotient", "h3", "--scales", "1,1/2,1", "--chart", "matrix", "--integrals", "quot(right:X1 / lin:Z)",
        "--samples", "20",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["checks"][0]["shift_multiples"][0], "0");
    assert_eq!(v["checks"][0]["shift_multiples"][1], "1/2");
}

#[test]
fn verify_paper_subset() {
    let (_, v, code) = json_of(&["verify-paper", "--entries", "h3", "n3", "n6_26", "--samples", "50"]);
    assert_eq!(code, 0);
    assert_eq!(v["entries"].as_array().unwrap().len(), 3);
    let (_, v, code) = json_of(&["verify-paper", "--entries", "n6_20", "--samples", "20", "--skip-iso"]);
    assert_eq!(code, 1);
    assert_eq!(v["entries"][0]["passed"], false);
}
