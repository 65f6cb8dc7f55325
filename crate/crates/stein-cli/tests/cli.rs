use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn stein(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stein")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn weight_four_identity_passes() {
    let out = stein(&["st", fixture("li22_weight4.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["weight"], 4);
}

#[test]
fn perturbed_identity_fails_with_exit_one() {
    let out = stein(&["st", fixture("li22_weight4_broken.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "FAIL");
}

#[test]
fn empty_identity_is_trivially_true() {
    let out = stein(&["st", fixture("empty_identity.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn io_and_parse_errors_exit_two() {
    assert_eq!(stein(&["reduce", "/nonexistent/input.json"]).status.code(), Some(2));
    assert_eq!(stein(&["verify", "nosuchsuite"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "[[1, 0], [0").unwrap();
    assert_eq!(stein(&["reduce", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, r#"[{"coeff": "1/0", "apartment": [[1, 0], [0, 1]]}]"#).unwrap();
    assert_eq!(stein(&["reduce", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(stein(&["symbol", "L", "[[1, 2], [2, 4]]"]).status.code(), Some(2));
}

#[test]
fn reduce_detects_three_term_relation() {
    let out = stein(&["reduce", fixture("reduce_zero.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["zero"], true);
    assert_eq!(v["oracle_agrees"], true);
    let out = stein(&["reduce", fixture("reduce_det5.json").to_str().unwrap()]);
    assert_eq!(json(&out)["zero"], false);
}

#[test]
fn random_suites_pass_and_are_reproducible() {
    for suite in ["shuffle", "dihedral", "cobracket", "duality", "ashrudolph"] {
        let a = stein(&["verify", suite, "--seed", "11", "--cases", "4"]);
        let b = stein(&["verify", suite, "--seed", "11", "--cases", "4"]);
        assert_eq!(a.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&a.stdout));
        assert_eq!(a.stdout, b.stdout, "{suite} not reproducible");
        let v = json(&a);
        assert_eq!(v["seed"], 11);
        let idx: Vec<u64> = v["cases"].as_array().unwrap().iter().map(|c| c["index"].as_u64().unwrap()).collect();
        assert_eq!(idx, vec![0, 1, 2, 3]);
    }
    let a = stein(&["verify", "shuffle", "--seed", "11", "--cases", "2"]);
    let c = stein(&["verify", "shuffle", "--seed", "12", "--cases", "2"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn corrupted_fixture_reports_witness() {
    let out = stein(&["verify", "duality", "--fixture", fixture("duality_corrupted.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["cases"][0]["passed"], true);
    assert_eq!(v["cases"][1]["passed"], false);
    let w = &v["cases"][1]["failures"][0]["witness"];
    assert!(!w.as_array().unwrap().is_empty());
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sym.json");
    let out = stein(&["symbol", "I", "[[1, 0], [1, 1]]", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["kind"], "I");
    assert_eq!(v["cycle"], true);
    assert!(v["terms"].as_u64().unwrap() > 0);
}

#[test]
fn fourier_studies_write_csv() {
    let out = stein(&["fourier", fixture("bernoulli2.json").to_str().unwrap(), "--box", "1000", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["seed", "n", "x", "M", "re_error", "im_error"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| &r[0] == "3"));
    let last: f64 = rows[2][4].parse().unwrap();
    assert!(last.abs() < 1e-6);

    let out = stein(&["fourier", fixture("shuffle11.json").to_str().unwrap(), "--box", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains(",true,"));
}
