use std::path::PathBuf;
use std::process::{Command, Output};

fn lops(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lops"))
        .args(args)
        .env("LO_THREADS", "4")
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn analyze_ens_reports_exact_sigma() {
    let o = lops(&["analyze", &data("ens.lops"), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["sigma0"], "24/23");
    assert_eq!(v["factorization"]["factor_count"], 24);
    assert_eq!(v["determinant"]["degree"], 44);
}

#[test]
fn analyze_wave_is_sobolev() {
    let o = lops(&["analyze", &data("wave.lops")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sigma0 sobolev"));
}

#[test]
fn broken_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.lops");
    std::fs::write(&path, "system broken\nunknown u multiplicity 1 index\n").unwrap();
    let o = lops(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let missing = lops(&["analyze", "/nonexistent/x.lops"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn bad_flags_exit_two() {
    for args in [
        vec!["cones", "--factor", "nope"],
        vec!["cones", "--n", "0"],
        vec!["cones", "--tol", "0"],
        vec!["cones", "--tau", "1,0,0"],
        vec!["analyze", &"x", "--csv"],
        vec!["lab", "run", "--nodes", "4"],
        vec!["lab", "run", "--refine", "0"],
        vec!["frobnicate"],
    ] {
        assert_eq!(lops(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn failing_check_exits_one() {
    // a system whose determinant cannot be hyperbolic in dt
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("elliptic.lops");
    std::fs::write(
        &path,
        "system elliptic\nunknown phi multiplicity 1 index 2\nequation lap multiplicity 1 index 0\n\
         entry lap[0] phi[0] := xi0^2 + xi1^2 + xi2^2 + xi3^2\ndepends lap on phi order 1\n",
    )
    .unwrap();
    let o = lops(&["analyze", path.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["pass"], false);
}

#[test]
fn light_cone_roots_are_unit() {
    let o = lops(&["cones", "--factor", "light", "--n", "100", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 100);
    for r in rows {
        let roots: Vec<f64> = r["roots"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] + 1.0).abs() < 1e-12 && (roots[1] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn p1_speeds_bounded_by_light() {
    let o = lops(&["cones", "--factor", "P1", "--n", "10000", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["rows"].as_array().unwrap().len(), 10000);
    assert!(v["max_abs_root"].as_f64().unwrap() <= 1.0 + 1e-9);
    assert_eq!(v["inside_light_cone"], true);
}

#[test]
fn cones_csv_is_deterministic() {
    let a = lops(&["cones", "--factor", "P2", "--n", "50", "--q", "3", "--F", "2", "--seed", "9", "--csv"]);
    let b = lops(&["cones", "--factor", "P2", "--n", "50", "--q", "3", "--F", "2", "--seed", "9", "--csv"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("eta0,eta1,eta2,eta3,s1,s2"));
    assert_eq!(text.lines().count(), 51);
}

#[test]
fn lab_refinement_table() {
    let o = lops(&["lab", "run", "--refine", "2", "--json"]);
    let v = json(&o);
    for row in v["rows"].as_array().unwrap() {
        let ratio = row["levels"][1]["ratio"].as_f64().unwrap();
        match row["kind"].as_str().unwrap() {
            "identity" => assert!((3.5..=4.5).contains(&ratio), "{row}"),
            _ => assert!(!(3.5..=4.5).contains(&ratio), "{row}"),
        }
    }
    // the only failures are the pointwise sign statements
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["sign:shear-square-nonpositive", "sign:entropy-production"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn lab_outputs_are_byte_identical_and_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let (p1, p2) = (dir.path().join("a.json"), dir.path().join("b.json"));
    lops(&["lab", "run", "--json", "--out", p1.to_str().unwrap()]);
    lops(&["lab", "run", "--json", "--out", p2.to_str().unwrap()]);
    let (a, b) = (std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let csv = lops(&["lab", "run", "--csv"]);
    assert!(stdout(&csv).starts_with("identity,kind,h,residual,ratio"));
}

#[test]
fn positive_vartheta_passes_the_entropy_sign() {
    let o = lops(&["lab", "run", "--vartheta", "1", "--json"]);
    let v = json(&o);
    assert_eq!(v["signs"]["entropy_nonnegative"], true);
    assert_eq!(v["signs"]["shear_square_nonpositive"], false);
}

#[test]
fn thread_cap_does_not_change_output() {
    let one = Command::new(env!("CARGO_BIN_EXE_lops"))
        .args(["lab", "run", "--json"])
        .env("LO_THREADS", "1")
        .output()
        .unwrap();
    let many = lops(&["lab", "run", "--json"]);
    assert_eq!(one.stdout, many.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_lops"))
        .args(["lab", "run"])
        .env("LO_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn ens_verify_q_zero_reports_degeneration() {
    let o = lops(&[
        "ens", "verify", "--q", "0", "--skip-symbolic", "--samples", "1", "--directions", "100", "--json",
    ]);
    let v = json(&o);
    let d = &v["degeneration"];
    assert_eq!(d["p_identity_holds"], true);
    assert_eq!(d["factor_count_q0"], 24);
    assert_eq!(d["sigma0_q0"], "24/23");
    assert_eq!(v["factorization"]["sigma0"], "24/23");
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    // q = 0 is outside the admissible range of the state
    assert_eq!(failed, vec!["state"]);
    assert_eq!(o.status.code(), Some(1));
}
