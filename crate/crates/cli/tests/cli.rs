use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cgf_core::approx_group::build_pi_delta;
use cgf_core::approx_truncated::{inverse_transform, TransformParams};
use cgf_core::ccgf::SFreePolyhedron;
use cgf_core::{rat, CutFunction, PwlPeriodic, Rational};
use serde_json::Value;
use tempfile::TempDir;

fn cgf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cgf")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn put(dir: &TempDir, name: &str, f: impl Into<CutFunction>) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, serde_json::to_string_pretty(&f.into()).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rational_at(v: &Value, path: &[&str]) -> Rational {
    let mut cur = v;
    for k in path {
        cur = &cur[*k];
    }
    cur.as_str().unwrap_or_else(|| panic!("{path:?} is not a string: {cur}")).parse().unwrap()
}

#[test]
fn verify_gmi_is_extreme() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "gmi.json", PwlPeriodic::gmi(&rat(2, 5)).unwrap());
    let o = cgf(&["verify", "--in", s(&f), "--b", "2/5", "--lattice", "z", "--expect-extreme"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("extreme certified: true"));
}

#[test]
fn verify_scaled_gmi_prints_symmetry_witness() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "half.json", PwlPeriodic::gmi(&rat(2, 5)).unwrap().scale(&rat(1, 2)));
    let o = cgf(&["verify", "--in", s(&f), "--b", "2/5"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("symmetry fails at r = "), "{}", stderr(&o));
}

#[test]
fn verify_pi_delta_is_minimal_but_not_certified() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "pd.json", build_pi_delta(&rat(2, 5), &rat(1, 10)).unwrap());
    let rep = dir.path().join("r.json");
    let o = cgf(&["verify", "--in", s(&f), "--b", "2/5", "--report", s(&rep)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("slopes: 3, extreme certified: false"));
    let r: Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(r["result"]["extreme_certified"], Value::Bool(false));
    assert_eq!(r["command"][1], "verify");

    let o = cgf(&["verify", "--in", s(&f), "--b", "2/5", "--expect-extreme"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("3 slopes"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "gmi.json", PwlPeriodic::gmi(&rat(2, 5)).unwrap());
    let out = dir.path().join("o.json");
    assert_eq!(code(&cgf(&["approx-z", "--b", "2/5", "--in", s(&f), "--out", s(&out)])), 2);
    // floats are never accepted
    assert_eq!(code(&cgf(&["verify", "--in", s(&f), "--b", "0.4"])), 2);
    assert_eq!(code(&cgf(&["verify", "--in", "/nonexistent.json", "--b", "2/5"])), 2);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"kind":"periodic","breakpoints":[{"x":0.0,"y":"0"}]}"#).unwrap();
    assert_eq!(code(&cgf(&["verify", "--in", s(&bad), "--b", "2/5"])), 2);
    assert_eq!(code(&cgf(&["verify", "--in", s(&f), "--b", "1"])), 2);
}

#[test]
fn approx_z_writes_verified_output() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "pd.json", build_pi_delta(&rat(2, 5), &rat(1, 10)).unwrap());
    let out = dir.path().join("pistar.json");
    let rep = dir.path().join("report.json");
    let svg = dir.path().join("p.svg");
    let o = cgf(&[
        "approx-z", "--b", "2/5", "--eps", "1/10", "--in", s(&f), "--out", s(&out), "--report", s(&rep),
        "--plot", s(&svg), "--samples", "50", "--csv", "8",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let r: Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert!(rational_at(&r, &["result", "distance_total"]) <= rat(1, 10));
    assert!(rational_at(&r, &["reverification", "distance"]) <= rat(1, 10));
    assert!(rational_at(&r, &["result", "gamma"]).is_positive());
    assert_eq!(r["reverification"]["minimality"]["slope_count"], 2);
    assert!(r["timings_us"]["approximate"].is_u64());

    let pistar: CutFunction = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(pistar.to_quasi().slope_set().len(), 2);
    assert_eq!(fs::read_to_string(&svg).unwrap().matches("<polyline").count(), 2);
    let csv = fs::read_to_string(out.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    assert_eq!(csv.lines().nth(1), Some("0,0"));
}

#[test]
fn approx_zplus_reports_beta_and_interval_distance() {
    let dir = TempDir::new().unwrap();
    // π̄ from gmi(3/4) with d = 2, b = −1/2; the linear part is α = 1
    let (b, d) = (rat(-1, 2), rat(2, 1));
    let params = TransformParams::new(d.clone(), &d * rat(1, 1), b).unwrap();
    let pibar = inverse_transform(&PwlPeriodic::gmi(&rat(3, 4)).unwrap(), &params).unwrap();
    let f = put(&dir, "pibar.json", pibar);
    let out = dir.path().join("pistar.json");
    let rep = dir.path().join("report.json");
    let o = cgf(&[
        "approx-zplus", "--b", "-1/2", "--M", "3", "--eps", "1/10", "--in", s(&f), "--out", s(&out), "--report",
        s(&rep),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(rational_at(&r, &["result", "params", "alpha"]), rat(1, 1));
    assert!(rational_at(&r, &["result", "beta"]).is_positive());
    assert!(rational_at(&r, &["result", "distance_on_interval"]) <= rat(1, 10));
    assert_eq!(r["reverification"]["ok"], Value::Bool(true));
    assert_eq!(r["reverification"]["minimality"]["nonnegative_on_halfline"], Value::Bool(true));
}

#[test]
fn function_json_round_trips_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "pd.json", build_pi_delta(&rat(1, 3), &rat(1, 12)).unwrap());
    let text = fs::read_to_string(&f).unwrap();
    let parsed: CutFunction = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&parsed).unwrap(), text);
}

#[test]
fn plot_marks_pi_delta_breakpoints_and_overlays() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "pd.json", build_pi_delta(&rat(2, 5), &rat(1, 10)).unwrap());
    let g = put(&dir, "gmi.json", PwlPeriodic::gmi(&rat(2, 5)).unwrap());
    let svg = dir.path().join("p.svg");
    assert_eq!(code(&cgf(&["plot", "--in", s(&f), "--samples", "20", "--out", s(&svg)])), 0);
    let text = fs::read_to_string(&svg).unwrap();
    for p in ["(0, 0)", "(1/10, 1/2)", "(3/10, 1/2)", "(2/5, 1)", "(1/2, 1/2)", "(9/10, 1/2)"] {
        assert!(text.contains(&format!("<title>{p}</title>")), "{p}");
    }
    assert_eq!(text.matches("<polyline").count(), 1);

    let o = cgf(&["plot", "--in", s(&f), "--samples", "20", "--out", s(&svg), "--overlay", s(&g)]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_to_string(&svg).unwrap().matches("<polyline").count(), 2);
    assert_eq!(code(&cgf(&["plot", "--in", s(&f), "--samples", "1", "--out", s(&svg)])), 2);
}

#[test]
fn sample_prints_exact_csv() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "gmi.json", PwlPeriodic::gmi(&rat(1, 3)).unwrap());
    let o = cgf(&["sample", "--in", s(&f), "--samples", "4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "x,f(x)\n0,0\n1/4,3/4\n1/2,3/4\n3/4,3/8\n");
}

fn diamond(dir: &TempDir) -> PathBuf {
    let p = dir.path().join("diamond.json");
    fs::write(
        &p,
        r#"{"n":2,"b":["1/2","1/2"],"facets":[["1","1"],["-1","-1"],["1","-1"],["-1","1"]]}"#,
    )
    .unwrap();
    p
}

#[test]
fn ccgf_diamond_classify_extreme_approx() {
    let dir = TempDir::new().unwrap();
    let k = diamond(&dir);
    let o = cgf(&["ccgf", "classify", "--in", s(&k)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let c: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(c["kind"], "quadrilateral");

    let o = cgf(&["ccgf", "extreme", "--in", s(&k)]);
    assert_eq!(code(&o), 1);

    let out = dir.path().join("kt.json");
    let o = cgf(&["ccgf", "approx2d", "--in", s(&k), "--eps", "1/4", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let kt: SFreePolyhedron = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(kt.facets().len(), 4);
    assert_eq!(code(&cgf(&["ccgf", "extreme", "--in", s(&out)])), 0);
}

#[test]
fn ccgf_delta_n_and_certificate() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("d3.json");
    let rep = dir.path().join("r.json");
    let o = cgf(&["ccgf", "delta-n", "--n", "3", "--eps", "1/8", "--out", s(&out), "--report", s(&rep)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(r["result"]["lattice_points"].as_array().unwrap().len(), 4);

    assert_eq!(code(&cgf(&["ccgf", "extreme", "--in", s(&out)])), 1);
    let o = cgf(&["ccgf", "certificate", "--in", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let c: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rational_at(&c, &["eps"]), rat(64, 1075));
}

#[test]
fn ccgf_rejects_malformed_polyhedra() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("k.json");
    fs::write(&p, r#"{"n":2,"b":["1/2","1/2"],"facets":[],"extra":1}"#).unwrap();
    assert_eq!(code(&cgf(&["ccgf", "classify", "--in", s(&p)])), 2);
    fs::write(&p, r#"{"n":2,"b":["1","0"],"facets":[["1","0"]]}"#).unwrap();
    assert_eq!(code(&cgf(&["ccgf", "classify", "--in", s(&p)])), 2);
}
