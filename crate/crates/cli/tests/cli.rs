use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const PAIR: &str = r#"{"schema": 1, "points": [["1","0","0","0"], ["5/3","0","4/3","0"]], "values": ["0","1"]}"#;
const SHARED: &str = r#"{"schema": 1, "points": [["5/3","0","4/3","0"], ["5/3","0","0","4/3"]], "values": ["0","1"]}"#;
const SHARED_NEAR: &str = r#"{"schema": 1,
  "points": [["5/3","0","4/3","0"], ["5/3","0","0","4/3"], ["1","0","0","0"]],
  "values": ["1","1000000000001/1000000000000","0"]}"#;

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn whitney(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_whitney")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn fit_writes_exact_coefficients() {
    let d = Dir::new();
    let data = d.file("pair.json", PAIR);
    let out = d.path("fit.json");
    let o = whitney(&["fit", s(&data), "--family", "ads22-plus", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["status"], "OK");
    assert_eq!(r["extension"]["coeffs"], serde_json::json!(["125/18", "-125/18"]));
    assert_eq!(r["extension"]["ells"], serde_json::json!([2, 3]));
    assert_eq!(r["representation"]["maximal"], true);
}

#[test]
fn vanishing_first_coordinate_exits_2() {
    let d = Dir::new();
    let data = d.file("x.json", r#"{"points": [["0","1","0","0"], ["0","5/3","4/3","0"]], "values": ["0","1"]}"#);
    let out = d.path("fit.json");
    let o = whitney(&["fit", s(&data), "--family", "ads22-plus", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let r = json(&out);
    assert_eq!(r["status"], "NotInGeneralPosition");
    assert!(r["error"].as_str().unwrap().contains("first coordinate"));
}

#[test]
fn constant_values_exit_1() {
    let d = Dir::new();
    let data = d.file("c.json", r#"{"points": [["1","0","0","0"], ["5/3","0","4/3","0"]], "values": [2, 2]}"#);
    let o = whitney(&["fit", s(&data), "--family", "ads22-plus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("constant"));
}

#[test]
fn unreachable_tolerance_exits_3() {
    let d = Dir::new();
    let data = d.file("shared.json", SHARED);
    let o = whitney(&["fit", s(&data), "--family", "ads22-plus"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn check_reports_shared_projection() {
    let d = Dir::new();
    let data = d.file("shared.json", SHARED);
    let out = d.path("diag.json");
    let o = whitney(&["check", s(&data), "--family", "ads22-plus", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("collision: points 1,2 project to (5/3,0)"), "{}", stdout(&o));
    assert_eq!(json(&out)["collisions"][0]["points"], serde_json::json!([1, 2]));
    assert_eq!(fs::read_to_string(&data).unwrap(), SHARED);
}

#[test]
fn check_fails_off_quadric_point() {
    let d = Dir::new();
    let data = d.file("off.json", r#"{"points": [[1, 1, 1, 1]]}"#);
    let o = whitney(&["check", s(&data), "--family", "ads22-plus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL  validation: point 1 is off the quadric: form value 0"), "{}", stdout(&o));
}

#[test]
fn check_passes_clean_dataset() {
    let d = Dir::new();
    let data = d.file(
        "clean.json",
        r#"{"points": [[1, 0, 0, 0], [0, "5/3", "4/3", 0], ["5/3", 0, 0, "4/3"]], "values": [0, 1, 2]}"#,
    );
    let o = whitney(&["check", s(&data), "--family", "ads22-plus"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().count() >= 4);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}

#[test]
fn eval_reproduces_fit_residual_bit_for_bit() {
    let d = Dir::new();
    let data = d.file("data.json", SHARED_NEAR);
    let out = d.path("fit.json");
    let o = whitney(&["fit", s(&data), "--family", "ads22-plus", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let fitted = json(&out)["residual"].as_f64().unwrap();
    assert!(fitted > 0.0 && fitted < 1e-9, "{fitted}");
    let o = whitney(&["eval", s(&out), "--points", s(&data)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ev: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(ev["residual"].as_f64().unwrap().to_bits(), fitted.to_bits());
}

#[test]
fn exact_corrected_fit_takes_original_values() {
    let d = Dir::new();
    let data = d.file("shared.json", SHARED);
    let out = d.path("fit.json");
    let o = whitney(&["fit", s(&data), "--family", "ads22-plus", "--exact-correct", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&out)["extension"]["mode"], "exact-corrected");
    let values = d.path("values.json");
    let o = whitney(&["eval", s(&out), "--points", s(&data), "--out", s(&values)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ev = json(&values);
    assert_eq!(ev["rows"][0]["value"], "0");
    assert_eq!(ev["rows"][1]["value"], "1");
    assert_eq!(ev["residual"], 0.0);
}

#[test]
fn grid_on_hyperboloid_has_4096_rows() {
    let d = Dir::new();
    let data = d.file("h.csv", "x1,x2,x3,y_re,y_im\n0,1,0,1,0\n0,0,1,0,0\n3/4,5/4,0,0,1\n");
    let out = d.path("fit.json");
    let o = whitney(&["fit", s(&data), "--family", "hyperboloid-minus", "--p", "1", "--q", "2", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let grid = d.path("grid.csv");
    let o = whitney(&["eval", s(&out), "--grid", "t=0:2:64", "--grid", "s=circle:64", "--out", s(&grid)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&grid).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,x3,y_re,y_im,error"));
    assert_eq!(lines.clone().count(), 4096);
    assert!(lines.all(|l| l.ends_with(',')), "rows with errors");
}

#[test]
fn float_mode_and_csv_input() {
    let d = Dir::new();
    let data = d.file("h.csv", "x1,x2,x3,y_re,y_im\n0,1,0,1,0\n0,0,1,0,0\n0.75,1.25,0,0,1\n");
    let out = d.path("fit.json");
    let o = whitney(&[
        "fit", s(&data), "--family", "hyperboloid-minus", "--p", "1", "--q", "2", "--mode", "float", "--out", s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&out);
    assert_eq!(r["extension"]["arithmetic"], "float");
    assert!(r["condition"].as_f64().unwrap() >= 1.0);
    assert!(r["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn csv_errors_name_the_line() {
    let d = Dir::new();
    let data = d.file("bad.csv", "x1,y_re\n0,0\n1,1\nfoo,4\n");
    let o = whitney(&["fit", s(&data), "--family", "real-line"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 4, column x1"), "{}", stderr(&o));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let d = Dir::new();
    let data = d.file("line.json", r#"{"points": [[0], [1], [2]], "values": [0, 1, 4]}"#);
    let out = d.path("fit.json");
    let config = d.file(
        "job.json",
        &format!(r#"{{"family": "real-line", "eps": "1/1000", "out": {:?}}}"#, s(&out)),
    );
    let o = whitney(&["fit", s(&data), "--config", s(&config)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&out);
    assert_eq!(r["extension"]["coeffs"], serde_json::json!(["0", "0", "1"]));
    assert_eq!(r["target_eps"], 0.001);
    let o = whitney(&["fit", s(&data), "--config", s(&config), "--mode", "float", "--eps", "1e-6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&out);
    assert_eq!(r["extension"]["arithmetic"], "float");
    assert_eq!(r["target_eps"], 1e-6);
}

#[test]
fn report_summarizes_a_fit() {
    let d = Dir::new();
    let data = d.file("pair.json", PAIR);
    let out = d.path("fit.json");
    whitney(&["fit", s(&data), "--family", "ads22-plus", "--out", s(&out)]);
    let o = whitney(&["report", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("125/18") && text.contains("(maximal)"), "{text}");
    let o = whitney(&["report", s(&out), "--json"]);
    let rep: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["summands"], serde_json::json!([2, 3]));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(whitney(&["fit"]).status.code(), Some(1));
    assert_eq!(whitney(&["eval", "x.json"]).status.code(), Some(1));
    assert_eq!(whitney(&["--help"]).status.code(), Some(0));
}
