use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peakfn"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

const G2: &str = r#"{"type":"symmetrized_polydisc","n":2}"#;

#[test]
fn peak_on_boundary_passes() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g2.json", G2);
    let out = run(dir.path(), &["peak", "--domain", "g2.json", "--point", "2,1", "--samples", "2000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["exit_code"], 0);
    assert_eq!(r["result"]["verification"]["verdict"], "Pass");
}

#[test]
fn classify_exterior_point() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g2.json", G2);
    let out = run(dir.path(), &["classify", "--domain", "g2.json", "--point", "3,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["kind"], "Exterior");
}

#[test]
fn malformed_domain_reports_field_path() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "bad.json", r#"{"type":"reinhardt","pieces":[{"A":[[1]],"b":["x"]}],"meets_axes":[false]}"#);
    let out = run(dir.path(), &["classify", "--domain", "bad.json", "--point", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let text = format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
    assert!(text.contains("pieces[0].b[0]"), "{text}");
}

#[test]
fn saved_report_replays() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g2.json", G2);
    let first = run(dir.path(), &["peak", "--domain", "g2.json", "--point", "2,1", "--samples", "1000", "--out", "r.json"]);
    assert_eq!(first.status.code(), Some(0));
    // The replay must not depend on the input file still being present.
    std::fs::remove_file(dir.path().join("g2.json")).unwrap();
    let out = run(dir.path(), &["verify", "--report", "r.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(report(&out)["reproduced"], true);
}

#[test]
fn transfer_onto_slit_disc_fails() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "sq.json", r#"{"kind":"principal_square"}"#);
    write(dir.path(), "half.json", r#"{"type":"half_disc"}"#);
    write(dir.path(), "slit.json", r#"{"type":"slit_disc"}"#);
    write(
        dir.path(),
        "phi.json",
        r#"{"function":{"node":"quotient","num":{"node":"constant","value":[1,0]},"den":{"node":"sum","terms":[{"node":"constant","value":[1,-0.5]},{"node":"coordinate","index":0}]}},"point":[[0,0.5]]}"#,
    );
    let out = run(
        dir.path(),
        &["transfer", "--map", "sq.json", "--source-peak", "phi.json", "--domain", "slit.json", "--source-domain", "half.json", "--samples", "2000"],
    );
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn csv_has_header_and_rows() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g2.json", G2);
    let out = run(dir.path(), &["peak", "--domain", "g2.json", "--point", "2,1", "--samples", "500", "--csv", "s.csv", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "re_1,im_1,re_2,im_2,abs_value");
    assert!(lines.count() >= 500);
}

#[test]
fn usage_error_exits_2() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["classify"]);
    assert_eq!(out.status.code(), Some(2));
}
