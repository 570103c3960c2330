use std::path::PathBuf;
use std::process::{Command, Output};

fn presentation(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presentations").join(name)
}

fn dehnlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dehnlab")).args(args).env_remove("DEHNLAB_JOBS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn area_exact_exits_zero() {
    let z5 = presentation("z5.pres");
    let o = dehnlab(&["area", z5.to_str().unwrap(), "a^10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "area=2 exact=true\n");
}

#[test]
fn non_null_word_exits_one() {
    let z5 = presentation("z5.pres");
    let o = dehnlab(&["area", z5.to_str().unwrap(), "a^3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not null-homotopic"), "{}", stderr(&o));
    assert!(stderr(&o).contains("a^-2"));
}

#[test]
fn upper_bound_exits_two() {
    let p = presentation("z11xz13.pres");
    let o = dehnlab(&["--caps-states", "50", "area", p.to_str().unwrap(), "x^3 y^3 x^-3 y^-3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "area=9 exact=false\n");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(dehnlab(&["area"]).status.code(), Some(1));
    assert_eq!(dehnlab(&["dehn", "--nmax", "3"]).status.code(), Some(1));
    assert_eq!(dehnlab(&["--jobs", "0", "dehn", "--family", "G1", "--nmax", "3"]).status.code(), Some(1));
    assert_eq!(dehnlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn certificate_file_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let d10 = presentation("d10.pres");
    let o = dehnlab(&["area", d10.to_str().unwrap(), "s r^2 s r^-8", "--certificate", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("certificate="));
    let text = std::fs::read_to_string(&cert).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let p = dehnlab::parse_presentation(&std::fs::read_to_string(&d10).unwrap()).unwrap().presentation;
    let (c, target, exact) = dehnlab::AreaCertificate::from_json(&value, &p).unwrap();
    assert!(exact);
    assert!(dehnlab::verify_certificate(&c, &target, &p));
    assert_eq!(c.claimed_area(), 3);
}

#[test]
fn dehn_csv_and_growth_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g1.csv");
    let o = dehnlab(&["dehn", "--family", "G1", "--nmax", "20", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("growth: linear"));
    assert!(stderr(&o).contains("heuristic"));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("n,delta,witness,exact,member\n1,0,,true,\n2,1,a^2,true,p=2\n"));
    let o = dehnlab(&["growth", "--table", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("growth: linear"));
}

#[test]
fn mean_oracle_and_refusal() {
    let o = dehnlab(&["smean", "--family", "G1", "-n", "12", "--oracle"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("smean = 5/1"));
    assert!(stdout(&o).contains("oracle: match"));
    let o = dehnlab(&["mean", "--family", "G1", "-n", "10", "--oracle", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mean"], "25/11");
    let o = dehnlab(&["mean", "--family", "EX24", "-n", "8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("EX24"));
    let o = dehnlab(&["mean", "--family", "G1", "-n", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("undefined"));
    let o = dehnlab(&["smean", "--family", "G1", "-n", "1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn validate_reports_named_checks() {
    let o = dehnlab(&["validate", "--family", "G3", "--param", "p=2,3,5"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for order in ["order 8", "order 27", "order 125"] {
        assert!(s.contains(order), "{s}");
    }
    let o = dehnlab(&["validate", "--family", "EX24", "--param", "p=5", "--param", "k=7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ok   a is null-homotopic"));
    let o = dehnlab(&["validate", "--family", "G1", "--param", "p=4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("4 is not prime"));
}

#[test]
fn census_lists_ball() {
    let z5 = presentation("z5.pres");
    let o = dehnlab(&["census", z5.to_str().unwrap(), "-n", "10", "--format", "csv"]);
    assert_eq!(stdout(&o), "word,length,area\na^5,5,1\na^-5,5,1\na^10,10,2\na^-10,10,2\n");
}

#[test]
fn environment_variables_set_caps() {
    let p = presentation("z11xz13.pres");
    let o = Command::new(env!("CARGO_BIN_EXE_dehnlab"))
        .args(["area", p.to_str().unwrap(), "x^3 y^3 x^-3 y^-3"])
        .env("DEHNLAB_CAPS_STATES", "50")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
