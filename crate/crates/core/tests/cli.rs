use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

use bifree::cumulant::CumulantSpec;

fn bifree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bifree")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    static N: AtomicUsize = AtomicUsize::new(0);
    let dir = std::env::temp_dir().join(format!("bifree-cli-{}-{}", std::process::id(), N.fetch_add(1, Ordering::SeqCst)));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const PAIR_SPEC: &str = r#"{"n":1,"m":1,"entries":[
  {"pattern":[["l",1],["l",1]],"value":"1"},{"pattern":[["r",1],["r",1]],"value":"1"},
  {"pattern":[["l",1],["r",1]],"value":"1/2"},{"pattern":[["r",1],["l",1]],"value":"1/2"}]}"#;

#[test]
fn gaussian_fisher_of_the_pair() {
    let o = bifree(&["gaussian", "fisher", "--matrix", "[[1,0.5],[0.5,1]]"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "2.66666666667");
    let o = bifree(&["--format", "json", "gaussian", "fisher", "--matrix", "[[1,1],[1,1]]"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["fisher"], "inf");
}

#[test]
fn lattice_count() {
    let o = bifree(&["--format", "json", "lattice", "--chi", "lrlr"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], 14);
    assert_eq!(v["partitions"].as_array().unwrap().len(), 14);
    assert_eq!(v["mobius_0_to_1"], -5);
    assert_eq!(v["chi"], "lrlr");
}

#[test]
fn dq_bipartite_example() {
    let o = bifree(&["dq", "--mode", "bipartite", "--side", "left", "--index", "1", "X1 X1 Y1"]);
    assert_eq!(stdout(&o).trim(), "Y1 ⊗ X1 + X1 Y1 ⊗ 1");
    let o = bifree(&["dq", "--side", "right", "--flipped", "--index", "1", "Y1 x1 Y1 x2 y1 x1 y2 Y1 x3"]);
    assert_eq!(
        stdout(&o).trim(),
        "1 ⊗ x1 Y1 x2 y1 x1 y2 Y1 x3 + Y1 ⊗ x1 x2 y1 x1 y2 Y1 x3 + Y1 Y1 y1 y2 ⊗ x1 x2 x1 x3"
    );
}

#[test]
fn exit_codes() {
    let o = bifree(&["dq", "X1 +"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty() && !o.stderr.is_empty());
    assert_eq!(bifree(&["dq", "X1 + - X2"]).status.code(), Some(2));
    assert_eq!(bifree(&["dq", "3/4*"]).status.code(), Some(2));
    assert_eq!(stdout(&bifree(&["dq", "-X1 X1"])).trim(), "-1 ⊗ X1 - X1 ⊗ 1");
    assert_eq!(bifree(&["lattice", "--chi", "lxr"]).status.code(), Some(2));
    assert_eq!(bifree(&["lattice", "--bogus"]).status.code(), Some(2));
    assert_eq!(bifree(&["gaussian", "fisher", "--matrix", "[[1,2],[2,1]]"]).status.code(), Some(2));
    let o = bifree(&["gaussian", "entropy", "--method", "quadrature", "--matrix", "[[1,1],[1,1]]"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn out_refuses_to_overwrite() {
    let p = scratch("f.txt");
    std::fs::write(&p, "keep").unwrap();
    let ps = p.to_str().unwrap();
    let o = bifree(&["--out", ps, "gaussian", "fisher", "--matrix", "[[2]]"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(std::fs::read_to_string(&p).unwrap(), "keep");
    assert!(bifree(&["--out", ps, "--force", "gaussian", "fisher", "--matrix", "[[2]]"]).status.success());
    assert_eq!(std::fs::read_to_string(&p).unwrap().trim(), "0.5");
}

#[test]
fn moment_and_cumulant_files_round_trip() {
    let spec = scratch("spec.json");
    std::fs::write(&spec, PAIR_SPEC).unwrap();
    let table = scratch("table.json");
    let o = bifree(&["--format", "json", "--out", table.to_str().unwrap(), "moments", "--spec", spec.to_str().unwrap(), "--max-degree", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let back = scratch("spec2.json");
    let o = bifree(&["--format", "json", "--out", back.to_str().unwrap(), "cumulants", "--table", table.to_str().unwrap(), "--max-len", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a = CumulantSpec::from_json(PAIR_SPEC).unwrap();
    let b = CumulantSpec::from_json(&std::fs::read_to_string(&back).unwrap()).unwrap();
    assert_eq!(a.entries().collect::<Vec<_>>(), b.entries().collect::<Vec<_>>());
    let o = bifree(&["moments", "--table", table.to_str().unwrap(), "--word", "X1 Y1 X1 Y1"]);
    assert_eq!(stdout(&o).trim(), "X1 Y1 X1 Y1\t5/4");
    let o = bifree(&["cumulants", "--spec", spec.to_str().unwrap(), "--chi", "lr", "--args", "X1", "Y1"]);
    assert_eq!(stdout(&o).trim(), "1/2");
}

#[test]
fn conjugate_check_reports() {
    let spec = scratch("spec.json");
    std::fs::write(&spec, PAIR_SPEC).unwrap();
    let s = spec.to_str().unwrap();
    let o = bifree(&["--format", "json", "conjugate-check", "--spec", s, "--xi", "4/3*X1 - 2/3*Y1", "--max-degree", "5"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    let o = bifree(&["conjugate-check", "--spec", s, "--xi", "X1"]);
    assert!(stdout(&o).starts_with("fail at Y1"));
}

#[test]
fn grid_files_round_trip() {
    let grid = scratch("mu.json");
    let g = grid.to_str().unwrap();
    assert!(bifree(&["--out", g, "bipartite", "make-semicircular", "--c", "0.5", "--nodes", "64"]).status.success());
    let from_file = stdout(&bifree(&["bipartite", "fisher", "--grid", g]));
    let direct = stdout(&bifree(&["bipartite", "fisher", "--c", "0.5", "--nodes", "64"]));
    assert_eq!(from_file, direct);
    let o = bifree(&["--format", "csv", "bipartite", "conjugate", "--grid", g]);
    let csv = stdout(&o);
    assert!(csv.starts_with("x,y,density,xi_l,xi_r,masked\n"));
    assert_eq!(csv.lines().count(), 1 + 64 * 64);
}

#[test]
fn gaussian_subcommands() {
    let m = "[[1,0.5],[0.5,1]]";
    let o = bifree(&["gaussian", "dimension", "--matrix", "[[1,1],[1,1]]"]);
    assert_eq!(stdout(&o).trim(), "1");
    let o = bifree(&["gaussian", "entropy", "--matrix", m]);
    let closed: f64 = stdout(&o).trim().parse().unwrap();
    let o = bifree(&["gaussian", "entropy", "--method", "quadrature", "--matrix", m]);
    let quad: f64 = stdout(&o).trim().parse().unwrap();
    assert!((closed - quad).abs() < 1e-6);
    let o = bifree(&["--format", "csv", "gaussian", "moments", "--matrix", m, "--n", "1", "--pattern", "X1 Y1 X1 Y1", "--depth", "4"]);
    assert_eq!(stdout(&o), "pattern,value,fock\nX1 Y1 X1 Y1,1.25,1.25\n");
}

#[test]
fn selftest_passes() {
    let o = bifree(&["selftest"]);
    let out = stdout(&o);
    assert!(o.status.success(), "{}", out);
    assert!(out.lines().count() >= 20 && out.lines().all(|l| l.starts_with("PASS ")));
}
