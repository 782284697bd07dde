//! Exit codes and output of the command-line tool.

use std::process::{Command, Output};

use jetcalc::corpus::bundled_dir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetcalc")).args(args).output().expect("spawn jetcalc")
}

fn corpus(name: &str) -> String {
    bundled_dir().join(name).display().to_string()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn verify_exit_codes() {
    let g = corpus("gkdv.toml");
    assert_eq!(code(&["verify", &g, "--param", "p=2", "--multiplier", "u"]), 0);
    assert_eq!(code(&["verify", &g, "--param", "p=2", "--multiplier", "u_x"]), 1);
    assert_eq!(code(&["verify", &g, "--param", "p=2", "--multiplier", "u +"]), 2);
    assert_eq!(code(&["verify", &g, "--param", "p=1", "--pair", "T=u", "X=u^2/2 + u_xx", "Q=1"]), 0);
    assert_eq!(code(&["verify", &g]), 0);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&["bogus"]), 2);
    assert_eq!(code(&["verify", "/nonexistent/system.toml"]), 2);
    let dir = std::env::temp_dir().join(format!("jetcalc-empty-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    assert_eq!(code(&["corpus", dir.to_str().unwrap()]), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn solve_reports_dimension() {
    let out = run(&["--json", "solve", &corpus("gkdv.toml"), "--param", "p=2", "--degree", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let n = v.as_object().and_then(|o| o.values().find_map(|x| x.as_array().map(|a| a.len())));
    assert_eq!(n, Some(4), "{v}");
}

#[test]
fn build_methods() {
    let g = corpus("gkdv.toml");
    let q3 = "u_xx + u^(p+1)/(p+1)";
    assert_eq!(code(&["build", &g, "--multiplier", q3]), 0);
    assert_eq!(code(&["build", &g, "--param", "p=3", "--multiplier", q3, "--method", "scaling"]), 0);
    assert_eq!(code(&["build", &g, "--param", "p=2", "--multiplier", "1", "--method", "scaling"]), 1);
    assert_eq!(code(&["build", &g, "--param", "p=2", "--multiplier", "u", "--method", "direct", "--degree", "4"]), 0);
    assert_eq!(code(&["build", &g, "--param", "p=2", "--multiplier", "u", "--method", "direct", "--degree", "3"]), 1);
    let out = run(&["build", &g, "--param", "p=2", "--multiplier", "u"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("[[current]]"));
}

#[test]
fn operators_and_helmholtz() {
    assert_eq!(code(&["euler", "u*u_xx"]), 0);
    assert_eq!(code(&["frechet", "u^2*u_x", "--direction", "u_x"]), 0);
    assert_eq!(code(&["helmholtz", &corpus("pgkdv.toml")]), 0);
    assert_eq!(code(&["helmholtz", &corpus("gkdv.toml")]), 1);
}

#[test]
fn bundled_corpus() {
    assert_eq!(code(&["corpus"]), 0);
}
