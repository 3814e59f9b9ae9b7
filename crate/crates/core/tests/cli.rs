use std::path::Path;
use std::process::{Command, Output};

use qkdv::DiffPoly;

fn qkdv(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkdv"))
        .args(args)
        .env("QKDV_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn first_line(o: &Output) -> String {
    stdout(o).lines().next().unwrap_or_default().to_string()
}

#[test]
fn hamiltonian_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = qkdv(dir.path(), &["hamiltonian", "-d", "1"]);
    assert!(o.status.success());
    assert_eq!(first_line(&o), "u^3/6 + (-i*hbar)*u2/12");
    assert_eq!(
        first_line(&qkdv(dir.path(), &["hamiltonian", "-d", "-1"])),
        "u"
    );
    assert!(dir.path().join("wang").join("H_1.json").exists());

    let o = qkdv(dir.path(), &["hamiltonian", "-d", "1", "--format", "json"]);
    let p: DiffPoly = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(p, qkdv::wang_hamiltonian(1).unwrap().density);
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        qkdv(dir.path(), &["hamiltonian", "-d", "-2"]).status.code(),
        Some(2)
    );
    let o = qkdv(dir.path(), &["intersect", "-d", "1", "-g", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("d + 2 - 2g"));
    assert_eq!(
        qkdv(dir.path(), &["commute", "--d1", "-3", "--d2", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn commute_examples() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        ["--d1", "1", "--d2", "2", "--mmax", "6"],
        ["--d1", "-1", "--d2", "5", "--mmax", "8"],
        ["--d1", "1", "--d2", "1", "--mmax", "3"],
    ] {
        let mut all = vec!["commute"];
        all.extend(args);
        let o = qkdv(dir.path(), &all);
        assert!(o.status.success(), "{args:?}");
        assert!(first_line(&o).starts_with("pass"));
    }
}

#[test]
fn reconstruct_examples() {
    let dir = tempfile::tempdir().unwrap();
    for (d, g) in [("2", "1"), ("1", "2"), ("3", "2")] {
        let o = qkdv(dir.path(), &["reconstruct", "-d", d, "-G", g, "--compare"]);
        assert!(o.status.success(), "d = {d}, G = {g}");
        assert!(stdout(&o).contains("equal to H_d"));
    }
    let o = qkdv(
        dir.path(),
        &["reconstruct", "-d", "1", "-G", "2", "--format", "json"],
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ansatz_dims"], serde_json::json!([0, 0]));
    assert_eq!(v["homogeneous_kernel_dim"], 0);
    // too few sectors to pin the answer down
    let o = qkdv(
        dir.path(),
        &["reconstruct", "-d", "2", "-G", "1", "--mmax", "0"],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn intersect_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = qkdv(dir.path(), &["intersect", "-d", "1", "-g", "1"]);
    assert!(stdout(&o).contains("falling: m(m-1)/12"));
    let o = qkdv(dir.path(), &["intersect", "-d", "1", "-g", "0"]);
    assert!(stdout(&o).contains("power: 1\n"));
    let o = qkdv(dir.path(), &["intersect", "-d", "2", "-g", "1"]);
    assert!(stdout(&o).contains("power: (m1^2-m1+m2^2-m2+m1*m2)/12"));
    let o = qkdv(
        dir.path(),
        &["intersect", "-d", "2", "-g", "1", "--format", "latex"],
    );
    assert!(stdout(&o).starts_with("2 & 1 & 2 & $"));
}

#[test]
fn verify_all_is_deterministic_and_survives_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify-all", "--level", "quick", "--format", "json"];
    let a = qkdv(dir.path(), &args);
    assert!(a.status.success());
    let b = qkdv(dir.path(), &args);
    assert_eq!(a.stdout, b.stdout);
    std::fs::write(dir.path().join("wang").join("H_2.json"), "garbage").unwrap();
    let c = qkdv(dir.path(), &args);
    assert!(c.status.success());
    assert_eq!(a.stdout, c.stdout);
    let other = tempfile::tempdir().unwrap();
    let d = qkdv(other.path(), &args);
    assert_eq!(a.stdout, d.stdout);
}

#[test]
fn cache_dir_flag_takes_precedence() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let flag = flag_dir.path().to_str().unwrap();
    let o = qkdv(
        env_dir.path(),
        &["hamiltonian", "-d", "3", "--cache-dir", flag],
    );
    assert!(o.status.success());
    assert!(flag_dir.path().join("wang").join("H_3.json").exists());
    assert!(!env_dir.path().join("wang").exists());
}
