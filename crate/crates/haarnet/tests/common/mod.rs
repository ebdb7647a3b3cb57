#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haarnet"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("haarnet binary runs")
}

pub fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "haarnet {args:?} failed with {:?}\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A small point-pattern TU dataset, returning `(dir, name)`.
pub fn point_dataset(root: &Path, per_class: usize, seed: u64) -> (PathBuf, String) {
    let dir = root.join(format!("pp{seed}"));
    ok(&[
        "gen-pointpattern",
        "--out",
        s(&dir),
        "--per-class",
        &per_class.to_string(),
        "--min-points",
        "20",
        "--max-points",
        "40",
        "--hd-sweeps",
        "50",
        "--seed",
        &seed.to_string(),
    ]);
    (dir, "PointPattern-phi0.30".to_string())
}

/// Prepare an archive of `point_dataset`.
pub fn point_archive(root: &Path, per_class: usize) -> PathBuf {
    let (dir, name) = point_dataset(root, per_class, 1);
    let out = root.join("pp.hca");
    ok(&["prepare", "--tu", s(&dir), "--name", &name, "--out", s(&out)]);
    out
}
