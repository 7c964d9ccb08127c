use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_posetinv"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("posetinv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn fork_embeds_once_into_the_diamond() {
    let o = run(&["embeddings", "X3fork", "diamond", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], 1);
}

#[test]
fn decompose_zero_map() {
    let m = tmp("zero.json", r#"{"dims": {"1": 1, "2": 1}}"#);
    let o = run(&[
        "decompose",
        "--template",
        "X2",
        m.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["I{1}"], 1);
    assert_eq!(v["I{2}"], 1);
    assert_eq!(v["I{1,2}"], 0);
}

#[test]
fn kan_theta_image_is_a_rectangle() {
    let s = tmp("sincere.json", r#"{"sincere": true}"#);
    let o = run(&[
        "kan",
        "--template",
        "X2",
        "--poset",
        "grid3x3",
        "--map",
        "1=1,1;2=2,3",
        "--which",
        "theta-image",
        s.to_str().unwrap(),
        "--format",
        "grid",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0 0 0\n1 1 1\n1 1 1\n");
}

#[test]
fn signed_barcode_json() {
    let m = tmp(
        "sq.json",
        r#"{"poset": {"grid": [2, 2]}, "hook": ["1,1", "2,2"]}"#,
    );
    let o = run(&[
        "signed-barcode",
        "--module",
        m.to_str().unwrap(),
        "--basis",
        "rectangles",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["positive"].as_array().unwrap().len(), 2);
    assert_eq!(v["negative"].as_array().unwrap().len(), 1);
}

#[test]
fn relproj_writes_files() {
    let dir = std::env::temp_dir().join(format!("posetinv-relproj-{}", std::process::id()));
    let o = run(&[
        "relproj",
        "--template",
        "X2",
        "--poset",
        "grid2x2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 9);
}

#[test]
fn exit_codes() {
    let bad = tmp("bad.json", "{\n  \"dims\": [\n}");
    let o = run(&["invariant", "dim", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let nc = tmp(
        "noncomm.json",
        r#"{"poset": {"grid": [2, 2]}, "dims": {"1,1": 1, "1,2": 1, "2,1": 1, "2,2": 1},
        "maps": {"1,1<1,2": [[1]], "1,1<2,1": [[1]], "1,2<2,2": [[1]], "2,1<2,2": [[2]]}}"#,
    );
    let o = run(&["invariant", "rank", nc.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pmod.commutativity"));
    let o = run(&["paper-suite", "--criterion", "4"]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&["paper-suite", "--criterion", "5", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all checks passed"));
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let a = bin()
        .args(["validate", "X3_fork", "--trials", "30", "--seed", "9"])
        .env("POSETINV_THREADS", "1")
        .output()
        .unwrap();
    let b = bin()
        .args([
            "validate",
            "X3_fork",
            "--trials",
            "30",
            "--seed",
            "9",
            "--threads",
            "4",
        ])
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn prime_field_flag() {
    let m = tmp(
        "two.json",
        r#"{"poset": "X2", "dims": {"1": 1, "2": 1}, "maps": {"1<2": [[2]]}}"#,
    );
    let q = run(&[
        "decompose",
        "--template",
        "X2",
        m.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let g2 = run(&[
        "--field",
        "gf:2",
        "decompose",
        "--template",
        "X2",
        m.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let vq: serde_json::Value = serde_json::from_slice(&q.stdout).unwrap();
    let v2: serde_json::Value = serde_json::from_slice(&g2.stdout).unwrap();
    assert_eq!(vq["I{1,2}"], 1);
    assert_eq!(v2["I{1,2}"], 0);
}
