use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_branchgrid"))
        .args(args)
        .env_remove("BRANCHGRID_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn total_rank(json: &str) -> u64 {
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    v["blocks"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|b| b["levels"].as_array().unwrap())
        .map(|l| l["rank"].as_u64().unwrap())
        .sum()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn compute_unknot() {
    let o = run(&[
        "compute", "--knot", "unknot2", "--sheets", "1", "--ring", "f2", "--output", "json",
    ]);
    assert!(o.status.success());
    assert_eq!(total_rank(&stdout(&o)), 2);
}

#[test]
fn compute_json_schema_and_determinism() {
    let args = [
        "compute", "--knot", "trefoil5", "--sheets", "2", "--ring", "z", "--output", "json",
    ];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["knot"], "trefoil5");
    assert_eq!(v["n"], 5);
    assert_eq!(v["m"], 2);
    assert_eq!(v["ring"], "Z");
    for b in v["blocks"].as_array().unwrap() {
        assert!(b["alexander"].as_str().unwrap().contains('/'));
        assert!(b["component"].is_u64());
        for l in b["levels"].as_array().unwrap() {
            assert!(l["level"].is_i64() && l["rank"].is_u64() && l["torsion"].is_array());
        }
    }
}

#[test]
fn cache_hit_matches_cold_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = [
        "compute",
        "--knot",
        "unknot3",
        "--sheets",
        "2",
        "--output",
        "json",
        "--cache-dir",
        d,
    ];
    let cold = run(&args);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let warm = run(&args);
    assert!(cold.status.success() && warm.status.success());
    assert_eq!(cold.stdout, warm.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_branchgrid"))
        .args([
            "compute", "--knot", "unknot3", "--sheets", "2", "--output", "json",
        ])
        .env("BRANCHGRID_CACHE", d)
        .output()
        .unwrap();
    assert_eq!(env.stdout, cold.stdout);
}

#[test]
fn gauge_check() {
    let o = run(&[
        "compute",
        "--knot",
        "unknot3",
        "--sheets",
        "2",
        "--ring",
        "z",
        "--verify-gauge",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gauge witness: true"));
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(run(&["compute", "--knot", "nope"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.grid", "n=2\nO: 0 1\nX: 0 1\n");
    assert_eq!(run(&["compute", "--grid", &bad]).status.code(), Some(2));
    assert_eq!(
        run(&["compute", "--grid", "/nonexistent/file"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["compute", "--knot", "unknot2", "--sheets", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn grid_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "tref.grid", "n=5\nO: 4 0 1 2 3\nX: 1 2 3 4 0\n");
    let a = run(&["compute", "--grid", &p, "--sheets", "1", "--output", "json"]);
    let b = run(&[
        "compute", "--knot", "trefoil5", "--sheets", "1", "--output", "json",
    ]);
    assert!(a.status.success());
    let strip = |s: String| s.replace("\"tref\"", "\"trefoil5\"");
    assert_eq!(strip(stdout(&a)), stdout(&b));
}

#[test]
fn verify_moves() {
    let o = run(&[
        "verify", "--move", "cyclic", "--knot", "trefoil5", "--sheets", "2", "--ring", "z",
        "--axis", "row", "--shift", "1",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("cyclic n=5 m=2 ring=Z: pass"));
    let o = run(&[
        "verify", "--move", "commute", "--knot", "unknot4c", "--sheets", "2", "--column", "0",
        "--output", "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v[0]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
    let o = run(&[
        "verify",
        "--move",
        "stabilize",
        "--knot",
        "unknot2",
        "--sheets",
        "2",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("pass                 rank relation"));
}

#[test]
fn precondition_errors_exit_3() {
    assert_eq!(
        run(&["verify", "--move", "commute", "--knot", "unknot4c", "--column", "1"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["verify", "--move", "commute", "--knot", "trefoil5"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["move", "--move", "commute", "--knot", "unknot4c", "--column", "1"])
            .status
            .code(),
        Some(3)
    );
    let dir = tempfile::tempdir().unwrap();
    let same = write(dir.path(), "u.grid", "n=2\nO: 0 1\nX: 1 0\n");
    assert_eq!(
        run(&[
            "verify",
            "--move",
            "stabilize",
            "--knot",
            "unknot2",
            "--stabilized",
            &same
        ])
        .status
        .code(),
        Some(3)
    );
}

#[test]
fn verify_against_stabilized_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.grid");
    let o = run(&[
        "move",
        "--move",
        "stabilize",
        "--knot",
        "unknot2",
        "--row",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = run(&[
        "verify",
        "--move",
        "stabilize",
        "--knot",
        "unknot2",
        "--sheets",
        "1",
        "--stabilized",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn moves_write_grid_files() {
    let o = run(&[
        "move", "--move", "cyclic", "--knot", "trefoil5", "--axis", "row", "--shift", "0",
    ]);
    assert_eq!(stdout(&o), stdout(&run(&["catalog", "trefoil5"])));
    let o = run(&[
        "move",
        "--move",
        "stabilize",
        "--knot",
        "trefoil5",
        "--row",
        "2",
    ]);
    assert!(stdout(&o).starts_with("n=6\n"));
    let o = run(&[
        "move", "--move", "commute", "--knot", "unknot4c", "--column", "0",
    ]);
    assert_eq!(stdout(&o), "n=4\nO: 2 0 1 3\nX: 3 1 2 0\n");
    let o = run(&[
        "move", "--move", "cyclic", "--knot", "trefoil5", "--axis", "row", "--shift", "-1",
    ]);
    assert_eq!(stdout(&o), "n=5\nO: 3 4 0 1 2\nX: 0 1 2 3 4\n");
}

#[test]
fn catalog_and_selftest() {
    let o = run(&["catalog"]);
    for name in ["unknot2", "unknot3", "trefoil5", "fig8_6"] {
        assert!(stdout(&o).contains(name));
    }
    assert_eq!(run(&["catalog", "missing"]).status.code(), Some(2));
    let o = run(&["selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
