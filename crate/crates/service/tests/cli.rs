mod common;

use std::process::Command;

use common::*;

fn read_json(p: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn prints_summary_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let run = run_cli(&a, &[]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1);
    assert!(stdout.contains("vertices") && stdout.contains("triangles") && stdout.contains("traces"), "{stdout}");
    assert!(run_cli(&b, &[]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn finer_spacing_adds_road_points() {
    let dir = tempfile::tempdir().unwrap();
    let (coarse, fine) = (dir.path().join("coarse.json"), dir.path().join("fine.json"));
    assert!(run_cli(&coarse, &[]).status.success());
    assert!(run_cli(&fine, &["--spacing", "5"]).status.success());
    let (c, f) = (line_points(&read_json(&coarse), "roads"), line_points(&read_json(&fine), "roads"));
    assert!(c > 0 && f > c, "coarse {c}, fine {f}");
}

#[test]
fn ascii_dem_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scene.json");
    let run = Command::new(env!("CARGO_BIN_EXE_urbanscene"))
        .args(["generate", "--dem"])
        .arg(fixture("dem.asc"))
        .arg("--roads")
        .arg(fixture("roads.json"))
        .args(["--resolution", "40", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let doc = read_json(&out);
    assert_eq!(doc["data"][0]["type"], "mesh3d");
    assert!(line_points(&doc, "roads") > 0);
}

#[test]
fn missing_input_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no-such-roads.json");
    let run = Command::new(env!("CARGO_BIN_EXE_urbanscene"))
        .args(["generate", "--dem"])
        .arg(fixture("dem.tif"))
        .arg("--roads")
        .arg(&missing)
        .arg("--out")
        .arg(dir.path().join("out.json"))
        .output()
        .unwrap();
    assert!(!run.status.success());
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("no-such-roads.json"), "{stderr}");
    assert!(!dir.path().join("out.json").exists());
}

#[test]
fn bad_arguments_fail() {
    let dir = tempfile::tempdir().unwrap();
    for extra in [&["--spacing", "0"][..], &["--resolution", "fine"][..], &["--dem-crs", "32633"][..]] {
        let run = run_cli(&dir.path().join("out.json"), extra);
        assert!(!run.status.success(), "{extra:?}");
    }
}

#[test]
fn pixel_budget_flag() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_cli(&dir.path().join("out.json"), &["--pixel-budget", "1000"]);
    assert!(!run.status.success());
    assert!(String::from_utf8_lossy(&run.stderr).contains("budget"));
}
