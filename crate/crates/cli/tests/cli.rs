use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn teachsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teachsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn replicate_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let svg = dir.path().join("out.svg");
    let out = teachsim(&["replicate-pr1", "--csv", path_str(&csv), "--svg", path_str(&svg)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "t,Z1,Z2,Z,r,P,F,Pr,segment");
    assert_eq!(lines.len(), 1 + 1901);

    let chart = fs::read_to_string(&svg).unwrap();
    assert_eq!(chart.matches("<polyline").count(), 4);
    // nothing but the two outputs is left behind
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn run_matches_replicate() {
    let dir = tempfile::tempdir().unwrap();
    let a: PathBuf = dir.path().join("a.csv");
    let b: PathBuf = dir.path().join("b.csv");
    assert!(
        teachsim(&["run", "--config", &config("pr1.json"), "--csv", path_str(&a)])
            .status
            .success()
    );
    assert!(teachsim(&["replicate-pr1", "--csv", path_str(&b)]).status.success());
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn run_three_categories_with_custom_channels() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("c.svg");
    let out = teachsim(&[
        "run",
        "--config",
        &config("three_category.json"),
        "--svg",
        path_str(&svg),
        "--channels",
        "Z1,Z2,Z3,Pr",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(fs::read_to_string(svg).unwrap().matches("<polyline").count(), 4);

    let out = teachsim(&[
        "run",
        "--config",
        &config("three_category.json"),
        "--svg",
        "x.svg",
        "--channels",
        "Q",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown channel `Q`"));
}

#[test]
fn missing_config_is_io_error() {
    let out = teachsim(&["run", "--config", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing.json"));
}

#[test]
fn unwritable_output_is_io_error() {
    let out = teachsim(&["replicate-pr1", "--csv", "/nonexistent-dir/out.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_config_is_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = fs::read_to_string(config("pr1.json"))
        .unwrap()
        .replace("[0.001, 5e-05]", "[0.001, 0.01]");
    fs::write(&bad, text).unwrap();
    let out = teachsim(&["run", "--config", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("params.gamma[1]") && err.contains("line 6"), "{err}");
}

#[test]
fn sweep_unknown_path() {
    let out = teachsim(&[
        "sweep",
        "--config",
        &config("pr1.json"),
        "--param",
        "gamma9",
        "--values",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown parameter path"));
}

#[test]
fn sweep_reports_invalid_rows() {
    let out = teachsim(&[
        "sweep",
        "--config",
        &config("pr1.json"),
        "--param",
        "gamma1",
        "--values",
        "0.001,0.002,0.00001",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let table = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = table.lines().collect();
    assert_eq!(lines[0], "gamma1,Z,Pr,mean_r,status");
    assert!(lines[1].ends_with(",ok") && lines[2].ends_with(",ok"));
    assert!(lines[3].contains("invalid"));
}

#[test]
fn breaks_table() {
    let out = teachsim(&["breaks", "--config", &config("pr1.json"), "--tp", "20,60,100"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let table = String::from_utf8(out.stdout).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(table.lines().nth(3).unwrap().starts_with("100,87.72876"));

    let out = teachsim(&["breaks", "--config", &config("pr1.json"), "--tp", "-5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn optimize_u_output() {
    let out = teachsim(&[
        "optimize-u",
        "--config",
        &config("pr1_requirement.json"),
        "--min",
        "1",
        "--max",
        "40",
        "--grid",
        "40",
        "--objective",
        "pr",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 42);
    assert!(text.lines().last().unwrap().starts_with("# best U = 1 "));

    let out = teachsim(&[
        "optimize-u",
        "--config",
        &config("pr1.json"),
        "--min",
        "5",
        "--max",
        "1",
        "--grid",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_arguments() {
    assert_eq!(teachsim(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(teachsim(&["sweep", "--config", "x.json"]).status.code(), Some(1));
    assert_eq!(teachsim(&["--help"]).status.code(), Some(0));
}
