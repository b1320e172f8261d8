use std::path::Path;
use std::process::{Command, Output};

use repfam_cli::{gallery, render, run_source, Report, RunOptions};

fn repfam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repfam")).args(args).output().expect("binary runs")
}

fn run_text(dir: &Path, yaml: &str) -> Output {
    let path = dir.join("scenario.yaml");
    std::fs::write(&path, yaml).unwrap();
    repfam(&["run", path.to_str().unwrap()])
}

const DISCRETE_HEADER: &str = "format: repfam-scenario/1
name: t
model:
  kind: discrete
  points: 2
  fiber_dim: 2
";

#[test]
fn exit_codes_follow_the_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("format: repfam-scenario/1\nname: [unclosed\n", 2),
        ("format: repfam-scenario/9\nname: t\nmodel: {kind: toeplitz, characters: 4}\n", 2),
        (
            &format!(
                "{DISCRETE_HEADER}family: {{generator: full}}\nelements:\n  a: {{kind: scalar, value: 1}}\nqueries:\n  - {{id: q, kind: fredholm, element: a}}\n"
            ),
            3,
        ),
        (
            &format!("{DISCRETE_HEADER}elements:\n  a: {{kind: scalar, value: 1}}\nqueries:\n  - {{id: q, kind: family-report}}\n"),
            4,
        ),
        (
            &format!(
                "{DISCRETE_HEADER}family: {{generator: full}}\nelements:\n  n:\n    kind: function\n    matrix: [[0, 1], [0, 0]]\nqueries:\n  - {{id: q, kind: spectrum, element: n}}\n"
            ),
            5,
        ),
    ];
    for (yaml, code) in cases {
        let out = run_text(dir.path(), yaml);
        assert_eq!(out.status.code(), Some(code), "{yaml}\n{}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("repfam: "));
    }
    let missing = dir.path().join("missing.yaml");
    assert_eq!(repfam(&["run", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn parse_errors_carry_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_text(dir.path(), "format: repfam-scenario/1\nname: t\nmodel:\n  kind: nowhere\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line "));
}

#[test]
fn empty_scenario_yields_an_empty_report() {
    let out = repfam(&["run", "gallery:empty"]);
    assert!(out.status.success());
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.queries.is_empty());
    assert!(report.timing_ms.is_none());
}

#[test]
fn reports_round_trip_through_json() {
    for e in gallery::GALLERY {
        let report = run_source(&format!("gallery:{}", e.name), RunOptions::default()).unwrap();
        let text = render(&report);
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(render(&back), text, "{}", e.name);
    }
}

#[test]
fn binary_output_is_deterministic_across_thread_counts() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_repfam"))
            .args(["run", "gallery:discrete-blocks"])
            .env("REPFAM_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, four) = (run("1"), run("4"));
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn bad_thread_count_is_a_parse_error() {
    for v in ["0", "many"] {
        let out = Command::new(env!("CARGO_BIN_EXE_repfam"))
            .args(["gallery", "list"])
            .env("REPFAM_THREADS", v)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2), "REPFAM_THREADS={v}");
    }
}

#[test]
fn timing_is_opt_in() {
    let out = repfam(&["run", "gallery:empty", "--timing"]);
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.timing_ms.is_some());
}

#[test]
fn dump_spectrum_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("minus-laplacian.csv");
    let out = repfam(&[
        "dump-spectrum",
        "gallery:parametric-laplacian",
        "spectrum-minus-laplacian",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im,resolution,truncated"));
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        let re: f64 = fields[0].parse().unwrap();
        let resolution: f64 = fields[2].parse().unwrap();
        assert!(re >= -resolution, "-Δ has spectrum in [0, ∞), got {re}");
        rows += 1;
    }
    assert!(rows > 0);
}

#[test]
fn dump_spectrum_of_empty_set_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let yaml = "format: repfam-scenario/1
name: t
model: {kind: discrete, points: 1, fiber_dim: 1}
queries:
  - id: inf
    kind: observable-spectrum
    members: [{kind: infinite}]
";
    let path = dir.path().join("s.yaml");
    std::fs::write(&path, yaml).unwrap();
    let csv = dir.path().join("out.csv");
    let out = repfam(&["dump-spectrum", path.to_str().unwrap(), "inf", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "re,im,resolution,truncated\n");
}

#[test]
fn dump_spectrum_rejects_queries_without_a_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let out = repfam(&["dump-spectrum", "gallery:matrix-counterexample", "norm-f", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let out = repfam(&["dump-spectrum", "gallery:matrix-counterexample", "nope", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn gallery_lists_every_entry() {
    let out = repfam(&["gallery", "list"]);
    let names: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(names, gallery::GALLERY.iter().map(|e| e.name.to_string()).collect::<Vec<_>>());
    let shown = repfam(&["gallery", "show", "empty"]);
    assert_eq!(String::from_utf8(shown.stdout).unwrap(), gallery::find("empty").unwrap().text);
}
