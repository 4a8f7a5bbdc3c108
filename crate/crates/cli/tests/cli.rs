use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const CERTIFIED_MODEL: &str = "(-1,-1,0),(-1,0,1),(-1,1,-1),(0,-1,1),(0,0,-1),(0,1,0),(1,0,0)";
const ZERO_ORBIT_MODEL: &str = "(-1,-1,-1),(-1,0,0),(-1,0,1),(-1,1,0),(1,-1,0),(1,0,-1),(1,1,1)";

fn octant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_octant")).args(args).output().expect("run octant")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn strip_millis(csv: &str) -> String {
    csv.lines().map(|l| l.rsplit_once(',').unwrap().0).collect::<Vec<_>>().join("\n")
}

#[test]
fn analyze_exit_codes() {
    let out = octant(&["analyze", CERTIFIED_MODEL]);
    assert_eq!(code(&out), 0);
    let cert: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cert["verdict"], "CertifiedDFinite");
    assert_eq!(cert["group_order"], 12);

    assert_eq!(code(&octant(&["analyze", ZERO_ORBIT_MODEL])), 2);
    assert_eq!(code(&octant(&["analyze", "(0,0,0)"])), 1);
    assert_eq!(code(&octant(&["analyze", "(1,0,0),(-1,0,0)"])), 3);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&octant(&[])), 1);
    assert_eq!(code(&octant(&["analyze"])), 1);
    assert_eq!(code(&octant(&["analyze", CERTIFIED_MODEL, "--group-cap", "0"])), 1);
    assert_eq!(code(&octant(&["analyze", CERTIFIED_MODEL, "--mode", "sideways"])), 1);
    assert_eq!(code(&octant(&["census", "--jobs", "0", "--range", "1-2"])), 1);
    assert_eq!(code(&octant(&["--help"])), 0);
}

#[test]
fn census_of_the_two_examples() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("models.txt");
    std::fs::write(&list, format!("# examples\n{CERTIFIED_MODEL}\n\n{ZERO_ORBIT_MODEL}  # zero orbit sum\n")).unwrap();
    let prefix = dir.path().join("ex");
    let out = octant(&["census", "--file", list.to_str().unwrap(), "--out", prefix.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let tallies: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(tallies["total"], 2);
    assert_eq!(tallies["verdicts"]["CertifiedDFinite"], 1);
    assert_eq!(tallies["verdicts"]["ZeroOrbitSum"], 1);
    assert!(tallies["caveat"].as_str().unwrap().contains("permutations"));
    assert_eq!(read(&dir.path().join("ex.jsonl")).lines().count(), 2);
    let saved: Value = serde_json::from_str(&read(&dir.path().join("ex.tallies.json"))).unwrap();
    assert_eq!(saved, tallies);
}

#[test]
fn census_is_deterministic_and_job_independent() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str, extra: &[&str]| {
        let prefix = dir.path().join(name);
        let mut args = vec!["census", "--range", "1-1000", "--jobs", jobs, "--chunk", "97", "--out", prefix.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert_eq!(code(&octant(&args)), 0);
        (read(&prefix.with_extension("jsonl")), read(&prefix.with_extension("csv")))
    };
    let a = run("a", "1", &["--no-timing"]);
    let b = run("b", "1", &["--no-timing"]);
    assert_eq!(a, b);
    let c = run("c", "8", &[]);
    assert_eq!(a.0, c.0);
    assert_eq!(strip_millis(&a.1), strip_millis(&c.1));
    let ids: Vec<&str> = a.1.lines().skip(1).map(|l| &l[..9]).collect();
    assert!(ids.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn census_resume_matches_single_run() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full");
    let part = dir.path().join("part");
    let census = |prefix: &Path, range: &str, resume: bool| {
        let mut args = vec!["census", "--range", range, "--no-timing", "--out", prefix.to_str().unwrap()];
        if resume {
            args.push("--resume");
        }
        octant(&args)
    };
    assert_eq!(code(&census(&full, "1-600", false)), 0);
    assert_eq!(code(&census(&part, "1-250", false)), 0);
    let resumed = census(&part, "1-600", true);
    assert_eq!(code(&resumed), 0);
    assert_eq!(read(&full.with_extension("csv")), read(&part.with_extension("csv")));
    assert_eq!(read(&full.with_extension("jsonl")), read(&part.with_extension("jsonl")));
    let t: Value = serde_json::from_slice(&resumed.stdout).unwrap();
    assert_eq!(t["total"].as_u64().unwrap() as usize, read(&full.with_extension("csv")).lines().count() - 1);

    let again = census(&part, "1-600", true);
    assert_eq!(code(&again), 0);
    assert_eq!(read(&full.with_extension("csv")), read(&part.with_extension("csv")));
}

#[test]
fn census_resume_rejects_corrupt_files() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("r");
    let p = prefix.to_str().unwrap();
    assert_eq!(code(&octant(&["census", "--range", "1-200", "--out", p])), 0);
    let csv = prefix.with_extension("csv");
    let jsonl = prefix.with_extension("jsonl");
    let good_csv = read(&csv);
    let good_jsonl = read(&jsonl);

    std::fs::write(&csv, format!("{good_csv}garbage,row\n")).unwrap();
    let out = octant(&["census", "--range", "1-300", "--out", p, "--resume"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("corrupt resume file"));
    assert_eq!(read(&csv), format!("{good_csv}garbage,row\n"));

    std::fs::write(&csv, &good_csv).unwrap();
    std::fs::write(&jsonl, format!("{good_jsonl}{{\"model\":")).unwrap();
    assert_eq!(code(&octant(&["census", "--range", "1-300", "--out", p, "--resume"])), 1);

    let truncated: String = good_csv.lines().take(5).map(|l| format!("{l}\n")).collect();
    std::fs::write(&csv, truncated).unwrap();
    std::fs::write(&jsonl, &good_jsonl).unwrap();
    let out = octant(&["census", "--range", "1-300", "--out", p, "--resume"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing from"));
}

#[test]
fn census_reports_unreadable_input() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.txt");
    let out = octant(&["census", "--file", missing.to_str().unwrap(), "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn verify_fresh_and_tampered() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = octant(&["analyze", CERTIFIED_MODEL, "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&octant(&["verify", path.to_str().unwrap()])), 0);

    let mut cert: Value = serde_json::from_str(&read(&path)).unwrap();
    cert["elements"][0]["matrix"]["columns"][0][0] = serde_json::json!(1);
    std::fs::write(&path, serde_json::to_string(&cert).unwrap()).unwrap();
    let out = octant(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("elements[0]"));
}

#[test]
fn verify_accepts_census_output() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("v");
    assert_eq!(code(&octant(&["census", "--range", "0x2000000-0x2000fff", "--out", prefix.to_str().unwrap()])), 0);
    assert_eq!(code(&octant(&["verify", prefix.with_extension("jsonl").to_str().unwrap()])), 0);
}

#[test]
fn oracle_passes_on_certified_model() {
    let out = octant(&["oracle", CERTIFIED_MODEL, "--oracle-n", "8"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["n_max"], 8);
    assert_eq!(report["positive_part"]["pass"], true);
}
