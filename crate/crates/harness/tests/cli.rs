use std::path::Path;
use std::process::{Command, Output};

fn cojump(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cojump")).args(args).output().unwrap()
}

fn simulate(dir: &Path, preset: &str, days: &str) -> String {
    let out = dir.join("days.csv");
    let o = cojump(&["simulate", "--preset", preset, "--days", days, "--n-obs", "400", "--seed", "9", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out.to_str().unwrap().to_string()
}

#[test]
fn simulate_to_stdout_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = simulate(dir.path(), "II-m", "2");
    let o = cojump(&["simulate", "--preset", "II-m", "--days", "2", "--n-obs", "400", "--seed", "9"]);
    assert_eq!(o.stdout, std::fs::read(file).unwrap());
}

#[test]
fn simulated_days_round_trip_through_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let input = simulate(dir.path(), "I-j", "6");
    let report = dir.path().join("report.csv");
    let skipped = dir.path().join("skipped.csv");
    let o = cojump(&[
        "analyze", "--input", &input, "--format", "levels", "--draws", "2000",
        "--out", report.to_str().unwrap(), "--skipped", skipped.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(report).unwrap();
    let skipped = std::fs::read_to_string(skipped).unwrap();
    let mut lines = report.lines();
    assert_eq!(lines.next(), Some("date,phi_disjoint,phi_joint,p_disjoint,p_joint,category"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    // every day is either reported or skipped
    assert_eq!(rows.len() + skipped.lines().count() - 1, 6);
    for r in &rows {
        assert_eq!(r.len(), 6);
        let p: f64 = r[3].parse().unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert!(["1", "2", "3", "4"].contains(&r[5]));
    }
}

#[test]
fn single_day_test_prints_decisions() {
    let dir = tempfile::tempdir().unwrap();
    let input = simulate(dir.path(), "I-j", "2");
    let o = cojump(&["test", "--input", &input, "--format", "levels", "--day", "1", "--draws", "2000"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("day=1\n"));
    assert!(text.contains("decision_joint=") && text.contains("category="));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = simulate(dir.path(), "I-j", "1");
    assert_eq!(cojump(&["--help"]).status.code(), Some(0));
    // configuration problems
    assert_eq!(cojump(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(cojump(&["simulate", "--preset", "IV-x"]).status.code(), Some(1));
    assert_eq!(cojump(&["test", "--input", &input, "--level", "1.5"]).status.code(), Some(1));
    assert_eq!(cojump(&["test", "--input", &input, "--method-joint", "normal-truncated"]).status.code(), Some(1));
    // runtime problems
    let missing = dir.path().join("absent.csv");
    assert_eq!(cojump(&["test", "--input", missing.to_str().unwrap()]).status.code(), Some(2));
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "day,time,x1,x2\n0,0,1,1\n0,0.5,oops,1\n").unwrap();
    assert_eq!(cojump(&["test", "--input", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn experiment_from_toml() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "n_obs_list = [400]\nreplications = 20\nlevels = [0.05, 0.1]\nseed = 4\nkeep_classes = [\"JOINT\"]\n\
         [scenario]\npreset = \"I-j\"\n[test]\ndraws = 400\n[methods]\njoint = [\"normal\"]\ndisjoint = [\"markov\"]\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = cojump(&["experiment", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--workers", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let joint = std::fs::read_to_string(out.join("rejection_joint_normal.csv")).unwrap();
    assert_eq!(joint.lines().count(), 3);
    assert!(out.join("rejection_disjoint_markov.csv").exists());
    assert!(out.join("summary.csv").exists());
}
