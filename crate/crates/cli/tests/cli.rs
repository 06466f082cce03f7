use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mcms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcms")).args(args).output().expect("spawn mcms")
}

fn ok(args: &[&str]) -> String {
    let out = mcms(args);
    assert!(out.status.success(), "mcms {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn tournament_writes_csvs_and_replays_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    ok(&[
        "tournament", "--game", "pig", "--engine-a", "expss:c=4", "--engine-b", "star1",
        "--matches", "3", "--budget-nodes", "500", "--seed", "9", "--out", path(&first),
    ]);
    for f in ["summary.csv", "matches.csv", "report.json", "config.txt"] {
        assert!(first.join(f).exists(), "{f} missing");
    }
    let second = dir.path().join("second");
    ok(&["tournament", "--config", path(&first.join("config.txt")), "--out", path(&second)]);
    for f in ["summary.csv", "matches.csv"] {
        assert_eq!(fs::read(first.join(f)).unwrap(), fs::read(second.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.txt");
    fs::write(&cfg, "# pig run\ngame=pig\nengine-a=exp\nengine-b=star2\nmatches=50\nbudget-ms=1000\n").unwrap();
    let out = dir.path().join("o");
    ok(&["tournament", "--config", path(&cfg), "--matches", "1", "--budget-nodes", "300", "--out", path(&out)]);
    let written = fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(written.contains("matches=1"));
    assert!(written.contains("budget-nodes=300"));
    assert!(!written.contains("budget-ms"));
}

#[test]
fn rejects_bad_input() {
    assert!(!mcms(&["tournament", "--engine-a", "nonsense", "--matches", "1"]).status.success());
    assert!(!mcms(&["tournament", "--budget-nodes", "5", "--budget-ms", "5"]).status.success());
    assert!(!mcms(&["play", "--game", "chess"]).status.success());
    assert!(!mcms(&["tune", "--game", "pig"]).status.success());
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.txt");
    fs::write(&cfg, "colour=blue\n").unwrap();
    assert!(!mcms(&["play", "--config", path(&cfg)]).status.success());
}

#[test]
fn play_prints_a_finished_game() {
    for game in ["pig", "ewn", "cantstop", "ra"] {
        let text = ok(&["play", "--game", game, "--engine-a", "star2", "--engine-b", "mcts", "--budget-nodes", "200"]);
        assert!(text.lines().last().unwrap().starts_with("# result:"), "{game}: {text}");
    }
}

#[test]
fn tune_reports_a_winner() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&[
        "tune", "--game", "pig", "--engines", "expss:c=1;expss:c=8;expss:c=16", "--matches", "2",
        "--budget-nodes", "300", "--out", path(dir.path()),
    ]);
    assert!(text.contains("winner: #"));
    assert!(dir.path().join("bracket.txt").exists());
    assert!(dir.path().join("result.json").exists());
}

#[test]
fn solve_theorem_and_stats_from_saved_table() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&["solve-pig", "--out", path(dir.path())]);
    assert!(text.contains("505000 states"), "{text}");
    let table = dir.path().join("pig_table.bin");

    let th = dir.path().join("theorem");
    ok(&["theorem", "--c", "1,64", "--lambda", "50", "--trials", "20", "--states", "5", "--out", path(&th)]);
    let csv = fs::read_to_string(th.join("coverage.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    let st = dir.path().join("stats");
    ok(&[
        "stats", "--table", path(&table), "--engines", "exp;expss:c=4", "--games", "1", "--states", "5",
        "--runs", "3", "--budget-nodes", "300", "--out", path(&st),
    ]);
    let csv = fs::read_to_string(st.join("stats.csv")).unwrap();
    assert!(csv.starts_with("algorithm,mse,variance,abs_bias,regret,runs,states"));
    assert_eq!(csv.lines().count(), 3);
}
