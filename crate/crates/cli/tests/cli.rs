use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_teamcoord"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(args: &[&str]) -> Output {
    let o = run(args);
    assert!(o.status.success(), "{args:?} failed: {}", stderr(&o));
    o
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exited normally")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_summary(o: &Output) -> Value {
    serde_json::from_str(stdout(o).trim()).expect("summary is JSON")
}

/// Generates Kuhn with the opponent at `pos` and converts it (folded, safe-IR).
fn kuhn_pair(dir: &TempDir, pos: usize) -> (PathBuf, PathBuf) {
    let game = path(dir, &format!("kuhn{pos}.json"));
    let conv = path(dir, &format!("kuhn{pos}-conv.json"));
    ok(&["gen", "kuhn", "--adv-pos", &pos.to_string(), "-o", s(&game)]);
    ok(&["convert", s(&game), "--safe-ir", "-o", s(&conv)]);
    (game, conv)
}

#[test]
fn kuhn_conversion_census() {
    let dir = TempDir::new().unwrap();
    let game = path(&dir, "k.json");
    ok(&["gen", "kuhn", "-o", s(&game)]);
    let o = ok(&["--json", "convert", s(&game), "--mode", "folded", "-o", s(&path(&dir, "c.json"))]);
    let v = json_summary(&o);
    assert_eq!(v["total_nodes"], 2890);
    let o = ok(&["--json", "convert", s(&game), "--safe-ir", "-o", s(&path(&dir, "c.json"))]);
    assert_eq!(json_summary(&o)["coordinator_infosets"], 86);
}

#[test]
fn toy_generation_reports_reduced_plans() {
    let o = ok(&["--json", "gen", "toy", "--chance", "3", "--actions", "2", "--depth", "2", "-o", "/dev/null"]);
    assert_eq!(json_summary(&o)["first_member_plans"], "64");
}

#[test]
fn pruned_toy_member_nodes() {
    let dir = TempDir::new().unwrap();
    let game = path(&dir, "t.json");
    ok(&["gen", "toy", "--chance", "3", "--actions", "2", "--depth", "3", "-o", s(&game)]);
    let o = ok(&["census", s(&game), "--mode", "pruned"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["coordinator_nodes_by_member"][0], 135);
}

#[test]
fn census_of_converted_file_matches_streamed_census() {
    let dir = TempDir::new().unwrap();
    let (game, conv) = kuhn_pair(&dir, 1);
    let built = stdout(&ok(&["census", s(&conv)]));
    let streamed = stdout(&ok(&["census", s(&game), "--mode", "folded", "--safe-ir"]));
    assert_eq!(built, streamed);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&["gen", "leduc", "--raises", "3"]), 2);
    assert_eq!(code(&["gen", "toy", "--chance", "0", "--actions", "2", "--depth", "1"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    let dir = TempDir::new().unwrap();
    let game = path(&dir, "k.json");
    ok(&["gen", "kuhn", "-o", s(&game)]);
    assert_eq!(code(&["convert", s(&game), "--mode", "basic", "--safe-ir"]), 2);
    assert_eq!(code(&["census", s(&game)]), 2);
}

#[test]
fn missing_input_exits_three() {
    assert_eq!(code(&["convert", "/nonexistent/game.json"]), 3);
}

#[test]
fn malformed_input_exits_four() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, "{\"name\": 1}").unwrap();
    assert_eq!(code(&["convert", s(&bad)]), 4);
}

#[test]
fn zero_iterations_give_header_only_log() {
    let dir = TempDir::new().unwrap();
    let (_, conv) = kuhn_pair(&dir, 0);
    let csv = path(&dir, "log.csv");
    ok(&["solve", s(&conv), "--iterations", "0", "--csv", s(&csv)]);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "iteration,team_value,exploitability\n");
}

#[test]
fn long_solve_converges() {
    let dir = TempDir::new().unwrap();
    let game = path(&dir, "k.json");
    let conv = path(&dir, "c.json");
    ok(&["gen", "kuhn", "--ranks", "3", "--adv-pos", "0", "-o", s(&game)]);
    ok(&["convert", s(&game), "--mode", "folded", "-o", s(&conv)]);
    let v = json_summary(&ok(&["--json", "solve", s(&conv), "--algo", "lcfr+", "--iterations", "10000", "--log-every", "0"]));
    assert!(v["exploitability"].as_f64().unwrap() < 1e-2);
}

#[test]
fn solving_a_three_player_game_is_rejected() {
    let dir = TempDir::new().unwrap();
    let game = path(&dir, "k.json");
    ok(&["gen", "kuhn", "-o", s(&game)]);
    assert_eq!(code(&["solve", s(&game), "--iterations", "10"]), 4);
}

#[test]
fn solve_writes_log_and_strategy() {
    let dir = TempDir::new().unwrap();
    let (_, conv) = kuhn_pair(&dir, 0);
    let (csv, strat) = (path(&dir, "log.csv"), path(&dir, "s.json"));
    let o = ok(&["--json", "solve", s(&conv), "--iterations", "300", "--log-every", "100", "--csv", s(&csv), "--strategy", s(&strat)]);
    let v = json_summary(&o);
    assert!(v["exploitability"].as_f64().unwrap() < 1e-3);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 4);
    let st: Value = serde_json::from_str(&std::fs::read_to_string(&strat).unwrap()).unwrap();
    for entry in st["infosets"].as_array().unwrap() {
        let sum: f64 = entry["probs"].as_array().unwrap().iter().map(|p| p.as_f64().unwrap()).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }
}

#[test]
fn oracle_values() {
    let dir = TempDir::new().unwrap();
    let game = path(&dir, "k.json");
    ok(&["gen", "kuhn", "-o", s(&game)]);
    let v = json_summary(&ok(&["--json", "oracle", s(&game)]));
    assert!(v["value"].as_f64().unwrap().abs() < 1e-9);
    let leduc = path(&dir, "l.json");
    ok(&["gen", "leduc", "-o", s(&leduc)]);
    assert_eq!(code(&["oracle", s(&leduc)]), 5);
    assert_eq!(code(&["oracle", s(&game), "--tol", "0"]), 2);
}

#[test]
fn verify_outcomes() {
    let dir = TempDir::new().unwrap();
    let (game, conv) = kuhn_pair(&dir, 0);
    ok(&["verify", s(&game), s(&conv), "--samples", "1000"]);
    let basic = path(&dir, "basic.json");
    ok(&["convert", s(&game), "--mode", "basic", "-o", s(&basic)]);
    ok(&["verify", s(&game), s(&basic), "--samples", "1000", "--seed", "3"]);

    let o = ok(&["verify", s(&game), s(&conv), "--samples", "0"]);
    assert!(stderr(&o).contains("warning"));

    let (other, _) = kuhn_pair(&dir, 2);
    assert_eq!(code(&["verify", s(&other), s(&conv)]), 6);

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&conv).unwrap()).unwrap();
    for node in v["game"]["nodes"].as_array_mut().unwrap() {
        if node["kind"] == "terminal" {
            node["team_utility"] = Value::from(node["team_utility"].as_f64().unwrap() + 0.5);
        }
    }
    let corrupt = path(&dir, "corrupt.json");
    std::fs::write(&corrupt, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(code(&["verify", s(&game), s(&corrupt)]), 1);
}

#[test]
fn outputs_are_deterministic() {
    let (first, second) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let a = kuhn_pair(&first, 1);
    let b = kuhn_pair(&second, 1);
    assert_eq!(std::fs::read(&a.0).unwrap(), std::fs::read(&b.0).unwrap());
    assert_eq!(std::fs::read(&a.1).unwrap(), std::fs::read(&b.1).unwrap());
    let solve = |dir: &TempDir, conv: &Path| {
        let (csv, strat) = (path(dir, "log.csv"), path(dir, "s.json"));
        ok(&["solve", s(conv), "--iterations", "50", "--log-every", "10", "--csv", s(&csv), "--strategy", s(&strat)]);
        (std::fs::read(csv).unwrap(), std::fs::read(strat).unwrap())
    };
    assert_eq!(solve(&first, &a.1), solve(&second, &b.1));
}

#[test]
fn pipeline_value_matches_oracle() {
    let dir = TempDir::new().unwrap();
    for pos in 0..3 {
        let (game, conv) = kuhn_pair(&dir, pos);
        let oracle = json_summary(&ok(&["--json", "oracle", s(&game)]))["value"].as_f64().unwrap();
        let solved = json_summary(&ok(&["--json", "solve", s(&conv), "--iterations", "2000", "--log-every", "0"]));
        let value = solved["team_value"].as_f64().unwrap();
        let gap = solved["exploitability"].as_f64().unwrap();
        assert!((value - oracle).abs() <= gap + 1e-6, "position {pos}: {value} vs {oracle}");
        ok(&["verify", s(&game), s(&conv)]);
    }
}

#[test]
fn count_csv() {
    let o = ok(&["count", "--max-depth", "3", "--exact"]);
    assert_eq!(stdout(&o), "H,normal,basic,pruning,folding\n1,8,3,3,9\n2,64,27,27,75\n3,512,219,135,375\n");
    let o = ok(&["count", "--max-depth", "1"]);
    assert_eq!(stdout(&o).lines().nth(1), Some("1,8.00E+00,3.00E+00,3.00E+00,9.00E+00"));
}

#[test]
fn game_file_round_trips_through_stdout() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "t.json");
    ok(&["gen", "toy", "--chance", "2", "--actions", "2", "--depth", "1", "--payoff-seed", "7", "-o", s(&file)]);
    let printed = ok(&["gen", "toy", "--chance", "2", "--actions", "2", "--depth", "1", "--payoff-seed", "7"]);
    assert_eq!(std::fs::read(&file).unwrap(), printed.stdout);
}
