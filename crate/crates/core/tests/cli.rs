mod common;

use common::{fixture, run_cli};
use serde_json::Value;
use socdyn::cli::{EXIT_DEGENERATE, EXIT_INPUT, EXIT_NONDOMINANCE, EXIT_OK};

fn p(name: &str) -> String {
    fixture(name).to_str().unwrap().to_string()
}

#[test]
fn check_reports_branch_and_nash() {
    let res = run_cli(&["check", "--params", &p("set_b.params")]);
    assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    let doc: Value = serde_json::from_str(&res.stdout).unwrap();
    assert_eq!(doc["validation"]["branch"], "B-minus");
    let nash: Vec<&str> = doc["nash_vertices"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["nash"] == true)
        .map(|v| v["strategy"].as_str().unwrap())
        .collect();
    assert_eq!(nash, ["O", "N"]);
}

#[test]
fn degenerate_set_exits_3() {
    let res = run_cli(&["check", "--params", &p("set_d.params")]);
    assert_eq!(res.code, EXIT_DEGENERATE);
    let res = run_cli(&["equilibria", "--params", &p("set_d.params")]);
    assert_eq!(res.code, EXIT_DEGENERATE);
    let doc: Value = serde_json::from_str(&res.stdout).unwrap();
    assert_eq!(doc["degenerate"], true);
    assert!(doc["validation"]["degenerate_quantities"]
        .as_array()
        .unwrap()
        .iter()
        .any(|q| q == "epsilon-gamma"));
}

#[test]
fn dominated_strategy_exits_2() {
    let res = run_cli(&["check", "--params", &p("set_a.params"), "--set", "eta=2.5"]);
    assert_eq!(res.code, EXIT_NONDOMINANCE);
    let res = run_cli(&["equilibria", "--params", &p("set_a.params"), "--set", "gamma=3"]);
    assert_eq!(res.code, EXIT_NONDOMINANCE);
}

#[test]
fn input_errors_exit_1() {
    assert_eq!(run_cli(&["check", "--params", "/nonexistent/x.params"]).code, EXIT_INPUT);
    assert_eq!(run_cli(&["check", "--set", "alpha=1"]).code, EXIT_INPUT);
    assert_eq!(
        run_cli(&["check", "--params", &p("set_a.params"), "--set", "zeta=1"]).code,
        EXIT_INPUT
    );
    assert_eq!(run_cli(&["frobnicate"]).code, EXIT_INPUT);
    assert_eq!(
        run_cli(&["simulate", "--params", &p("set_a.params"), "--x0", "0.5,0.5,0.5,0.5"]).code,
        EXIT_INPUT
    );
    assert_eq!(run_cli(&["basins", "--params", &p("set_a.params"), "-n", "0"]).code, EXIT_INPUT);
}

#[test]
fn set_overrides_win_over_file() {
    let res = run_cli(&["check", "--params", &p("set_a.params"), "--set", "eta=0.25"]);
    assert_eq!(res.code, EXIT_OK);
    let doc: Value = serde_json::from_str(&res.stdout).unwrap();
    assert_eq!(doc["params"]["eta"], 0.25);
}

#[test]
fn equilibria_writes_regimes_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = run_cli(&["equilibria", "--params", &p("set_a.params"), "--out", out]);
    assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    let file: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("regimes.json")).unwrap()).unwrap();
    let printed: Value = serde_json::from_str(&res.stdout).unwrap();
    assert_eq!(file, printed);
    assert_eq!(file["global"]["case"], "polite-stable");
}

#[test]
fn simulate_reports_attractor_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = run_cli(&[
        "simulate",
        "--params",
        &p("set_b.params"),
        "--x0",
        "0.05,0.35,0.55,0.05",
        "--out",
        out,
    ]);
    assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    assert_eq!(res.stdout.lines().last().unwrap(), "attractor: HP");
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("t,"));
    assert!(lines.count() > 10);
}

#[test]
fn simulate_fixed_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = run_cli(&[
        "simulate",
        "--params",
        &p("set_a.params"),
        "--x0",
        "0,0,0.1,0.9",
        "--method",
        "rk4",
        "--step",
        "0.01",
        "--out",
        out,
    ]);
    assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    assert_eq!(res.stdout.lines().last().unwrap(), "attractor: N");
}

#[test]
fn sweep_two_axes() {
    let res = run_cli(&[
        "sweep",
        "--params",
        &p("set_a.params"),
        "--axis",
        "beta=0.5:1.5:3",
        "--axis",
        "eta=0.2:0.8:4",
    ]);
    assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    let mut rd = csv::Reader::from_reader(res.stdout.as_bytes());
    assert_eq!(&rd.headers().unwrap()[0], "beta");
    assert_eq!(&rd.headers().unwrap()[1], "eta");
    assert_eq!(rd.records().count(), 12);
}

#[test]
fn basins_are_reproducible_and_independent_of_jobs() {
    let run = |jobs: &str| {
        run_cli(&["basins", "--params", &p("set_a.params"), "-n", "200", "--seed", "7", "--jobs", jobs])
    };
    let (one, four) = (run("1"), run("4"));
    assert_eq!(one.code, EXIT_OK, "{}", one.stderr);
    assert_eq!(one.stdout, four.stdout);
    let doc: Value = serde_json::from_str(&one.stdout).unwrap();
    let total: u64 = doc["attractors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["hits"].as_u64().unwrap())
        .sum::<u64>()
        + doc["unresolved"]["hits"].as_u64().unwrap_or(0);
    assert_eq!(total, 200);
}

#[test]
fn basins_and_portrait_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = run_cli(&["basins", "--params", &p("set_c.params"), "-n", "50", "--out", out]);
    assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    assert!(dir.path().join("basins.json").exists());
    assert!(dir.path().join("basins.csv").exists());
    let res = run_cli(&[
        "portrait",
        "--params",
        &p("set_b.params"),
        "--trajectories",
        "2",
        "--max-time",
        "30",
        "--out",
        out,
    ]);
    assert_eq!(res.code, EXIT_OK, "{}", res.stderr);
    let svg = std::fs::read_to_string(dir.path().join("portrait.svg")).unwrap();
    assert!(svg.contains(r#"class="state attractive" data-label="HP""#));
    assert!(dir.path().join("portrait_trajectories.csv").exists());
}

#[test]
fn help_exits_0() {
    let res = run_cli(&["--help"]);
    assert_eq!(res.code, EXIT_OK);
    assert!(res.stdout.contains("equilibria"));
}
