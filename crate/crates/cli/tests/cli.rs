//! The `eslmc` binary: output, exit codes and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use eslmc_testkit::matching_pennies_path;

const FORMULA_1: &str = "forall x:A. X K[B] exists y:B. X win_B";

fn eslmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eslmc"))
        .args(args)
        .env_remove("ESLMC_CAP")
        .output()
        .expect("binary runs")
}

fn toy() -> String {
    matching_pennies_path().to_string_lossy().into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn scratch_file(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn formula_one_is_true_with_a_witness() {
    let out = eslmc(&["check", "--model", &toy(), "--formula", FORMULA_1, "--recall", "1", "--witness"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("result: true\n"));
    assert!(text.contains("witness y:B\n"));
    assert!(text.contains("  [0,lam] => set0\n"));
}

#[test]
fn golden_exit_codes() {
    let cases: [(&[&str], i32); 8] = [
        (&["--formula", "win_A"], 1),
        (&["--formula", "exists x:A. X !win_A"], 0),
        (&["--formula", "X (win_A | win_B)"], 1),
        (&["--formula", "forall x:A. X exists y:B. K[B] X win_B"], 0),
        (&["--formula", "forall x:A. X exists y:B. K[B] X win_B", "--mode", "uniform"], 1),
        (&["--formula", "F win_B", "--closure", "universal"], 1),
        (&["--formula", "F win_B"], 0),
        (&["--formula", "F (win_A | win_B)", "--closure", "universal", "--recall", "2"], 0),
    ];
    for (extra, want) in cases {
        let mut args = vec!["check", "--model"];
        let model = toy();
        args.push(&model);
        args.extend_from_slice(extra);
        let out = eslmc(&args);
        assert_eq!(code(&out), want, "{extra:?}: {}", stderr(&out));
    }
}

#[test]
fn usage_and_validation_errors_exit_with_two() {
    let out = eslmc(&["check", "--model", &toy(), "--formula", "exists x:C. X win_A"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown agent `C`"), "{}", stderr(&out));

    let out = eslmc(&["check", "--model", &toy(), "--formula", "p &"]);
    assert_eq!(code(&out), 2);

    let out = eslmc(&["check", "--model", &toy(), "--formula", "win_A", "--recall", "0"]);
    assert_eq!(code(&out), 2);

    let out = eslmc(&["validate", "--model", "/nonexistent/model.json"]);
    assert_eq!(code(&out), 2);

    let broken = scratch_file(
        "broken.json",
        r#"{"agents": [{"name": "i", "locals": ["l"], "actions": ["a", "b"], "protocol": {"l": ["a", "b"]}}],
            "initial": ["l"],
            "transitions": [{"from": ["l"], "action": ["a"], "to": ["l"]}]}"#,
    );
    let out = eslmc(&["validate", "--model", broken.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("(b)"), "{}", stderr(&out));
}

#[test]
fn cap_exceeded_exits_with_three() {
    let out = Command::new(env!("CARGO_BIN_EXE_eslmc"))
        .args(["check", "--model", &toy(), "--formula", FORMULA_1])
        .env("ESLMC_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let out = eslmc(&["check", "--model", &toy(), "--formula", FORMULA_1, "--cap", "3"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn validate_summarises_the_toy() {
    let out = eslmc(&["validate", "--model", &toy()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "2 agents, 7 reachable states\n");
}

#[test]
fn info_reports_strategy_counts() {
    let out = eslmc(&["info", "--model", &toy()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("recall 1: 7 feasible windows\n"));
    assert!(text.contains("  A: 2 perfect, 2 uniform\n"));
    assert!(text.contains("  B: 4 perfect, 2 uniform\n"));
    assert!(text.contains("  (0,lam)\n"));

    let out = eslmc(&["info", "--model", &toy(), "--recall", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["windows"], 17);
    assert_eq!(v["strategies"][0]["perfect"], "32");
    assert_eq!(v["strategies"][1]["uniform"], "4");
    assert_eq!(v["states"].as_array().unwrap().len(), 7);
}

#[test]
fn formulas_can_come_from_a_file() {
    let file = scratch_file("formula-1.esl", &format!("{FORMULA_1}\n"));
    let out = eslmc(&["check", "--model", &toy(), "--formula-file", file.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn json_reports_are_identical_across_worker_counts() {
    for formula in [FORMULA_1, "exists x:A. X !win_A", "win_A"] {
        let run = |jobs: &str| {
            let out = eslmc(&[
                "check", "--model", &toy(), "--formula", formula, "--recall", "2", "--format", "json", "--jobs", jobs,
            ]);
            out.stdout
        };
        let one = run("1");
        assert_eq!(one, run("8"), "{formula}");
        assert_eq!(one, run("1"), "{formula}");
        let v: serde_json::Value = serde_json::from_slice(&one).unwrap();
        assert!(v["verdict"]["result"].is_boolean());
    }
}

#[test]
fn stats_go_to_stderr() {
    let out = eslmc(&["check", "--model", &toy(), "--formula", FORMULA_1, "--stats"]);
    assert!(stderr(&out).starts_with("stats: evaluations "));
    assert!(!stdout(&out).contains("stats"));
}

#[test]
fn qptl_sat_reports_verdicts() {
    let out = eslmc(&["qptl-sat", "--formula", "exists p. p & X !p"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict: SAT\n  p: (t,f)^w\n"), "{}", stdout(&out));

    let out = eslmc(&["qptl-sat", "--formula", "exists p. p & !p", "--recall", "2"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("verdict: UNSAT at recall 2"));

    let out = eslmc(&["qptl-sat", "--formula", "exists p. G !p", "--props", "p,q", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "sat");
    assert_eq!(v["props"], serde_json::json!(["p", "q"]));
    assert_eq!(v["evaluation"]["p"], "(f)^w");

    let out = eslmc(&["qptl-sat", "--formula", "exists p. r", "--props", "p"]);
    assert_eq!(code(&out), 2);
    let out = eslmc(&["qptl-sat", "--formula", "K[p] p"]);
    assert_eq!(code(&out), 2);
}
