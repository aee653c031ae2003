//! Acceptance suite: one PASS or FAIL line per criterion, non-zero exit if
//! any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use eslmc_core::qptl::QptlVerdict;
use eslmc_testkit::suite::{self, Tally};
use eslmc_testkit::{matching_pennies_path, QPTL_CORPUS};

const FORMULA_1: &str = "forall x:A. X K[B] exists y:B. X win_B";

struct Criterion {
    number: u8,
    passed: bool,
    summary: String,
    details: Vec<String>,
}

fn eslmc(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_eslmc"))
        .args(args)
        .env_remove("ESLMC_CAP")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn toy() -> String {
    matching_pennies_path().to_string_lossy().into_owned()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed())
}

fn golden_toy() -> Criterion {
    let ((code, out), took) = timed(|| eslmc(&["check", "--model", &toy(), "--formula", FORMULA_1, "--recall", "1"]));
    let text = String::from_utf8_lossy(&out);
    let passed = code == 0 && text.contains("result: true") && took < Duration::from_secs(1);
    Criterion {
        number: 1,
        passed,
        summary: format!("formula (1) at recall 1: exit {code} in {took:.2?}"),
        details: vec![],
    }
}

fn knowledge_claims() -> Criterion {
    let (rows, took) = timed(suite::knowledge_claims);
    let mut details = vec![format!(
        "{:<4} {:<44} {:>6} {:<8} {:>8} {:>6} {:>7}",
        "", "formula", "recall", "mode", "memoized", "naive", "claimed"
    )];
    let yes_no = |b: bool| if b { "true" } else { "false" };
    for r in &rows {
        details.push(format!(
            "{:<4} {:<44} {:>6} {:<8} {:>8} {:>6} {:>7}{}",
            r.label,
            r.formula,
            r.recall,
            r.mode.to_string(),
            yes_no(r.memoized),
            yes_no(r.naive),
            yes_no(r.claimed),
            if r.memoized == r.claimed { "" } else { "  (differs from claim)" }
        ));
    }
    let agree = rows.iter().all(|r| r.memoized == r.naive);
    Criterion {
        number: 2,
        passed: agree && took < Duration::from_secs(30),
        summary: format!(
            "{} verdicts, evaluators {} in {took:.2?}",
            rows.len(),
            if agree { "agree" } else { "DISAGREE" }
        ),
        details,
    }
}

fn tally_line(name: &str, t: &Tally) -> String {
    format!("{name}: {}/{} passed", t.instances - t.failures.len(), t.instances)
}

fn oracle_equivalence() -> Criterion {
    let (t, took) = timed(|| suite::oracle_equivalence(2024, 200, 20, 10));
    let mut details: Vec<String> = t.failures.iter().take(5).cloned().collect();
    details.insert(0, "200 toy sentences and 20 random models x 10 sentences, each at recall 1 and 2".into());
    Criterion {
        number: 3,
        passed: t.passed() && took < Duration::from_secs(300),
        summary: format!("{} in {took:.2?}", tally_line("memoized vs naive", &t)),
        details,
    }
}

fn properties() -> Criterion {
    let n = 1000;
    let (checks, took) = timed(|| {
        vec![
            ("S5 axioms", suite::s5_axioms(31, n)),
            ("until unfolding (recall 1)", suite::until_unfolding(32, n, &[1])),
            ("forall/exists duality", suite::quantifier_duality(33, n)),
            ("bound-variable independence", suite::bound_variable_independence(34, n)),
            ("sentence independence", suite::sentence_independence(35, n)),
        ]
    });
    let passed = checks.iter().all(|(_, t)| t.passed() && t.instances >= n);
    let mut details: Vec<String> = checks.iter().map(|(name, t)| tally_line(name, t)).collect();
    let longer = suite::until_unfolding(32, n, &[2]);
    details.push(format!(
        "informational, until unfolding at recall 2: {} counterexamples in {} instances",
        longer.failures.len(),
        longer.instances
    ));
    Criterion {
        number: 4,
        passed,
        summary: format!("{} properties with at least {n} instances each in {took:.2?}", checks.len()),
        details,
    }
}

fn strategy_arithmetic() -> Criterion {
    let (code, out) = eslmc(&["info", "--model", &toy(), "--recall", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap_or_default();
    let count = |agent: usize, mode: &str| v["strategies"][agent][mode].as_str().unwrap_or("?").to_string();
    let (a, b, bu) = (count(0, "perfect"), count(1, "perfect"), count(1, "uniform"));
    Criterion {
        number: 5,
        passed: code == 0 && a == "2" && b == "4" && bu == "2",
        summary: format!("A {a} positional, B {b} positional ({bu} uniform)"),
        details: vec![],
    }
}

fn lasso() -> Criterion {
    let (t, took) = timed(|| suite::lasso_invariants(61, 1000));
    Criterion {
        number: 6,
        passed: t.passed() && t.instances >= 1000,
        summary: format!("{} in {took:.2?}", tally_line("bounded lassos with threefold replay", &t)),
        details: t.failures.iter().take(5).cloned().collect(),
    }
}

fn qptl_bridge() -> Criterion {
    let (rows, took) = timed(|| suite::qptl_corpus(2, 1));
    let mut details = Vec::new();
    for r in &rows {
        details.push(format!(
            "{:<48} pipeline {:<22} oracle {:<5} {}",
            r.formula,
            r.pipeline.label(),
            if r.oracle.is_sat() { "SAT" } else { "UNSAT" },
            if r.agrees() { "ok" } else { "MISMATCH" }
        ));
    }
    let headline = rows
        .iter()
        .find(|r| r.formula == "exists p. p & X !p")
        .is_some_and(|r| matches!(r.pipeline, QptlVerdict::Sat { .. }) && r.replayed);
    let agree = rows.iter().filter(|r| r.agrees()).count();
    Criterion {
        number: 7,
        passed: rows.len() == QPTL_CORPUS.len() && agree == rows.len() && headline && took < Duration::from_secs(120),
        summary: format!(
            "{agree}/{} corpus formulas agree, alt preserved, headline SAT replayed: {headline}, in {took:.2?}",
            rows.len()
        ),
        details,
    }
}

fn determinism() -> Criterion {
    let model = toy();
    let mut runs: Vec<(String, Vec<String>)> = vec![
        (
            "formula (1)".into(),
            ["check", "--model", &model, "--formula", FORMULA_1, "--recall", "1", "--format", "json"]
                .map(String::from)
                .to_vec(),
        ),
        (
            "info".into(),
            ["info", "--model", &model, "--recall", "1", "--format", "json"].map(String::from).to_vec(),
        ),
    ];
    for (formula, _) in QPTL_CORPUS {
        runs.push((
            formula.to_string(),
            ["qptl-sat", "--formula", formula, "--recall", "2", "--format", "json"]
                .map(String::from)
                .to_vec(),
        ));
    }
    let mut differing = Vec::new();
    for (name, args) in &runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        // `info` takes no worker count; it is compared across repeated runs.
        let with_jobs = |jobs: &str| {
            let mut a = args.clone();
            if a[0] != "info" {
                a.extend(["--jobs", jobs]);
            }
            eslmc(&a).1
        };
        let reference = with_jobs("1");
        let same = [with_jobs("8"), with_jobs("1"), with_jobs("8")].iter().all(|o| *o == reference);
        if !same || reference.is_empty() {
            differing.push(name.clone());
        }
    }
    Criterion {
        number: 8,
        passed: differing.is_empty(),
        summary: format!(
            "{} reports compared over jobs 1, 8, 1, 8; {} differ",
            runs.len(),
            differing.len()
        ),
        details: differing,
    }
}

fn main() -> ExitCode {
    let criteria = [
        golden_toy as fn() -> Criterion,
        knowledge_claims,
        oracle_equivalence,
        properties,
        strategy_arithmetic,
        lasso,
        qptl_bridge,
        determinism,
    ];
    let mut failed = 0;
    for run in criteria {
        let c = run();
        println!(
            "criterion {}: {}: {}",
            c.number,
            if c.passed { "PASS" } else { "FAIL" },
            c.summary
        );
        for line in &c.details {
            println!("    {line}");
        }
        failed += usize::from(!c.passed);
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
