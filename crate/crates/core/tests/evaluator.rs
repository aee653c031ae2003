use std::sync::Arc;

use eslmc_core::eval::{EvalConfig, EvalError, Evaluator};
use eslmc_core::strategy::{Assignment, Strategy, StrategyError, StrategyMode};
use eslmc_core::{parse_formula, Ecgm, Formula, ModelDocument};

const TOY: &str = include_str!("../../../models/matching-pennies.json");

const FORMULA_1: &str = "forall x:A. X K[B] exists y:B. X win_B";

fn toy() -> Ecgm {
    ModelDocument::from_json(TOY).unwrap().validate().unwrap().0
}

fn parse(m: &Ecgm, text: &str) -> Formula {
    parse_formula(text, &m.agent_names()).unwrap()
}

fn sid(m: &Ecgm, a: &str, b: &str) -> usize {
    m.state_id(&m.parse_state(&[a, b]).unwrap()).unwrap()
}

fn cfg(recall: usize) -> EvalConfig {
    EvalConfig {
        recall,
        ..EvalConfig::default()
    }
}

fn all_assignments(ev: &Evaluator<'_>) -> Vec<Assignment> {
    let a: Vec<Strategy> = ev.space(0).unwrap().iter().collect();
    let b: Vec<Strategy> = ev.space(1).unwrap().iter().collect();
    a.iter()
        .flat_map(|fa| b.iter().map(move |fb| Assignment::new(vec![fa.clone(), fb.clone()]).unwrap()))
        .collect()
}

#[test]
fn atoms_ignore_the_assignment() {
    let m = toy();
    let ev = Evaluator::new(&m, cfg(1)).unwrap();
    let phi = parse(&m, "win_A");
    for chi in all_assignments(&ev) {
        assert!(ev.satisfies(sid(&m, "0", "0"), &chi, &phi).unwrap());
        assert!(!ev.satisfies(sid(&m, "0", "1"), &chi, &phi).unwrap());
    }
    assert!(ev.satisfied_at_state(sid(&m, "0", "0"), &phi).unwrap());
}

#[test]
fn knowledge_ranges_over_the_class() {
    let m = toy();
    let ev = Evaluator::new(&m, cfg(1)).unwrap();
    let phi = parse(&m, "K[B] win_A");
    for chi in all_assignments(&ev) {
        assert!(!ev.satisfies(sid(&m, "0", "lam"), &chi, &phi).unwrap());
    }
    let knows_own_state = parse(&m, "K[B] !win_B");
    assert!(ev.satisfied_at_state(sid(&m, "0", "lam"), &knows_own_state).unwrap());
}

#[test]
fn formula_one_holds_under_every_assignment() {
    let m = toy();
    for recall in [1, 2] {
        let ev = Evaluator::new(&m, cfg(recall)).unwrap();
        let phi = parse(&m, FORMULA_1);
        for chi in all_assignments(&ev) {
            assert!(ev.satisfies(m.initial_id(), &chi, &phi).unwrap());
        }
        assert!(ev.satisfied_at_state(m.initial_id(), &phi).unwrap());
        assert!(ev.holds_in_model(&phi).unwrap());
    }
}

#[test]
fn holds_in_model_examples() {
    let m = toy();
    let ev = Evaluator::new(&m, cfg(1)).unwrap();
    assert!(ev.holds_in_model(&parse(&m, "true")).unwrap());
    assert!(!ev.holds_in_model(&parse(&m, "X (win_A | win_B)")).unwrap());
    assert!(!ev.holds_in_model(&parse(&m, "win_A")).unwrap());
    assert!(ev.holds_in_model(&parse(&m, "exists x:A. X !win_A")).unwrap());
    assert!(ev.holds_in_model(&parse(&m, "exists x:A. exists y:B. F win_A")).unwrap());
    // B observes A's move at (i,lam), so B can match or mismatch it.
    assert!(ev.holds_in_model(&parse(&m, "forall x:A. exists y:B. F win_A")).unwrap());
    assert!(!ev.holds_in_model(&parse(&m, "exists x:A. forall y:B. F win_A")).unwrap());
    assert!(ev.holds_in_model(&parse(&m, "forall x:A. exists y:B. G !win_A")).unwrap());
}

#[test]
fn sentences_agree_across_all_assignments() {
    let m = toy();
    let ev = Evaluator::new(&m, cfg(1)).unwrap();
    for text in [
        "forall x:A. X exists y:B. K[B] X win_B",
        "forall x:A. X K[B] K[A] exists y:B. X win_A",
        "exists x:A. forall y:B. F (win_A | win_B)",
    ] {
        let phi = parse(&m, text);
        let expected = ev.holds_in_model(&phi).unwrap();
        for chi in all_assignments(&ev) {
            assert_eq!(ev.satisfies(m.initial_id(), &chi, &phi).unwrap(), expected, "{text}");
        }
    }
}

#[test]
fn until_is_decided_on_the_lasso() {
    let m = toy();
    let ev = Evaluator::new(&m, cfg(1)).unwrap();
    let chi = ev.default_assignment();
    // The least assignment plays set0 for both agents: s0, s0λ, s00, s0, ...
    let s0 = m.initial_id();
    assert!(ev.satisfies(s0, &chi, &parse(&m, "F win_A")).unwrap());
    assert!(!ev.satisfies(s0, &chi, &parse(&m, "F win_B")).unwrap());
    assert!(ev.satisfies(s0, &chi, &parse(&m, "!win_A U win_A")).unwrap());
    assert!(!ev.satisfies(s0, &chi, &parse(&m, "!win_A U win_B")).unwrap());
    assert!(ev.satisfies(s0, &chi, &parse(&m, "G F win_A")).unwrap());
    assert!(!ev.satisfies(s0, &chi, &parse(&m, "G win_A")).unwrap());
}

#[test]
fn free_functions_resolve_labels() {
    let m = toy();
    let s00 = m.parse_state(&["0", "0"]).unwrap();
    let chi = Evaluator::new(&m, cfg(1)).unwrap().default_assignment();
    let phi = parse(&m, "win_A");
    assert!(eslmc_core::satisfies(&m, &s00, &chi, &phi, cfg(1)).unwrap());
    assert!(eslmc_core::satisfied_at_state(&m, &s00, &phi, cfg(1)).unwrap());
    let unreachable = m.parse_state(&["eA", "0"]).unwrap();
    assert!(matches!(
        eslmc_core::satisfied_at_state(&m, &unreachable, &phi, cfg(1)),
        Err(EvalError::Unreachable(_))
    ));
    assert!(eslmc_core::holds_in_model(&m, &parse(&m, FORMULA_1), cfg(1)).unwrap());
}

#[test]
fn caps_and_recall_are_checked() {
    let m = toy();
    let small = EvalConfig {
        cap: 3,
        ..cfg(1)
    };
    let ev = Evaluator::new(&m, small).unwrap();
    assert!(matches!(
        ev.holds_in_model(&parse(&m, "exists y:B. X win_B")),
        Err(EvalError::Strategy(StrategyError::SearchSpaceExceeded { .. }))
    ));
    // A sentence quantifying only over A fits: A has two strategies.
    assert!(ev.holds_in_model(&parse(&m, "forall x:A. K[A] !win_A")).is_ok());
    // Free agents are enumerated too: B stays free here.
    assert!(ev.holds_in_model(&parse(&m, "exists x:A. X !win_A")).is_err());
    assert!(Evaluator::new(&m, cfg(0)).is_err());
}

#[test]
fn cache_and_workers_do_not_change_verdicts() {
    let m = toy();
    let texts = [
        FORMULA_1,
        "forall x:A. X exists y:B. K[B] X win_B",
        "forall x:A. X K[B] K[A] exists y:B. X win_A",
        "forall x:A. X K[B] exists y:B. K[A] X win_A",
        "exists x:A. forall y:B. F (win_A | win_B)",
        "forall x:A. exists y:B. G !win_A",
        "K[A] exists y:B. X X win_B",
    ];
    for recall in [1, 2] {
        for mode in [StrategyMode::Perfect, StrategyMode::Uniform] {
            let base = EvalConfig {
                recall,
                mode,
                ..EvalConfig::default()
            };
            let reference = Evaluator::new(&m, EvalConfig { cache: false, ..base }).unwrap();
            let parallel = Evaluator::new(&m, EvalConfig { jobs: 8, ..base }).unwrap();
            let cached = Evaluator::new(&m, base).unwrap();
            for text in texts {
                let phi = parse(&m, text);
                let want = reference.holds_in_model(&phi).unwrap();
                assert_eq!(cached.holds_in_model(&phi).unwrap(), want, "{text}");
                assert_eq!(parallel.holds_in_model(&phi).unwrap(), want, "{text}");
            }
            assert!(cached.stats().cache_hits > 0);
            assert_eq!(reference.stats().cache_hits, 0);
        }
    }
}

/// Every subformula is evaluated from a fresh singleton window, so `X`
/// inside an unfolded until does not see the history the run carried.
/// With recall 2 this separates `F ψ` from `ψ | X F ψ`.
#[test]
fn until_unfolding_needs_positional_strategies() {
    let m = toy();
    let ev = Evaluator::new(&m, cfg(2)).unwrap();
    let s0l = sid(&m, "0", "lam");
    let set1 = m.agent(1).action_id("set1").unwrap();
    let layout = Arc::clone(ev.layout(1));
    let least = Strategy::least(layout.clone());
    let b = Strategy::from_fn(layout, |w| {
        if ev.windows().window(w).states() == [s0l] {
            set1
        } else {
            least.action_at(w)
        }
    })
    .unwrap();
    let chi = ev.default_assignment().with_override(1, b).unwrap();
    let s0 = m.initial_id();
    assert!(!ev.satisfies(s0, &chi, &parse(&m, "F win_B")).unwrap());
    assert!(ev.satisfies(s0, &chi, &parse(&m, "win_B | X F win_B")).unwrap());

    // Positional strategies cannot tell the two apart.
    let ev1 = Evaluator::new(&m, cfg(1)).unwrap();
    for chi in all_assignments(&ev1) {
        for s in 0..m.num_states() {
            assert_eq!(
                ev1.satisfies(s, &chi, &parse(&m, "F win_B")).unwrap(),
                ev1.satisfies(s, &chi, &parse(&m, "win_B | X F win_B")).unwrap()
            );
        }
    }
}
