//! Test support for eslmc: a naive reference evaluator, random generators
//! and the bundled matching-pennies model.

pub mod gen;
pub mod naive;
pub mod suite;

use eslmc_core::model::{Ecgm, ModelDocument};

/// The matching-pennies model shipped with the repository.
pub const MATCHING_PENNIES: &str = include_str!("../../../models/matching-pennies.json");

pub fn matching_pennies() -> Ecgm {
    let (m, warnings) = ModelDocument::from_json(MATCHING_PENNIES)
        .expect("bundled model parses")
        .validate()
        .expect("bundled model is valid");
    assert!(warnings.is_empty());
    m
}

/// Path of the bundled model, for driving the command-line tool.
pub fn matching_pennies_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models/matching-pennies.json")
}

/// The minimal single-agent self-loop model.
pub fn self_loop() -> Ecgm {
    let doc = r#"{
        "agents": [{"name": "i", "locals": ["l"], "actions": ["a"], "protocol": {"l": ["a"]}}],
        "initial": ["l"],
        "transitions": [{"from": ["l"], "action": ["a"], "to": ["l"]}]
    }"#;
    ModelDocument::from_json(doc).unwrap().validate().unwrap().0
}

/// QPTL formulas over at most two propositions with their satisfiability.
/// Every entry has temporal depth at most 3 and quantifier depth at most 2,
/// and its satisfiable instances have evaluations that depend only on the
/// current valuation.
pub const QPTL_CORPUS: [(&str, bool); 20] = [
    ("exists p. p & X !p", true),
    ("exists p. p & !p", false),
    ("exists p. G !p", true),
    ("exists p. exists q. p & !q & X (q & !p)", true),
    ("exists p. G p", true),
    ("exists p. p & F !p", true),
    ("exists p. G F p & G F !p", true),
    ("exists p. F G p", true),
    ("exists p. !p & X !p & G p", false),
    ("exists p. G (p -> X !p) & G (!p -> X p)", true),
    ("exists p. exists q. G ((p -> !q) & (!q -> p))", true),
    ("exists p. p U !p", true),
    ("exists p. F p & G !p", false),
    ("exists p. exists q. p U q", true),
    ("exists p. p & G (p -> X p) & F !p", false),
    ("forall q. exists p. G (q -> X p)", true),
    ("exists q. forall p. q | p", true),
    ("!(exists p. G p)", false),
    ("p & G (p -> X !p) & G (!p -> X p)", true),
    ("exists p. forall q. q & p", false),
];
