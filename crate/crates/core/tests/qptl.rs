use eslmc_core::eval::EvalConfig;
use eslmc_core::qptl::{
    build_valuation_model, holds, parse_qptl, qptl_oracle, qptl_sat, translate, LassoWord, OracleVerdict,
    PeriodicEvaluation, Qptl, QptlError, QptlVerdict, REPLAY_BOUNDS,
};
use proptest::prelude::*;

fn q(text: &str) -> Qptl {
    parse_qptl(text).unwrap()
}

fn cfg(recall: usize) -> EvalConfig {
    EvalConfig {
        recall,
        ..EvalConfig::default()
    }
}

fn word(text: &str) -> LassoWord {
    let bits = |s: &str| s.split(',').filter(|b| !b.is_empty()).map(|b| b == "t").collect();
    let (prefix, cycle) = text.split_once('(').unwrap();
    LassoWord::new(bits(prefix), bits(cycle.trim_end_matches(")^w")))
}

fn evaluation(pairs: &[(&str, &str)]) -> PeriodicEvaluation {
    PeriodicEvaluation {
        words: pairs.iter().map(|(p, w)| (p.to_string(), word(w))).collect(),
    }
}

#[test]
fn valuation_models_have_every_valuation() {
    for n in 1..=4 {
        let ap: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let m = build_valuation_model(&ap).unwrap();
        assert_eq!(m.num_states(), 1 << n);
        assert_eq!(m.agent_names(), ap);
        for s in m.reachable_states() {
            assert_eq!(m.enabled_joint_actions(s).len(), 1 << n);
        }
        for (i, p) in ap.iter().enumerate() {
            for (id, s) in m.reachable_states().iter().enumerate() {
                assert_eq!(m.holds(p, id), s.local(i) == 1);
            }
        }
        assert_eq!(m.state_plain(m.initial()), vec!["bot"; n].join(","));
    }
    assert!(matches!(build_valuation_model::<&str>(&[]), Err(QptlError::EmptyAP)));
    assert!(matches!(
        build_valuation_model(&["p", "p"]),
        Err(QptlError::DuplicateProposition(_))
    ));
}

#[test]
fn translation_examples() {
    let show = |text: &str, ap: &[&str]| {
        let m = build_valuation_model(ap).unwrap();
        translate(&q(text), ap).unwrap().display(&m.agent_names()).to_string()
    };
    assert_eq!(show("p", &["p"]), "X p");
    assert_eq!(show("exists p. p & X !p", &["p"]), "exists x_p:p. X p & X !X p");
    assert_eq!(show("p U F q", &["p", "q"]), "X p U F X q");
    assert!(matches!(
        translate(&q("exists r. r"), &["p"]),
        Err(QptlError::UnknownProposition(ref r)) if r == "r"
    ));
    assert!(matches!(parse_qptl("K[p] p"), Err(QptlError::Knowledge)));
    assert!(matches!(parse_qptl("p &"), Err(QptlError::Parse(_))));
}

#[test]
fn satisfiability_examples() {
    for recall in [1, 2] {
        let sat = qptl_sat(&q("exists p. p & X !p"), &["p"], cfg(recall)).unwrap();
        assert_eq!(sat.verdict, QptlVerdict::Sat { evaluation: evaluation(&[("p", "(t,f)^w")]) });
        assert_eq!(sat.alt, 0);

        let unsat = qptl_sat(&q("exists p. p & !p"), &["p"], cfg(recall)).unwrap();
        assert_eq!(unsat.verdict, QptlVerdict::Unsat { recall });
        assert_eq!(unsat.verdict.label(), format!("UNSAT at recall {recall}"));

        let never = qptl_sat(&q("exists p. G !p"), &["p"], cfg(recall)).unwrap();
        assert_eq!(never.verdict, QptlVerdict::Sat { evaluation: evaluation(&[("p", "(f)^w")]) });
    }
    let two = qptl_sat(&q("exists p. exists q. p & !q & X (q & !p)"), &["p", "q"], cfg(1)).unwrap();
    assert!(two.verdict.is_sat());
}

#[test]
fn sat_evaluations_replay() {
    for text in [
        "exists p. p & X !p",
        "exists p. G F p & G F !p",
        "exists p. exists q. p U q",
        "p & G (p -> X !p)",
    ] {
        let phi = q(text);
        let ap = phi.propositions();
        for recall in [1, 2] {
            let out = qptl_sat(&phi, &ap, cfg(recall)).unwrap();
            let QptlVerdict::Sat { evaluation } = out.verdict else {
                panic!("{text} at recall {recall}: {:?}", out.verdict);
            };
            let (_, body) = phi.leading_exists();
            assert!(holds(body, &evaluation, REPLAY_BOUNDS), "{text}");
        }
    }
}

#[test]
fn oracle_examples() {
    let sat = qptl_oracle(&q("exists p. p & X !p"), 2, 2).unwrap();
    assert_eq!(sat, OracleVerdict::Sat { evaluation: evaluation(&[("p", "t,(f)^w")]) });
    assert_eq!(
        qptl_oracle(&q("exists p. p & !p"), 4, 4).unwrap(),
        OracleVerdict::UnsatWithinBounds { prefix: 4, period: 4 }
    );
    assert!(qptl_oracle(&q("exists p. exists q. p & !q & X (q & !p)"), 2, 2).unwrap().is_sat());
    assert!(matches!(qptl_oracle(&q("p"), 0, 3), Err(QptlError::BoundsExceeded { .. })));
    assert!(matches!(qptl_oracle(&q("p"), 9, 9), Err(QptlError::BoundsExceeded { .. })));
}

#[test]
fn direct_semantics_on_words() {
    let alternating = evaluation(&[("p", "(t,f)^w")]);
    assert!(holds(&q("p & X !p & X X p"), &alternating, (1, 1)));
    assert!(holds(&q("G F p & G F !p"), &alternating, (1, 1)));
    assert!(!holds(&q("F G p"), &alternating, (1, 1)));
    let late = evaluation(&[("p", "f,f,f,(t)^w")]);
    assert!(holds(&q("!p U p"), &late, (1, 1)));
    assert!(holds(&q("F G p"), &late, (1, 1)));
    // Inner quantifiers range over words of bounded shape.
    assert!(holds(&q("exists r. r & X !r"), &late, (1, 1)));
    assert!(holds(&q("forall r. r | !r"), &late, (1, 1)));
    assert!(!holds(&q("forall r. r"), &late, (1, 1)));
}

#[test]
fn lasso_words_are_canonical() {
    assert_eq!(word("t,f,t,(t)^w").canonical(), word("t,f,(t)^w"));
    assert_eq!(word("(t,f,t,f)^w").canonical(), word("(t,f)^w"));
    assert_eq!(word("f,(t,f)^w").canonical(), word("(f,t)^w"));
    assert_eq!(word("t,f,(t)^w").to_string(), "t,f,(t)^w");
    let shapes = LassoWord::shapes(2, 2);
    assert_eq!(shapes.len(), shapes.iter().map(LassoWord::canonical).collect::<std::collections::BTreeSet<_>>().len());
    for w in &shapes {
        let c = w.canonical();
        assert!(c.prefix.len() <= 2 && c.cycle.len() <= 2);
        for n in 0..12 {
            assert_eq!(w.at(n), c.at(n));
        }
    }
    assert_eq!(LassoWord::shapes(0, 1).len(), 2);
}

/// Every `X` restarts from a single state, so what an agent writes can
/// depend only on the current valuation. `p & X p & X X !p` needs the
/// all-true valuation to be followed once by true and once by false, so
/// no strategy produces it at any recall, although the formula is
/// satisfiable.
#[test]
fn chained_next_needs_history() {
    let phi = q("p & X p & X X !p");
    assert!(qptl_oracle(&phi, 3, 3).unwrap().is_sat());
    for recall in [1, 2, 3] {
        let out = qptl_sat(&phi, &["p"], cfg(recall)).unwrap();
        assert_eq!(out.verdict, QptlVerdict::Unsat { recall });
    }
}

/// At recall 2 the checker accepts a formula that is unsatisfiable, because
/// subformulas restart from singleton windows while the run being scanned
/// does not. The replay step refuses to confirm the evaluation.
#[test]
fn unsatisfiable_formula_is_unconfirmed_at_recall_two() {
    let phi = q("!p & G (!p -> X !p) & F p");
    assert!(!qptl_oracle(&phi, 3, 3).unwrap().is_sat());
    assert_eq!(qptl_sat(&phi, &["p"], cfg(1)).unwrap().verdict, QptlVerdict::Unsat { recall: 1 });
    let out = qptl_sat(&phi, &["p"], cfg(2)).unwrap();
    let QptlVerdict::Unconfirmed { recall: 2, evaluation } = out.verdict else {
        panic!("expected an unconfirmed verdict, got {:?}", out.verdict);
    };
    assert!(!holds(&phi, &evaluation, REPLAY_BOUNDS));
}

fn arb_qptl() -> impl Strategy<Value = Qptl> {
    let leaf = prop_oneof![
        Just(Qptl::True),
        prop::sample::select(vec!["p", "q"]).prop_map(Qptl::atom),
    ];
    leaf.prop_recursive(5, 32, 2, |inner| {
        let prop = prop::sample::select(vec!["p", "q"]);
        prop_oneof![
            inner.clone().prop_map(Qptl::not),
            inner.clone().prop_map(Qptl::next),
            inner.clone().prop_map(Qptl::eventually),
            inner.clone().prop_map(Qptl::globally),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Qptl::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Qptl::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Qptl::until(a, b)),
            (prop.clone(), inner.clone()).prop_map(|(p, a)| Qptl::exists(p, a)),
            (prop, inner).prop_map(|(p, a)| Qptl::forall(p, a)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn translation_preserves_alternation_depth(phi in arb_qptl()) {
        let t = translate(&phi, &["p", "q"]).unwrap();
        prop_assert_eq!(t.alternation_depth(), phi.alternation_depth());
    }

    #[test]
    fn qptl_print_then_parse_is_identity(phi in arb_qptl()) {
        let printed = phi.to_string();
        prop_assert_eq!(parse_qptl(&printed).unwrap(), phi);
    }
}
