use proptest::prelude::*;

use super::*;

const ROSTER: [&str; 2] = ["A", "B"];

fn parse(text: &str) -> Formula {
    parse_formula(text, &ROSTER).unwrap()
}

fn a(name: &str) -> Formula {
    Formula::atom(name)
}

fn ab() -> AgentSet {
    AgentSet::all(2)
}

const FORMULA_1: &str = "forall x:A. X K[B] exists y:B. X win_B";

#[test]
fn parses_the_forall_know_exists_example() {
    let want = Formula::forall(
        Var::new("x", 0),
        Formula::next(Formula::know(
            1,
            Formula::exists(Var::new("y", 1), Formula::next(a("win_B"))),
        )),
    );
    assert_eq!(parse(FORMULA_1), want);
}

#[test]
fn parses_implication_and_precedence() {
    assert_eq!(parse("win_A -> win_A"), Formula::implies(a("win_A"), a("win_A")));
    assert_eq!(
        parse("p U q -> X p"),
        Formula::implies(Formula::until(a("p"), a("q")), Formula::next(a("p")))
    );
    assert_eq!(
        parse("p & q | r"),
        Formula::or(Formula::and(a("p"), a("q")), a("r"))
    );
    assert_eq!(
        parse("p -> q -> r"),
        Formula::implies(a("p"), Formula::implies(a("q"), a("r")))
    );
    assert_eq!(
        parse("p U q U r"),
        Formula::until(a("p"), Formula::until(a("q"), a("r")))
    );
    assert_eq!(
        parse("!p U X q"),
        Formula::until(Formula::not(a("p")), Formula::next(a("q")))
    );
    assert_eq!(
        parse("exists x:A. p -> q"),
        Formula::exists(Var::new("x", 0), Formula::implies(a("p"), a("q")))
    );
}

#[test]
fn desugars_derived_operators() {
    assert_eq!(parse("F p"), Formula::until(Formula::truth(), a("p")));
    assert_eq!(
        parse("G p"),
        Formula::not(Formula::until(Formula::truth(), Formula::not(a("p"))))
    );
    assert_eq!(parse("false"), Formula::not(Formula::truth()));
    assert_eq!(
        parse("p & q"),
        Formula::not(Formula::implies(a("p"), Formula::not(a("q"))))
    );
    assert_eq!(parse("p | q"), Formula::implies(Formula::not(a("p")), a("q")));
}

#[test]
fn reports_syntax_errors_and_unknown_agents() {
    assert!(matches!(
        parse_formula("exists x:C. p", &ROSTER),
        Err(ParseError::UnknownAgent { ref name, position: 9 }) if name == "C"
    ));
    assert!(matches!(
        parse_formula("K[Z] p", &ROSTER),
        Err(ParseError::UnknownAgent { .. })
    ));
    assert!(matches!(
        parse_formula("p &", &ROSTER),
        Err(ParseError::Syntax { position: 3, .. })
    ));
    assert!(matches!(
        parse_formula("(p", &ROSTER),
        Err(ParseError::Syntax { .. })
    ));
    assert!(matches!(
        parse_formula("p q", &ROSTER),
        Err(ParseError::Syntax { position: 2, .. })
    ));
    assert!(matches!(
        parse_formula("p - q", &ROSTER),
        Err(ParseError::Syntax { position: 2, .. })
    ));
    assert!(parse_formula("U", &ROSTER).is_err());
    assert!(parse_formula("exists x. p", &ROSTER).is_err());
}

#[test]
fn free_agents_follow_the_table() {
    assert_eq!(parse("win_A").free_agents(2), AgentSet::EMPTY);
    assert_eq!(parse("X win_A").free_agents(2), ab());
    assert_eq!(parse("win_A U win_B").free_agents(2), ab());
    assert_eq!(parse(FORMULA_1).free_agents(2), AgentSet::singleton(1));
    assert_eq!(parse("K[A] X p").free_agents(2), ab());
    assert_eq!(
        parse("exists x:A. X p").free_agents(2),
        AgentSet::singleton(1)
    );
    assert_eq!(parse("forall x:A. p").free_agents(2), AgentSet::EMPTY);
}

#[test]
fn sentences() {
    assert!(parse("exists x:A. exists y:B. X win_A").is_sentence(2));
    assert!(parse("win_A").is_sentence(2));
    assert!(!parse(FORMULA_1).is_sentence(2));
}

#[test]
fn alternation_depth_examples() {
    assert_eq!(parse(FORMULA_1).alternation_depth(), 1);
    assert_eq!(parse("exists x:A. exists y:B. X win_A").alternation_depth(), 0);
    assert_eq!(
        parse("!(exists x:A. forall y:B. exists z:A. X win_A)").alternation_depth(),
        2
    );
    assert_eq!(parse("win_A").alternation_depth(), 0);
    assert_eq!(
        parse("(exists x:A. X p) -> exists y:B. X p").alternation_depth(),
        0
    );
    assert_eq!(
        parse("(forall x:A. X p) -> exists y:B. X p").alternation_depth(),
        0
    );
    assert_eq!(
        parse("exists x:A. (exists y:B. X p) -> q").alternation_depth(),
        1
    );
}

#[test]
fn profile_partitions_the_roster() {
    let p = parse(FORMULA_1).profile(2);
    assert_eq!(p.free, AgentSet::singleton(1));
    assert_eq!(p.bound, AgentSet::singleton(0));
    assert_eq!(p.alt, 1);
    assert!(!p.is_sentence);
}

#[test]
fn printing_resugars() {
    for text in [
        FORMULA_1,
        "true",
        "false",
        "p & q | r",
        "F p -> G q",
        "!(p U q) U X r",
        "exists x:A. p -> q",
        "(exists x:A. X p) -> q",
        "X (exists x:A. X p)",
        "K[A] K[B] (p | !q)",
    ] {
        let f = parse(text);
        let printed = f.display(&ROSTER).to_string();
        assert_eq!(parse(&printed), f, "{text} printed as {printed}");
    }
    assert_eq!(parse("p & q | r").display(&ROSTER).to_string(), "p & q | r");
    assert_eq!(parse("F p -> G q").display(&ROSTER).to_string(), "F p -> G q");
}

#[test]
fn node_ids_are_unique() {
    let f = parse("p & p");
    let g = parse("p & p");
    assert_eq!(f, g);
    assert_ne!(f.id(), g.id());
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::truth()),
        Just(Formula::falsity()),
        prop::sample::select(vec!["p", "q", "win_A"]).prop_map(Formula::atom),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        let var = (prop::sample::select(vec!["x", "y"]), 0usize..2).prop_map(|(n, i)| Var::new(n, i));
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::eventually),
            inner.clone().prop_map(Formula::globally),
            (0usize..2, inner.clone()).prop_map(|(i, f)| Formula::know(i, f)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)),
            (var.clone(), inner.clone()).prop_map(|(v, f)| Formula::exists(v, f)),
            (var, inner).prop_map(|(v, f)| Formula::forall(v, f)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_then_parse_is_identity(f in arb_formula()) {
        let printed = f.display(&ROSTER).to_string();
        let parsed = parse_formula(&printed, &ROSTER);
        prop_assert!(parsed.is_ok(), "{printed}: {parsed:?}");
        prop_assert_eq!(parsed.unwrap(), f);
    }

    #[test]
    fn free_and_bound_partition_the_roster(f in arb_formula()) {
        let p = f.profile(2);
        prop_assert_eq!(p.free.union(p.bound), ab());
        prop_assert!(p.free.intersect(p.bound).is_empty());
        prop_assert_eq!(p.is_sentence, p.free.is_empty());
    }

    #[test]
    fn double_negation_keeps_alternation_depth(f in arb_formula()) {
        let g = Formula::not(Formula::not(f.clone()));
        prop_assert_eq!(g.alternation_depth(), f.alternation_depth());
    }
}
