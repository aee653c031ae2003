//! The memoized evaluator against the naive reference evaluator.

use eslmc_core::eval::{EvalConfig, Evaluator};
use eslmc_core::strategy::StrategyMode;
use eslmc_core::Ecgm;
use eslmc_testkit::gen::{random_assignment, random_formula, random_model, random_sentence, ATOMS};
use eslmc_testkit::naive::Naive;
use eslmc_testkit::matching_pennies;
use rand::rngs::StdRng;
use rand::SeedableRng;

const TOY_ATOMS: [&str; 2] = ["win_A", "win_B"];

fn compare_sentences(model: &Ecgm, atoms: &[&str], recall: usize, mode: StrategyMode, count: usize, seed: u64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let naive = Naive::new(model, recall, mode, 1 << 12).expect("small strategy spaces");
    let cfg = EvalConfig {
        recall,
        mode,
        ..EvalConfig::default()
    };
    let ev = Evaluator::new(model, cfg).unwrap();
    let roster = model.agent_names();
    for _ in 0..count {
        let phi = random_sentence(&mut rng, atoms, model.num_agents(), 4);
        let expected = naive.satisfied_at_state(model.initial_id(), &phi);
        let got = ev.holds_in_model(&phi).unwrap();
        assert_eq!(got, expected, "γ={recall} {mode}: {}", phi.display(&roster));
    }
}

#[test]
fn toy_sentences_agree_at_both_recalls() {
    let m = matching_pennies();
    for (k, recall) in [1, 2].into_iter().enumerate() {
        for mode in [StrategyMode::Perfect, StrategyMode::Uniform] {
            compare_sentences(&m, &TOY_ATOMS, recall, mode, 100, 7 + k as u64);
        }
    }
}

#[test]
fn random_model_sentences_agree() {
    let mut rng = StdRng::seed_from_u64(11);
    for k in 0..10 {
        for recall in [1, 2] {
            let m = random_model(&mut rng, 6, recall, 1 << 10);
            compare_sentences(&m, &ATOMS, recall, StrategyMode::Perfect, 10, 100 + k);
        }
    }
}

#[test]
fn open_formulas_agree_under_random_assignments() {
    let m = matching_pennies();
    let mut rng = StdRng::seed_from_u64(5);
    for recall in [1, 2] {
        let cfg = EvalConfig {
            recall,
            ..EvalConfig::default()
        };
        let ev = Evaluator::new(&m, cfg).unwrap();
        let naive = Naive::new(&m, recall, StrategyMode::Perfect, 1 << 12).unwrap();
        for _ in 0..200 {
            let phi = random_formula(&mut rng, &TOY_ATOMS, 2, 4);
            let chi = random_assignment(&mut rng, &m, ev.windows(), StrategyMode::Perfect);
            let tables = naive.tables_of(&chi, ev.windows());
            for s in 0..m.num_states() {
                assert_eq!(
                    ev.satisfies(s, &chi, &phi).unwrap(),
                    naive.satisfies(s, &tables, &phi),
                    "{}",
                    phi.display(&m.agent_names())
                );
            }
        }
    }
}
