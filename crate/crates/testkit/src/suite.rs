//! Sampled checks shared by the integration tests and the acceptance
//! harness. Each check returns a [`Tally`] instead of panicking, so callers
//! decide how to report failures.

use eslmc_core::eval::{EvalConfig, Evaluator};
use eslmc_core::formula::{Formula, Var};
use eslmc_core::model::{AgentId, Ecgm, StateId};
use eslmc_core::qptl::{self, qptl_oracle, OracleVerdict, QptlVerdict, REPLAY_BOUNDS};
use eslmc_core::strategy::{outcome_run, StrategyMode};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::gen::{random_assignment, random_formula, random_model, random_sentence, ATOMS};
use crate::naive::Naive;
use crate::{matching_pennies, QPTL_CORPUS};

/// Number of instances a check ran and a description of each failure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub instances: usize,
    pub failures: Vec<String>,
}

impl Tally {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures.push(describe());
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.instances += other.instances;
        self.failures.extend(other.failures);
    }
}

pub const TOY_ATOMS: [&str; 2] = ["win_A", "win_B"];

/// The three knowledge claims about the toy model, in order, with the
/// verdict asserted for each in the literature on this example.
pub const CLAIMED_FORMULAS: [(&str, &str, bool); 3] = [
    ("(2)", "forall x:A. X exists y:B. K[B] X win_B", false),
    ("(3)", "forall x:A. X K[B] K[A] exists y:B. X win_A", true),
    ("(4)", "forall x:A. X K[B] exists y:B. K[A] X win_A", true),
];

/// Verdicts of one formula under both evaluators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimRow {
    pub label: &'static str,
    pub formula: &'static str,
    pub recall: usize,
    pub mode: StrategyMode,
    pub memoized: bool,
    pub naive: bool,
    pub claimed: bool,
}

/// Evaluates the three knowledge claims on the toy model with the memoized
/// and the naive evaluator, at recall 1 and 2 and in both modes.
pub fn knowledge_claims() -> Vec<ClaimRow> {
    let m = matching_pennies();
    let roster = m.agent_names();
    let mut rows = Vec::new();
    for recall in [1, 2] {
        for mode in [StrategyMode::Perfect, StrategyMode::Uniform] {
            let ev = Evaluator::new(&m, EvalConfig { recall, mode, ..EvalConfig::default() }).unwrap();
            let naive = Naive::new(&m, recall, mode, 1 << 12).expect("toy spaces are small");
            for (label, formula, claimed) in CLAIMED_FORMULAS {
                let phi = eslmc_core::parse_formula(formula, &roster).unwrap();
                rows.push(ClaimRow {
                    label,
                    formula,
                    recall,
                    mode,
                    memoized: ev.holds_in_model(&phi).unwrap(),
                    naive: naive.model_check(&phi),
                    claimed,
                });
            }
        }
    }
    rows
}

fn compare_sentences(
    tally: &mut Tally,
    model: &Ecgm,
    atoms: &[&str],
    recall: usize,
    mode: StrategyMode,
    count: usize,
    rng: &mut StdRng,
) {
    let naive = Naive::new(model, recall, mode, 1 << 12).expect("small strategy spaces");
    let ev = Evaluator::new(model, EvalConfig { recall, mode, ..EvalConfig::default() }).unwrap();
    let roster = model.agent_names();
    for _ in 0..count {
        let phi = random_sentence(rng, atoms, model.num_agents(), 4);
        let expected = naive.model_check(&phi);
        let got = ev.holds_in_model(&phi).unwrap();
        tally.record(got == expected, || {
            format!("recall {recall} {mode}: {} memoized {got} naive {expected}", phi.display(&roster))
        });
    }
}

/// Memoized against naive verdicts on random sentences of depth at most 4:
/// `toy_sentences` on the toy model and `models` random two-agent models
/// with `per_model` sentences each, every one at recall 1 and 2.
pub fn oracle_equivalence(seed: u64, toy_sentences: usize, models: usize, per_model: usize) -> Tally {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut tally = Tally::default();
    let toy = matching_pennies();
    for recall in [1, 2] {
        compare_sentences(&mut tally, &toy, &TOY_ATOMS, recall, StrategyMode::Perfect, toy_sentences, &mut rng);
    }
    for _ in 0..models {
        for recall in [1, 2] {
            let m = random_model(&mut rng, 6, recall, 1 << 10);
            compare_sentences(&mut tally, &m, &ATOMS, recall, StrategyMode::Perfect, per_model, &mut rng);
        }
    }
    tally
}

/// A model with the atoms formulas over it may mention.
struct Arena {
    model: Ecgm,
    atoms: Vec<&'static str>,
}

fn arenas(rng: &mut StdRng, recall: usize) -> Vec<Arena> {
    let mut out = vec![Arena {
        model: matching_pennies(),
        atoms: TOY_ATOMS.to_vec(),
    }];
    for _ in 0..5 {
        out.push(Arena {
            model: random_model(rng, 6, recall, 1 << 10),
            atoms: ATOMS.to_vec(),
        });
    }
    out
}

/// Draws `n` instances over the toy model and random models at each recall
/// in `recalls` and hands each to `check`, which returns whether the
/// property held and the formula it was checked on.
fn sample(
    seed: u64,
    n: usize,
    recalls: &[usize],
    mut check: impl FnMut(&mut StdRng, &Evaluator<'_>, &[&str]) -> (bool, Formula),
) -> Tally {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut tally = Tally::default();
    let per_recall = n.div_ceil(recalls.len());
    for &recall in recalls {
        let arenas = arenas(&mut rng, recall);
        let evaluators: Vec<Evaluator<'_>> = arenas
            .iter()
            .map(|a| Evaluator::new(&a.model, EvalConfig { recall, ..EvalConfig::default() }).unwrap())
            .collect();
        for k in 0..per_recall {
            let i = k % arenas.len();
            let (ok, phi) = check(&mut rng, &evaluators[i], &arenas[i].atoms);
            let roster = arenas[i].model.agent_names();
            tally.record(ok, || format!("recall {recall} model {i}: {}", phi.display(&roster)));
        }
    }
    tally
}

fn random_state(rng: &mut StdRng, ev: &Evaluator<'_>) -> StateId {
    rng.gen_range(0..ev.model().num_states())
}

fn holds(ev: &Evaluator<'_>, s: StateId, chi: &eslmc_core::Assignment, phi: &Formula) -> bool {
    ev.satisfies(s, chi, phi).unwrap()
}

/// `K_i ψ → ψ`, `K_i ψ → K_i K_i ψ` and `¬K_i ψ → K_i ¬K_i ψ` at random
/// states and assignments.
pub fn s5_axioms(seed: u64, n: usize) -> Tally {
    sample(seed, n, &[1, 2], |rng, ev, atoms| {
        let psi = random_formula(rng, atoms, 2, 3);
        let i = rng.gen_range(0..2);
        let chi = random_assignment(rng, ev.model(), ev.windows(), StrategyMode::Perfect);
        let s = random_state(rng, ev);
        let k = |f: Formula| Formula::know(i, f);
        let axioms = [
            Formula::implies(k(psi.clone()), psi.clone()),
            Formula::implies(k(psi.clone()), k(k(psi.clone()))),
            Formula::implies(Formula::not(k(psi.clone())), k(Formula::not(k(psi.clone())))),
        ];
        (axioms.iter().all(|a| holds(ev, s, &chi, a)), psi)
    })
}

/// `ψ U ψ'` against `ψ' ∨ (ψ ∧ X(ψ U ψ'))`.
pub fn until_unfolding(seed: u64, n: usize, recalls: &[usize]) -> Tally {
    sample(seed, n, recalls, |rng, ev, atoms| {
        let a = random_formula(rng, atoms, 2, 2);
        let b = random_formula(rng, atoms, 2, 2);
        let chi = random_assignment(rng, ev.model(), ev.windows(), StrategyMode::Perfect);
        let s = random_state(rng, ev);
        let until = Formula::until(a.clone(), b.clone());
        let unfolded = Formula::or(b, Formula::and(a, Formula::next(until.clone())));
        (holds(ev, s, &chi, &until) == holds(ev, s, &chi, &unfolded), until)
    })
}

/// `∀x_i ψ` against `¬∃x_i ¬ψ`.
pub fn quantifier_duality(seed: u64, n: usize) -> Tally {
    sample(seed, n, &[1, 2], |rng, ev, atoms| {
        let psi = random_formula(rng, atoms, 2, 3);
        let v = Var::new("d", rng.gen_range(0..2));
        let chi = random_assignment(rng, ev.model(), ev.windows(), StrategyMode::Perfect);
        let s = random_state(rng, ev);
        let forall = Formula::forall(v.clone(), psi.clone());
        let dual = Formula::not(Formula::exists(v, Formula::not(psi)));
        (holds(ev, s, &chi, &forall) == holds(ev, s, &chi, &dual), forall)
    })
}

/// Assignments agreeing on the free agents give the same verdict.
pub fn bound_variable_independence(seed: u64, n: usize) -> Tally {
    sample(seed, n, &[1, 2], |rng, ev, atoms| {
        let phi = random_formula(rng, atoms, 2, 4);
        let free = phi.free_agents(2);
        let chi = random_assignment(rng, ev.model(), ev.windows(), StrategyMode::Perfect);
        let other = random_assignment(rng, ev.model(), ev.windows(), StrategyMode::Perfect);
        let mut mixed = other;
        for i in free.iter() {
            mixed = mixed.with_override(i, chi.get(i).clone()).unwrap();
        }
        let s = random_state(rng, ev);
        (holds(ev, s, &chi, &phi) == holds(ev, s, &mixed, &phi), phi)
    })
}

/// Sentences have the same verdict under any two assignments.
pub fn sentence_independence(seed: u64, n: usize) -> Tally {
    sample(seed, n, &[1, 2], |rng, ev, atoms| {
        let phi = random_sentence(rng, atoms, 2, 4);
        let chi = random_assignment(rng, ev.model(), ev.windows(), StrategyMode::Perfect);
        let other = random_assignment(rng, ev.model(), ev.windows(), StrategyMode::Perfect);
        let s = random_state(rng, ev);
        (holds(ev, s, &chi, &phi) == holds(ev, s, &other, &phi), phi)
    })
}

/// `K_i ψ` equals `ψ` wherever the class of agent `i` is a singleton.
pub fn singleton_class_collapse(seed: u64, n: usize) -> Tally {
    sample(seed, n, &[1, 2], |rng, ev, atoms| {
        let psi = random_formula(rng, atoms, 2, 3);
        let m = ev.model();
        let singletons: Vec<(AgentId, StateId)> = (0..m.num_agents())
            .flat_map(|i| (0..m.num_states()).map(move |s| (i, s)))
            .filter(|&(i, s)| m.class_of(i, s).len() == 1)
            .collect();
        let Some(&(i, s)) = singletons.choose(rng) else {
            return (true, psi);
        };
        let chi = random_assignment(rng, m, ev.windows(), StrategyMode::Perfect);
        let know = Formula::know(i, psi.clone());
        (holds(ev, s, &chi, &know) == holds(ev, s, &chi, &psi), know)
    })
}

/// A random `∃x_A ∃y_B ψ` with `ψ` free of quantifiers.
fn existential_prenex(rng: &mut StdRng, atoms: &[&str]) -> Formula {
    loop {
        let body = random_formula(rng, atoms, 2, 3);
        if !has_quantifier(&body) {
            return Formula::exists(Var::new("x", 0), Formula::exists(Var::new("y", 1), body));
        }
    }
}

fn has_quantifier(f: &Formula) -> bool {
    use eslmc_core::FormulaKind;
    matches!(f.kind(), FormulaKind::Exists(..) | FormulaKind::Forall(..)) || f.children().into_iter().any(has_quantifier)
}

/// For existential prenex sentences, truth with uniform strategies implies
/// truth with perfect ones, and truth at recall `γ` implies truth at `γ+1`.
pub fn monotonicity(seed: u64, n: usize) -> Tally {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut tally = Tally::default();
    let mut models = vec![(matching_pennies(), TOY_ATOMS.to_vec())];
    for _ in 0..4 {
        models.push((random_model(&mut rng, 5, 2, 1 << 12), ATOMS.to_vec()));
    }
    for (m, atoms) in &models {
        let ev = |recall, mode| Evaluator::new(m, EvalConfig { recall, mode, ..EvalConfig::default() }).unwrap();
        let (p1, u1, p2) = (
            ev(1, StrategyMode::Perfect),
            ev(1, StrategyMode::Uniform),
            ev(2, StrategyMode::Perfect),
        );
        let roster = m.agent_names();
        for _ in 0..n.div_ceil(models.len()) {
            let phi = existential_prenex(&mut rng, atoms);
            let (perfect, uniform, longer) = (
                p1.holds_in_model(&phi).unwrap(),
                u1.holds_in_model(&phi).unwrap(),
                p2.holds_in_model(&phi).unwrap(),
            );
            tally.record((!uniform || perfect) && (!perfect || longer), || {
                format!("{}: uniform {uniform} perfect {perfect} recall-2 {longer}", phi.display(&roster))
            });
        }
    }
    tally
}

/// Memoized and cache-disabled evaluation agree, and so do one and eight
/// workers.
pub fn cache_transparency(seed: u64, n: usize) -> Tally {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut tally = Tally::default();
    let toy = matching_pennies();
    for recall in [1, 2] {
        let base = EvalConfig { recall, ..EvalConfig::default() };
        let cached = Evaluator::new(&toy, base).unwrap();
        let plain = Evaluator::new(&toy, EvalConfig { cache: false, ..base }).unwrap();
        let parallel = Evaluator::new(&toy, EvalConfig { jobs: 8, ..base }).unwrap();
        for _ in 0..n / 2 {
            let phi = random_sentence(&mut rng, &TOY_ATOMS, 2, 4);
            let want = plain.holds_in_model(&phi).unwrap();
            let ok = cached.holds_in_model(&phi).unwrap() == want && parallel.holds_in_model(&phi).unwrap() == want;
            tally.record(ok, || phi.display(&toy.agent_names()).to_string());
        }
    }
    tally
}

/// For random `(model, χ, s)` the outcome lasso is no longer than the
/// number of feasible windows and replays step by step through three
/// unrollings.
pub fn lasso_invariants(seed: u64, n: usize) -> Tally {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut tally = Tally::default();
    let toy = matching_pennies();
    let mut models: Vec<Ecgm> = vec![toy];
    while tally.instances < n {
        let recall = rng.gen_range(1..=3);
        if models.len() < 40 {
            models.push(random_model(&mut rng, 6, recall, u128::MAX));
        }
        let m = models.choose(&mut rng).unwrap();
        let windows = eslmc_core::feasible_windows(m, recall).unwrap();
        let chi = random_assignment(&mut rng, m, &windows, StrategyMode::Perfect);
        let joint = chi.compose();
        let s = rng.gen_range(0..m.num_states());
        let run = outcome_run(m, &windows, s, &chi);
        let mut ok = run.len() <= windows.len() && !run.cycle.is_empty();
        let steps = 3 * run.len();
        let unrolled = run.expand(steps + 1);
        ok &= unrolled[0] == s;
        for k in 0..steps {
            let from = (k + 1).saturating_sub(recall);
            let Some(w) = windows.id_of(&unrolled[from..=k]) else {
                ok = false;
                break;
            };
            ok &= m.successor(unrolled[k], &joint.action(w)) == Some(unrolled[k + 1]);
        }
        tally.record(ok, || format!("recall {recall}, start {s}: {run:?}"));
    }
    tally
}

/// One corpus entry as decided by both procedures.
#[derive(Clone, Debug)]
pub struct CorpusRow {
    pub formula: &'static str,
    pub expected: bool,
    pub pipeline: QptlVerdict,
    pub oracle: OracleVerdict,
    pub alt_preserved: bool,
    pub replayed: bool,
}

impl CorpusRow {
    /// Both verdicts are definitive and equal, the translation kept the
    /// alternation depth, and a satisfying evaluation replays.
    pub fn agrees(&self) -> bool {
        let definitive = !matches!(self.pipeline, QptlVerdict::Unconfirmed { .. });
        definitive
            && self.pipeline.is_sat() == self.oracle.is_sat()
            && self.pipeline.is_sat() == self.expected
            && self.alt_preserved
            && self.replayed
    }
}

/// Runs the QPTL corpus through the pipeline at `recall` and the oracle at
/// bounds (3, 3).
pub fn qptl_corpus(recall: usize, jobs: usize) -> Vec<CorpusRow> {
    QPTL_CORPUS
        .iter()
        .map(|&(formula, expected)| {
            let phi = qptl::parse_qptl(formula).unwrap();
            let ap = phi.propositions();
            let out = qptl::qptl_sat(&phi, &ap, EvalConfig { recall, jobs, ..EvalConfig::default() }).unwrap();
            let (_, body) = phi.leading_exists();
            let replayed = match &out.verdict {
                QptlVerdict::Sat { evaluation } => qptl::holds(body, evaluation, REPLAY_BOUNDS),
                _ => true,
            };
            let alt_preserved = qptl::translate(&phi, &ap).unwrap().alternation_depth() == phi.alternation_depth();
            CorpusRow {
                formula,
                expected,
                pipeline: out.verdict,
                oracle: qptl_oracle(&phi, 3, 3).unwrap(),
                alt_preserved,
                replayed,
            }
        })
        .collect()
}

/// Absorbs a list of tallies into one.
pub fn merge(tallies: impl IntoIterator<Item = Tally>) -> Tally {
    let mut all = Tally::default();
    for t in tallies {
        all.absorb(t);
    }
    all
}
