//! Random models, formulas and assignments.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use eslmc_core::formula::{Formula, Var};
use eslmc_core::model::{AgentSpec, Ecgm, GlobalState, JointAction};
use eslmc_core::strategy::{Assignment, Strategy, StrategyLayout, StrategyMode, WindowSpace};
use rand::seq::SliceRandom;
use rand::Rng;

/// Atom names used by generated models.
pub const ATOMS: [&str; 2] = ["p", "q"];

/// A random two-agent model with at most `max_states` reachable states
/// whose per-agent strategy spaces at `recall` have at most `max_space`
/// members.
pub fn random_model<R: Rng>(rng: &mut R, max_states: usize, recall: usize, max_space: u128) -> Ecgm {
    loop {
        if let Some(m) = try_model(rng, max_states) {
            let windows = eslmc_core::feasible_windows(&m, recall).expect("recall is positive");
            let small = (0..m.num_agents()).all(|i| {
                StrategyLayout::new(&m, &windows, i, StrategyMode::Perfect)
                    .space_size()
                    .is_some_and(|s| s <= max_space)
            });
            if small {
                return m;
            }
        }
    }
}

fn try_model<R: Rng>(rng: &mut R, max_states: usize) -> Option<Ecgm> {
    let agents: Vec<AgentSpec> = ["A", "B"]
        .iter()
        .map(|name| {
            let nl = rng.gen_range(1..=3usize);
            let na = rng.gen_range(1..=2usize);
            let protocol = (0..nl)
                .map(|_| {
                    let mut p: Vec<u16> = (0..na as u16).filter(|_| rng.gen_bool(0.6)).collect();
                    if p.is_empty() {
                        p.push(rng.gen_range(0..na as u16));
                    }
                    p
                })
                .collect();
            AgentSpec {
                name: name.to_string(),
                locals: (0..nl).map(|k| format!("l{k}")).collect(),
                actions: (0..na).map(|k| format!("a{k}")).collect(),
                protocol,
            }
        })
        .collect();
    let all_states: Vec<GlobalState> = (0..agents[0].locals.len() as u16)
        .flat_map(|a| (0..agents[1].locals.len() as u16).map(move |b| GlobalState::new(vec![a, b])))
        .collect();
    let mut transitions = Vec::new();
    for s in &all_states {
        for &x in &agents[0].protocol[s.local(0) as usize] {
            for &y in &agents[1].protocol[s.local(1) as usize] {
                let to = all_states.choose(rng).unwrap().clone();
                transitions.push((s.clone(), JointAction::new(vec![x, y]), to));
            }
        }
    }
    let atoms: BTreeMap<String, BTreeSet<GlobalState>> = ATOMS
        .iter()
        .map(|p| {
            let set = all_states.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            (p.to_string(), set)
        })
        .collect();
    let initial = all_states.choose(rng).unwrap().clone();
    let (m, _) = Ecgm::new(agents, initial, transitions, atoms).ok()?;
    (m.num_states() <= max_states).then_some(m)
}

/// A random formula of depth at most `depth` over `atoms` and agents
/// `0..num_agents`, built with both core and derived constructors.
pub fn random_formula<R: Rng>(rng: &mut R, atoms: &[&str], num_agents: usize, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..10) {
            0 => Formula::truth(),
            _ => Formula::atom(*atoms.choose(rng).unwrap()),
        };
    }
    let d = depth - 1;
    let sub = |rng: &mut R| random_formula(rng, atoms, num_agents, d);
    let var = |rng: &mut R| {
        let i = rng.gen_range(0..num_agents);
        Var::new(format!("v{}", rng.gen_range(0..3)), i)
    };
    match rng.gen_range(0..13) {
        0 | 1 => Formula::not(sub(rng)),
        2 => Formula::implies(sub(rng), sub(rng)),
        3 => Formula::and(sub(rng), sub(rng)),
        4 => Formula::or(sub(rng), sub(rng)),
        5 | 6 => Formula::next(sub(rng)),
        7 => Formula::until(sub(rng), sub(rng)),
        8 => {
            if rng.gen_bool(0.5) {
                Formula::eventually(sub(rng))
            } else {
                Formula::globally(sub(rng))
            }
        }
        9 => Formula::know(rng.gen_range(0..num_agents), sub(rng)),
        10 | 11 => Formula::exists(var(rng), sub(rng)),
        _ => Formula::forall(var(rng), sub(rng)),
    }
}

/// A random sentence of depth at most `depth`: a random formula whose free
/// agents are closed by randomly chosen quantifiers.
pub fn random_sentence<R: Rng>(rng: &mut R, atoms: &[&str], num_agents: usize, depth: usize) -> Formula {
    loop {
        let body_depth = rng.gen_range(1..=depth);
        let mut f = random_formula(rng, atoms, num_agents, body_depth);
        let mut free: Vec<usize> = f.free_agents(num_agents).iter().collect();
        free.shuffle(rng);
        for i in free {
            let v = Var::new(format!("c{i}"), i);
            f = if rng.gen_bool(0.5) {
                Formula::exists(v, f)
            } else {
                Formula::forall(v, f)
            };
        }
        if f.depth() <= depth {
            return f;
        }
    }
}

/// A uniformly random strategy of `agent`.
pub fn random_strategy<R: Rng>(rng: &mut R, layout: &Arc<StrategyLayout>) -> Strategy {
    let choices = (0..layout.num_slots())
        .map(|k| *layout.options(k).choose(rng).unwrap())
        .collect();
    Strategy::from_choices(layout.clone(), choices).expect("options are enabled")
}

/// A uniformly random assignment.
pub fn random_assignment<R: Rng>(rng: &mut R, model: &Ecgm, windows: &WindowSpace, mode: StrategyMode) -> Assignment {
    let strategies = (0..model.num_agents())
        .map(|i| random_strategy(rng, &Arc::new(StrategyLayout::new(model, windows, i, mode))))
        .collect();
    Assignment::new(strategies).expect("one strategy per agent")
}
