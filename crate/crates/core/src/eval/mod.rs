//! The satisfaction relation `(P, s, χ) ⊨ φ`.
//!
//! Quantifiers are decided by lazy strategy search. A quantified agent
//! starts with an empty table; evaluation proceeds until an outcome run
//! consults an undecided slot, which interrupts evaluation with a request
//! for that slot. The quantifier that owns the agent then branches over the
//! slot's options in canonical order. A verdict reached under a partial
//! table holds for every completion of it, so verdicts are cached under
//! partial tables as well.
//!
//! Satisfaction at `λ(k)` depends only on `λ(k)` and `χ`, so `X` consults the
//! singleton window of the current state and `U` scans the lasso of the
//! outcome run until its first repeated window.

mod env;

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use dashmap::DashMap;
use rayon::prelude::*;
use serde::Serialize;

use crate::formula::{Formula, FormulaKind, NodeId};
use crate::model::{AgentId, AgentSet, Ecgm, GlobalState, StateId};
use crate::strategy::{
    feasible_windows, trace_run, Assignment, LassoRun, SlotId, StrategyError, StrategyLayout,
    StrategyMode, StrategySpace, WindowSpace, DEFAULT_CAP,
};

pub use env::Env;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EvalConfig {
    pub recall: usize,
    pub mode: StrategyMode,
    pub cap: u128,
    pub cache: bool,
    /// Worker threads; 1 evaluates sequentially.
    #[serde(skip)]
    pub jobs: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            recall: 1,
            mode: StrategyMode::Perfect,
            cap: DEFAULT_CAP,
            cache: true,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("state {0} is not reachable")]
    Unreachable(String),
    #[error("failed to start worker pool: {0}")]
    Pool(String),
}

/// Evaluation was suspended because a partially chosen strategy of `agent`
/// has no action at `slot` yet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Need {
    pub agent: AgentId,
    pub slot: SlotId,
}

/// Counters for one evaluator. They depend on scheduling when more than
/// one worker is used.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EvalStats {
    pub evaluations: u64,
    pub cache_hits: u64,
    pub branches: u64,
    pub runs: u64,
}

#[derive(Default)]
struct Counters {
    evaluations: AtomicU64,
    cache_hits: AtomicU64,
    branches: AtomicU64,
    runs: AtomicU64,
}

type CacheKey = (NodeId, StateId, Box<[u16]>);

/// A memoizing evaluator bound to one model and configuration.
pub struct Evaluator<'m> {
    model: &'m Ecgm,
    cfg: EvalConfig,
    windows: WindowSpace,
    layouts: Vec<Arc<StrategyLayout>>,
    fresh: Vec<Arc<[Option<u16>]>>,
    cache: DashMap<CacheKey, bool>,
    counters: Counters,
    pool: Option<rayon::ThreadPool>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m Ecgm, cfg: EvalConfig) -> Result<Self, EvalError> {
        let windows = feasible_windows(model, cfg.recall)?;
        let layouts: Vec<Arc<StrategyLayout>> = (0..model.num_agents())
            .map(|i| Arc::new(StrategyLayout::new(model, &windows, i, cfg.mode)))
            .collect();
        // Slots with a single option are never worth branching on.
        let fresh = layouts
            .iter()
            .map(|l| {
                (0..l.num_slots())
                    .map(|k| match l.options(k) {
                        [only] => Some(*only),
                        _ => None,
                    })
                    .collect()
            })
            .collect();
        let pool = if cfg.jobs > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(cfg.jobs)
                    .build()
                    .map_err(|e| EvalError::Pool(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(Evaluator {
            model,
            cfg,
            windows,
            layouts,
            fresh,
            cache: DashMap::new(),
            counters: Counters::default(),
            pool,
        })
    }

    pub fn model(&self) -> &'m Ecgm {
        self.model
    }

    pub fn config(&self) -> &EvalConfig {
        &self.cfg
    }

    pub fn windows(&self) -> &WindowSpace {
        &self.windows
    }

    pub fn layout(&self, agent: AgentId) -> &Arc<StrategyLayout> {
        &self.layouts[agent]
    }

    /// The strategy space of `agent`, checked against the cap.
    pub fn space(&self, agent: AgentId) -> Result<StrategySpace, EvalError> {
        Ok(StrategySpace::new(
            self.layouts[agent].clone(),
            self.cfg.cap,
            &self.model.agent(agent).name,
        )?)
    }

    pub fn stats(&self) -> EvalStats {
        EvalStats {
            evaluations: self.counters.evaluations.load(Ordering::Relaxed),
            cache_hits: self.counters.cache_hits.load(Ordering::Relaxed),
            branches: self.counters.branches.load(Ordering::Relaxed),
            runs: self.counters.runs.load(Ordering::Relaxed),
        }
    }

    /// The assignment `χ0`: every agent plays its least enabled action.
    pub fn default_assignment(&self) -> Assignment {
        Assignment::least(self.model, &self.windows, self.cfg.mode)
    }

    /// Environment binding every agent as in `χ`.
    pub fn env_of(&self, chi: &Assignment) -> Result<Env, EvalError> {
        if chi.recall() != self.cfg.recall {
            return Err(StrategyError::RecallMismatch {
                expected: self.cfg.recall,
                found: chi.recall(),
            }
            .into());
        }
        Ok(Env::from_assignment(chi))
    }

    /// Environment with the agents in `open` unbound and every other agent
    /// bound as in `χ`.
    pub fn open_env(&self, chi: &Assignment, open: AgentSet) -> Result<Env, EvalError> {
        let mut env = self.env_of(chi)?;
        for i in open.iter() {
            env = env.rebind(i, self.layouts[i].clone(), self.fresh[i].clone());
        }
        Ok(env)
    }

    /// Checks that every strategy space the formula quantifies over fits
    /// under the cap, together with the spaces of the agents in `extra`.
    pub fn check_spaces(&self, phi: &Formula, extra: AgentSet) -> Result<(), EvalError> {
        let mut agents = extra;
        let mut stack = vec![phi];
        while let Some(f) = stack.pop() {
            if let FormulaKind::Exists(v, _) | FormulaKind::Forall(v, _) = f.kind() {
                agents.insert(v.agent);
            }
            stack.extend(f.children());
        }
        for i in agents.iter() {
            self.space(i)?;
        }
        Ok(())
    }

    /// `(P, s, χ) ⊨ φ`.
    pub fn satisfies(&self, s: StateId, chi: &Assignment, phi: &Formula) -> Result<bool, EvalError> {
        self.check_spaces(phi, AgentSet::EMPTY)?;
        let env = self.env_of(chi)?;
        Ok(self
            .run(|| self.eval(s, &env, phi))
            .expect("total assignments answer every lookup"))
    }

    /// `(P, s) ⊨ φ`: satisfaction under every assignment. Only the free
    /// agents of `φ` are enumerated.
    pub fn satisfied_at_state(&self, s: StateId, phi: &Formula) -> Result<bool, EvalError> {
        let free = phi.free_agents(self.model.num_agents());
        self.check_spaces(phi, free)?;
        let env = self.open_env(&self.default_assignment(), free)?;
        Ok(self
            .run(|| self.quantify(s, &env, free, false, phi))
            .expect("only enumerated agents are unbound"))
    }

    /// `P ⊨ φ`.
    pub fn holds_in_model(&self, phi: &Formula) -> Result<bool, EvalError> {
        self.satisfied_at_state(self.model.initial_id(), phi)
    }

    /// Resolves a state label to a reachable state id.
    pub fn reachable(&self, s: &GlobalState) -> Result<StateId, EvalError> {
        self.model
            .state_id(s)
            .ok_or_else(|| EvalError::Unreachable(self.model.state_label(s)))
    }

    /// The outcome run from `s` under a possibly partial environment.
    pub fn run_of(&self, s: StateId, env: &Env) -> Result<LassoRun, Need> {
        self.counters.runs.fetch_add(1, Ordering::Relaxed);
        trace_run(self.model, &self.windows, s, |w, joint| env.joint_at(w, joint))
    }

    /// Runs `f` inside the worker pool when one is configured.
    pub fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }

    /// Decides `φ` at `s` with the agents in `open` quantified
    /// existentially (or universally) over their unbound slots in `env`.
    pub fn quantify(
        &self,
        s: StateId,
        env: &Env,
        open: AgentSet,
        existential: bool,
        phi: &Formula,
    ) -> Result<bool, Need> {
        match self.eval(s, env, phi) {
            Err(need) if open.contains(need.agent) => {
                let options = self.layouts[need.agent].options(need.slot);
                let branch = |&a: &u16| {
                    self.counters.branches.fetch_add(1, Ordering::Relaxed);
                    let env = env.bind(need.agent, need.slot, a);
                    self.quantify(s, &env, open, existential, phi)
                };
                if self.pool.is_some() {
                    decide_par(options.par_iter().map(branch), existential)
                } else {
                    decide(options.iter().map(branch), existential)
                }
            }
            other => other,
        }
    }

    /// Evaluates `φ` at `s` under a possibly partial environment.
    pub fn eval(&self, s: StateId, env: &Env, phi: &Formula) -> Result<bool, Need> {
        let key = if self.cfg.cache {
            let free = phi.free_agents(self.model.num_agents());
            let key = (phi.id(), s, env.fingerprint(free));
            if let Some(v) = self.cache.get(&key) {
                self.counters.cache_hits.fetch_add(1, Ordering::Relaxed);
                return Ok(*v);
            }
            Some(key)
        } else {
            None
        };
        self.counters.evaluations.fetch_add(1, Ordering::Relaxed);
        let value = self.eval_uncached(s, env, phi)?;
        if let Some(key) = key {
            self.cache.insert(key, value);
        }
        Ok(value)
    }

    fn eval_uncached(&self, s: StateId, env: &Env, phi: &Formula) -> Result<bool, Need> {
        match phi.kind() {
            FormulaKind::Atom(name) => {
                Ok(name == crate::formula::TRUTH_ATOM || self.model.holds(name, s))
            }
            FormulaKind::Not(a) => Ok(!self.eval(s, env, a)?),
            FormulaKind::Implies(a, b) => Ok(!self.eval(s, env, a)? || self.eval(s, env, b)?),
            FormulaKind::Next(a) => {
                let mut joint = vec![0; self.model.num_agents()];
                env.joint_at(self.windows.singleton(s), &mut joint)?;
                let next = self
                    .model
                    .successor_by(s, &joint)
                    .expect("strategies only choose enabled actions");
                self.eval(next, env, a)
            }
            FormulaKind::Until(a, b) => {
                // Walks the outcome lasso one window at a time, so an action
                // is requested only once every earlier position is decided
                // and inconclusive. The walk stops at the first repeated
                // window, which visits exactly the positions of the lasso.
                self.counters.runs.fetch_add(1, Ordering::Relaxed);
                let mut seen = HashSet::new();
                let mut joint = vec![0; self.model.num_agents()];
                let (mut t, mut w) = (s, self.windows.singleton(s));
                while seen.insert(w) {
                    if self.eval(t, env, b)? {
                        return Ok(true);
                    }
                    if !self.eval(t, env, a)? {
                        return Ok(false);
                    }
                    env.joint_at(w, &mut joint)?;
                    t = self
                        .model
                        .successor_by(t, &joint)
                        .expect("strategies only choose enabled actions");
                    w = self
                        .windows
                        .advance(w, t)
                        .expect("successor windows are feasible");
                }
                Ok(false)
            }
            FormulaKind::Know(i, a) => {
                let class = self.model.class_of(*i, s);
                if self.pool.is_some() && class.len() > 1 {
                    decide_par(class.par_iter().map(|&t| self.eval(t, env, a)), false)
                } else {
                    decide(class.iter().map(|&t| self.eval(t, env, a)), false)
                }
            }
            FormulaKind::Exists(v, a) | FormulaKind::Forall(v, a) => {
                let existential = matches!(phi.kind(), FormulaKind::Exists(..));
                let i = v.agent;
                let env = env.rebind(i, self.layouts[i].clone(), self.fresh[i].clone());
                self.quantify(s, &env, AgentSet::singleton(i), existential, a)
            }
        }
    }
}

/// Scans branch results in canonical order. An existential scan returns
/// true at the first true branch, a universal one false at the first false
/// branch; an interruption met first is passed on.
fn decide(
    results: impl IntoIterator<Item = Result<bool, Need>>,
    existential: bool,
) -> Result<bool, Need> {
    for r in results {
        if r? == existential {
            return Ok(existential);
        }
    }
    Ok(!existential)
}

/// The parallel form of [`decide`]: the first decisive branch in canonical
/// order wins and branches after it are abandoned.
fn decide_par(
    results: impl IndexedParallelIterator<Item = Result<bool, Need>>,
    existential: bool,
) -> Result<bool, Need> {
    results
        .find_first(|r| !matches!(r, Ok(v) if *v != existential))
        .unwrap_or(Ok(!existential))
}

/// `(P, s, χ) ⊨ φ` with a fresh evaluator.
pub fn satisfies(
    model: &Ecgm,
    s: &GlobalState,
    chi: &Assignment,
    phi: &Formula,
    cfg: EvalConfig,
) -> Result<bool, EvalError> {
    let ev = Evaluator::new(model, cfg)?;
    let s = ev.reachable(s)?;
    ev.satisfies(s, chi, phi)
}

/// `(P, s) ⊨ φ` with a fresh evaluator.
pub fn satisfied_at_state(
    model: &Ecgm,
    s: &GlobalState,
    phi: &Formula,
    cfg: EvalConfig,
) -> Result<bool, EvalError> {
    let ev = Evaluator::new(model, cfg)?;
    let s = ev.reachable(s)?;
    ev.satisfied_at_state(s, phi)
}

/// `P ⊨ φ` with a fresh evaluator.
pub fn holds_in_model(model: &Ecgm, phi: &Formula, cfg: EvalConfig) -> Result<bool, EvalError> {
    Evaluator::new(model, cfg)?.holds_in_model(phi)
}
