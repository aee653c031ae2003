//! A direct, unmemoized reading of the satisfaction relation.
//!
//! Shares only the model and formula types with the main checker. Windows
//! are rebuilt here, strategies are whole tables enumerated by an odometer,
//! uniform strategies are obtained by filtering, and `U` is decided by
//! scanning a fixed horizon of `|W| + 1` run positions.

use std::collections::BTreeMap;

use eslmc_core::formula::{Formula, FormulaKind};
use eslmc_core::model::{ActionId, AgentId, Ecgm, StateId};
use eslmc_core::strategy::{Assignment, StrategyMode, WindowSpace};

/// A strategy as a full table over [`Naive::windows`].
pub type Table = Vec<ActionId>;

pub struct Naive<'m> {
    model: &'m Ecgm,
    recall: usize,
    windows: Vec<Vec<StateId>>,
    index: BTreeMap<Vec<StateId>, usize>,
    tables: Vec<Vec<Table>>,
}

impl<'m> Naive<'m> {
    /// Enumerates every table of every agent up front; `limit` bounds the
    /// number of tables per agent.
    pub fn new(model: &'m Ecgm, recall: usize, mode: StrategyMode, limit: usize) -> Option<Self> {
        let mut windows: Vec<Vec<StateId>> = Vec::new();
        fn grow(model: &Ecgm, w: &mut Vec<StateId>, left: usize, out: &mut Vec<Vec<StateId>>) {
            out.push(w.clone());
            if left == 0 {
                return;
            }
            let last = *w.last().unwrap();
            for t in 0..model.num_states() {
                let connected = model
                    .enabled_joint_actions(model.state(last))
                    .iter()
                    .any(|j| model.successor(last, j) == Some(t));
                if connected {
                    w.push(t);
                    grow(model, w, left - 1, out);
                    w.pop();
                }
            }
        }
        for s in 0..model.num_states() {
            grow(model, &mut vec![s], recall - 1, &mut windows);
        }
        let index = windows.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut tables = Vec::new();
        for agent in 0..model.num_agents() {
            let spec = model.agent(agent);
            let options: Vec<&[ActionId]> = windows
                .iter()
                .map(|w| spec.enabled(model.state(*w.last().unwrap()).local(agent)))
                .collect();
            let count = options
                .iter()
                .try_fold(1usize, |acc, o| acc.checked_mul(o.len()))
                .filter(|&c| c <= limit)?;
            let mut all = Vec::with_capacity(count);
            let mut digits = vec![0usize; windows.len()];
            'odometer: loop {
                all.push(digits.iter().zip(&options).map(|(&d, o)| o[d]).collect::<Table>());
                let mut i = digits.len();
                loop {
                    if i == 0 {
                        break 'odometer;
                    }
                    i -= 1;
                    digits[i] += 1;
                    if digits[i] < options[i].len() {
                        break;
                    }
                    digits[i] = 0;
                }
            }
            if mode == StrategyMode::Uniform {
                let proj = |w: &Vec<StateId>| -> Vec<u16> {
                    w.iter().map(|&s| model.state(s).local(agent)).collect()
                };
                all.retain(|t| {
                    (0..windows.len()).all(|a| {
                        (0..windows.len())
                            .all(|b| proj(&windows[a]) != proj(&windows[b]) || t[a] == t[b])
                    })
                });
            }
            tables.push(all);
        }
        Some(Naive {
            model,
            recall,
            windows,
            index,
            tables,
        })
    }

    pub fn windows(&self) -> &[Vec<StateId>] {
        &self.windows
    }

    /// All tables of `agent`, in enumeration order.
    pub fn tables(&self, agent: AgentId) -> &[Table] {
        &self.tables[agent]
    }

    /// Converts an assignment of the main checker to tables.
    pub fn tables_of(&self, chi: &Assignment, space: &WindowSpace) -> Vec<Table> {
        chi.strategies()
            .iter()
            .map(|s| {
                self.windows
                    .iter()
                    .map(|w| s.action_at(space.id_of(w).expect("same feasible windows")))
                    .collect()
            })
            .collect()
    }

    fn successor(&self, s: StateId, chi: &[Table], window: &[StateId]) -> StateId {
        let w = self.index[window];
        let joint: Vec<ActionId> = chi.iter().map(|t| t[w]).collect();
        self.model.successor_by(s, &joint).expect("enabled")
    }

    /// The first `n` positions of the outcome run from `s`.
    pub fn positions(&self, s: StateId, chi: &[Table], n: usize) -> Vec<StateId> {
        let mut run = vec![s];
        while run.len() < n {
            let i = run.len() - 1;
            let j = (i + 1).saturating_sub(self.recall);
            let next = self.successor(run[i], chi, &run[j..=i]);
            run.push(next);
        }
        run
    }

    pub fn satisfies(&self, s: StateId, chi: &[Table], phi: &Formula) -> bool {
        match phi.kind() {
            FormulaKind::Atom(p) => p == "true" || self.model.holds(p, s),
            FormulaKind::Not(a) => !self.satisfies(s, chi, a),
            FormulaKind::Implies(a, b) => !self.satisfies(s, chi, a) || self.satisfies(s, chi, b),
            FormulaKind::Next(a) => {
                let run = self.positions(s, chi, 2);
                self.satisfies(run[1], chi, a)
            }
            FormulaKind::Until(a, b) => {
                let run = self.positions(s, chi, self.windows.len() + 1);
                for t in run {
                    if self.satisfies(t, chi, b) {
                        return true;
                    }
                    if !self.satisfies(t, chi, a) {
                        return false;
                    }
                }
                false
            }
            FormulaKind::Know(i, a) => (0..self.model.num_states())
                .filter(|&t| self.model.state(t).local(*i) == self.model.state(s).local(*i))
                .all(|t| self.satisfies(t, chi, a)),
            FormulaKind::Exists(v, a) => self.tables[v.agent].iter().any(|t| {
                let mut chi = chi.to_vec();
                chi[v.agent] = t.clone();
                self.satisfies(s, &chi, a)
            }),
            FormulaKind::Forall(v, a) => self.tables[v.agent].iter().all(|t| {
                let mut chi = chi.to_vec();
                chi[v.agent] = t.clone();
                self.satisfies(s, &chi, a)
            }),
        }
    }

    /// Every agent plays its first table.
    pub fn default_tables(&self) -> Vec<Table> {
        self.tables.iter().map(|t| t[0].clone()).collect()
    }

    /// Satisfaction at `s` for every assignment of the free agents.
    pub fn satisfied_at_state(&self, s: StateId, phi: &Formula) -> bool {
        self.over_free(phi, |chi| self.satisfies(s, chi, phi), true)
    }

    /// Satisfaction at the initial state for some assignment.
    pub fn model_check(&self, phi: &Formula) -> bool {
        let s0 = self.model.initial_id();
        self.over_free(phi, |chi| self.satisfies(s0, chi, phi), false)
    }

    fn over_free(&self, phi: &Formula, f: impl Fn(&[Table]) -> bool, all: bool) -> bool {
        let free: Vec<AgentId> = phi.free_agents(self.model.num_agents()).iter().collect();
        let mut chi = self.default_tables();
        let mut digits = vec![0usize; free.len()];
        loop {
            for (k, &i) in free.iter().enumerate() {
                chi[i] = self.tables[i][digits[k]].clone();
            }
            if f(&chi) != all {
                return !all;
            }
            let mut k = digits.len();
            loop {
                if k == 0 {
                    return all;
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < self.tables[free[k]].len() {
                    break;
                }
                digits[k] = 0;
            }
        }
    }
}
