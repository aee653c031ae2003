//! Bounded-recall strategies.
//!
//! A γ-recall strategy maps every history window of length at most γ to an
//! action enabled at the window's last state. Outcome runs only ever consult
//! windows that are fragments of runs, so tables are indexed by the
//! *feasible* windows: sequences of reachable states connected by the
//! transition relation. Two strategies that agree on feasible windows induce
//! the same outcomes everywhere.
//!
//! The choice points of a strategy are its *slots*. With perfect
//! information there is one slot per window; with uniform strategies one
//! slot per class of windows whose projection onto the agent's local states
//! coincides.

mod run;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::model::{ActionId, AgentId, Ecgm, JointAction, LocalId, StateId};

pub use run::{outcome_run, trace_run, LassoRun};

/// Default bound on the number of strategies a single quantifier may range
/// over.
pub const DEFAULT_CAP: u128 = 10_000_000;

pub type WindowId = usize;
pub type SlotId = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrategyError {
    #[error("recall must be at least 1")]
    RecallZero,
    #[error("strategy space for agent `{agent}` has {size} strategies, above the cap of {cap}")]
    SearchSpaceExceeded {
        agent: String,
        size: String,
        cap: u128,
    },
    #[error("recall mismatch: expected {expected}, found {found}")]
    RecallMismatch { expected: usize, found: usize },
    #[error("strategy for agent #{found} supplied where agent #{expected} was expected")]
    AgentMismatch { expected: AgentId, found: AgentId },
    #[error("action #{action} is not enabled at the last state of window #{window}")]
    NotEnabled { window: WindowId, action: ActionId },
    #[error("table is not uniform: windows #{first} and #{second} look alike to the agent")]
    NotUniform { first: WindowId, second: WindowId },
}

/// Perfect-information or uniform strategies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyMode {
    #[default]
    Perfect,
    Uniform,
}

impl fmt::Display for StrategyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyMode::Perfect => "perfect",
            StrategyMode::Uniform => "uniform",
        })
    }
}

impl std::str::FromStr for StrategyMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "perfect" => Ok(StrategyMode::Perfect),
            "uniform" => Ok(StrategyMode::Uniform),
            other => Err(format!("unknown strategy mode `{other}`")),
        }
    }
}

/// A →-connected sequence of reachable states.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Window(Box<[StateId]>);

impl Window {
    pub fn states(&self) -> &[StateId] {
        &self.0
    }

    pub fn last(&self) -> StateId {
        *self.0.last().expect("windows are non-empty")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// All feasible windows for a recall bound, ordered by length and then
/// lexicographically. Singleton window `[s]` has id `s`.
#[derive(Clone, Debug)]
pub struct WindowSpace {
    recall: usize,
    windows: Vec<Window>,
    index: HashMap<Window, WindowId>,
    // extend[w] = (next state, window after appending it), by next state
    extend: Vec<Vec<(StateId, WindowId)>>,
}

/// Enumerates every feasible window of length `1..=recall`.
pub fn feasible_windows(model: &Ecgm, recall: usize) -> Result<WindowSpace, StrategyError> {
    if recall == 0 {
        return Err(StrategyError::RecallZero);
    }
    let mut windows: Vec<Window> = (0..model.num_states())
        .map(|s| Window(vec![s].into()))
        .collect();
    let mut level_start = 0;
    for _ in 1..recall {
        let level_end = windows.len();
        let mut next: Vec<Window> = Vec::new();
        for w in &windows[level_start..level_end] {
            for &t in model.edges(w.last()) {
                let mut v = w.0.to_vec();
                v.push(t);
                next.push(Window(v.into()));
            }
        }
        next.sort();
        level_start = level_end;
        windows.extend(next);
    }
    let index: HashMap<Window, WindowId> = windows
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let extend = windows
        .iter()
        .map(|w| {
            model
                .edges(w.last())
                .iter()
                .map(|&t| {
                    let skip = usize::from(w.len() == recall);
                    let mut v: Vec<StateId> = w.0[skip..].to_vec();
                    v.push(t);
                    (t, index[&Window(v.into())])
                })
                .collect()
        })
        .collect();
    Ok(WindowSpace {
        recall,
        windows,
        index,
        extend,
    })
}

impl WindowSpace {
    pub fn recall(&self) -> usize {
        self.recall
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn window(&self, id: WindowId) -> &Window {
        &self.windows[id]
    }

    pub fn id_of(&self, states: &[StateId]) -> Option<WindowId> {
        self.index.get(&Window(states.into())).copied()
    }

    /// Id of the singleton window `[s]`.
    pub fn singleton(&self, s: StateId) -> WindowId {
        s
    }

    /// The window observed one step later, after moving to `next`.
    pub fn advance(&self, w: WindowId, next: StateId) -> Option<WindowId> {
        self.extend[w]
            .iter()
            .find(|(t, _)| *t == next)
            .map(|&(_, id)| id)
    }

    /// `[s1] [s2] ...` using local-state names.
    pub fn label(&self, model: &Ecgm, w: WindowId) -> String {
        self.windows[w]
            .states()
            .iter()
            .map(|&s| format!("[{}]", model.state_plain(model.state(s))))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Clone, Debug)]
struct Slot {
    options: Vec<ActionId>,
    first_window: WindowId,
}

/// How an agent's strategy table is split into independent choices.
#[derive(Debug)]
pub struct StrategyLayout {
    agent: AgentId,
    recall: usize,
    mode: StrategyMode,
    slot_of: Vec<u32>,
    slots: Vec<Slot>,
}

impl StrategyLayout {
    pub fn new(model: &Ecgm, windows: &WindowSpace, agent: AgentId, mode: StrategyMode) -> Self {
        let spec = model.agent(agent);
        let mut slot_of = Vec::with_capacity(windows.len());
        let mut slots: Vec<Slot> = Vec::new();
        let mut classes: HashMap<Vec<LocalId>, u32> = HashMap::new();
        for (w, window) in windows.windows().iter().enumerate() {
            let local = model.state(window.last()).local(agent);
            let slot = match mode {
                StrategyMode::Perfect => None,
                StrategyMode::Uniform => {
                    let key: Vec<LocalId> = window
                        .states()
                        .iter()
                        .map(|&s| model.state(s).local(agent))
                        .collect();
                    classes.get(&key).copied().or_else(|| {
                        classes.insert(key, slots.len() as u32);
                        None
                    })
                }
            };
            match slot {
                Some(id) => slot_of.push(id),
                None => {
                    slot_of.push(slots.len() as u32);
                    slots.push(Slot {
                        options: spec.enabled(local).to_vec(),
                        first_window: w,
                    });
                }
            }
        }
        StrategyLayout {
            agent,
            recall: windows.recall(),
            mode,
            slot_of,
            slots,
        }
    }

    pub fn agent(&self) -> AgentId {
        self.agent
    }

    pub fn recall(&self) -> usize {
        self.recall
    }

    pub fn mode(&self) -> StrategyMode {
        self.mode
    }

    pub fn num_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn slot_of(&self, w: WindowId) -> SlotId {
        self.slot_of[w] as SlotId
    }

    pub fn options(&self, slot: SlotId) -> &[ActionId] {
        &self.slots[slot].options
    }

    /// The earliest window belonging to a slot.
    pub fn representative(&self, slot: SlotId) -> WindowId {
        self.slots[slot].first_window
    }

    /// Number of distinct strategies, or `None` if it does not fit in u128.
    pub fn space_size(&self) -> Option<u128> {
        self.slots
            .iter()
            .try_fold(1u128, |acc, s| acc.checked_mul(s.options.len() as u128))
    }
}

/// A total γ-recall strategy for one agent.
///
/// Ordering is lexicographic over the table in window order.
#[derive(Clone)]
pub struct Strategy {
    layout: Arc<StrategyLayout>,
    choices: Arc<[ActionId]>,
}

impl Strategy {
    /// The strategy choosing the least enabled action everywhere.
    pub fn least(layout: Arc<StrategyLayout>) -> Strategy {
        let choices = layout.slots.iter().map(|s| s.options[0]).collect();
        Strategy { layout, choices }
    }

    /// Builds a strategy from one action per slot.
    pub fn from_choices(
        layout: Arc<StrategyLayout>,
        choices: Vec<ActionId>,
    ) -> Result<Strategy, StrategyError> {
        assert_eq!(choices.len(), layout.num_slots(), "one choice per slot");
        for (slot, &a) in choices.iter().enumerate() {
            if !layout.options(slot).contains(&a) {
                return Err(StrategyError::NotEnabled {
                    window: layout.representative(slot),
                    action: a,
                });
            }
        }
        Ok(Strategy {
            layout,
            choices: choices.into(),
        })
    }

    /// Builds a strategy from a per-window function, checking the protocol
    /// and, for uniform layouts, that look-alike windows agree.
    pub fn from_fn(
        layout: Arc<StrategyLayout>,
        mut table: impl FnMut(WindowId) -> ActionId,
    ) -> Result<Strategy, StrategyError> {
        let mut choices: Vec<Option<ActionId>> = vec![None; layout.num_slots()];
        for w in 0..layout.slot_of.len() {
            let slot = layout.slot_of(w);
            let a = table(w);
            if !layout.options(slot).contains(&a) {
                return Err(StrategyError::NotEnabled {
                    window: w,
                    action: a,
                });
            }
            match choices[slot] {
                None => choices[slot] = Some(a),
                Some(b) if b != a => {
                    return Err(StrategyError::NotUniform {
                        first: layout.representative(slot),
                        second: w,
                    })
                }
                Some(_) => {}
            }
        }
        let choices = choices
            .into_iter()
            .map(|c| c.expect("every slot has a window"))
            .collect();
        Ok(Strategy { layout, choices })
    }

    pub fn agent(&self) -> AgentId {
        self.layout.agent
    }

    pub fn recall(&self) -> usize {
        self.layout.recall
    }

    pub fn mode(&self) -> StrategyMode {
        self.layout.mode
    }

    pub fn layout(&self) -> &Arc<StrategyLayout> {
        &self.layout
    }

    pub fn choices(&self) -> &[ActionId] {
        &self.choices
    }

    pub fn action_at(&self, w: WindowId) -> ActionId {
        self.choices[self.layout.slot_of(w)]
    }

    /// The full table, one entry per feasible window.
    pub fn table(&self) -> Vec<ActionId> {
        (0..self.layout.slot_of.len())
            .map(|w| self.action_at(w))
            .collect()
    }

    /// Position in the lexicographic enumeration of its space.
    pub fn rank(&self) -> Option<u128> {
        self.layout
            .slots
            .iter()
            .zip(self.choices.iter())
            .try_fold(0u128, |acc, (slot, a)| {
                let digit = slot.options.iter().position(|o| o == a)? as u128;
                acc.checked_mul(slot.options.len() as u128)?.checked_add(digit)
            })
    }

    /// Lines of the form `window => action`, windows in canonical order.
    pub fn format_table(&self, model: &Ecgm, windows: &WindowSpace) -> Vec<String> {
        let spec = model.agent(self.agent());
        (0..windows.len())
            .map(|w| {
                format!(
                    "{} => {}",
                    windows.label(model, w),
                    spec.action_name(self.action_at(w))
                )
            })
            .collect()
    }
}

impl PartialEq for Strategy {
    fn eq(&self, other: &Self) -> bool {
        self.agent() == other.agent()
            && self.recall() == other.recall()
            && self.table() == other.table()
    }
}

impl Eq for Strategy {}

impl PartialOrd for Strategy {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Strategy {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.agent(), self.recall(), self.table()).cmp(&(
            other.agent(),
            other.recall(),
            other.table(),
        ))
    }
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Strategy")
            .field("agent", &self.agent())
            .field("mode", &self.mode())
            .field("choices", &self.choices)
            .finish()
    }
}

/// The strategies of one agent in lexicographic order, decoded on demand.
#[derive(Clone, Debug)]
pub struct StrategySpace {
    layout: Arc<StrategyLayout>,
    size: u128,
}

/// Checks the strategy space of `agent` against `cap` and returns it.
pub fn enumerate_strategies(
    model: &Ecgm,
    windows: &WindowSpace,
    agent: AgentId,
    mode: StrategyMode,
    cap: u128,
) -> Result<StrategySpace, StrategyError> {
    let layout = Arc::new(StrategyLayout::new(model, windows, agent, mode));
    StrategySpace::new(layout, cap, &model.agent(agent).name)
}

impl StrategySpace {
    pub fn new(
        layout: Arc<StrategyLayout>,
        cap: u128,
        agent_name: &str,
    ) -> Result<StrategySpace, StrategyError> {
        match layout.space_size() {
            Some(size) if size <= cap => Ok(StrategySpace { layout, size }),
            size => Err(StrategyError::SearchSpaceExceeded {
                agent: agent_name.to_string(),
                size: size.map_or_else(|| "more than 2^128".to_string(), |s| s.to_string()),
                cap,
            }),
        }
    }

    pub fn layout(&self) -> &Arc<StrategyLayout> {
        &self.layout
    }

    pub fn len(&self) -> u128 {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// The strategy at `rank`; the first slot is the most significant digit.
    pub fn get(&self, rank: u128) -> Strategy {
        assert!(rank < self.size, "rank out of range");
        let mut rest = rank;
        let mut choices = vec![0; self.layout.num_slots()];
        for (slot, c) in self.layout.slots.iter().zip(choices.iter_mut()).rev() {
            let n = slot.options.len() as u128;
            *c = slot.options[(rest % n) as usize];
            rest /= n;
        }
        Strategy {
            layout: self.layout.clone(),
            choices: choices.into(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Strategy> + '_ {
        (0..self.size).map(|r| self.get(r))
    }
}

/// A total map from agents to strategies sharing one recall bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    strategies: Vec<Strategy>,
}

impl Assignment {
    pub fn new(strategies: Vec<Strategy>) -> Result<Assignment, StrategyError> {
        let recall = strategies.first().map_or(1, Strategy::recall);
        for (i, s) in strategies.iter().enumerate() {
            if s.agent() != i {
                return Err(StrategyError::AgentMismatch {
                    expected: i,
                    found: s.agent(),
                });
            }
            if s.recall() != recall {
                return Err(StrategyError::RecallMismatch {
                    expected: recall,
                    found: s.recall(),
                });
            }
        }
        Ok(Assignment { strategies })
    }

    /// Every agent plays its least enabled action at every window.
    pub fn least(model: &Ecgm, windows: &WindowSpace, mode: StrategyMode) -> Assignment {
        Assignment {
            strategies: (0..model.num_agents())
                .map(|i| Strategy::least(Arc::new(StrategyLayout::new(model, windows, i, mode))))
                .collect(),
        }
    }

    pub fn recall(&self) -> usize {
        self.strategies.first().map_or(1, Strategy::recall)
    }

    pub fn get(&self, agent: AgentId) -> &Strategy {
        &self.strategies[agent]
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.strategies
    }

    /// `χ` with agent `agent` rebound to `strategy`.
    pub fn with_override(&self, agent: AgentId, strategy: Strategy) -> Result<Assignment, StrategyError> {
        if strategy.agent() != agent {
            return Err(StrategyError::AgentMismatch {
                expected: agent,
                found: strategy.agent(),
            });
        }
        if strategy.recall() != self.recall() {
            return Err(StrategyError::RecallMismatch {
                expected: self.recall(),
                found: strategy.recall(),
            });
        }
        let mut strategies = self.strategies.clone();
        strategies[agent] = strategy;
        Ok(Assignment { strategies })
    }

    /// The composed joint strategy `F^χ`.
    pub fn compose(&self) -> JointStrategy<'_> {
        JointStrategy { assignment: self }
    }
}

/// The product of an assignment's member strategies.
#[derive(Clone, Copy, Debug)]
pub struct JointStrategy<'a> {
    assignment: &'a Assignment,
}

impl JointStrategy<'_> {
    pub fn action(&self, w: WindowId) -> JointAction {
        JointAction::new(
            self.assignment
                .strategies
                .iter()
                .map(|s| s.action_at(w))
                .collect::<Vec<_>>(),
        )
    }
}
