//! Epistemic concurrent game models.
//!
//! A model is a synchronous composition of agents. Each agent owns a set of
//! local states, a set of actions and a protocol telling which actions are
//! available in which local state. Global states are tuples of local states,
//! one per agent, and the global transition function is defined exactly on
//! the joint actions that every agent's protocol enables.
//!
//! [`Ecgm`] is immutable once built. Everything the checker needs is derived
//! at construction time: the reachable set in canonical order, the successor
//! table for reachable states and the per-agent indistinguishability classes.

mod agents;
mod document;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub use agents::AgentSet;
pub use document::{load_model, AgentDocument, LoadError, ModelDocument, TransitionDocument};

/// Index of an agent in declaration order.
pub type AgentId = usize;
/// Index of a local state in its agent's declaration order.
pub type LocalId = u16;
/// Index of an action in its agent's declaration order.
pub type ActionId = u16;
/// Index of a reachable global state in canonical order.
pub type StateId = usize;

/// Upper bound on the number of agents; agent sets are 64-bit masks.
pub const MAX_AGENTS: usize = 64;

/// A tuple of local states, one per agent, in agent declaration order.
///
/// The derived ordering compares local-state declaration indices
/// lexicographically, which is the canonical state order used everywhere.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlobalState(pub Box<[LocalId]>);

impl GlobalState {
    pub fn new(locals: impl Into<Box<[LocalId]>>) -> Self {
        GlobalState(locals.into())
    }

    pub fn local(&self, agent: AgentId) -> LocalId {
        self.0[agent]
    }

    pub fn locals(&self) -> &[LocalId] {
        &self.0
    }
}

/// A full joint action: one action per agent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointAction(pub Box<[ActionId]>);

impl JointAction {
    pub fn new(actions: impl Into<Box<[ActionId]>>) -> Self {
        JointAction(actions.into())
    }

    pub fn action(&self, agent: AgentId) -> ActionId {
        self.0[agent]
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.0
    }

    /// Whether this joint action agrees with `partial` on every fixed slot.
    pub fn extends(&self, partial: &AAction) -> bool {
        partial
            .slots()
            .iter()
            .zip(self.0.iter())
            .all(|(slot, act)| slot.map_or(true, |a| a == *act))
    }
}

/// An action template for a coalition: slots outside the coalition hold the
/// placeholder (`None`, printed as `#`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AAction(Box<[Option<ActionId>]>);

impl AAction {
    pub fn new(slots: impl Into<Box<[Option<ActionId>]>>) -> Self {
        AAction(slots.into())
    }

    pub fn slots(&self) -> &[Option<ActionId>] {
        &self.0
    }

    /// The coalition whose actions are fixed.
    pub fn carrier(&self) -> AgentSet {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some())
            .map(|(i, _)| i)
            .collect()
    }

    /// Returns the full joint action when no slot is a placeholder.
    pub fn as_joint(&self) -> Option<JointAction> {
        self.0
            .iter()
            .copied()
            .collect::<Option<Vec<_>>>()
            .map(JointAction::new)
    }
}

impl From<&JointAction> for AAction {
    fn from(joint: &JointAction) -> Self {
        AAction(joint.0.iter().map(|&a| Some(a)).collect())
    }
}

/// One agent: local states, actions and protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentSpec {
    pub name: String,
    pub locals: Vec<String>,
    pub actions: Vec<String>,
    /// Enabled actions per local state, sorted by action declaration order.
    pub protocol: Vec<Vec<ActionId>>,
}

impl AgentSpec {
    pub fn local_id(&self, name: &str) -> Option<LocalId> {
        self.locals.iter().position(|l| l == name).map(|i| i as LocalId)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a == name).map(|i| i as ActionId)
    }

    pub fn enabled(&self, local: LocalId) -> &[ActionId] {
        &self.protocol[local as usize]
    }

    pub fn action_name(&self, action: ActionId) -> &str {
        &self.actions[action as usize]
    }

    pub fn local_name(&self, local: LocalId) -> &str {
        &self.locals[local as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("model declares no agents")]
    NoAgents,
    #[error("model declares {0} agents; at most {MAX_AGENTS} are supported")]
    TooManyAgents(usize),
    #[error("duplicate {kind} `{name}` in {context}")]
    DuplicateIdentifier {
        kind: &'static str,
        name: String,
        context: String,
    },
    #[error("unknown {kind} `{name}` in {context}")]
    UnknownIdentifier {
        kind: &'static str,
        name: String,
        context: String,
    },
    #[error("agent `{agent}` has no enabled action at local state `{local}`")]
    EmptyProtocolEntry { agent: String, local: String },
    #[error("{context}: expected {expected} components, found {found}")]
    ArityMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate transition from {state} under {action}")]
    DuplicateTransition { state: String, action: String },
    #[error("transition from {state} under {action} is not allowed by the protocols")]
    TransitionNotEnabled { state: String, action: String },
    #[error("reachable state {state} has no transition for enabled joint action {action}")]
    MissingEnabledTransition { state: String, action: String },
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("{action} is not enabled at {state}")]
    NotEnabled { state: String, action: String },
    #[error("state {0} is not reachable from the initial state")]
    Unreachable(String),
}

/// Every violation found while validating a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationErrors(pub Vec<ModelError>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid model ({} problem", self.0.len())?;
        if self.0.len() != 1 {
            write!(f, "s")?;
        }
        write!(f, ")")?;
        for err in &self.0 {
            write!(f, "\n  - {err}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

impl ValidationErrors {
    pub fn errors(&self) -> &[ModelError] {
        &self.0
    }

    pub fn contains(&self, pred: impl Fn(&ModelError) -> bool) -> bool {
        self.0.iter().any(pred)
    }
}

/// Non-fatal findings reported alongside a valid model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationWarning {
    /// An atom mentions a well-formed state that is not reachable.
    UnreachableAtomState { atom: String, state: String },
}

impl fmt::Display for ValidationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationWarning::UnreachableAtomState { atom, state } => {
                write!(f, "atom `{atom}` mentions unreachable state {state}")
            }
        }
    }
}

/// A validated epistemic concurrent game model.
#[derive(Clone, Debug)]
pub struct Ecgm {
    agents: Vec<AgentSpec>,
    initial: GlobalState,
    transitions: BTreeMap<(GlobalState, JointAction), GlobalState>,
    atoms: BTreeMap<String, BTreeSet<GlobalState>>,

    states: Vec<GlobalState>,
    state_index: HashMap<GlobalState, StateId>,
    initial_id: StateId,
    successors: Vec<HashMap<Box<[ActionId]>, StateId>>,
    edges: Vec<Vec<StateId>>,
    atom_truth: BTreeMap<String, Vec<bool>>,
    // classes[agent][local] = reachable states whose agent-component is `local`
    classes: Vec<Vec<Vec<StateId>>>,
}

impl Ecgm {
    /// Builds and validates a model from id-level components.
    ///
    /// All violations are collected before returning.
    pub fn new(
        agents: Vec<AgentSpec>,
        initial: GlobalState,
        transitions: Vec<(GlobalState, JointAction, GlobalState)>,
        atoms: BTreeMap<String, BTreeSet<GlobalState>>,
    ) -> Result<(Ecgm, Vec<ValidationWarning>), ValidationErrors> {
        let mut errors = Vec::new();
        if agents.is_empty() {
            return Err(ValidationErrors(vec![ModelError::NoAgents]));
        }
        if agents.len() > MAX_AGENTS {
            return Err(ValidationErrors(vec![ModelError::TooManyAgents(
                agents.len(),
            )]));
        }
        for agent in &agents {
            check_agent(agent, &mut errors);
        }
        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }

        let shape = Shape { agents: &agents };
        shape.check_state(&initial, "initial state", &mut errors);

        let mut table: BTreeMap<(GlobalState, JointAction), GlobalState> = BTreeMap::new();
        for (from, action, to) in transitions {
            let ok_from = shape.check_state(&from, "transition source", &mut errors);
            let ok_to = shape.check_state(&to, "transition target", &mut errors);
            let ok_act = shape.check_joint(&action, "transition action", &mut errors);
            if !(ok_from && ok_to && ok_act) {
                continue;
            }
            if !shape.is_enabled(&from, &action) {
                errors.push(ModelError::TransitionNotEnabled {
                    state: shape.state_label(&from),
                    action: shape.joint_label(&action),
                });
                continue;
            }
            let key = (from, action);
            if table.contains_key(&key) {
                errors.push(ModelError::DuplicateTransition {
                    state: shape.state_label(&key.0),
                    action: shape.joint_label(&key.1),
                });
                continue;
            }
            table.insert(key, to);
        }
        for (atom, states) in &atoms {
            for s in states {
                shape.check_state(s, &format!("atom `{atom}`"), &mut errors);
            }
        }
        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }

        // Reachability over the table; every enabled pair at a reachable
        // state must be present.
        let mut seen: BTreeSet<GlobalState> = BTreeSet::new();
        let mut queue = std::collections::VecDeque::new();
        seen.insert(initial.clone());
        queue.push_back(initial.clone());
        while let Some(s) = queue.pop_front() {
            for joint in shape.enabled_joint(&s) {
                match table.get(&(s.clone(), joint.clone())) {
                    Some(t) => {
                        if seen.insert(t.clone()) {
                            queue.push_back(t.clone());
                        }
                    }
                    None => errors.push(ModelError::MissingEnabledTransition {
                        state: shape.state_label(&s),
                        action: shape.joint_label(&joint),
                    }),
                }
            }
        }
        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }

        let states: Vec<GlobalState> = seen.into_iter().collect();
        let state_index: HashMap<GlobalState, StateId> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let initial_id = state_index[&initial];

        let mut successors = Vec::with_capacity(states.len());
        let mut edges = Vec::with_capacity(states.len());
        for s in &states {
            let mut succ = HashMap::new();
            let mut out = BTreeSet::new();
            for joint in shape.enabled_joint(s) {
                let t = state_index[&table[&(s.clone(), joint.clone())]];
                out.insert(t);
                succ.insert(joint.0, t);
            }
            successors.push(succ);
            edges.push(out.into_iter().collect());
        }

        let mut warnings = Vec::new();
        let mut atom_truth = BTreeMap::new();
        for (atom, set) in &atoms {
            let mut truth = vec![false; states.len()];
            for s in set {
                match state_index.get(s) {
                    Some(&id) => truth[id] = true,
                    None => warnings.push(ValidationWarning::UnreachableAtomState {
                        atom: atom.clone(),
                        state: shape.state_label(s),
                    }),
                }
            }
            atom_truth.insert(atom.clone(), truth);
        }

        let classes = agents
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let mut by_local = vec![Vec::new(); spec.locals.len()];
                for (id, s) in states.iter().enumerate() {
                    by_local[s.local(i) as usize].push(id);
                }
                by_local
            })
            .collect();

        Ok((
            Ecgm {
                agents,
                initial,
                transitions: table,
                atoms,
                states,
                state_index,
                initial_id,
                successors,
                edges,
                atom_truth,
                classes,
            },
            warnings,
        ))
    }

    pub fn agents(&self) -> &[AgentSpec] {
        &self.agents
    }

    pub fn agent(&self, id: AgentId) -> &AgentSpec {
        &self.agents[id]
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    /// The full agent set `Ag`.
    pub fn all_agents(&self) -> AgentSet {
        AgentSet::all(self.agents.len())
    }

    pub fn agent_names(&self) -> Vec<String> {
        self.agents.iter().map(|a| a.name.clone()).collect()
    }

    pub fn agent_id(&self, name: &str) -> Result<AgentId, ModelError> {
        self.agents
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| ModelError::UnknownAgent(name.to_string()))
    }

    pub fn initial(&self) -> &GlobalState {
        &self.initial
    }

    pub fn initial_id(&self) -> StateId {
        self.initial_id
    }

    /// The full transition table, including entries at unreachable states.
    pub fn transitions(&self) -> &BTreeMap<(GlobalState, JointAction), GlobalState> {
        &self.transitions
    }

    pub fn atoms(&self) -> &BTreeMap<String, BTreeSet<GlobalState>> {
        &self.atoms
    }

    /// States reachable from the initial state, in canonical order.
    pub fn reachable_states(&self) -> &[GlobalState] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, id: StateId) -> &GlobalState {
        &self.states[id]
    }

    pub fn state_id(&self, s: &GlobalState) -> Option<StateId> {
        self.state_index.get(s).copied()
    }

    /// Number of distinct `s -> s'` pairs over reachable states.
    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// Distinct successors of a reachable state, in canonical order.
    pub fn edges(&self, s: StateId) -> &[StateId] {
        &self.edges[s]
    }

    /// Successor of a reachable state under an enabled joint action.
    pub fn successor(&self, s: StateId, joint: &JointAction) -> Option<StateId> {
        self.successor_by(s, joint.actions())
    }

    /// Successor by action slice.
    pub fn successor_by(&self, s: StateId, actions: &[ActionId]) -> Option<StateId> {
        self.successors[s].get(actions).copied()
    }

    /// Whether atom `name` holds at reachable state `s`. Unknown atoms are
    /// false everywhere.
    pub fn holds(&self, name: &str, s: StateId) -> bool {
        self.atom_truth.get(name).is_some_and(|t| t[s])
    }

    pub fn has_atom(&self, name: &str) -> bool {
        self.atoms.contains_key(name)
    }

    /// The `~_agent` class of a reachable state, in canonical order.
    pub fn class_of(&self, agent: AgentId, s: StateId) -> &[StateId] {
        &self.classes[agent][self.states[s].local(agent) as usize]
    }

    /// Enabled joint actions at a well-formed state, in canonical order
    /// (first agent most significant, actions in declaration order).
    pub fn enabled_joint_actions(&self, s: &GlobalState) -> Vec<JointAction> {
        Shape {
            agents: &self.agents,
        }
        .enabled_joint(s)
    }

    /// `D_A(s)`: every coalition action enabled at `s`.
    pub fn enabled_actions(
        &self,
        s: &GlobalState,
        coalition: AgentSet,
    ) -> Result<Vec<AAction>, ModelError> {
        self.check_coalition(coalition)?;
        self.check_well_formed(s)?;
        let choices: Vec<Vec<Option<ActionId>>> = (0..self.agents.len())
            .map(|i| {
                if coalition.contains(i) {
                    self.agents[i]
                        .enabled(s.local(i))
                        .iter()
                        .map(|&a| Some(a))
                        .collect()
                } else {
                    vec![None]
                }
            })
            .collect();
        Ok(cartesian(&choices).into_iter().map(AAction::new).collect())
    }

    /// `tau(s, joint)`.
    pub fn step(&self, s: &GlobalState, joint: &JointAction) -> Result<GlobalState, ModelError> {
        self.check_well_formed(s)?;
        if joint.0.len() != self.agents.len()
            || joint
                .0
                .iter()
                .enumerate()
                .any(|(i, &a)| !self.agents[i].enabled(s.local(i)).contains(&a))
        {
            return Err(ModelError::NotEnabled {
                state: self.state_label(s),
                action: self.joint_label(joint),
            });
        }
        self.transitions
            .get(&(s.clone(), joint.clone()))
            .cloned()
            .ok_or_else(|| ModelError::MissingEnabledTransition {
                state: self.state_label(s),
                action: self.joint_label(joint),
            })
    }

    /// `out(s, action)`: targets of every enabled joint action extending it.
    pub fn outcome_of_action(
        &self,
        s: &GlobalState,
        action: &AAction,
    ) -> Result<BTreeSet<GlobalState>, ModelError> {
        self.check_well_formed(s)?;
        let enabled = action.slots().len() == self.agents.len()
            && action
                .slots()
                .iter()
                .enumerate()
                .all(|(i, slot)| slot.map_or(true, |a| self.agents[i].enabled(s.local(i)).contains(&a)));
        if !enabled {
            return Err(ModelError::NotEnabled {
                state: self.state_label(s),
                action: self.aaction_label(action),
            });
        }
        let mut out = BTreeSet::new();
        for joint in self.enabled_joint_actions(s) {
            if joint.extends(action) {
                out.insert(self.step(s, &joint)?);
            }
        }
        Ok(out)
    }

    /// `s ~_agent s'`: equal local state for the agent.
    pub fn indistinguishable(
        &self,
        agent: AgentId,
        s: &GlobalState,
        t: &GlobalState,
    ) -> Result<bool, ModelError> {
        if agent >= self.agents.len() {
            return Err(ModelError::UnknownAgent(agent.to_string()));
        }
        self.check_well_formed(s)?;
        self.check_well_formed(t)?;
        Ok(s.local(agent) == t.local(agent))
    }

    /// Reachable states the agent cannot tell apart from `s`.
    pub fn epistemic_class(
        &self,
        agent: AgentId,
        s: &GlobalState,
    ) -> Result<Vec<GlobalState>, ModelError> {
        if agent >= self.agents.len() {
            return Err(ModelError::UnknownAgent(agent.to_string()));
        }
        let id = self
            .state_id(s)
            .ok_or_else(|| ModelError::Unreachable(self.state_label(s)))?;
        Ok(self
            .class_of(agent, id)
            .iter()
            .map(|&t| self.states[t].clone())
            .collect())
    }

    /// Resolves local-state names to a global state.
    pub fn parse_state<S: AsRef<str>>(&self, names: &[S]) -> Result<GlobalState, ModelError> {
        if names.len() != self.agents.len() {
            return Err(ModelError::ArityMismatch {
                context: "state".into(),
                expected: self.agents.len(),
                found: names.len(),
            });
        }
        names
            .iter()
            .zip(&self.agents)
            .map(|(n, a)| {
                a.local_id(n.as_ref()).ok_or_else(|| ModelError::UnknownIdentifier {
                    kind: "local state",
                    name: n.as_ref().to_string(),
                    context: format!("agent `{}`", a.name),
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(GlobalState::new)
    }

    /// Resolves action names to a joint action.
    pub fn parse_joint<S: AsRef<str>>(&self, names: &[S]) -> Result<JointAction, ModelError> {
        if names.len() != self.agents.len() {
            return Err(ModelError::ArityMismatch {
                context: "joint action".into(),
                expected: self.agents.len(),
                found: names.len(),
            });
        }
        names
            .iter()
            .zip(&self.agents)
            .map(|(n, a)| {
                a.action_id(n.as_ref()).ok_or_else(|| ModelError::UnknownIdentifier {
                    kind: "action",
                    name: n.as_ref().to_string(),
                    context: format!("agent `{}`", a.name),
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(JointAction::new)
    }

    /// Resolves a coalition template; `#` marks a placeholder slot.
    pub fn parse_aaction<S: AsRef<str>>(&self, names: &[S]) -> Result<AAction, ModelError> {
        if names.len() != self.agents.len() {
            return Err(ModelError::ArityMismatch {
                context: "coalition action".into(),
                expected: self.agents.len(),
                found: names.len(),
            });
        }
        names
            .iter()
            .zip(&self.agents)
            .map(|(n, a)| {
                let n = n.as_ref();
                if n == "#" {
                    return Ok(None);
                }
                a.action_id(n).map(Some).ok_or_else(|| ModelError::UnknownIdentifier {
                    kind: "action",
                    name: n.to_string(),
                    context: format!("agent `{}`", a.name),
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(AAction::new)
    }

    /// `(l0,l1,...)`
    pub fn state_label(&self, s: &GlobalState) -> String {
        Shape {
            agents: &self.agents,
        }
        .state_label(s)
    }

    /// `l0,l1,...` without parentheses.
    pub fn state_plain(&self, s: &GlobalState) -> String {
        s.locals()
            .iter()
            .zip(&self.agents)
            .map(|(&l, a)| a.local_name(l))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn joint_label(&self, joint: &JointAction) -> String {
        Shape {
            agents: &self.agents,
        }
        .joint_label(joint)
    }

    pub fn aaction_label(&self, action: &AAction) -> String {
        let parts: Vec<&str> = action
            .slots()
            .iter()
            .enumerate()
            .map(|(i, slot)| match slot {
                Some(a) if i < self.agents.len() && (*a as usize) < self.agents[i].actions.len() => {
                    self.agents[i].action_name(*a)
                }
                Some(_) => "?",
                None => "#",
            })
            .collect();
        format!("({})", parts.join(","))
    }

    fn check_well_formed(&self, s: &GlobalState) -> Result<(), ModelError> {
        let mut errors = Vec::new();
        let shape = Shape {
            agents: &self.agents,
        };
        if shape.check_state(s, "state", &mut errors) {
            Ok(())
        } else {
            Err(errors.remove(0))
        }
    }

    fn check_coalition(&self, coalition: AgentSet) -> Result<(), ModelError> {
        match coalition.iter().find(|&i| i >= self.agents.len()) {
            Some(i) => Err(ModelError::UnknownAgent(format!("#{i}"))),
            None => Ok(()),
        }
    }
}

fn check_agent(agent: &AgentSpec, errors: &mut Vec<ModelError>) {
    let context = format!("agent `{}`", agent.name);
    for (kind, list) in [("local state", &agent.locals), ("action", &agent.actions)] {
        let mut seen = BTreeSet::new();
        for name in list {
            if !seen.insert(name) {
                errors.push(ModelError::DuplicateIdentifier {
                    kind,
                    name: name.clone(),
                    context: context.clone(),
                });
            }
        }
    }
    if agent.locals.len() > LocalId::MAX as usize || agent.actions.len() > ActionId::MAX as usize {
        errors.push(ModelError::ArityMismatch {
            context,
            expected: LocalId::MAX as usize,
            found: agent.locals.len().max(agent.actions.len()),
        });
        return;
    }
    if agent.protocol.len() != agent.locals.len() {
        errors.push(ModelError::ArityMismatch {
            context: format!("protocol of agent `{}`", agent.name),
            expected: agent.locals.len(),
            found: agent.protocol.len(),
        });
        return;
    }
    for (l, enabled) in agent.protocol.iter().enumerate() {
        if enabled.is_empty() {
            errors.push(ModelError::EmptyProtocolEntry {
                agent: agent.name.clone(),
                local: agent.locals[l].clone(),
            });
        }
        if let Some(&bad) = enabled.iter().find(|&&a| a as usize >= agent.actions.len()) {
            errors.push(ModelError::UnknownIdentifier {
                kind: "action",
                name: format!("#{bad}"),
                context: format!("protocol of agent `{}`", agent.name),
            });
        }
    }
}

struct Shape<'a> {
    agents: &'a [AgentSpec],
}

impl Shape<'_> {
    fn check_state(&self, s: &GlobalState, context: &str, errors: &mut Vec<ModelError>) -> bool {
        if s.0.len() != self.agents.len() {
            errors.push(ModelError::ArityMismatch {
                context: context.to_string(),
                expected: self.agents.len(),
                found: s.0.len(),
            });
            return false;
        }
        let mut ok = true;
        for (i, &l) in s.0.iter().enumerate() {
            if l as usize >= self.agents[i].locals.len() {
                errors.push(ModelError::UnknownIdentifier {
                    kind: "local state",
                    name: format!("#{l}"),
                    context: format!("{context} (agent `{}`)", self.agents[i].name),
                });
                ok = false;
            }
        }
        ok
    }

    fn check_joint(&self, a: &JointAction, context: &str, errors: &mut Vec<ModelError>) -> bool {
        if a.0.len() != self.agents.len() {
            errors.push(ModelError::ArityMismatch {
                context: context.to_string(),
                expected: self.agents.len(),
                found: a.0.len(),
            });
            return false;
        }
        let mut ok = true;
        for (i, &act) in a.0.iter().enumerate() {
            if act as usize >= self.agents[i].actions.len() {
                errors.push(ModelError::UnknownIdentifier {
                    kind: "action",
                    name: format!("#{act}"),
                    context: format!("{context} (agent `{}`)", self.agents[i].name),
                });
                ok = false;
            }
        }
        ok
    }

    fn is_enabled(&self, s: &GlobalState, a: &JointAction) -> bool {
        a.0.iter()
            .enumerate()
            .all(|(i, act)| self.agents[i].enabled(s.local(i)).contains(act))
    }

    fn enabled_joint(&self, s: &GlobalState) -> Vec<JointAction> {
        let choices: Vec<Vec<ActionId>> = self
            .agents
            .iter()
            .enumerate()
            .map(|(i, a)| a.enabled(s.local(i)).to_vec())
            .collect();
        cartesian(&choices).into_iter().map(JointAction::new).collect()
    }

    fn state_label(&self, s: &GlobalState) -> String {
        let parts: Vec<&str> = s
            .0
            .iter()
            .zip(self.agents)
            .map(|(&l, a)| a.locals.get(l as usize).map_or("?", String::as_str))
            .collect();
        format!("({})", parts.join(","))
    }

    fn joint_label(&self, j: &JointAction) -> String {
        let parts: Vec<&str> = j
            .0
            .iter()
            .zip(self.agents)
            .map(|(&x, a)| a.actions.get(x as usize).map_or("?", String::as_str))
            .collect();
        format!("({})", parts.join(","))
    }
}

/// Cartesian product in odometer order, first list most significant.
fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::with_capacity(lists.len())];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for item in list {
                let mut v = prefix.clone();
                v.push(item.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}
