//! Epistemic strategy logic formulas.
//!
//! The core grammar has atoms, negation, implication, next, until,
//! individual knowledge and strategy quantification. Conjunction,
//! disjunction, `F`, `G`, `true` and `false` are desugared by the
//! constructors below, so evaluators only ever see the core forms.
//! Universal quantification is kept as its own node so that evaluation can
//! short-circuit on counterexamples.
//!
//! Strategy variables are tagged with the agent they range over. Only the
//! agent matters semantically; the name is kept for witness reporting.

mod print;
mod syntax;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::model::{AgentId, AgentSet};

pub use print::Display as FormulaDisplay;
pub use syntax::{parse_formula, ParseError};
pub(crate) use syntax::{parse_surface, Dialect, Surface};

/// Process-unique identity of an AST node, used as a memoization key.
pub type NodeId = u64;

static NEXT_NODE: AtomicU64 = AtomicU64::new(1);

/// Name of the atom used to encode `true` as `true -> true`. It cannot
/// collide with user atoms because `true` is a keyword.
pub(crate) const TRUTH_ATOM: &str = "true";

/// A strategy variable bound to an agent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    pub agent: AgentId,
}

impl Var {
    pub fn new(name: impl Into<String>, agent: AgentId) -> Var {
        Var {
            name: name.into(),
            agent,
        }
    }
}

#[derive(Clone, Debug)]
pub enum FormulaKind {
    Atom(String),
    Not(Formula),
    Implies(Formula, Formula),
    Next(Formula),
    Until(Formula, Formula),
    Know(AgentId, Formula),
    Exists(Var, Formula),
    Forall(Var, Formula),
}

struct Node {
    id: NodeId,
    // Free agents computed with Ag = every possible agent; intersect with
    // the actual roster to get fr(φ).
    free: AgentSet,
    kind: FormulaKind,
}

/// A shared, immutable formula node.
///
/// Equality is structural and ignores node ids.
#[derive(Clone)]
pub struct Formula(Arc<Node>);

impl Formula {
    fn make(kind: FormulaKind) -> Formula {
        let free = match &kind {
            FormulaKind::Atom(_) => AgentSet::EMPTY,
            FormulaKind::Not(a) | FormulaKind::Know(_, a) => a.0.free,
            FormulaKind::Implies(a, b) => a.0.free.union(b.0.free),
            FormulaKind::Next(_) | FormulaKind::Until(_, _) => AgentSet::UNIVERSE,
            FormulaKind::Exists(v, a) | FormulaKind::Forall(v, a) => a.0.free.without(v.agent),
        };
        Formula(Arc::new(Node {
            id: NEXT_NODE.fetch_add(1, Ordering::Relaxed),
            free,
            kind,
        }))
    }

    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::make(FormulaKind::Atom(name.into()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::make(FormulaKind::Not(a))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::make(FormulaKind::Implies(a, b))
    }

    pub fn next(a: Formula) -> Formula {
        Formula::make(FormulaKind::Next(a))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::make(FormulaKind::Until(a, b))
    }

    pub fn know(agent: AgentId, a: Formula) -> Formula {
        Formula::make(FormulaKind::Know(agent, a))
    }

    pub fn exists(var: Var, a: Formula) -> Formula {
        Formula::make(FormulaKind::Exists(var, a))
    }

    pub fn forall(var: Var, a: Formula) -> Formula {
        Formula::make(FormulaKind::Forall(var, a))
    }

    /// `true`, encoded as `true -> true`.
    pub fn truth() -> Formula {
        Formula::implies(Formula::atom(TRUTH_ATOM), Formula::atom(TRUTH_ATOM))
    }

    pub fn falsity() -> Formula {
        Formula::not(Formula::truth())
    }

    /// `a & b` as `!(a -> !b)`.
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::implies(a, Formula::not(b)))
    }

    /// `a | b` as `!a -> b`.
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::implies(Formula::not(a), b)
    }

    /// `F a` as `true U a`.
    pub fn eventually(a: Formula) -> Formula {
        Formula::until(Formula::truth(), a)
    }

    /// `G a` as `!(true U !a)`.
    pub fn globally(a: Formula) -> Formula {
        Formula::not(Formula::until(Formula::truth(), Formula::not(a)))
    }

    pub fn id(&self) -> NodeId {
        self.0.id
    }

    pub fn kind(&self) -> &FormulaKind {
        &self.0.kind
    }

    /// `fr(φ)` for a roster of `num_agents` agents.
    pub fn free_agents(&self, num_agents: usize) -> AgentSet {
        self.0.free.intersect(AgentSet::all(num_agents))
    }

    /// `bnd(φ) = Ag \ fr(φ)`.
    pub fn bound_agents(&self, num_agents: usize) -> AgentSet {
        AgentSet::all(num_agents).minus(self.free_agents(num_agents))
    }

    pub fn is_sentence(&self, num_agents: usize) -> bool {
        self.free_agents(num_agents).is_empty()
    }

    /// Maximum number of effective quantifier switches along any path.
    ///
    /// Negation flips the polarity of every quantifier below it, as does
    /// the left operand of an implication; temporal and epistemic operators
    /// are transparent. A single block of same-kind quantifiers counts 0.
    pub fn alternation_depth(&self) -> usize {
        fn walk(f: &Formula, negated: bool, last: Option<bool>, switches: usize) -> usize {
            match f.kind() {
                FormulaKind::Atom(_) => switches,
                FormulaKind::Not(a) => walk(a, !negated, last, switches),
                FormulaKind::Implies(a, b) => walk(a, !negated, last, switches)
                    .max(walk(b, negated, last, switches)),
                FormulaKind::Next(a) | FormulaKind::Know(_, a) => walk(a, negated, last, switches),
                FormulaKind::Until(a, b) => {
                    walk(a, negated, last, switches).max(walk(b, negated, last, switches))
                }
                FormulaKind::Exists(_, a) | FormulaKind::Forall(_, a) => {
                    let existential = matches!(f.kind(), FormulaKind::Exists(..)) != negated;
                    let switches = match last {
                        Some(prev) if prev != existential => switches + 1,
                        _ => switches,
                    };
                    walk(a, negated, Some(existential), switches)
                }
            }
        }
        walk(self, false, None, 0)
    }

    pub fn profile(&self, num_agents: usize) -> QuantifierProfile {
        let free = self.free_agents(num_agents);
        QuantifierProfile {
            free,
            bound: AgentSet::all(num_agents).minus(free),
            alt: self.alternation_depth(),
            is_sentence: free.is_empty(),
        }
    }

    /// Operator nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self.kind() {
            FormulaKind::Atom(_) => 0,
            FormulaKind::Not(a)
            | FormulaKind::Next(a)
            | FormulaKind::Know(_, a)
            | FormulaKind::Exists(_, a)
            | FormulaKind::Forall(_, a) => 1 + a.depth(),
            FormulaKind::Implies(a, b) | FormulaKind::Until(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Direct children, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self.kind() {
            FormulaKind::Atom(_) => vec![],
            FormulaKind::Not(a)
            | FormulaKind::Next(a)
            | FormulaKind::Know(_, a)
            | FormulaKind::Exists(_, a)
            | FormulaKind::Forall(_, a) => vec![a],
            FormulaKind::Implies(a, b) | FormulaKind::Until(a, b) => vec![a, b],
        }
    }

    /// Atom names occurring in the formula, excluding the internal `true`.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if let FormulaKind::Atom(name) = f.kind() {
                if name != TRUTH_ATOM && !out.contains(name) {
                    out.push(name.clone());
                }
            }
            stack.extend(f.children().into_iter().rev());
        }
        out
    }

    /// Renders the formula in concrete syntax using agent names.
    pub fn display<'a, S: AsRef<str>>(&'a self, roster: &'a [S]) -> FormulaDisplay<'a, S> {
        FormulaDisplay::new(self, roster)
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        use FormulaKind::*;
        match (self.kind(), other.kind()) {
            (Atom(a), Atom(b)) => a == b,
            (Not(a), Not(b)) | (Next(a), Next(b)) => a == b,
            (Implies(a, b), Implies(c, d)) | (Until(a, b), Until(c, d)) => a == c && b == d,
            (Know(i, a), Know(j, b)) => i == j && a == b,
            (Exists(v, a), Exists(w, b)) | (Forall(v, a), Forall(w, b)) => v == w && a == b,
            _ => false,
        }
    }
}

impl Eq for Formula {}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind().fmt(f)
    }
}

/// Free/bound agents and alternation depth of a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuantifierProfile {
    pub free: AgentSet,
    pub bound: AgentSet,
    pub alt: usize,
    pub is_sentence: bool,
}

#[cfg(test)]
mod tests;
