//! Model checking for epistemic strategy logic.
//!
//! An [`Ecgm`] describes agents with local states, protocols and a
//! deterministic joint transition function. Formulas quantify over
//! bounded-recall strategies of individual agents, talk about the unique
//! outcome run of the current assignment with `X` and `U`, and about
//! individual knowledge with `K[i]`.
//!
//! Verdicts come from direct evaluation of the satisfaction relation over
//! the reachable states, with strategies searched lazily one table entry at
//! a time. The [`qptl`] module reduces satisfiability of quantified
//! propositional temporal logic to model checking.

pub mod checker;
pub mod eval;
pub mod formula;
pub mod model;
pub mod qptl;
pub mod strategy;

pub use checker::{
    existential_closure, model_check, universal_closure, CheckOptions, Closure, Report, Verdict,
    Witness,
};
pub use eval::{holds_in_model, satisfied_at_state, satisfies, EvalConfig, EvalError, Evaluator};
pub use formula::{parse_formula, Formula, FormulaKind, ParseError, QuantifierProfile, Var};
pub use model::{load_model, AgentSet, Ecgm, GlobalState, ModelDocument};
pub use strategy::{
    enumerate_strategies, feasible_windows, outcome_run, Assignment, LassoRun, Strategy,
    StrategyMode, WindowSpace,
};
