//! Quantified propositional temporal logic and its reduction to model
//! checking.
//!
//! Every proposition `p` becomes an agent `p` of the valuation model whose
//! local state records the current truth value of `p` and whose actions
//! `t`/`f` set the next one. A strategy for agent `p` therefore writes a
//! truth value for `p` one step ahead, which is why atoms translate to
//! `X p`. With recall `γ` the pipeline finds evaluations that a `γ`-recall
//! strategy can produce; every SAT answer carries the induced evaluation and
//! is replayed against the direct semantics in [`oracle`].

pub mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::checker::{check_with, existential_closure, leading_exists, CheckOptions, Closure};
use crate::eval::{Env, EvalConfig, EvalError, Evaluator};
use crate::formula::{parse_surface, Dialect, Formula, ParseError, Surface, Var};
use crate::model::{AgentSpec, Ecgm, GlobalState, JointAction};
use crate::strategy::{outcome_run, Assignment};

pub use oracle::{holds, qptl_oracle, LassoWord, OracleVerdict, PeriodicEvaluation};

/// Shape bounds for quantifiers nested below the leading block when a
/// witness evaluation is replayed.
pub const REPLAY_BOUNDS: (usize, usize) = (3, 3);

/// Local state names of a proposition agent, false first.
pub const BOT: &str = "bot";
pub const TOP: &str = "top";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QptlError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("the set of propositions is empty")]
    EmptyAP,
    #[error("proposition `{0}` is declared twice")]
    DuplicateProposition(String),
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
    #[error("`K` is not available in QPTL")]
    Knowledge,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("oracle bounds ({prefix}, {period}) are out of range: {reason}")]
    BoundsExceeded {
        prefix: usize,
        period: usize,
        reason: String,
    },
}

/// A QPTL formula. `G`, `&`, `|`, `false` and `forall` are desugared.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Qptl {
    True,
    Atom(String),
    Not(Box<Qptl>),
    Implies(Box<Qptl>, Box<Qptl>),
    Next(Box<Qptl>),
    Until(Box<Qptl>, Box<Qptl>),
    Eventually(Box<Qptl>),
    ExistsProp(String, Box<Qptl>),
}

impl Qptl {
    pub fn atom(p: impl Into<String>) -> Qptl {
        Qptl::Atom(p.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Qptl) -> Qptl {
        Qptl::Not(Box::new(a))
    }

    pub fn implies(a: Qptl, b: Qptl) -> Qptl {
        Qptl::Implies(Box::new(a), Box::new(b))
    }

    pub fn and(a: Qptl, b: Qptl) -> Qptl {
        Qptl::not(Qptl::implies(a, Qptl::not(b)))
    }

    pub fn or(a: Qptl, b: Qptl) -> Qptl {
        Qptl::implies(Qptl::not(a), b)
    }

    pub fn next(a: Qptl) -> Qptl {
        Qptl::Next(Box::new(a))
    }

    pub fn until(a: Qptl, b: Qptl) -> Qptl {
        Qptl::Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(a: Qptl) -> Qptl {
        Qptl::Eventually(Box::new(a))
    }

    pub fn globally(a: Qptl) -> Qptl {
        Qptl::not(Qptl::eventually(Qptl::not(a)))
    }

    pub fn exists(p: impl Into<String>, a: Qptl) -> Qptl {
        Qptl::ExistsProp(p.into(), Box::new(a))
    }

    pub fn forall(p: impl Into<String>, a: Qptl) -> Qptl {
        Qptl::not(Qptl::exists(p, Qptl::not(a)))
    }

    /// Every proposition mentioned, bound or free, in first-occurrence order.
    pub fn propositions(&self) -> Vec<String> {
        fn walk(f: &Qptl, out: &mut Vec<String>) {
            let mut add = |p: &String| {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            };
            match f {
                Qptl::True => {}
                Qptl::Atom(p) => add(p),
                Qptl::ExistsProp(p, a) => {
                    add(p);
                    walk(a, out);
                }
                Qptl::Not(a) | Qptl::Next(a) | Qptl::Eventually(a) => walk(a, out),
                Qptl::Implies(a, b) | Qptl::Until(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Propositions occurring outside the scope of their quantifier.
    pub fn free_propositions(&self) -> BTreeSet<String> {
        match self {
            Qptl::True => BTreeSet::new(),
            Qptl::Atom(p) => BTreeSet::from([p.clone()]),
            Qptl::Not(a) | Qptl::Next(a) | Qptl::Eventually(a) => a.free_propositions(),
            Qptl::Implies(a, b) | Qptl::Until(a, b) => {
                let mut s = a.free_propositions();
                s.extend(b.free_propositions());
                s
            }
            Qptl::ExistsProp(p, a) => {
                let mut s = a.free_propositions();
                s.remove(p);
                s
            }
        }
    }

    /// Quantifier alternations with negation polarity, as for ESL formulas.
    pub fn alternation_depth(&self) -> usize {
        fn walk(f: &Qptl, negated: bool, last: Option<bool>, switches: usize) -> usize {
            match f {
                Qptl::True | Qptl::Atom(_) => switches,
                Qptl::Not(a) => walk(a, !negated, last, switches),
                Qptl::Implies(a, b) => {
                    walk(a, !negated, last, switches).max(walk(b, negated, last, switches))
                }
                Qptl::Next(a) | Qptl::Eventually(a) => walk(a, negated, last, switches),
                Qptl::Until(a, b) => {
                    walk(a, negated, last, switches).max(walk(b, negated, last, switches))
                }
                Qptl::ExistsProp(_, a) => {
                    let existential = !negated;
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

    /// Nesting depth of `X`, `U` and `F`.
    pub fn temporal_depth(&self) -> usize {
        match self {
            Qptl::True | Qptl::Atom(_) => 0,
            Qptl::Not(a) | Qptl::ExistsProp(_, a) => a.temporal_depth(),
            Qptl::Implies(a, b) => a.temporal_depth().max(b.temporal_depth()),
            Qptl::Next(a) | Qptl::Eventually(a) => 1 + a.temporal_depth(),
            Qptl::Until(a, b) => 1 + a.temporal_depth().max(b.temporal_depth()),
        }
    }

    /// The leading `∃` chain and the body below it.
    pub fn leading_exists(&self) -> (Vec<&str>, &Qptl) {
        let mut props = Vec::new();
        let mut f = self;
        while let Qptl::ExistsProp(p, body) = f {
            props.push(p.as_str());
            f = body;
        }
        (props, f)
    }
}

/// Prints with derived operators restored and every binary operator
/// parenthesised, so the output parses back to the same tree.
impl fmt::Display for Qptl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Qptl::True => f.write_str("true"),
            Qptl::Atom(p) => f.write_str(p),
            Qptl::Not(inner) => match &**inner {
                Qptl::True => f.write_str("false"),
                Qptl::Implies(a, b) => match &**b {
                    Qptl::Not(b) => write!(f, "({a} & {b})"),
                    _ => write!(f, "!{inner}"),
                },
                Qptl::Eventually(a) => match &**a {
                    Qptl::Not(a) => write!(f, "G {a}"),
                    _ => write!(f, "!{inner}"),
                },
                Qptl::ExistsProp(p, a) => match &**a {
                    Qptl::Not(a) => write!(f, "(forall {p}. {a})"),
                    _ => write!(f, "!{inner}"),
                },
                _ => write!(f, "!{inner}"),
            },
            Qptl::Implies(a, b) => match &**a {
                Qptl::Not(a) => write!(f, "({a} | {b})"),
                _ => write!(f, "({a} -> {b})"),
            },
            Qptl::Next(a) => write!(f, "X {a}"),
            Qptl::Until(a, b) => write!(f, "({a} U {b})"),
            Qptl::Eventually(a) => write!(f, "F {a}"),
            Qptl::ExistsProp(p, a) => write!(f, "(exists {p}. {a})"),
        }
    }
}

/// Parses a QPTL formula: the ESL syntax without `K`, with quantifiers
/// written `exists p.` and `forall p.`.
pub fn parse_qptl(text: &str) -> Result<Qptl, QptlError> {
    lower(&parse_surface(text, Dialect::Qptl)?)
}

fn lower(s: &Surface) -> Result<Qptl, QptlError> {
    Ok(match s {
        Surface::True => Qptl::True,
        Surface::False => Qptl::not(Qptl::True),
        Surface::Ident(p) => Qptl::atom(p.clone()),
        Surface::Not(a) => Qptl::not(lower(a)?),
        Surface::Next(a) => Qptl::next(lower(a)?),
        Surface::Eventually(a) => Qptl::eventually(lower(a)?),
        Surface::Globally(a) => Qptl::globally(lower(a)?),
        Surface::Know { .. } => return Err(QptlError::Knowledge),
        Surface::And(a, b) => Qptl::and(lower(a)?, lower(b)?),
        Surface::Or(a, b) => Qptl::or(lower(a)?, lower(b)?),
        Surface::Implies(a, b) => Qptl::implies(lower(a)?, lower(b)?),
        Surface::Until(a, b) => Qptl::until(lower(a)?, lower(b)?),
        Surface::Quant {
            universal,
            var,
            body,
            ..
        } => {
            let body = lower(body)?;
            if *universal {
                Qptl::forall(var.clone(), body)
            } else {
                Qptl::exists(var.clone(), body)
            }
        }
    })
}

fn check_ap<S: AsRef<str>>(ap: &[S]) -> Result<(), QptlError> {
    if ap.is_empty() {
        return Err(QptlError::EmptyAP);
    }
    let mut seen = BTreeSet::new();
    for p in ap {
        if !seen.insert(p.as_ref()) {
            return Err(QptlError::DuplicateProposition(p.as_ref().to_string()));
        }
    }
    Ok(())
}

/// The valuation model over `ap`: one agent per proposition, each freely
/// choosing the next truth value of its proposition.
pub fn build_valuation_model<S: AsRef<str>>(ap: &[S]) -> Result<Ecgm, QptlError> {
    check_ap(ap)?;
    let n = ap.len();
    let agents: Vec<AgentSpec> = ap
        .iter()
        .map(|p| AgentSpec {
            name: p.as_ref().to_string(),
            locals: vec![BOT.into(), TOP.into()],
            actions: vec!["t".into(), "f".into()],
            protocol: vec![vec![0, 1], vec![0, 1]],
        })
        .collect();
    let bits = |mask: usize| -> Vec<u16> { (0..n).map(|i| ((mask >> (n - 1 - i)) & 1) as u16).collect() };
    let mut transitions = Vec::with_capacity(1 << (2 * n));
    for from in 0..1usize << n {
        for act in 0..1usize << n {
            let actions = bits(act);
            let to: Vec<u16> = actions.iter().map(|&a| u16::from(a == 0)).collect();
            transitions.push((
                GlobalState::new(bits(from)),
                JointAction::new(actions),
                GlobalState::new(to),
            ));
        }
    }
    let atoms = (0..n)
        .map(|i| {
            let states = (0..1usize << n)
                .map(|m| GlobalState::new(bits(m)))
                .filter(|s| s.local(i) == 1)
                .collect();
            (ap[i].as_ref().to_string(), states)
        })
        .collect();
    let (model, _) = Ecgm::new(agents, GlobalState::new(vec![0; n]), transitions, atoms)
        .expect("the valuation model is well formed");
    Ok(model)
}

/// Variable name bound to the agent of proposition `p`.
pub fn variable_for(p: &str) -> String {
    format!("x_{p}")
}

/// Translates a QPTL formula over `ap` into an ESL formula on the
/// valuation model: `p` becomes `X p` and `∃p` becomes a strategy
/// quantifier of agent `p`; every other operator is kept.
pub fn translate<S: AsRef<str>>(phi: &Qptl, ap: &[S]) -> Result<Formula, QptlError> {
    let agent = |p: &str| {
        ap.iter()
            .position(|q| q.as_ref() == p)
            .ok_or_else(|| QptlError::UnknownProposition(p.to_string()))
    };
    Ok(match phi {
        Qptl::True => Formula::truth(),
        Qptl::Atom(p) => {
            agent(p)?;
            Formula::next(Formula::atom(p.clone()))
        }
        Qptl::Not(a) => Formula::not(translate(a, ap)?),
        Qptl::Implies(a, b) => Formula::implies(translate(a, ap)?, translate(b, ap)?),
        Qptl::Next(a) => Formula::next(translate(a, ap)?),
        Qptl::Until(a, b) => Formula::until(translate(a, ap)?, translate(b, ap)?),
        Qptl::Eventually(a) => Formula::eventually(translate(a, ap)?),
        Qptl::ExistsProp(p, a) => {
            Formula::exists(Var::new(variable_for(p), agent(p)?), translate(a, ap)?)
        }
    })
}

/// Outcome of the satisfiability pipeline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum QptlVerdict {
    /// Satisfiable; the evaluation satisfies the formula under the direct
    /// semantics.
    Sat { evaluation: PeriodicEvaluation },
    /// No `γ`-recall strategy witnesses satisfiability.
    Unsat { recall: usize },
    /// The checker found strategies, but the evaluation they induce does not
    /// satisfy the formula under the direct semantics.
    Unconfirmed {
        recall: usize,
        evaluation: PeriodicEvaluation,
    },
}

impl QptlVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, QptlVerdict::Sat { .. })
    }

    pub fn label(&self) -> String {
        match self {
            QptlVerdict::Sat { .. } => "SAT".into(),
            QptlVerdict::Unsat { recall } => format!("UNSAT at recall {recall}"),
            QptlVerdict::Unconfirmed { recall, .. } => format!("UNCONFIRMED at recall {recall}"),
        }
    }
}

/// Everything the pipeline computed for one formula.
#[derive(Clone, Debug, Serialize)]
pub struct QptlOutcome {
    pub formula: String,
    pub props: Vec<String>,
    pub recall: usize,
    pub translated: String,
    pub alt: usize,
    #[serde(flatten)]
    pub verdict: QptlVerdict,
}

/// Decides satisfiability of `φ` over `ap` by model checking the existential
/// closure of its translation at recall `cfg.recall`.
pub fn qptl_sat<S: AsRef<str>>(phi: &Qptl, ap: &[S], cfg: EvalConfig) -> Result<QptlOutcome, QptlError> {
    let model = build_valuation_model(ap)?;
    let translated = translate(phi, ap)?;
    let ev = Evaluator::new(&model, cfg)?;
    let opts = CheckOptions {
        closure: Closure::Existential,
        witness: true,
    };
    let verdict = check_with(&ev, &translated, opts)?;
    let roster = model.agent_names();
    let verdict = if verdict.result {
        let mut strategies = ev.default_assignment().strategies().to_vec();
        for w in &verdict.witnesses {
            strategies[w.variable.agent] = w.strategy.clone();
        }
        let chi = Assignment::new(strategies).expect("witnesses share the recall bound");
        let chi = positional_completion(&ev, &translated, &chi);
        let run = outcome_run(&model, ev.windows(), model.initial_id(), &chi);
        let evaluation = induced_evaluation(&model, &run);
        let (_, body) = phi.leading_exists();
        if holds(body, &evaluation, REPLAY_BOUNDS) {
            QptlVerdict::Sat { evaluation }
        } else {
            QptlVerdict::Unconfirmed {
                recall: cfg.recall,
                evaluation,
            }
        }
    } else {
        QptlVerdict::Unsat { recall: cfg.recall }
    };
    Ok(QptlOutcome {
        formula: phi.to_string(),
        props: roster.clone(),
        recall: cfg.recall,
        translated: translated.display(&roster).to_string(),
        alt: translated.alternation_depth(),
        verdict,
    })
}

/// Rewrites the witness so that every window longer than one state plays
/// what the singleton window of its last state plays, wherever the closed
/// formula stays true. Entries the formula never consults then follow the
/// positional reading, which is the one the direct semantics replays.
fn positional_completion(ev: &Evaluator<'_>, phi: &Formula, chi: &Assignment) -> Assignment {
    let closed = existential_closure(phi, ev.model().num_agents());
    let (_, body) = leading_exists(&closed);
    let s0 = ev.model().initial_id();
    let windows = ev.windows();
    let mut env = Env::from_assignment(chi);
    for agent in 0..chi.strategies().len() {
        let layout = env.layout(agent).clone();
        for slot in 0..layout.num_slots() {
            let w = layout.representative(slot);
            if windows.window(w).len() == 1 {
                continue;
            }
            let target = env
                .action_at(agent, windows.singleton(windows.window(w).last()))
                .expect("witness tables are total");
            if env.slot(agent, slot) == Some(target) {
                continue;
            }
            let candidate = env.bind(agent, slot, target);
            if ev.run(|| ev.eval(s0, &candidate, body)) == Ok(true) {
                env = candidate;
            }
        }
    }
    let strategies = (0..chi.strategies().len())
        .map(|i| env.strategy(i).expect("witness tables are total"))
        .collect();
    Assignment::new(strategies).expect("completion keeps the recall bound")
}

/// `p(n) = λ(n+1)_p`: the value each strategy writes at step `n`.
pub fn induced_evaluation(model: &Ecgm, run: &crate::strategy::LassoRun) -> PeriodicEvaluation {
    let (prefix, cycle) = if run.prefix.is_empty() {
        let mut c = run.cycle.clone();
        c.rotate_left(1);
        (Vec::new(), c)
    } else {
        (run.prefix[1..].to_vec(), run.cycle.clone())
    };
    let words = (0..model.num_agents())
        .map(|i| {
            let bit = |&s: &usize| model.state(s).local(i) == 1;
            (
                model.agent(i).name.clone(),
                LassoWord::new(prefix.iter().map(bit).collect(), cycle.iter().map(bit).collect())
                    .canonical(),
            )
        })
        .collect::<BTreeMap<_, _>>();
    PeriodicEvaluation { words }
}
