//! The model-checking problem, witness extraction and reports.

use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::eval::{EvalConfig, EvalError, EvalStats, Evaluator};
use crate::formula::{Formula, FormulaKind, Var};
use crate::model::{AgentId, AgentSet, Ecgm};
use crate::strategy::{Strategy, StrategyMode};

/// How free agents of a formula are closed before checking at `s0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Closure {
    /// Some assignment satisfies the formula.
    #[default]
    Existential,
    /// Every assignment satisfies the formula.
    Universal,
    /// The formula is a sentence; no closure was needed.
    None,
}

impl fmt::Display for Closure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Closure::Existential => "existential",
            Closure::Universal => "universal",
            Closure::None => "none",
        })
    }
}

impl std::str::FromStr for Closure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "existential" => Ok(Closure::Existential),
            "universal" => Ok(Closure::Universal),
            other => Err(format!("unknown closure `{other}`")),
        }
    }
}

fn closure_vars(phi: &Formula, num_agents: usize) -> Vec<Var> {
    let free: Vec<AgentId> = phi.free_agents(num_agents).iter().collect();
    match free.as_slice() {
        [only] => vec![Var::new("y", *only)],
        _ => free
            .iter()
            .enumerate()
            .map(|(k, &i)| Var::new(format!("y{}", k + 1), i))
            .collect(),
    }
}

/// `∃y1 ... ∃ym φ` over the free agents of `φ` in declaration order.
pub fn existential_closure(phi: &Formula, num_agents: usize) -> Formula {
    closure_vars(phi, num_agents)
        .into_iter()
        .rev()
        .fold(phi.clone(), |body, v| Formula::exists(v, body))
}

/// `∀y1 ... ∀ym φ` over the free agents of `φ` in declaration order.
pub fn universal_closure(phi: &Formula, num_agents: usize) -> Formula {
    closure_vars(phi, num_agents)
        .into_iter()
        .rev()
        .fold(phi.clone(), |body, v| Formula::forall(v, body))
}

/// The leading `∃` block of a formula and the body below it.
pub fn leading_exists(phi: &Formula) -> (Vec<Var>, &Formula) {
    let mut vars = Vec::new();
    let mut f = phi;
    while let FormulaKind::Exists(v, body) = f.kind() {
        vars.push(v.clone());
        f = body;
    }
    (vars, f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    pub closure: Closure,
    pub witness: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            closure: Closure::Existential,
            witness: true,
        }
    }
}

/// A witness strategy for one variable of the leading existential block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub variable: Var,
    pub strategy: Strategy,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub result: bool,
    pub closure: Closure,
    /// Lexicographically least witnesses, outermost variable first.
    pub witnesses: Vec<Witness>,
    pub stats: EvalStats,
    pub wall_time: Duration,
}

/// Decides the model-checking problem for `φ` at the initial state.
pub fn model_check(
    model: &Ecgm,
    phi: &Formula,
    cfg: EvalConfig,
    opts: CheckOptions,
) -> Result<Verdict, EvalError> {
    let ev = Evaluator::new(model, cfg)?;
    check_with(&ev, phi, opts)
}

/// [`model_check`] with a caller-provided evaluator.
pub fn check_with(ev: &Evaluator<'_>, phi: &Formula, opts: CheckOptions) -> Result<Verdict, EvalError> {
    let start = Instant::now();
    let model = ev.model();
    let n = model.num_agents();
    let s0 = model.initial_id();
    let closure = if phi.is_sentence(n) {
        Closure::None
    } else {
        opts.closure
    };
    let (result, witnesses) = match closure {
        Closure::Universal => (ev.satisfied_at_state(s0, phi)?, Vec::new()),
        Closure::Existential | Closure::None => {
            let closed = existential_closure(phi, n);
            let chi0 = ev.default_assignment();
            let result = ev.satisfies(s0, &chi0, &closed)?;
            let witnesses = if result && opts.witness {
                extract_witnesses(ev, &closed)
            } else {
                Vec::new()
            };
            (result, witnesses)
        }
    };
    Ok(Verdict {
        result,
        closure,
        witnesses,
        stats: ev.stats(),
        wall_time: start.elapsed(),
    })
}

/// Greedy lexicographic minimisation of the leading `∃` block of a true
/// sentence. Each slot takes the least option that still admits a
/// satisfying completion. Variables shadowed by a later binding of the same
/// agent get the least strategy.
fn extract_witnesses(ev: &Evaluator<'_>, closed: &Formula) -> Vec<Witness> {
    let (vars, body) = leading_exists(closed);
    let s0 = ev.model().initial_id();
    let open: AgentSet = vars.iter().map(|v| v.agent).collect();
    let chi0 = ev.default_assignment();
    let mut env = ev
        .open_env(&chi0, open)
        .expect("default assignment has the configured recall");
    let effective = |k: usize| vars[k + 1..].iter().all(|w| w.agent != vars[k].agent);
    for (k, v) in vars.iter().enumerate() {
        if !effective(k) {
            continue;
        }
        let layout = ev.layout(v.agent).clone();
        for slot in 0..layout.num_slots() {
            if env.slot(v.agent, slot).is_some() {
                continue;
            }
            let chosen = layout
                .options(slot)
                .iter()
                .map(|&a| env.bind(v.agent, slot, a))
                .find(|e| ev.run(|| ev.quantify(s0, e, open, true, body)) == Ok(true))
                .expect("a satisfying completion exists");
            env = chosen;
        }
    }
    vars.iter()
        .enumerate()
        .map(|(k, v)| Witness {
            variable: v.clone(),
            strategy: if effective(k) {
                env.strategy(v.agent).expect("every slot was decided")
            } else {
                chi0.get(v.agent).clone()
            },
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelSummary {
    pub agents: usize,
    pub states: usize,
    pub edges: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileReport {
    pub free: Vec<String>,
    pub bound: Vec<String>,
    pub alt: usize,
    pub sentence: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigEcho {
    pub recall: usize,
    pub mode: StrategyMode,
    pub closure: Closure,
    pub cap: u128,
    pub cache: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub variable: String,
    pub agent: String,
    pub table: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictReport {
    pub result: bool,
    pub closure: Closure,
    pub witnesses: Vec<WitnessReport>,
}

/// Everything a check prints. Contains no timing or scheduling data, so
/// identical inputs render identically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub model: ModelSummary,
    pub formula: String,
    pub checked: String,
    pub profile: ProfileReport,
    pub config: ConfigEcho,
    pub verdict: VerdictReport,
}

impl Report {
    pub fn new(
        ev: &Evaluator<'_>,
        phi: &Formula,
        opts: CheckOptions,
        verdict: &Verdict,
    ) -> Report {
        let model = ev.model();
        let n = model.num_agents();
        let roster = model.agent_names();
        let names = |set: AgentSet| set.iter().map(|i| roster[i].clone()).collect();
        let profile = phi.profile(n);
        let checked = match verdict.closure {
            Closure::Existential => existential_closure(phi, n),
            Closure::Universal => universal_closure(phi, n),
            Closure::None => phi.clone(),
        };
        let cfg = ev.config();
        Report {
            model: ModelSummary {
                agents: n,
                states: model.num_states(),
                edges: model.edge_count(),
            },
            formula: phi.display(&roster).to_string(),
            checked: checked.display(&roster).to_string(),
            profile: ProfileReport {
                free: names(profile.free),
                bound: names(profile.bound),
                alt: profile.alt,
                sentence: profile.is_sentence,
            },
            config: ConfigEcho {
                recall: cfg.recall,
                mode: cfg.mode,
                closure: opts.closure,
                cap: cfg.cap,
                cache: cfg.cache,
            },
            verdict: VerdictReport {
                result: verdict.result,
                closure: verdict.closure,
                witnesses: verdict
                    .witnesses
                    .iter()
                    .map(|w| WitnessReport {
                        variable: w.variable.name.clone(),
                        agent: roster[w.variable.agent].clone(),
                        table: w.strategy.format_table(model, ev.windows()),
                    })
                    .collect(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Human-readable rendering; witness tables only when `witness` is set.
    pub fn to_text(&self, witness: bool) -> String {
        let mut out = String::new();
        let m = &self.model;
        out.push_str(&format!(
            "model: {} agents, {} reachable states, {} edges\n",
            m.agents, m.states, m.edges
        ));
        out.push_str(&format!("formula: {}\n", self.formula));
        if self.checked != self.formula {
            out.push_str(&format!("checked: {}\n", self.checked));
        }
        let p = &self.profile;
        out.push_str(&format!(
            "free: {{{}}}  bound: {{{}}}  alt: {}  sentence: {}\n",
            p.free.join(", "),
            p.bound.join(", "),
            p.alt,
            p.sentence
        ));
        let c = &self.config;
        out.push_str(&format!(
            "recall: {}  mode: {}  closure: {}\n",
            c.recall, c.mode, self.verdict.closure
        ));
        if self.verdict.closure == Closure::None {
            out.push_str("note: the formula is a sentence, so both closures coincide\n");
        }
        out.push_str(&format!("result: {}\n", self.verdict.result));
        if witness {
            for w in &self.verdict.witnesses {
                out.push_str(&format!("witness {}:{}\n", w.variable, w.agent));
                for line in &w.table {
                    out.push_str(&format!("  {line}\n"));
                }
            }
        }
        out
    }
}
