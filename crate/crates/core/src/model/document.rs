//! The JSON model file format.
//!
//! Arrays are positional in agent declaration order. Protocol and atom maps
//! are written with keys in declaration (resp. lexicographic) order so that
//! serializing a validated model is deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    AgentSpec, Ecgm, GlobalState, JointAction, ModelError, ValidationErrors, ValidationWarning,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentDocument {
    pub name: String,
    pub locals: Vec<String>,
    pub actions: Vec<String>,
    pub protocol: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDocument {
    pub from: Vec<String>,
    pub action: Vec<String>,
    pub to: Vec<String>,
}

/// A raw, unvalidated model document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub agents: Vec<AgentDocument>,
    pub initial: Vec<String>,
    pub transitions: Vec<TransitionDocument>,
    #[serde(default)]
    pub atoms: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed model document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(#[from] ValidationErrors),
}

impl ModelDocument {
    pub fn from_json(text: &str) -> Result<ModelDocument, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model documents always serialize")
    }

    /// Validates the document, reporting every violation found.
    pub fn validate(&self) -> Result<(Ecgm, Vec<ValidationWarning>), ValidationErrors> {
        let mut errors = Vec::new();
        let mut agents = Vec::with_capacity(self.agents.len());
        let mut names = BTreeSet::new();
        for doc in &self.agents {
            if !names.insert(doc.name.as_str()) {
                errors.push(ModelError::DuplicateIdentifier {
                    kind: "agent",
                    name: doc.name.clone(),
                    context: "model".into(),
                });
            }
            agents.push(resolve_agent(doc, &mut errors));
        }
        if self.agents.is_empty() {
            errors.push(ModelError::NoAgents);
        }
        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }

        let resolver = Resolver { agents: &agents };
        let initial = resolver.state(&self.initial, "initial state", &mut errors);
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (n, t) in self.transitions.iter().enumerate() {
            let ctx = format!("transition #{n}");
            let from = resolver.state(&t.from, &format!("{ctx} source"), &mut errors);
            let action = resolver.joint(&t.action, &format!("{ctx} action"), &mut errors);
            let to = resolver.state(&t.to, &format!("{ctx} target"), &mut errors);
            if let (Some(from), Some(action), Some(to)) = (from, action, to) {
                transitions.push((from, action, to));
            }
        }
        let mut atoms = BTreeMap::new();
        for (name, states) in &self.atoms {
            let set: BTreeSet<GlobalState> = states
                .iter()
                .filter_map(|s| resolver.state(s, &format!("atom `{name}`"), &mut errors))
                .collect();
            atoms.insert(name.clone(), set);
        }
        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }
        Ecgm::new(
            agents,
            initial.expect("initial resolved when no errors"),
            transitions,
            atoms,
        )
    }
}

/// Reads and validates a model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<(Ecgm, Vec<ValidationWarning>), LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let doc = ModelDocument::from_json(&text)?;
    Ok(doc.validate()?)
}

impl Ecgm {
    /// The canonical document for this model.
    pub fn to_document(&self) -> ModelDocument {
        let names = |s: &GlobalState| -> Vec<String> {
            s.locals()
                .iter()
                .zip(self.agents())
                .map(|(&l, a)| a.local_name(l).to_string())
                .collect()
        };
        ModelDocument {
            agents: self
                .agents()
                .iter()
                .map(|a| AgentDocument {
                    name: a.name.clone(),
                    locals: a.locals.clone(),
                    actions: a.actions.clone(),
                    protocol: a
                        .locals
                        .iter()
                        .zip(&a.protocol)
                        .map(|(l, acts)| {
                            (
                                l.clone(),
                                acts.iter().map(|&x| a.action_name(x).to_string()).collect(),
                            )
                        })
                        .collect(),
                })
                .collect(),
            initial: names(self.initial()),
            transitions: self
                .transitions()
                .iter()
                .map(|((from, act), to)| TransitionDocument {
                    from: names(from),
                    action: act
                        .actions()
                        .iter()
                        .zip(self.agents())
                        .map(|(&x, a)| a.action_name(x).to_string())
                        .collect(),
                    to: names(to),
                })
                .collect(),
            atoms: self
                .atoms()
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(names).collect()))
                .collect(),
        }
    }
}

fn resolve_agent(doc: &AgentDocument, errors: &mut Vec<ModelError>) -> AgentSpec {
    let context = format!("protocol of agent `{}`", doc.name);
    let mut protocol = vec![Vec::new(); doc.locals.len()];
    for (local, acts) in &doc.protocol {
        let Some(l) = doc.locals.iter().position(|x| x == local) else {
            errors.push(ModelError::UnknownIdentifier {
                kind: "local state",
                name: local.clone(),
                context: context.clone(),
            });
            continue;
        };
        if acts.is_empty() {
            errors.push(ModelError::EmptyProtocolEntry {
                agent: doc.name.clone(),
                local: local.clone(),
            });
            continue;
        }
        let mut ids = Vec::with_capacity(acts.len());
        for a in acts {
            match doc.actions.iter().position(|x| x == a) {
                Some(id) => ids.push(id as u16),
                None => errors.push(ModelError::UnknownIdentifier {
                    kind: "action",
                    name: a.clone(),
                    context: context.clone(),
                }),
            }
        }
        ids.sort_unstable();
        ids.dedup();
        protocol[l] = ids;
    }
    for local in &doc.locals {
        if !doc.protocol.contains_key(local) {
            errors.push(ModelError::EmptyProtocolEntry {
                agent: doc.name.clone(),
                local: local.clone(),
            });
        }
    }
    AgentSpec {
        name: doc.name.clone(),
        locals: doc.locals.clone(),
        actions: doc.actions.clone(),
        protocol,
    }
}

struct Resolver<'a> {
    agents: &'a [AgentSpec],
}

impl Resolver<'_> {
    fn state(&self, names: &[String], ctx: &str, errors: &mut Vec<ModelError>) -> Option<GlobalState> {
        self.resolve(names, ctx, "local state", errors, |a, n| a.local_id(n))
            .map(GlobalState::new)
    }

    fn joint(&self, names: &[String], ctx: &str, errors: &mut Vec<ModelError>) -> Option<JointAction> {
        self.resolve(names, ctx, "action", errors, |a, n| a.action_id(n))
            .map(JointAction::new)
    }

    fn resolve(
        &self,
        names: &[String],
        ctx: &str,
        kind: &'static str,
        errors: &mut Vec<ModelError>,
        lookup: impl Fn(&AgentSpec, &str) -> Option<u16>,
    ) -> Option<Vec<u16>> {
        if names.len() != self.agents.len() {
            errors.push(ModelError::ArityMismatch {
                context: ctx.to_string(),
                expected: self.agents.len(),
                found: names.len(),
            });
            return None;
        }
        let mut out = Vec::with_capacity(names.len());
        let mut ok = true;
        for (n, a) in names.iter().zip(self.agents) {
            match lookup(a, n) {
                Some(id) => out.push(id),
                None => {
                    ok = false;
                    errors.push(ModelError::UnknownIdentifier {
                        kind,
                        name: n.clone(),
                        context: format!("{ctx} (agent `{}`)", a.name),
                    });
                }
            }
        }
        ok.then_some(out)
    }
}
