//! Partial strategy environments.

use std::sync::Arc;

use crate::model::{ActionId, AgentId, AgentSet};
use crate::strategy::{Assignment, SlotId, Strategy, StrategyLayout, StrategyMode, WindowId};

use super::Need;

const UNSET: u16 = u16::MAX;

#[derive(Clone, Debug)]
struct Binding {
    layout: Arc<StrategyLayout>,
    slots: Arc<[Option<ActionId>]>,
}

/// One possibly partial strategy table per agent.
#[derive(Clone, Debug)]
pub struct Env {
    bindings: Arc<[Binding]>,
}

impl Env {
    pub fn from_assignment(chi: &Assignment) -> Env {
        Env {
            bindings: chi
                .strategies()
                .iter()
                .map(|s| Binding {
                    layout: s.layout().clone(),
                    slots: s.choices().iter().map(|&a| Some(a)).collect(),
                })
                .collect(),
        }
    }

    /// Replaces the table of `agent`.
    pub fn rebind(
        &self,
        agent: AgentId,
        layout: Arc<StrategyLayout>,
        slots: Arc<[Option<ActionId>]>,
    ) -> Env {
        let mut bindings = self.bindings.to_vec();
        bindings[agent] = Binding { layout, slots };
        Env {
            bindings: bindings.into(),
        }
    }

    /// Fixes one slot of `agent`'s table.
    pub fn bind(&self, agent: AgentId, slot: SlotId, action: ActionId) -> Env {
        let b = &self.bindings[agent];
        let mut slots = b.slots.to_vec();
        slots[slot] = Some(action);
        self.rebind(agent, b.layout.clone(), slots.into())
    }

    pub fn slot(&self, agent: AgentId, slot: SlotId) -> Option<ActionId> {
        self.bindings[agent].slots[slot]
    }

    pub fn layout(&self, agent: AgentId) -> &Arc<StrategyLayout> {
        &self.bindings[agent].layout
    }

    /// Whether every slot of `agent` is decided.
    pub fn is_total(&self, agent: AgentId) -> bool {
        self.bindings[agent].slots.iter().all(Option::is_some)
    }

    /// The strategy of `agent`, if its table is total.
    pub fn strategy(&self, agent: AgentId) -> Option<Strategy> {
        let b = &self.bindings[agent];
        let choices = b.slots.iter().copied().collect::<Option<Vec<_>>>()?;
        Some(Strategy::from_choices(b.layout.clone(), choices).expect("bound actions are enabled"))
    }

    /// The action of `agent` at window `w`.
    pub fn action_at(&self, agent: AgentId, w: WindowId) -> Result<ActionId, Need> {
        let b = &self.bindings[agent];
        let slot = b.layout.slot_of(w);
        b.slots[slot].ok_or(Need { agent, slot })
    }

    /// Fills the joint action at window `w`, agents in order.
    pub fn joint_at(&self, w: WindowId, joint: &mut [ActionId]) -> Result<(), Need> {
        for (agent, a) in joint.iter_mut().enumerate() {
            *a = self.action_at(agent, w)?;
        }
        Ok(())
    }

    /// Canonical encoding of the tables of the agents in `agents`.
    pub fn fingerprint(&self, agents: AgentSet) -> Box<[u16]> {
        let mut out = Vec::new();
        for i in agents.iter() {
            let b = &self.bindings[i];
            out.push(match b.layout.mode() {
                StrategyMode::Perfect => 0,
                StrategyMode::Uniform => 1,
            });
            out.extend(b.slots.iter().map(|a| a.unwrap_or(UNSET)));
        }
        out.into()
    }
}
