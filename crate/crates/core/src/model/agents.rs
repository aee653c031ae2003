use super::AgentId;

/// A set of agents as a 64-bit mask over declaration indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentSet(u64);

impl AgentSet {
    pub const EMPTY: AgentSet = AgentSet(0);
    /// Every possible agent; intersect with [`AgentSet::all`] to get `Ag`.
    pub const UNIVERSE: AgentSet = AgentSet(u64::MAX);

    pub fn all(n: usize) -> AgentSet {
        if n >= 64 {
            AgentSet(u64::MAX)
        } else {
            AgentSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(agent: AgentId) -> AgentSet {
        AgentSet(1u64 << agent)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, agent: AgentId) -> bool {
        agent < 64 && self.0 & (1u64 << agent) != 0
    }

    pub fn insert(&mut self, agent: AgentId) {
        self.0 |= 1u64 << agent;
    }

    pub fn remove(&mut self, agent: AgentId) {
        self.0 &= !(1u64 << agent);
    }

    pub fn without(self, agent: AgentId) -> AgentSet {
        AgentSet(self.0 & !(1u64 << agent))
    }

    pub fn union(self, other: AgentSet) -> AgentSet {
        AgentSet(self.0 | other.0)
    }

    pub fn intersect(self, other: AgentSet) -> AgentSet {
        AgentSet(self.0 & other.0)
    }

    pub fn minus(self, other: AgentSet) -> AgentSet {
        AgentSet(self.0 & !other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in ascending (declaration) order.
    pub fn iter(self) -> impl Iterator<Item = AgentId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl FromIterator<AgentId> for AgentSet {
    fn from_iter<T: IntoIterator<Item = AgentId>>(iter: T) -> Self {
        let mut set = AgentSet::EMPTY;
        for a in iter {
            set.insert(a);
        }
        set
    }
}
