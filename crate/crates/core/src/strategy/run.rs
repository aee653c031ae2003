//! Outcome runs as lassos.

use std::collections::HashMap;

use crate::model::{ActionId, Ecgm, StateId};

use super::{Assignment, WindowId, WindowSpace};

/// An ultimately periodic run: `prefix` followed by `cycle` repeated forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoRun {
    pub origin: StateId,
    pub prefix: Vec<StateId>,
    pub cycle: Vec<StateId>,
}

impl LassoRun {
    /// Number of distinct positions before the run repeats.
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `λ(k)`.
    pub fn state_at(&self, k: usize) -> StateId {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.cycle[(k - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The first `n` positions of the run.
    pub fn expand(&self, n: usize) -> Vec<StateId> {
        (0..n).map(|k| self.state_at(k)).collect()
    }

    /// The distinct positions `prefix ++ cycle`.
    pub fn positions(&self) -> impl Iterator<Item = StateId> + '_ {
        self.prefix.iter().chain(self.cycle.iter()).copied()
    }
}

/// Follows the run from `start`, asking `choose` for the joint action at
/// each window. The run closes at the first window that repeats, which
/// bounds its length by the number of feasible windows.
///
/// `choose` fills one action per agent and may abort the trace.
pub fn trace_run<E>(
    model: &Ecgm,
    windows: &WindowSpace,
    start: StateId,
    mut choose: impl FnMut(WindowId, &mut [ActionId]) -> Result<(), E>,
) -> Result<LassoRun, E> {
    let mut seen: HashMap<WindowId, usize> = HashMap::new();
    let mut states = vec![start];
    let mut window = windows.singleton(start);
    let mut joint: Vec<ActionId> = vec![0; model.num_agents()];
    loop {
        let k = states.len() - 1;
        if let Some(&j) = seen.get(&window) {
            states.pop();
            let cycle = states.split_off(j);
            return Ok(LassoRun {
                origin: start,
                prefix: states,
                cycle,
            });
        }
        seen.insert(window, k);
        choose(window, &mut joint)?;
        let here = states[k];
        let next = model
            .successor_by(here, &joint)
            .expect("strategies only choose enabled actions");
        window = windows
            .advance(window, next)
            .expect("successor windows are feasible");
        states.push(next);
    }
}

/// The unique run `out(s, F^χ)`.
pub fn outcome_run(
    model: &Ecgm,
    windows: &WindowSpace,
    start: StateId,
    assignment: &Assignment,
) -> LassoRun {
    let trace = trace_run::<std::convert::Infallible>(model, windows, start, |w, joint| {
        for (slot, s) in joint.iter_mut().zip(assignment.strategies()) {
            *slot = s.action_at(w);
        }
        Ok(())
    });
    match trace {
        Ok(run) => run,
        Err(never) => match never {},
    }
}
