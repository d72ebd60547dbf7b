use serde::{Deserialize, Serialize};

use super::{IntVec, ModelError};
use crate::scc;

pub type StateId = usize;
pub type TransitionId = usize;

/// A control state. `origin` points back at the state of the input system
/// this one was derived from (itself for input systems).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct State {
    pub name: String,
    pub origin: StateId,
}

/// A labeled edge `src --delta--> dst`. `label` is the id of the input
/// transition it was derived from; for input systems `label` is the id itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub src: StateId,
    pub dst: StateId,
    pub delta: IntVec,
    pub label: TransitionId,
}

/// A D-dimensional vector addition system with states: a finite labeled
/// digraph, multi-edges and self-loops allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vass {
    dim: usize,
    states: Vec<State>,
    transitions: Vec<Transition>,
}

impl Vass {
    pub fn new(dim: usize) -> Result<Self, ModelError> {
        if dim == 0 {
            return Err(ModelError::ZeroDimension);
        }
        Ok(Vass {
            dim,
            states: Vec::new(),
            transitions: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> StateId {
        let id = self.states.len();
        self.states.push(State {
            name: name.into(),
            origin: id,
        });
        id
    }

    pub fn add_derived_state(&mut self, name: impl Into<String>, origin: StateId) -> StateId {
        self.states.push(State {
            name: name.into(),
            origin,
        });
        self.states.len() - 1
    }

    pub fn add_transition(
        &mut self,
        src: StateId,
        dst: StateId,
        delta: IntVec,
    ) -> Result<TransitionId, ModelError> {
        let label = self.transitions.len();
        self.add_labeled_transition(src, dst, delta, label)
    }

    pub fn add_labeled_transition(
        &mut self,
        src: StateId,
        dst: StateId,
        delta: IntVec,
        label: TransitionId,
    ) -> Result<TransitionId, ModelError> {
        for s in [src, dst] {
            if s >= self.states.len() {
                return Err(ModelError::UnknownState(s));
            }
        }
        if delta.dim() != self.dim {
            return Err(ModelError::DimensionMismatch {
                expected: self.dim,
                found: delta.dim(),
            });
        }
        self.transitions.push(Transition {
            src,
            dst,
            delta,
            label,
        });
        Ok(self.transitions.len() - 1)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, id: StateId) -> &State {
        &self.states[id]
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, id: TransitionId) -> &Transition {
        &self.transitions[id]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name)
    }

    pub fn out_edges(&self, s: StateId) -> impl Iterator<Item = (TransitionId, &Transition)> {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.src == s)
    }

    /// Out-edge lists indexed by state, each sorted by transition id.
    pub fn adjacency(&self) -> Vec<Vec<TransitionId>> {
        let mut adj = vec![Vec::new(); self.states.len()];
        for (id, t) in self.transitions.iter().enumerate() {
            adj[t.src].push(id);
        }
        adj
    }

    /// `‖T‖`: the largest absolute entry over all displacements.
    pub fn norm(&self) -> i64 {
        self.transitions
            .iter()
            .map(|t| t.delta.norm_inf())
            .max()
            .unwrap_or(0)
    }

    /// Graph size: states plus transitions.
    pub fn size(&self) -> usize {
        self.states.len() + self.transitions.len()
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.states.is_empty() {
            return false;
        }
        scc::tarjan(self, |_| true).components.len() == 1
    }

    /// Subgraph induced by `keep_states` using only transitions accepted by
    /// `keep_edge`. Returns the subgraph and the map from old to new state ids.
    pub fn restrict(
        &self,
        keep_states: &[StateId],
        keep_edge: impl Fn(TransitionId) -> bool,
    ) -> (Vass, Vec<Option<StateId>>) {
        let mut map = vec![None; self.states.len()];
        let mut sub = Vass {
            dim: self.dim,
            states: Vec::new(),
            transitions: Vec::new(),
        };
        let mut sorted = keep_states.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for s in sorted {
            map[s] = Some(sub.states.len());
            sub.states.push(self.states[s].clone());
        }
        for (id, t) in self.transitions.iter().enumerate() {
            if !keep_edge(id) {
                continue;
            }
            if let (Some(a), Some(b)) = (map[t.src], map[t.dst]) {
                sub.transitions.push(Transition {
                    src: a,
                    dst: b,
                    delta: t.delta.clone(),
                    label: t.label,
                });
            }
        }
        (sub, map)
    }

    /// Copy of this system with every displacement negated and every edge
    /// reversed.
    pub fn reversed(&self) -> Vass {
        Vass {
            dim: self.dim,
            states: self.states.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| Transition {
                    src: t.dst,
                    dst: t.src,
                    delta: -&t.delta,
                    label: t.label,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_transitions() {
        let mut v = Vass::new(2).unwrap();
        let p = v.add_state("p");
        assert!(matches!(
            v.add_transition(p, 3, IntVec::from([0, 0])),
            Err(ModelError::UnknownState(3))
        ));
        assert!(matches!(
            v.add_transition(p, p, IntVec::from([0])),
            Err(ModelError::DimensionMismatch { .. })
        ));
        assert!(Vass::new(0).is_err());
    }

    #[test]
    fn strong_connectivity() {
        let mut v = Vass::new(1).unwrap();
        let p = v.add_state("p");
        let q = v.add_state("q");
        v.add_transition(p, q, IntVec::from([1])).unwrap();
        assert!(!v.is_strongly_connected());
        v.add_transition(q, p, IntVec::from([-1])).unwrap();
        assert!(v.is_strongly_connected());
        assert_eq!(v.norm(), 1);
    }
}
