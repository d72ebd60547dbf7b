//! Strongly connected components.

use crate::model::{StateId, TransitionId, Vass};

/// Components in reverse topological order (sinks first), as produced by
/// Tarjan's algorithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sccs {
    pub comp_of: Vec<usize>,
    pub components: Vec<Vec<StateId>>,
}

impl Sccs {
    /// Whether the component has at least one cycle under the same filter.
    pub fn is_cyclic(&self, vass: &Vass, c: usize, keep: impl Fn(TransitionId) -> bool) -> bool {
        self.components[c].len() > 1
            || vass.transitions().iter().enumerate().any(|(id, t)| {
                keep(id) && t.src == t.dst && self.comp_of[t.src] == c
            })
    }
}

/// Iterative Tarjan over the transitions accepted by `keep`.
pub fn tarjan(vass: &Vass, keep: impl Fn(TransitionId) -> bool) -> Sccs {
    let n = vass.num_states();
    let mut succ: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for (id, t) in vass.transitions().iter().enumerate() {
        if keep(id) {
            succ[t.src].push(t.dst);
        }
    }
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp_of = vec![UNSEEN; n];
    let mut components = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(StateId, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next < succ[v].len() {
                let w = succ[v][*next];
                *next += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp_of[w] = components.len();
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }
    Sccs {
        comp_of,
        components,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IntVec;

    #[test]
    fn chain_of_cycles() {
        let mut v = Vass::new(1).unwrap();
        for name in ["a", "b", "c"] {
            v.add_state(name);
        }
        v.add_transition(0, 1, IntVec::from([0])).unwrap();
        v.add_transition(1, 0, IntVec::from([0])).unwrap();
        v.add_transition(1, 2, IntVec::from([0])).unwrap();
        let s = tarjan(&v, |_| true);
        assert_eq!(s.components.len(), 2);
        assert_eq!(s.comp_of[0], s.comp_of[1]);
        // sinks first
        assert_eq!(s.components[0], vec![2]);
        assert!(!s.is_cyclic(&v, 0, |_| true));
        assert!(s.is_cyclic(&v, 1, |_| true));
        let cut = tarjan(&v, |t| t != 1);
        assert_eq!(cut.components.len(), 3);
    }
}
