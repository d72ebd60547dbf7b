//! Cycle-displacement space, geometric dimension and orthogonal indices.

use serde::{Deserialize, Serialize};

use crate::diophantine::{kernel_basis, row_space_basis, IntMatrix};
use crate::model::{IntVec, StateId, TransitionId, Vass};
use crate::scc;

/// Integer basis of the rational span of all cycle displacements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleSpace {
    pub basis: Vec<IntVec>,
    pub dimension: usize,
}

impl CycleSpace {
    pub fn contains(&self, v: &IntVec) -> bool {
        let mut rows: Vec<Vec<i64>> = self.basis.iter().map(|b| b.to_vec()).collect();
        rows.push(v.to_vec());
        row_space_basis(&rows, v.dim()).len() == self.dimension
    }
}

/// One sign per coordinate; zero counts as positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrthantSign(pub Vec<bool>);

impl OrthantSign {
    pub fn of(v: &IntVec) -> Self {
        OrthantSign(v.iter().map(|&x| x >= 0).collect())
    }

    pub fn contains(&self, v: &IntVec) -> bool {
        self.0
            .iter()
            .zip(v.iter())
            .all(|(&pos, &x)| if pos { x >= 0 } else { x <= 0 })
    }
}

/// Transitions whose endpoints lie in the same strongly connected component.
pub fn internal_transitions(vass: &Vass) -> Vec<TransitionId> {
    let s = scc::tarjan(vass, |_| true);
    (0..vass.num_transitions())
        .filter(|&t| {
            let tr = vass.transition(t);
            s.comp_of[tr.src] == s.comp_of[tr.dst]
        })
        .collect()
}

/// The span of cycle displacements, computed as the image of the
/// circulation space of the component-internal transitions under the
/// displacement map. In a strongly connected graph the directed cycles span
/// the whole circulation space, so no cycle enumeration is needed.
pub fn cycle_space(vass: &Vass) -> CycleSpace {
    let dim = vass.dim();
    let internal = internal_transitions(vass);
    if internal.is_empty() {
        return CycleSpace {
            basis: Vec::new(),
            dimension: 0,
        };
    }
    let mut inc = IntMatrix::zeros(vass.num_states(), internal.len());
    for (c, &t) in internal.iter().enumerate() {
        let tr = vass.transition(t);
        inc.set(tr.src, c, inc.get(tr.src, c) + 1);
        inc.set(tr.dst, c, inc.get(tr.dst, c) - 1);
    }
    let images: Vec<Vec<i64>> = kernel_basis(&inc)
        .into_iter()
        .map(|flow| {
            let mut d = IntVec::zeros(dim);
            for (c, &t) in internal.iter().enumerate() {
                d.add_scaled(&vass.transition(t).delta, flow[c]);
            }
            d.into_inner()
        })
        .collect();
    let basis: Vec<IntVec> = row_space_basis(&images, dim)
        .into_iter()
        .map(IntVec::from)
        .collect();
    CycleSpace {
        dimension: basis.len(),
        basis,
    }
}

pub fn geometric_dimension(vass: &Vass) -> usize {
    cycle_space(vass).dimension
}

/// Coordinates on which every cycle has zero displacement.
pub fn orthogonal_indices(vass: &Vass) -> Vec<usize> {
    let space = cycle_space(vass);
    (0..vass.dim())
        .filter(|&i| space.basis.iter().all(|b| b[i] == 0))
        .collect()
}

/// For an orthogonal index `i` of a strongly connected graph: the value of
/// coordinate `i` at each state relative to `root`. Every path from `root`
/// to `q` changes coordinate `i` by the same amount. Returns `None` if some
/// state is unreachable or `i` is not orthogonal.
pub fn orthogonal_offsets(vass: &Vass, root: StateId, i: usize) -> Option<Vec<i64>> {
    let n = vass.num_states();
    let mut off: Vec<Option<i64>> = vec![None; n];
    off[root] = Some(0);
    let mut queue = std::collections::VecDeque::from([root]);
    let adj = vass.adjacency();
    while let Some(s) = queue.pop_front() {
        let base = off[s].unwrap();
        for &t in &adj[s] {
            let tr = vass.transition(t);
            let v = base + tr.delta[i];
            match off[tr.dst] {
                None => {
                    off[tr.dst] = Some(v);
                    queue.push_back(tr.dst);
                }
                Some(w) if w != v => return None,
                Some(_) => {}
            }
        }
    }
    // every edge must be consistent, including those into already visited states
    for tr in vass.transitions() {
        if let (Some(a), Some(b)) = (off[tr.src], off[tr.dst]) {
            if a + tr.delta[i] != b {
                return None;
            }
        }
    }
    off.into_iter().collect()
}

/// All simple cycles, each as a transition sequence starting at its least
/// state. Multi-edges give distinct cycles. Exponential; meant for small
/// graphs and as a reference for [`cycle_space`].
pub fn simple_cycles(vass: &Vass) -> Vec<Vec<TransitionId>> {
    let adj = vass.adjacency();
    let n = vass.num_states();
    let mut out = Vec::new();
    let mut on_path = vec![false; n];
    let mut path = Vec::new();

    fn dfs(
        vass: &Vass,
        adj: &[Vec<TransitionId>],
        start: StateId,
        cur: StateId,
        on_path: &mut [bool],
        path: &mut Vec<TransitionId>,
        out: &mut Vec<Vec<TransitionId>>,
    ) {
        for &t in &adj[cur] {
            let d = vass.transition(t).dst;
            if d == start {
                path.push(t);
                out.push(path.clone());
                path.pop();
            } else if d > start && !on_path[d] {
                on_path[d] = true;
                path.push(t);
                dfs(vass, adj, start, d, on_path, path, out);
                path.pop();
                on_path[d] = false;
            }
        }
    }

    for s in 0..n {
        on_path[s] = true;
        dfs(vass, &adj, s, s, &mut on_path, &mut path, &mut out);
        on_path[s] = false;
    }
    out
}
