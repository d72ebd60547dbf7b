//! Pumpability: does a circular walk at the entry raise every tracked
//! coordinate, where only tracked coordinates must stay nonnegative?
//!
//! Decided exactly with a Karp–Miller tree on the graph projected to the
//! tracked coordinates; the cycle itself is then found by a breadth-first
//! search with a growing value cap.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::model::{Cg, IntVec, Path, StateId, Vass};

const OMEGA: i64 = i64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// A cycle at the entry with displacement at least +1 on the indices.
    Forward,
    /// A cycle at the exit with displacement at most -1 on the indices.
    Backward,
}

/// A cycle of the component graph, given as transition ids of that graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PumpCertificate {
    pub direction: Direction,
    pub cycle: Path,
    pub indices: Vec<usize>,
    pub displacement: IntVec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PumpOutcome {
    Pumpable(PumpCertificate),
    /// Every walk from the base that keeps the indices nonnegative keeps
    /// coordinate `index` within `[0, bound]`. `bound` is `None` when no
    /// single index is bounded, in which case only a non-constructive bound
    /// is known.
    NotPumpable { index: usize, bound: Option<i64> },
    Budget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PumpBudget {
    pub max_nodes: usize,
}

impl Default for PumpBudget {
    fn default() -> Self {
        PumpBudget { max_nodes: 200_000 }
    }
}

/// Karp–Miller tree on `graph` restricted to `indices`, from `(root, base)`.
pub struct CoverabilityTree {
    pub nodes: Vec<(StateId, Vec<i64>)>,
}

impl CoverabilityTree {
    pub fn build(
        graph: &Vass,
        indices: &[usize],
        root: StateId,
        base: &[i64],
        max_nodes: usize,
    ) -> Option<CoverabilityTree> {
        let proj: Vec<Vec<i64>> = graph
            .transitions()
            .iter()
            .map(|t| indices.iter().map(|&i| t.delta[i]).collect())
            .collect();
        let adj = graph.adjacency();
        let mut nodes: Vec<(StateId, Vec<i64>, Option<usize>)> = vec![(root, base.to_vec(), None)];
        let mut seen: HashSet<(StateId, Vec<i64>)> = HashSet::new();
        seen.insert((root, base.to_vec()));
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let (s, mark) = (nodes[n].0, nodes[n].1.clone());
            for &t in &adj[s] {
                let dst = graph.transition(t).dst;
                let mut next = Vec::with_capacity(mark.len());
                let mut ok = true;
                for (m, d) in mark.iter().zip(&proj[t]) {
                    if *m == OMEGA {
                        next.push(OMEGA);
                    } else if m + d < 0 {
                        ok = false;
                        break;
                    } else {
                        next.push(m + d);
                    }
                }
                if !ok {
                    continue;
                }
                // accelerate against every ancestor at the same state
                let mut anc = Some(n);
                while let Some(a) = anc {
                    let (astate, amark, parent) = &nodes[a];
                    if *astate == dst && amark.iter().zip(&next).all(|(x, y)| x <= y) {
                        for (x, y) in amark.iter().zip(next.iter_mut()) {
                            if x < y {
                                *y = OMEGA;
                            }
                        }
                    }
                    anc = *parent;
                }
                if !seen.insert((dst, next.clone())) {
                    continue;
                }
                if nodes.len() >= max_nodes {
                    return None;
                }
                nodes.push((dst, next, Some(n)));
                stack.push(nodes.len() - 1);
            }
        }
        Some(CoverabilityTree {
            nodes: nodes.into_iter().map(|(s, m, _)| (s, m)).collect(),
        })
    }

    pub fn covers(&self, state: StateId, target: &[i64]) -> bool {
        self.nodes
            .iter()
            .any(|(s, m)| *s == state && m.iter().zip(target).all(|(a, b)| a >= b))
    }

    /// Largest value of projected coordinate `k`, `None` if unbounded.
    pub fn sup(&self, k: usize) -> Option<i64> {
        let mut best = 0;
        for (_, m) in &self.nodes {
            if m[k] == OMEGA {
                return None;
            }
            best = best.max(m[k]);
        }
        Some(best)
    }
}

/// Shortest path from `(root, base)` to some `(root, v)` with `v ≥ base + 1`
/// that keeps the projected coordinates in `[0, cap]`.
fn find_cycle(
    graph: &Vass,
    indices: &[usize],
    root: StateId,
    base: &[i64],
    cap: i64,
    budget: &mut usize,
) -> Option<Option<Vec<usize>>> {
    let adj = graph.adjacency();
    let target: Vec<i64> = base.iter().map(|b| b + 1).collect();
    let mut parent: HashMap<(StateId, Vec<i64>), Option<((StateId, Vec<i64>), usize)>> =
        HashMap::new();
    let start = (root, base.to_vec());
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for &t in &adj[cur.0] {
            let tr = graph.transition(t);
            let next: Vec<i64> = indices
                .iter()
                .zip(&cur.1)
                .map(|(&i, v)| v + tr.delta[i])
                .collect();
            if next.iter().any(|&v| v < 0 || v > cap) {
                continue;
            }
            let key = (tr.dst, next);
            if parent.contains_key(&key) {
                continue;
            }
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            parent.insert(key.clone(), Some((cur.clone(), t)));
            if key.0 == root && key.1.iter().zip(&target).all(|(a, b)| a >= b) {
                let mut steps = Vec::new();
                let mut at = key;
                while let Some(Some((prev, t))) = parent.get(&at) {
                    steps.push(*t);
                    at = prev.clone();
                }
                steps.reverse();
                return Some(Some(steps));
            }
            queue.push_back(key);
        }
    }
    Some(None)
}

pub fn check_pumpable(
    cg: &Cg,
    direction: Direction,
    indices: &[usize],
    base: &IntVec,
    budget: PumpBudget,
) -> PumpOutcome {
    let (graph, at) = match direction {
        Direction::Forward => (cg.graph.clone(), cg.entry),
        Direction::Backward => (cg.graph.reversed(), cg.exit),
    };
    let make_cert = |steps: Vec<usize>| {
        let mut steps = steps;
        if direction == Direction::Backward {
            steps.reverse();
        }
        let cycle = Path::new(at, steps);
        let mut displacement = IntVec::zeros(cg.dim());
        for &t in &cycle.steps {
            displacement.add_assign(&cg.graph.transition(t).delta);
        }
        PumpCertificate {
            direction,
            cycle,
            indices: indices.to_vec(),
            displacement,
        }
    };
    if indices.is_empty() {
        return PumpOutcome::Pumpable(make_cert(Vec::new()));
    }
    let b: Vec<i64> = indices.iter().map(|&i| base[i]).collect();
    let Some(tree) = CoverabilityTree::build(&graph, indices, at, &b, budget.max_nodes) else {
        return PumpOutcome::Budget;
    };
    let target: Vec<i64> = b.iter().map(|v| v + 1).collect();
    if !tree.covers(at, &target) {
        for (k, &i) in indices.iter().enumerate() {
            if let Some(s) = tree.sup(k) {
                return PumpOutcome::NotPumpable {
                    index: i,
                    bound: Some(s),
                };
            }
        }
        return PumpOutcome::NotPumpable {
            index: indices[0],
            bound: None,
        };
    }
    let mut remaining = budget.max_nodes;
    let mut cap = b.iter().copied().max().unwrap_or(0) + 1 + graph.norm();
    loop {
        match find_cycle(&graph, indices, at, &b, cap, &mut remaining) {
            None => return PumpOutcome::Budget,
            Some(Some(steps)) => return PumpOutcome::Pumpable(make_cert(steps)),
            Some(None) => cap = cap.saturating_mul(2),
        }
    }
}
