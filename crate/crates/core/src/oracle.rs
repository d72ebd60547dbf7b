//! Bounded breadth-first reachability, used as ground truth.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::model::{validate_walk, Configuration, IntVec, Path, StateId, TransitionId, Vass, Walk};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBound {
    /// Largest coordinate value explored.
    pub max_norm: i64,
    pub max_configs: usize,
    pub max_len: usize,
}

impl Default for OracleBound {
    fn default() -> Self {
        OracleBound {
            max_norm: 40,
            max_configs: 100_000,
            max_len: usize::MAX,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleReach {
    Reachable(Walk),
    /// Not found within the bound; not a proof of anything.
    NotWithinBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certification {
    /// The reachable set is finite, lies inside the bound and misses the
    /// target.
    ProvenUnreachable,
    Inconclusive,
}

type Key = (StateId, Vec<i64>);

struct Explored {
    parent: HashMap<Key, Option<(Key, TransitionId)>>,
    found: Option<Key>,
    /// Some successor left the bound or a cap was hit.
    escaped: bool,
}

fn explore(vass: &Vass, start: &Configuration, target: &Configuration, bound: &OracleBound) -> Explored {
    let adj = vass.adjacency();
    let root: Key = (start.state, start.location.to_vec());
    let goal: Key = (target.state, target.location.to_vec());
    let mut parent: HashMap<Key, Option<(Key, TransitionId)>> = HashMap::new();
    parent.insert(root.clone(), None);
    if root == goal {
        return Explored {
            parent,
            found: Some(root),
            escaped: false,
        };
    }
    let mut queue = VecDeque::from([(root, 0usize)]);
    let mut escaped = false;
    while let Some((cur, depth)) = queue.pop_front() {
        if depth >= bound.max_len {
            escaped = true;
            continue;
        }
        for &t in &adj[cur.0] {
            let tr = vass.transition(t);
            let next: Vec<i64> = cur.1.iter().zip(tr.delta.iter()).map(|(a, b)| a + b).collect();
            if next.iter().any(|&v| v < 0) {
                continue;
            }
            if next.iter().any(|&v| v > bound.max_norm) {
                escaped = true;
                continue;
            }
            let key = (tr.dst, next);
            if parent.contains_key(&key) {
                continue;
            }
            if parent.len() >= bound.max_configs {
                return Explored {
                    parent,
                    found: None,
                    escaped: true,
                };
            }
            parent.insert(key.clone(), Some((cur.clone(), t)));
            if key == goal {
                return Explored {
                    parent,
                    found: Some(key),
                    escaped,
                };
            }
            queue.push_back((key, depth + 1));
        }
    }
    Explored {
        parent,
        found: None,
        escaped,
    }
}

/// Breadth-first search over configurations with every coordinate at most
/// `bound.max_norm`. Returned walks are shortest within the bound.
pub fn bfs_reach(
    vass: &Vass,
    start: &Configuration,
    target: &Configuration,
    bound: &OracleBound,
) -> OracleReach {
    let e = explore(vass, start, target, bound);
    let Some(mut at) = e.found else {
        return OracleReach::NotWithinBound;
    };
    let mut steps = Vec::new();
    while let Some(Some((prev, t))) = e.parent.get(&at) {
        steps.push(*t);
        at = prev.clone();
    }
    steps.reverse();
    let path = Path::new(start.state, steps);
    let end = validate_walk(vass, start, &path).expect("oracle walk is valid");
    assert_eq!(&end, target);
    OracleReach::Reachable(Walk {
        start: start.clone(),
        path,
        end,
    })
}

/// Proves unreachability when the whole reachable set fits in the bound.
pub fn certified_unreach(
    vass: &Vass,
    start: &Configuration,
    target: &Configuration,
    bound: &OracleBound,
) -> Certification {
    let e = explore(vass, start, target, bound);
    if e.found.is_none() && !e.escaped {
        Certification::ProvenUnreachable
    } else {
        Certification::Inconclusive
    }
}

/// Convenience for callers holding bare vectors.
pub fn config(state: StateId, location: &IntVec) -> Configuration {
    Configuration {
        state,
        location: location.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop1(d: i64) -> Vass {
        let mut v = Vass::new(1).unwrap();
        let p = v.add_state("p");
        v.add_transition(p, p, IntVec::from([d])).unwrap();
        v
    }

    fn c(s: StateId, v: &[i64]) -> Configuration {
        config(s, &IntVec::from(v.to_vec()))
    }

    #[test]
    fn examples() {
        let b = OracleBound {
            max_norm: 10,
            ..OracleBound::default()
        };
        assert!(matches!(
            bfs_reach(&loop1(1), &c(0, &[0]), &c(0, &[0]), &b),
            OracleReach::Reachable(w) if w.path.is_empty()
        ));
        assert!(matches!(
            bfs_reach(&loop1(1), &c(0, &[0]), &c(0, &[5]), &b),
            OracleReach::Reachable(w) if w.path.len() == 5
        ));
        assert_eq!(bfs_reach(&loop1(-1), &c(0, &[0]), &c(0, &[1]), &b), OracleReach::NotWithinBound);
        assert_eq!(
            certified_unreach(&loop1(-1), &c(0, &[0]), &c(0, &[1]), &b),
            Certification::ProvenUnreachable
        );
        assert_eq!(
            certified_unreach(&loop1(1), &c(0, &[0]), &c(0, &[1]), &b),
            Certification::Inconclusive
        );
    }

    #[test]
    fn transfer_closure() {
        let mut v = Vass::new(2).unwrap();
        let p = v.add_state("p");
        v.add_transition(p, p, IntVec::from([1, -1])).unwrap();
        v.add_transition(p, p, IntVec::from([-1, 1])).unwrap();
        assert_eq!(
            certified_unreach(&v, &c(0, &[1, 0]), &c(0, &[2, 0]), &OracleBound::default()),
            Certification::ProvenUnreachable
        );
    }
}
