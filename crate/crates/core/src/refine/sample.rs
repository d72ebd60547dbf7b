//! Randomized check of the refinement relation.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{admits, Cgs, Path};

/// A random path admitted by `cgs`, in base labels. Takes about `len`
/// random steps, then heads for the exit along a shortest route. `None` if
/// the exit is unreachable.
pub fn random_admitted_path(cgs: &Cgs, rng: &mut impl Rng, len: usize) -> Option<Path> {
    let u = cgs.union_graph();
    let g = &u.graph;
    let mut dist = vec![usize::MAX; g.num_states()];
    dist[u.end] = 0;
    let mut queue = VecDeque::from([u.end]);
    while let Some(s) = queue.pop_front() {
        for tr in g.transitions() {
            if tr.dst == s && dist[tr.src] == usize::MAX {
                dist[tr.src] = dist[s] + 1;
                queue.push_back(tr.src);
            }
        }
    }
    if dist[u.start] == usize::MAX {
        return None;
    }
    let adj = g.adjacency();
    let mut at = u.start;
    let mut steps = Vec::new();
    for _ in 0..len {
        if at == u.end && rng.gen_bool(0.25) {
            break;
        }
        let options: Vec<usize> = adj[at]
            .iter()
            .copied()
            .filter(|&t| dist[g.transition(t).dst] != usize::MAX)
            .collect();
        if options.is_empty() {
            break;
        }
        let t = options[rng.gen_range(0..options.len())];
        steps.push(t);
        at = g.transition(t).dst;
    }
    while at != u.end {
        let t = adj[at]
            .iter()
            .copied()
            .find(|&t| dist[g.transition(t).dst] + 1 == dist[at])
            .expect("a state at finite distance has a next step");
        steps.push(t);
        at = g.transition(t).dst;
    }
    Some(u.project(&Path::new(u.start, steps)))
}

/// Samples paths admitted by `child` and checks that `parent` admits each.
pub fn refines_sample_check(child: &Cgs, parent: &Cgs, samples: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 0..samples {
        let Some(path) = random_admitted_path(child, &mut rng, 4 + 2 * n) else {
            return true;
        };
        debug_assert!(admits(child, &path));
        if !admits(parent, &path) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Cg, IntVec, Vass};
    use crate::refine::eulerian_simplify;

    fn two_cycle(extra: bool) -> Cgs {
        let mut g = Vass::new(1).unwrap();
        let p = g.add_state("p");
        let q = g.add_state("q");
        g.add_transition(p, q, IntVec::from([1])).unwrap();
        g.add_transition(q, p, IntVec::from([-1])).unwrap();
        if extra {
            g.add_transition(p, p, IntVec::from([0])).unwrap();
        }
        Cgs::single(Cg::new(g, p, p).unwrap())
    }

    #[test]
    fn reflexive_and_eulerian() {
        let parent = two_cycle(false);
        assert!(refines_sample_check(&parent, &parent, 50, 1));
        for child in eulerian_simplify(&parent, 0, &[0, 1]).unwrap() {
            assert!(refines_sample_check(&child, &parent, 50, 2));
        }
    }

    #[test]
    fn extra_transition_is_caught() {
        assert!(!refines_sample_check(&two_cycle(true), &two_cycle(false), 50, 3));
    }
}
