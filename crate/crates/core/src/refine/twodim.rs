//! Replacement of a low-dimensional component by linear path schemes,
//! found by bounded enumeration.

use serde::{Deserialize, Serialize};

use crate::charsys::{build_char_system, satisfiable, SatOutcome};
use crate::diophantine::{Bounded, DiophantineBudget};
use crate::geometry;
use crate::model::{Cg, Cgs, Lcgs, Port, StateId, TransitionId, Vass};
use crate::witness::build_witness_system;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoDimBudget {
    /// Most cycles in one scheme.
    pub max_cycles: usize,
    /// Longest skeleton segment between two cycles.
    pub max_segment: usize,
    pub max_cycle_len: usize,
    /// Schemes examined before giving up.
    pub max_schemes: usize,
    /// Satisfiable schemes returned.
    pub max_candidates: usize,
}

impl Default for TwoDimBudget {
    fn default() -> Self {
        TwoDimBudget {
            max_cycles: 3,
            max_segment: 4,
            max_cycle_len: 4,
            max_schemes: 3000,
            max_candidates: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwoDimOutcome {
    Replaced(Vec<Cgs>),
    NotFound,
    Budget,
}

fn simple_paths(g: &Vass, max_len: usize) -> Vec<Vec<Vec<Vec<TransitionId>>>> {
    let n = g.num_states();
    let adj = g.adjacency();
    let mut out = vec![vec![Vec::new(); n]; n];
    for s in 0..n {
        let mut stack: Vec<(StateId, Vec<TransitionId>, Vec<bool>)> = Vec::new();
        let mut seen = vec![false; n];
        seen[s] = true;
        stack.push((s, Vec::new(), seen));
        while let Some((at, path, seen)) = stack.pop() {
            out[s][at].push(path.clone());
            if path.len() == max_len {
                continue;
            }
            for &t in &adj[at] {
                let d = g.transition(t).dst;
                if !seen[d] {
                    let mut p = path.clone();
                    p.push(t);
                    let mut sn = seen.clone();
                    sn[d] = true;
                    stack.push((d, p, sn));
                }
            }
        }
        for v in out[s].iter_mut() {
            v.sort_by_key(|p| p.len());
        }
    }
    out
}

fn cycles_at(g: &Vass, max_len: usize) -> Vec<Vec<Vec<TransitionId>>> {
    let mut out = vec![Vec::new(); g.num_states()];
    for c in geometry::simple_cycles(g) {
        if c.len() > max_len {
            continue;
        }
        for r in 0..c.len() {
            let mut rot = c[r..].to_vec();
            rot.extend_from_slice(&c[..r]);
            out[g.transition(rot[0]).src].push(rot);
        }
    }
    for v in out.iter_mut() {
        v.sort_by_key(|c| c.len());
    }
    out
}

/// Linear path schemes inside `cg` from its entry to its exit, by number of
/// cycles, then total length. Stops after `budget.max_schemes`; the flag
/// tells whether the enumeration was cut short.
pub fn lcgs_candidates(cg: &Cg, budget: &TwoDimBudget) -> (Vec<Lcgs>, bool) {
    let g = &cg.graph;
    let paths = simple_paths(g, budget.max_segment);
    let cycles = cycles_at(g, budget.max_cycle_len);
    let mut out = Vec::new();
    let mut truncated = false;
    for k in 0..=budget.max_cycles {
        let mut level: Vec<(Vec<Vec<TransitionId>>, Vec<Vec<TransitionId>>)> = Vec::new();
        let mut segs = Vec::new();
        let mut cyc = Vec::new();
        #[allow(clippy::too_many_arguments)]
        fn go(
            at: StateId,
            k: usize,
            exit: StateId,
            paths: &[Vec<Vec<Vec<TransitionId>>>],
            cycles: &[Vec<Vec<TransitionId>>],
            segs: &mut Vec<Vec<TransitionId>>,
            cyc: &mut Vec<Vec<TransitionId>>,
            level: &mut Vec<(Vec<Vec<TransitionId>>, Vec<Vec<TransitionId>>)>,
            cap: usize,
        ) -> bool {
            if cyc.len() == k {
                for p in &paths[at][exit] {
                    if level.len() >= cap {
                        return false;
                    }
                    segs.push(p.clone());
                    level.push((segs.clone(), cyc.clone()));
                    segs.pop();
                }
                return true;
            }
            for s in 0..paths.len() {
                for p in &paths[at][s] {
                    for o in &cycles[s] {
                        // two copies of a cycle in a row add nothing
                        if p.is_empty() && cyc.last() == Some(o) {
                            continue;
                        }
                        segs.push(p.clone());
                        cyc.push(o.clone());
                        let ok = go(s, k, exit, paths, cycles, segs, cyc, level, cap);
                        cyc.pop();
                        segs.pop();
                        if !ok {
                            return false;
                        }
                    }
                }
            }
            true
        }
        let cap = budget.max_schemes.saturating_sub(out.len());
        let complete = go(
            cg.entry, k, cg.exit, &paths, &cycles, &mut segs, &mut cyc, &mut level, cap,
        );
        level.sort_by_key(|(s, c)| {
            s.iter().map(Vec::len).sum::<usize>() + c.iter().map(Vec::len).sum::<usize>()
        });
        for (s, c) in level {
            out.push(Lcgs::new(g.clone(), cg.entry, s, c).expect("enumerated scheme is well formed"));
        }
        if !complete {
            truncated = true;
            break;
        }
    }
    (out, truncated)
}

/// Replaces component `j` by linear path schemes drawn from its graph that
/// keep the sequence satisfiable. When `j` is the only component the
/// scheme's own system decides this exactly; otherwise the strict
/// characteristic system of the substituted sequence is used as a filter.
pub fn replace_2d_component(
    cgs: &Cgs,
    j: usize,
    budget: &TwoDimBudget,
    dio: DiophantineBudget,
) -> TwoDimOutcome {
    let cg = &cgs.components[j];
    let (schemes, truncated) = lcgs_candidates(cg, budget);
    let known = match (&cgs.boundary, cgs.len()) {
        (Some((a, b)), 1) => {
            let ok = cgs.side_constraints.iter().all(|sc| {
                let v = match sc.port {
                    Port::Entry => a[sc.index],
                    Port::Exit => b[sc.index],
                };
                sc.relation.holds(v)
            });
            if !ok {
                return TwoDimOutcome::NotFound;
            }
            Some((a, b))
        }
        _ => None,
    };
    let mut found = Vec::new();
    let mut hit_budget = truncated;
    for l in schemes {
        let sat = match known {
            Some((a, b)) => {
                let sys = build_witness_system(&l, a, b).expect("dimensions agree");
                match sys.minimal_counts(dio) {
                    Bounded::Done(c) => !c.is_empty(),
                    Bounded::Budget => {
                        hit_budget = true;
                        false
                    }
                }
            }
            None => {
                let child = cgs.substitute(j, &l.to_cgs());
                let Some((a, b)) = &child.boundary else {
                    // without a boundary every scheme is kept
                    found.push(child);
                    if found.len() >= budget.max_candidates {
                        break;
                    }
                    continue;
                };
                let sys = build_char_system(&child, a, b).expect("dimensions agree");
                match satisfiable(&sys, dio) {
                    SatOutcome::Sat(_) => true,
                    SatOutcome::Unsat => false,
                    SatOutcome::Budget => {
                        hit_budget = true;
                        false
                    }
                }
            }
        };
        if sat {
            found.push(cgs.substitute(j, &l.to_cgs()));
            if found.len() >= budget.max_candidates {
                break;
            }
        }
    }
    if !found.is_empty() {
        TwoDimOutcome::Replaced(found)
    } else if hit_budget {
        TwoDimOutcome::Budget
    } else {
        TwoDimOutcome::NotFound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IntVec;

    #[test]
    fn trivial_component() {
        let cgs = Cgs::single(Cg::trivial(1, "p", 0)).with_boundary(IntVec::from([1]), IntVec::from([1]));
        match replace_2d_component(&cgs, 0, &TwoDimBudget::default(), DiophantineBudget::default()) {
            TwoDimOutcome::Replaced(c) => assert_eq!(c[0], cgs),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn loop_three_times() {
        let mut g = Vass::new(2).unwrap();
        let p = g.add_state("p");
        g.add_transition(p, p, IntVec::from([1, -1])).unwrap();
        let cgs = Cgs::single(Cg::new(g, p, p).unwrap())
            .with_boundary(IntVec::from([0, 3]), IntVec::from([3, 0]));
        match replace_2d_component(&cgs, 0, &TwoDimBudget::default(), DiophantineBudget::default()) {
            TwoDimOutcome::Replaced(c) => {
                assert_eq!(c[0].len(), 1);
                assert!(c[0].components[0].is_circular());
            }
            other => panic!("{other:?}"),
        }
        let none = TwoDimBudget {
            max_cycles: 0,
            ..TwoDimBudget::default()
        };
        assert_eq!(
            replace_2d_component(&cgs, 0, &none, DiophantineBudget::default()),
            TwoDimOutcome::NotFound
        );
    }
}
