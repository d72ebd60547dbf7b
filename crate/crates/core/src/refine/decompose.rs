//! Algebraic and combinatorial decomposition, and the ridge construction
//! that tracks one coordinate in the control state.

use crate::geometry;
use crate::model::{Cg, Cgs, Port, Relation, SideConstraint, StateId, TransitionId, Vass};
use crate::scc;

use super::linearize::{chain_to_cgs, chains, Chain};
use super::RefineError;

/// An interleaving of the pieces of an algebraic decomposition, in the same
/// shape as a linearization.
pub type Arrangement = Chain;

/// The product of `cg` with the values `0..=bound` of coordinate `i`. State
/// `(q, c)` gets id `q·(bound+1) + c`.
pub fn ridge_graph(cg: &Cg, i: usize, bound: i64) -> Vass {
    let g = &cg.graph;
    let w = (bound + 1) as usize;
    let mut r = Vass::new(g.dim()).expect("positive dimension");
    for s in g.states() {
        for c in 0..w {
            r.add_derived_state(format!("{}@{c}", s.name), s.origin);
        }
    }
    for tr in g.transitions() {
        for c in 0..=bound {
            let d = c + tr.delta[i];
            if (0..=bound).contains(&d) {
                r.add_labeled_transition(
                    tr.src * w + c as usize,
                    tr.dst * w + d as usize,
                    tr.delta.clone(),
                    tr.label,
                )
                .expect("ridge states exist");
            }
        }
    }
    r
}

fn check_range(value: i64, bound: i64) -> Result<(), RefineError> {
    if (0..=bound).contains(&value) {
        Ok(())
    } else {
        Err(RefineError::OutOfRange { value, bound })
    }
}

/// The strongly connected part of the ridge graph containing the entry
/// `(entry, entry_val)` and the exit `(exit, exit_val)`.
pub fn ridge_construction(
    cg: &Cg,
    i: usize,
    bound: i64,
    entry_val: i64,
    exit_val: i64,
) -> Result<Cg, RefineError> {
    check_range(entry_val, bound)?;
    check_range(exit_val, bound)?;
    let w = (bound + 1) as usize;
    let r = ridge_graph(cg, i, bound);
    let en = cg.entry * w + entry_val as usize;
    let ex = cg.exit * w + exit_val as usize;
    let sccs = scc::tarjan(&r, |_| true);
    if sccs.comp_of[en] != sccs.comp_of[ex] {
        return Err(RefineError::Disconnected);
    }
    let (sub, map) = r.restrict(&sccs.components[sccs.comp_of[en]], |_| true);
    let out = Cg {
        graph: sub,
        entry: map[en].unwrap(),
        exit: map[ex].unwrap(),
    };
    assert!(
        geometry::orthogonal_indices(&out.graph).contains(&i),
        "ridge coordinate is orthogonal"
    );
    Ok(out)
}

/// Replaces component `j` by the linearizations of its ridge graph on
/// coordinate `i`, pinning coordinate `i` at every new entry and exit. An
/// unknown entry or exit value is branched over `0..=bound`.
pub fn combinatorial_decompose(
    cgs: &Cgs,
    j: usize,
    i: usize,
    bound: i64,
    entry_val: Option<i64>,
    exit_val: Option<i64>,
    max: usize,
) -> Result<Vec<Cgs>, RefineError> {
    let cg = &cgs.components[j];
    if geometry::orthogonal_indices(&cg.graph).contains(&i) {
        return Err(RefineError::Precondition(format!(
            "index {i} is already orthogonal"
        )));
    }
    let entries: Vec<i64> = match entry_val {
        Some(v) => {
            check_range(v, bound)?;
            vec![v]
        }
        None => (0..=bound).collect(),
    };
    let exits: Vec<i64> = match exit_val {
        Some(v) => {
            check_range(v, bound)?;
            vec![v]
        }
        None => (0..=bound).collect(),
    };
    let w = (bound + 1) as usize;
    let r = ridge_graph(cg, i, bound);
    let value = |s: StateId| (s % w) as i64;
    let mut out = Vec::new();
    for &ev in &entries {
        for &xv in &exits {
            let en = cg.entry * w + ev as usize;
            let ex = cg.exit * w + xv as usize;
            let left = max.saturating_sub(out.len());
            let all = chains(&r, en, ex, &|_| true, left).ok_or(RefineError::TooManyBranches(max))?;
            for c in &all {
                let mut part = chain_to_cgs(&r, c, &|_| true);
                for (k, (_, pe, px)) in c.pieces.iter().enumerate() {
                    for (port, s) in [(Port::Entry, *pe), (Port::Exit, *px)] {
                        part.side_constraints.push(SideConstraint {
                            component: k,
                            port,
                            index: i,
                            relation: Relation::Exactly(value(s)),
                        });
                    }
                }
                out.push(cgs.substitute(j, &part));
            }
        }
    }
    Ok(out)
}

/// Every walk from the entry to the exit of `cg` that uses each bounded
/// transition `t` exactly `counts[t]` times, cut into pieces of the
/// unbounded subgraph. `None` when there are more than `max`.
pub fn arrangements(
    cg: &Cg,
    unbounded: &[bool],
    counts: &[i64],
    max: usize,
) -> Option<Vec<Arrangement>> {
    let g = &cg.graph;
    let keep = |t: TransitionId| unbounded[t];
    let sccs = scc::tarjan(g, keep);
    let mut remaining: Vec<i64> = (0..g.num_transitions())
        .map(|t| if unbounded[t] { 0 } else { counts[t] })
        .collect();
    let mut out = Vec::new();
    let mut cur = Chain {
        pieces: Vec::new(),
        joins: Vec::new(),
    };

    struct Ctx<'a> {
        g: &'a Vass,
        unbounded: &'a [bool],
        sccs: &'a scc::Sccs,
        exit: StateId,
        max: usize,
    }

    fn go(
        cx: &Ctx,
        at: StateId,
        remaining: &mut [i64],
        left: i64,
        cur: &mut Chain,
        out: &mut Vec<Arrangement>,
    ) -> bool {
        let c = cx.sccs.comp_of[at];
        let states = &cx.sccs.components[c];
        if left == 0 && cx.sccs.comp_of[cx.exit] == c {
            cur.pieces.push((states.clone(), at, cx.exit));
            out.push(cur.clone());
            cur.pieces.pop();
            return out.len() <= cx.max;
        }
        for (t, tr) in cx.g.transitions().iter().enumerate() {
            if cx.sccs.comp_of[tr.src] != c {
                continue;
            }
            let bounded = !cx.unbounded[t];
            if bounded && remaining[t] == 0 {
                continue;
            }
            if !bounded && cx.sccs.comp_of[tr.dst] == c {
                continue;
            }
            if bounded {
                remaining[t] -= 1;
            }
            cur.pieces.push((states.clone(), at, tr.src));
            cur.joins.push(t);
            let ok = go(
                cx,
                tr.dst,
                remaining,
                left - i64::from(bounded),
                cur,
                out,
            );
            cur.joins.pop();
            cur.pieces.pop();
            if bounded {
                remaining[t] += 1;
            }
            if !ok {
                return false;
            }
        }
        true
    }

    let left = remaining.iter().sum();
    let cx = Ctx {
        g,
        unbounded,
        sccs: &sccs,
        exit: cg.exit,
        max,
    };
    go(&cx, cg.entry, &mut remaining, left, &mut cur, &mut out).then_some(out)
}

/// Replaces a component with bounded transitions by every arrangement of
/// the strongly connected parts of its unbounded subgraph, joined by the
/// bounded transitions with their counts from the chosen solution.
pub fn algebraic_decompose(
    cgs: &Cgs,
    j: usize,
    unbounded: &[bool],
    counts: &[i64],
    max: usize,
) -> Result<Vec<Cgs>, RefineError> {
    let cg = &cgs.components[j];
    if unbounded.iter().all(|&u| u) {
        return Err(RefineError::Precondition(
            "component has no bounded transition".into(),
        ));
    }
    let all = arrangements(cg, unbounded, counts, max).ok_or(RefineError::TooManyBranches(max))?;
    let keep = |t: TransitionId| unbounded[t];
    let mut out: Vec<Cgs> = all
        .iter()
        .map(|a| cgs.substitute(j, &chain_to_cgs(&cg.graph, a, &keep)))
        .collect();
    out.sort_by_key(|c| c.size());
    let mut seen = std::collections::HashSet::new();
    out.retain(|c| seen.insert(c.clone()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IntVec;

    fn loops(deltas: &[i64]) -> Cg {
        let mut g = Vass::new(1).unwrap();
        let p = g.add_state("p");
        for &d in deltas {
            g.add_transition(p, p, IntVec::from([d])).unwrap();
        }
        Cg::new(g, p, p).unwrap()
    }

    #[test]
    fn ridge_of_plus_minus() {
        let r = ridge_construction(&loops(&[1, -1]), 0, 1, 0, 0).unwrap();
        assert_eq!(r.graph.num_states(), 2);
        assert_eq!(r.graph.num_transitions(), 2);
        assert_eq!(
            ridge_construction(&loops(&[1, -1]), 0, 1, 2, 0),
            Err(RefineError::OutOfRange { value: 2, bound: 1 })
        );
        let same = ridge_construction(&loops(&[0]), 0, 0, 0, 0).unwrap();
        assert_eq!(same.graph.num_transitions(), 1);
    }

    #[test]
    fn combinatorial_single_step() {
        let cgs = Cgs::single(loops(&[-1]));
        let out = combinatorial_decompose(&cgs, 0, 0, 1, Some(1), Some(0), 100).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].len(), 2);
        assert!(out[0].components.iter().all(Cg::is_trivial));
        let orth = Cgs::single(loops(&[0]));
        assert!(matches!(
            combinatorial_decompose(&orth, 0, 0, 1, Some(0), Some(0), 100),
            Err(RefineError::Precondition(_))
        ));
    }

    #[test]
    fn bounded_loop_repeated() {
        let cgs = Cgs::single(loops(&[1]));
        let out = algebraic_decompose(&cgs, 0, &[false], &[2], 100).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].len(), 3);
        assert_eq!(out[0].connectors.len(), 2);
    }

    #[test]
    fn bridge_between_loop_parts() {
        // p loops (+1), q loops (-1), p -> q bounded once, q -> p bounded zero times
        let mut g = Vass::new(1).unwrap();
        let p = g.add_state("p");
        let q = g.add_state("q");
        g.add_transition(p, p, IntVec::from([1])).unwrap();
        g.add_transition(q, q, IntVec::from([-1])).unwrap();
        g.add_transition(p, q, IntVec::from([0])).unwrap();
        g.add_transition(q, p, IntVec::from([0])).unwrap();
        let cgs = Cgs::single(Cg::new(g, p, q).unwrap());
        let out = algebraic_decompose(&cgs, 0, &[true, true, false, false], &[0, 0, 1, 0], 100).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].len(), 2);
        assert!(out[0].components.iter().all(|c| c.graph.num_transitions() == 1));
        assert!(matches!(
            algebraic_decompose(&cgs, 0, &[true; 4], &[0; 4], 100),
            Err(RefineError::Precondition(_))
        ));
    }
}
