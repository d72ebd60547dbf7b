//! Linearizations: chains of strongly connected pieces from an entry state
//! to an exit state, joined by single transitions.

use crate::model::{Cg, Cgs, Connector, StateId, TransitionId, Vass};
use crate::scc;

/// One chain: the pieces as (states of the piece, entry, exit) and the
/// joining transitions, all in ids of the input graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub pieces: Vec<(Vec<StateId>, StateId, StateId)>,
    pub joins: Vec<TransitionId>,
}

/// Every chain from `entry` to `exit` over the transitions accepted by
/// `keep`. `None` when there are more than `max` chains.
pub fn chains(
    graph: &Vass,
    entry: StateId,
    exit: StateId,
    keep: &dyn Fn(TransitionId) -> bool,
    max: usize,
) -> Option<Vec<Chain>> {
    let sccs = scc::tarjan(graph, keep);
    let mut out = Vec::new();
    let mut pieces = Vec::new();
    let mut joins = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn go(
        graph: &Vass,
        sccs: &scc::Sccs,
        keep: &dyn Fn(TransitionId) -> bool,
        at: StateId,
        exit: StateId,
        max: usize,
        pieces: &mut Vec<(Vec<StateId>, StateId, StateId)>,
        joins: &mut Vec<TransitionId>,
        out: &mut Vec<Chain>,
    ) -> bool {
        let c = sccs.comp_of[at];
        let states = &sccs.components[c];
        if sccs.comp_of[exit] == c {
            pieces.push((states.clone(), at, exit));
            out.push(Chain {
                pieces: pieces.clone(),
                joins: joins.clone(),
            });
            pieces.pop();
            return out.len() <= max;
        }
        for (t, tr) in graph.transitions().iter().enumerate() {
            if !keep(t) || sccs.comp_of[tr.src] != c || sccs.comp_of[tr.dst] == c {
                continue;
            }
            pieces.push((states.clone(), at, tr.src));
            joins.push(t);
            let ok = go(graph, sccs, keep, tr.dst, exit, max, pieces, joins, out);
            joins.pop();
            pieces.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    go(
        graph, &sccs, keep, entry, exit, max, &mut pieces, &mut joins, &mut out,
    )
    .then_some(out)
}

/// The sequence of constraint graphs of a chain.
pub fn chain_to_cgs(graph: &Vass, chain: &Chain, keep: &dyn Fn(TransitionId) -> bool) -> Cgs {
    let components = chain
        .pieces
        .iter()
        .map(|(states, en, ex)| {
            let (sub, map) = graph.restrict(states, keep);
            Cg {
                graph: sub,
                entry: map[*en].expect("entry in piece"),
                exit: map[*ex].expect("exit in piece"),
            }
        })
        .collect();
    let connectors = chain
        .joins
        .iter()
        .map(|&t| {
            let tr = graph.transition(t);
            Connector {
                delta: tr.delta.clone(),
                label: tr.label,
            }
        })
        .collect();
    Cgs {
        components,
        connectors,
        side_constraints: Vec::new(),
        boundary: None,
    }
}

/// Whether the chain uses every transition accepted by `keep`, either inside
/// a piece or as a join.
pub fn covers(graph: &Vass, chain: &Chain, keep: &dyn Fn(TransitionId) -> bool) -> bool {
    let mut piece_of = vec![usize::MAX; graph.num_states()];
    for (k, (states, _, _)) in chain.pieces.iter().enumerate() {
        for &s in states {
            piece_of[s] = k;
        }
    }
    (0..graph.num_transitions()).filter(|&t| keep(t)).all(|t| {
        let tr = graph.transition(t);
        let inside = piece_of[tr.src] != usize::MAX && piece_of[tr.src] == piece_of[tr.dst];
        inside || chain.joins.contains(&t)
    })
}
