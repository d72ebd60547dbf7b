//! Eulerian and orthogonal simplification.

use crate::geometry;
use crate::model::{Cgs, Port, Relation, SideConstraint, TransitionId};

use super::linearize::{chain_to_cgs, chains, covers};
use super::RefineError;

const MAX_CHAINS: usize = 4096;

/// Restricts component `j` to the transitions in `support` and replaces it
/// by each linearization of what remains that uses every transition of the
/// support. Paths with exactly this support are admitted by one of them.
pub fn eulerian_simplify(
    cgs: &Cgs,
    j: usize,
    support: &[TransitionId],
) -> Result<Vec<Cgs>, RefineError> {
    let cg = &cgs.components[j];
    if let Some(&t) = support.iter().find(|&&t| t >= cg.graph.num_transitions()) {
        return Err(RefineError::Precondition(format!(
            "transition {t} is not in component {j}"
        )));
    }
    let keep = |t: TransitionId| support.contains(&t);
    let all = chains(&cg.graph, cg.entry, cg.exit, &keep, MAX_CHAINS)
        .ok_or(RefineError::TooManyBranches(MAX_CHAINS))?;
    let out: Vec<Cgs> = all
        .iter()
        .filter(|c| covers(&cg.graph, c, &keep))
        .map(|c| cgs.substitute(j, &chain_to_cgs(&cg.graph, c, &keep)))
        .collect();
    if out.is_empty() {
        return Err(RefineError::NoLinearization);
    }
    Ok(out)
}

/// The entry value of an orthogonal coordinate: known, or above
/// `|Q|·‖T‖`, where every state's value is nonnegative anyway.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrthEntry {
    Value(i64),
    Large,
}

/// For an orthogonal coordinate `i` of component `j`, every state has a
/// value fixed by the entry value. States with a negative value are removed
/// and the rest is linearized; a large entry value becomes a side
/// constraint instead.
pub fn orthogonal_simplify(
    cgs: &Cgs,
    j: usize,
    i: usize,
    entry: OrthEntry,
) -> Result<Vec<Cgs>, RefineError> {
    let cg = &cgs.components[j];
    let offsets = geometry::orthogonal_offsets(&cg.graph, cg.entry, i)
        .filter(|_| geometry::orthogonal_indices(&cg.graph).contains(&i))
        .ok_or_else(|| RefineError::Precondition(format!("index {i} is not orthogonal")))?;
    match entry {
        OrthEntry::Large => {
            let threshold = cg.graph.num_states() as i64 * cg.graph.norm();
            let mut child = cgs.clone();
            child.add_side_constraint(SideConstraint {
                component: j,
                port: Port::Entry,
                index: i,
                relation: Relation::AtLeast(threshold + 1),
            });
            Ok(vec![child])
        }
        OrthEntry::Value(v) => {
            let alive: Vec<bool> = offsets.iter().map(|o| v + o >= 0).collect();
            if !alive[cg.entry] || !alive[cg.exit] {
                return Err(RefineError::NoLinearization);
            }
            if alive.iter().all(|&a| a) {
                return Ok(vec![cgs.clone()]);
            }
            let g = &cg.graph;
            let keep = |t: TransitionId| {
                let tr = g.transition(t);
                alive[tr.src] && alive[tr.dst]
            };
            let all = chains(g, cg.entry, cg.exit, &keep, MAX_CHAINS)
                .ok_or(RefineError::TooManyBranches(MAX_CHAINS))?;
            if all.is_empty() {
                return Err(RefineError::NoLinearization);
            }
            Ok(all
                .iter()
                .map(|c| cgs.substitute(j, &chain_to_cgs(g, c, &keep)))
                .collect())
        }
    }
}

/// Lower bounds on the entries of orthogonal coordinates that any path
/// visiting every state of its component must satisfy. Returns the
/// constraints not yet present.
pub fn orthogonal_floors(cgs: &Cgs) -> Vec<SideConstraint> {
    let mut out = Vec::new();
    for (j, cg) in cgs.components.iter().enumerate() {
        if cg.is_trivial() {
            continue;
        }
        for i in geometry::orthogonal_indices(&cg.graph) {
            let off = geometry::orthogonal_offsets(&cg.graph, cg.entry, i)
                .expect("orthogonal index has consistent offsets");
            let floor = -off.iter().copied().min().unwrap_or(0);
            if floor <= 0 {
                continue;
            }
            let implied = cgs.side_constraints.iter().any(|sc| {
                sc.component == j
                    && sc.port == Port::Entry
                    && sc.index == i
                    && match sc.relation {
                        Relation::AtLeast(c) | Relation::Exactly(c) => c >= floor,
                    }
            });
            if !implied {
                out.push(SideConstraint {
                    component: j,
                    port: Port::Entry,
                    index: i,
                    relation: Relation::AtLeast(floor),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Cg, IntVec, Vass};

    fn two_cycle() -> Cgs {
        let mut g = Vass::new(1).unwrap();
        let p = g.add_state("p");
        let q = g.add_state("q");
        g.add_transition(p, q, IntVec::from([1])).unwrap();
        g.add_transition(q, p, IntVec::from([-1])).unwrap();
        Cgs::single(Cg::new(g, p, q).unwrap())
    }

    #[test]
    fn full_support_is_identity() {
        let cgs = two_cycle();
        assert_eq!(eulerian_simplify(&cgs, 0, &[0, 1]).unwrap(), vec![cgs]);
    }

    #[test]
    fn partial_support_splits() {
        let out = eulerian_simplify(&two_cycle(), 0, &[0]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].len(), 2);
        assert!(out[0].components.iter().all(|c| c.is_trivial()));
        assert_eq!(out[0].connectors[0].label, 0);
    }

    #[test]
    fn support_not_reaching_exit() {
        assert_eq!(
            eulerian_simplify(&two_cycle(), 0, &[1]),
            Err(RefineError::NoLinearization)
        );
    }

    #[test]
    fn orthogonal_deletes_negative_states() {
        // p -(-1)-> q -(+1)-> p, p -(0)-> r -(0)-> p; entry and exit p
        let mut g = Vass::new(1).unwrap();
        let p = g.add_state("p");
        let q = g.add_state("q");
        let r = g.add_state("r");
        g.add_transition(p, q, IntVec::from([-1])).unwrap();
        g.add_transition(q, p, IntVec::from([1])).unwrap();
        g.add_transition(p, r, IntVec::from([0])).unwrap();
        g.add_transition(r, p, IntVec::from([0])).unwrap();
        let cgs = Cgs::single(Cg::new(g, p, p).unwrap());
        let out = orthogonal_simplify(&cgs, 0, 0, OrthEntry::Value(0)).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].components[0].graph.num_states(), 2);
        let same = orthogonal_simplify(&cgs, 0, 0, OrthEntry::Value(1)).unwrap();
        assert_eq!(same, vec![cgs.clone()]);
        let large = orthogonal_simplify(&cgs, 0, 0, OrthEntry::Large).unwrap();
        assert_eq!(large[0].side_constraints[0].relation, Relation::AtLeast(4));
        assert_eq!(
            orthogonal_floors(&cgs),
            vec![SideConstraint {
                component: 0,
                port: Port::Entry,
                index: 0,
                relation: Relation::AtLeast(1)
            }]
        );
    }
}
