//! Characteristic systems of constraint graph sequences and the
//! boundedness analysis derived from their homogeneous solutions.
//!
//! Variables are laid out component by component: the entry vector, the
//! exit vector, then one count per transition in id order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diophantine::{self, Bounded, DiophantineBudget, IntMatrix, LinearSystem, SolutionSet};
use crate::geometry;
use crate::model::{delta_min_of, Cgs, IntVec, ParikhImage, Port, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharSysError {
    #[error("boundary has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("malformed sequence: {0}")]
    Malformed(String),
}

/// Whether every transition count must be positive (traversals) or may be
/// zero (arbitrary admitted paths).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Strict,
    Relaxed,
}

/// Variable offsets of one component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentVars {
    pub entry: usize,
    pub exit: usize,
    pub edges: usize,
    pub num_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharSystem {
    pub dim: usize,
    pub mode: Mode,
    pub layout: Vec<ComponentVars>,
    pub boundary: Option<(IntVec, IntVec)>,
    pub system: LinearSystem,
}

/// A solution decoded per component.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharSolution {
    pub raw: Vec<i64>,
    pub entries: Vec<IntVec>,
    pub exits: Vec<IntVec>,
    pub counts: Vec<Vec<i64>>,
}

impl CharSolution {
    pub fn parikh(&self, j: usize) -> ParikhImage {
        self.counts[j]
            .iter()
            .enumerate()
            .map(|(t, &c)| (t, c as u64))
            .collect()
    }

    /// Transitions of component `j` with a positive count.
    pub fn support(&self, j: usize) -> Vec<usize> {
        (0..self.counts[j].len())
            .filter(|&t| self.counts[j][t] > 0)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SatOutcome {
    Sat(CharSolution),
    Unsat,
    Budget,
}

impl CharSystem {
    /// Builds the system of `cgs`; the boundary equations are included when
    /// `boundary` is given, or else when `cgs` carries one.
    pub fn build(
        cgs: &Cgs,
        boundary: Option<(&IntVec, &IntVec)>,
        mode: Mode,
    ) -> Result<Self, CharSysError> {
        cgs.check()
            .map_err(|e| CharSysError::Malformed(e.to_string()))?;
        let dim = cgs.dim();
        let boundary = boundary
            .map(|(a, b)| (a.clone(), b.clone()))
            .or_else(|| cgs.boundary.clone());
        if let Some((a, b)) = &boundary {
            for v in [a, b] {
                if v.dim() != dim {
                    return Err(CharSysError::DimensionMismatch {
                        expected: dim,
                        found: v.dim(),
                    });
                }
            }
        }
        let mut layout = Vec::with_capacity(cgs.len());
        let mut nvars = 0;
        for c in &cgs.components {
            let e = c.graph.num_transitions();
            layout.push(ComponentVars {
                entry: nvars,
                exit: nvars + dim,
                edges: nvars + 2 * dim,
                num_edges: e,
            });
            nvars += 2 * dim + e;
        }
        let mut a = IntMatrix::zeros(0, nvars);
        let mut rhs = Vec::new();
        let mut lower = vec![0i64; nvars];
        let mut row = |coefs: &[(usize, i64)], r: i64, a: &mut IntMatrix| {
            let mut v = vec![0i64; nvars];
            for &(j, c) in coefs {
                v[j] += c;
            }
            a.push_row(&v);
            rhs.push(r);
        };

        for (j, c) in cgs.components.iter().enumerate() {
            let l = layout[j];
            let g = &c.graph;
            // flow balance: in - out = [s = exit] - [s = entry]
            for s in 0..g.num_states() {
                let mut coefs = Vec::new();
                for (t, tr) in g.transitions().iter().enumerate() {
                    if tr.dst == s {
                        coefs.push((l.edges + t, 1));
                    }
                    if tr.src == s {
                        coefs.push((l.edges + t, -1));
                    }
                }
                let r = i64::from(s == c.exit) - i64::from(s == c.entry);
                row(&coefs, r, &mut a);
            }
            // y = x + Σ Ψ(t)·Δ(t)
            for i in 0..dim {
                let mut coefs = vec![(l.exit + i, 1), (l.entry + i, -1)];
                for (t, tr) in g.transitions().iter().enumerate() {
                    if tr.delta[i] != 0 {
                        coefs.push((l.edges + t, -tr.delta[i]));
                    }
                }
                row(&coefs, 0, &mut a);
            }
            if mode == Mode::Strict {
                for t in 0..l.num_edges {
                    lower[l.edges + t] = 1;
                }
                // a circular component is entered and left by full laps
                if c.is_circular() {
                    let first = c.lap_from(c.entry).expect("circular");
                    let last = c.lap_from(c.exit).expect("circular");
                    let dmin_first =
                        delta_min_of(dim, first.iter().map(|&t| &g.transition(t).delta));
                    let dmin_last =
                        delta_min_of(dim, last.iter().map(|&t| &g.transition(t).delta));
                    let mut dlast = IntVec::zeros(dim);
                    for &t in &last {
                        dlast.add_assign(&g.transition(t).delta);
                    }
                    for i in 0..dim {
                        lower[l.entry + i] = lower[l.entry + i].max(-dmin_first[i]);
                        lower[l.exit + i] = lower[l.exit + i].max(dlast[i] - dmin_last[i]);
                    }
                }
            }
        }
        for (j, t) in cgs.connectors.iter().enumerate() {
            for i in 0..dim {
                row(
                    &[(layout[j + 1].entry + i, 1), (layout[j].exit + i, -1)],
                    t.delta[i],
                    &mut a,
                );
            }
        }
        if let Some((x0, yk)) = &boundary {
            let last = layout.len() - 1;
            for i in 0..dim {
                row(&[(layout[0].entry + i, 1)], x0[i], &mut a);
                row(&[(layout[last].exit + i, 1)], yk[i], &mut a);
            }
        }
        for sc in &cgs.side_constraints {
            let l = layout[sc.component];
            let var = match sc.port {
                Port::Entry => l.entry,
                Port::Exit => l.exit,
            } + sc.index;
            match sc.relation {
                Relation::AtLeast(c) => lower[var] = lower[var].max(c),
                Relation::Exactly(c) => row(&[(var, 1)], c, &mut a),
            }
        }
        if a.rows() == 0 {
            a = IntMatrix::zeros(1, nvars);
            rhs.push(0);
        }
        let system = LinearSystem::new(a, rhs).with_lower(lower);
        Ok(CharSystem {
            dim,
            mode,
            layout,
            boundary,
            system,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.system.num_vars()
    }

    pub fn decode(&self, raw: &[i64]) -> CharSolution {
        let d = self.dim;
        CharSolution {
            raw: raw.to_vec(),
            entries: self
                .layout
                .iter()
                .map(|l| IntVec::from(&raw[l.entry..l.entry + d]))
                .collect(),
            exits: self
                .layout
                .iter()
                .map(|l| IntVec::from(&raw[l.exit..l.exit + d]))
                .collect(),
            counts: self
                .layout
                .iter()
                .map(|l| raw[l.edges..l.edges + l.num_edges].to_vec())
                .collect(),
        }
    }

    pub fn solve(&self, budget: DiophantineBudget) -> Bounded<SolutionSet> {
        diophantine::solve(&self.system, budget)
    }
}

/// The strict system with boundary `a`, `b`.
pub fn build_char_system(cgs: &Cgs, a: &IntVec, b: &IntVec) -> Result<CharSystem, CharSysError> {
    CharSystem::build(cgs, Some((a, b)), Mode::Strict)
}

pub fn satisfiable(sys: &CharSystem, budget: DiophantineBudget) -> SatOutcome {
    match sys.solve(budget) {
        Bounded::Budget => SatOutcome::Budget,
        Bounded::Done(s) => match s.minimal.first() {
            Some(m) => SatOutcome::Sat(sys.decode(m)),
            None => SatOutcome::Unsat,
        },
    }
}

/// Which entries and edges can grow without bound over a fixed minimal
/// solution, read off the sum `O` of the homogeneous basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub aggregate: CharSolution,
    pub entry_unbounded: Vec<Vec<bool>>,
    pub exit_unbounded: Vec<Vec<bool>>,
    pub edge_unbounded: Vec<Vec<bool>>,
    /// Entry indices that are bounded and not orthogonal, per component.
    pub entry_tracked: Vec<Vec<usize>>,
    /// Exit indices that are bounded and not orthogonal, per component.
    pub exit_tracked: Vec<Vec<usize>>,
    /// A component is bounded when it has a bounded edge.
    pub component_bounded: Vec<bool>,
}

impl BoundednessReport {
    pub fn from_basis(cgs: &Cgs, sys: &CharSystem, basis: &[Vec<i64>]) -> Self {
        let mut o = vec![0i64; sys.num_vars()];
        for n in basis {
            for (a, b) in o.iter_mut().zip(n) {
                *a += b;
            }
        }
        let agg = sys.decode(&o);
        let entry_unbounded: Vec<Vec<bool>> = agg
            .entries
            .iter()
            .map(|x| x.iter().map(|&v| v > 0).collect())
            .collect();
        let exit_unbounded: Vec<Vec<bool>> = agg
            .exits
            .iter()
            .map(|y| y.iter().map(|&v| v > 0).collect())
            .collect();
        let edge_unbounded: Vec<Vec<bool>> = agg
            .counts
            .iter()
            .map(|c| c.iter().map(|&v| v > 0).collect())
            .collect();
        let mut entry_tracked = Vec::new();
        let mut exit_tracked = Vec::new();
        for (j, c) in cgs.components.iter().enumerate() {
            let orth = geometry::orthogonal_indices(&c.graph);
            let tracked = |unb: &[bool]| -> Vec<usize> {
                (0..sys.dim)
                    .filter(|&i| !unb[i] && !orth.contains(&i))
                    .collect()
            };
            entry_tracked.push(tracked(&entry_unbounded[j]));
            exit_tracked.push(tracked(&exit_unbounded[j]));
        }
        let component_bounded = edge_unbounded
            .iter()
            .map(|e| e.iter().any(|&u| !u))
            .collect();
        BoundednessReport {
            aggregate: agg,
            entry_unbounded,
            exit_unbounded,
            edge_unbounded,
            entry_tracked,
            exit_tracked,
            component_bounded,
        }
    }
}

/// The sum of the Hilbert basis of the homogeneous system, whose outermost
/// entry and exit are pinned to zero.
pub fn aggregate_solution(cgs: &Cgs, budget: DiophantineBudget) -> Result<Bounded<CharSolution>, CharSysError> {
    let z = IntVec::zeros(cgs.dim());
    let sys = CharSystem::build(cgs, Some((&z, &z)), Mode::Strict)?;
    Ok(
    sys.solve(budget).map(|s| {
        let mut o = vec![0i64; sys.num_vars()];
        for n in &s.basis {
            for (a, b) in o.iter_mut().zip(n) {
                *a += b;
            }
        }
        sys.decode(&o)
    }))
}

pub fn classify(
    cgs: &Cgs,
    a: &IntVec,
    b: &IntVec,
    budget: DiophantineBudget,
) -> Result<Bounded<BoundednessReport>, CharSysError> {
    let sys = build_char_system(cgs, a, b)?;
    Ok(sys
        .solve(budget)
        .map(|s| BoundednessReport::from_basis(cgs, &sys, &s.basis)))
}
