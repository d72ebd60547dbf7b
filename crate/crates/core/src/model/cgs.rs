use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{IntVec, ModelError, Path, StateId, TransitionId, Vass};

/// A strongly connected graph with a designated entry and exit.
///
/// The single-state graph without transitions is the trivial constraint
/// graph; it admits only the empty path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cg {
    pub graph: Vass,
    pub entry: StateId,
    pub exit: StateId,
}

impl Cg {
    pub fn new(graph: Vass, entry: StateId, exit: StateId) -> Result<Self, ModelError> {
        for s in [entry, exit] {
            if s >= graph.num_states() {
                return Err(ModelError::UnknownState(s));
            }
        }
        if !graph.is_strongly_connected() {
            return Err(ModelError::MalformedCgs(
                "component graph is not strongly connected".into(),
            ));
        }
        Ok(Cg { graph, entry, exit })
    }

    /// The trivial graph on one state named `name` derived from `origin`.
    pub fn trivial(dim: usize, name: impl Into<String>, origin: StateId) -> Self {
        let mut graph = Vass::new(dim).expect("positive dimension");
        let s = graph.add_derived_state(name, origin);
        Cg {
            graph,
            entry: s,
            exit: s,
        }
    }

    pub fn dim(&self) -> usize {
        self.graph.dim()
    }

    pub fn is_trivial(&self) -> bool {
        self.graph.num_transitions() == 0
    }

    /// Every state has exactly one incoming and one outgoing transition.
    pub fn is_circular(&self) -> bool {
        let n = self.graph.num_states();
        if self.graph.num_transitions() != n || n == 0 {
            return false;
        }
        let mut indeg = vec![0usize; n];
        let mut outdeg = vec![0usize; n];
        for t in self.graph.transitions() {
            outdeg[t.src] += 1;
            indeg[t.dst] += 1;
        }
        indeg.iter().chain(&outdeg).all(|&d| d == 1)
    }

    /// Trivial or circular.
    pub fn is_linear(&self) -> bool {
        self.is_trivial() || self.is_circular()
    }

    /// For a circular graph: the transitions of one lap starting at `from`.
    pub fn lap_from(&self, from: StateId) -> Option<Vec<TransitionId>> {
        if !self.is_circular() {
            return None;
        }
        let adj = self.graph.adjacency();
        let mut lap = Vec::with_capacity(self.graph.num_transitions());
        let mut cur = from;
        loop {
            let t = adj[cur][0];
            lap.push(t);
            cur = self.graph.transition(t).dst;
            if cur == from {
                return Some(lap);
            }
        }
    }

    /// For a circular graph: the transitions leading from the entry to the
    /// exit without completing a lap.
    pub fn entry_to_exit(&self) -> Option<Vec<TransitionId>> {
        let lap = self.lap_from(self.entry)?;
        let mut seg = Vec::new();
        let mut cur = self.entry;
        for t in lap {
            if cur == self.exit {
                break;
            }
            seg.push(t);
            cur = self.graph.transition(t).dst;
        }
        Some(seg)
    }
}

/// A connecting edge from the exit of one component to the entry of the next.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Connector {
    pub delta: IntVec,
    pub label: TransitionId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Port {
    Entry,
    Exit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    AtLeast(i64),
    Exactly(i64),
}

impl Relation {
    pub fn holds(&self, value: i64) -> bool {
        match *self {
            Relation::AtLeast(c) => value >= c,
            Relation::Exactly(c) => value == c,
        }
    }
}

/// A constraint on one coordinate of a component's entry or exit vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SideConstraint {
    pub component: usize,
    pub port: Port,
    pub index: usize,
    pub relation: Relation,
}

/// A chain of constraint graphs joined by connectors.
///
/// State origins and transition labels in the components refer to a common
/// base system, so paths admitted by different sequences can be compared.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cgs {
    pub components: Vec<Cg>,
    pub connectors: Vec<Connector>,
    pub side_constraints: Vec<SideConstraint>,
    pub boundary: Option<(IntVec, IntVec)>,
}

impl Cgs {
    pub fn new(components: Vec<Cg>, connectors: Vec<Connector>) -> Result<Self, ModelError> {
        let cgs = Cgs {
            components,
            connectors,
            side_constraints: Vec::new(),
            boundary: None,
        };
        cgs.check()?;
        Ok(cgs)
    }

    pub fn single(cg: Cg) -> Self {
        Cgs {
            components: vec![cg],
            connectors: Vec::new(),
            side_constraints: Vec::new(),
            boundary: None,
        }
    }

    pub fn with_boundary(mut self, a: IntVec, b: IntVec) -> Self {
        self.boundary = Some((a, b));
        self
    }

    pub fn check(&self) -> Result<(), ModelError> {
        let Some(first) = self.components.first() else {
            return Err(ModelError::MalformedCgs("no components".into()));
        };
        let dim = first.dim();
        if self.connectors.len() + 1 != self.components.len() {
            return Err(ModelError::MalformedCgs(format!(
                "{} components need {} connectors, found {}",
                self.components.len(),
                self.components.len() - 1,
                self.connectors.len()
            )));
        }
        for c in &self.components {
            if c.dim() != dim {
                return Err(ModelError::DimensionMismatch {
                    expected: dim,
                    found: c.dim(),
                });
            }
            if c.entry >= c.graph.num_states() || c.exit >= c.graph.num_states() {
                return Err(ModelError::MalformedCgs("entry or exit out of range".into()));
            }
            if !c.graph.is_strongly_connected() {
                return Err(ModelError::MalformedCgs(
                    "component graph is not strongly connected".into(),
                ));
            }
        }
        for t in &self.connectors {
            if t.delta.dim() != dim {
                return Err(ModelError::DimensionMismatch {
                    expected: dim,
                    found: t.delta.dim(),
                });
            }
        }
        for sc in &self.side_constraints {
            if sc.component >= self.components.len() || sc.index >= dim {
                return Err(ModelError::MalformedCgs(format!(
                    "side constraint {sc:?} refers to an undeclared variable"
                )));
            }
        }
        if let Some((a, b)) = &self.boundary {
            if a.dim() != dim || b.dim() != dim {
                return Err(ModelError::DimensionMismatch {
                    expected: dim,
                    found: a.dim().min(b.dim()),
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Total number of states and transitions, connectors included.
    pub fn size(&self) -> usize {
        self.components.iter().map(|c| c.graph.size()).sum::<usize>() + self.connectors.len()
    }

    pub fn is_linear(&self) -> bool {
        self.components.iter().all(Cg::is_linear)
    }

    /// Replaces component `j` by the sequence `part`. Side constraints on the
    /// entry of `j` move to the first new component and those on its exit to
    /// the last one, since these are the same variables.
    pub fn substitute(&self, j: usize, part: &Cgs) -> Cgs {
        let k = part.components.len();
        let mut components = Vec::with_capacity(self.components.len() + k - 1);
        components.extend_from_slice(&self.components[..j]);
        components.extend(part.components.iter().cloned());
        components.extend_from_slice(&self.components[j + 1..]);

        let mut connectors = Vec::with_capacity(components.len() - 1);
        connectors.extend_from_slice(&self.connectors[..j]);
        connectors.extend(part.connectors.iter().cloned());
        connectors.extend_from_slice(&self.connectors[j..]);

        let mut side = Vec::new();
        for sc in &self.side_constraints {
            let mut sc = *sc;
            if sc.component == j {
                if sc.port == Port::Exit {
                    sc.component = j + k - 1;
                }
            } else if sc.component > j {
                sc.component += k - 1;
            }
            side.push(sc);
        }
        for sc in &part.side_constraints {
            let mut sc = *sc;
            sc.component += j;
            side.push(sc);
        }
        side.sort();
        side.dedup();
        Cgs {
            components,
            connectors,
            side_constraints: side,
            boundary: self.boundary.clone(),
        }
    }

    pub fn add_side_constraint(&mut self, sc: SideConstraint) {
        if !self.side_constraints.contains(&sc) {
            self.side_constraints.push(sc);
            self.side_constraints.sort();
        }
    }

    /// All components and connectors laid out in one system. Returns the
    /// system, the state offset of every component, the transition offset of
    /// every component and the transition id of every connector.
    pub fn union_graph(&self) -> UnionGraph {
        let mut g = Vass::new(self.dim()).expect("positive dimension");
        let mut state_offset = Vec::new();
        let mut trans_offset = Vec::new();
        let mut connector_ids = Vec::new();
        for c in &self.components {
            let so = g.num_states();
            state_offset.push(so);
            for s in c.graph.states() {
                g.add_derived_state(s.name.clone(), s.origin);
            }
            trans_offset.push(g.num_transitions());
            for t in c.graph.transitions() {
                g.add_labeled_transition(so + t.src, so + t.dst, t.delta.clone(), t.label)
                    .expect("component transitions are well formed");
            }
        }
        for (j, t) in self.connectors.iter().enumerate() {
            let src = state_offset[j] + self.components[j].exit;
            let dst = state_offset[j + 1] + self.components[j + 1].entry;
            connector_ids.push(
                g.add_labeled_transition(src, dst, t.delta.clone(), t.label)
                    .expect("connector endpoints exist"),
            );
        }
        UnionGraph {
            start: state_offset[0] + self.components[0].entry,
            end: *state_offset.last().unwrap() + self.components.last().unwrap().exit,
            graph: g,
            state_offset,
            trans_offset,
            connector_ids,
        }
    }

    /// Start state, in base terms.
    pub fn origin_start(&self) -> StateId {
        let c = &self.components[0];
        c.graph.state(c.entry).origin
    }
}

/// See [`Cgs::union_graph`].
#[derive(Clone, Debug)]
pub struct UnionGraph {
    pub graph: Vass,
    pub start: StateId,
    pub end: StateId,
    pub state_offset: Vec<usize>,
    pub trans_offset: Vec<usize>,
    pub connector_ids: Vec<TransitionId>,
}

impl UnionGraph {
    /// Rewrites a path in the union graph into the base system.
    pub fn project(&self, path: &Path) -> Path {
        Path {
            start: self.graph.state(path.start).origin,
            steps: path
                .steps
                .iter()
                .map(|&t| self.graph.transition(t).label)
                .collect(),
        }
    }
}

/// Whether the base-system path factors as a path through component 0 from
/// its entry to its exit, the first connector, a path through component 1,
/// and so on up to the exit of the last component.
pub fn admits(cgs: &Cgs, path: &Path) -> bool {
    if cgs.components.is_empty() || cgs.origin_start() != path.start {
        return false;
    }
    let adj: Vec<Vec<Vec<TransitionId>>> =
        cgs.components.iter().map(|c| c.graph.adjacency()).collect();
    let mut current: BTreeSet<(usize, StateId)> = BTreeSet::new();
    current.insert((0, cgs.components[0].entry));
    for &label in &path.steps {
        let mut next = BTreeSet::new();
        for &(j, s) in &current {
            let cg = &cgs.components[j];
            for &t in &adj[j][s] {
                let tr = cg.graph.transition(t);
                if tr.label == label {
                    next.insert((j, tr.dst));
                }
            }
            if s == cg.exit && j + 1 < cgs.components.len() && cgs.connectors[j].label == label {
                next.insert((j + 1, cgs.components[j + 1].entry));
            }
        }
        if next.is_empty() {
            return false;
        }
        current = next;
    }
    let last = cgs.components.len() - 1;
    current.contains(&(last, cgs.components[last].exit))
}

/// A linear path scheme `π_0 O_1 π_1 … O_k π_k` over a base system: skeleton
/// segments interleaved with cycles, each cycle taken at least once.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lcgs {
    pub base: Vass,
    pub start: StateId,
    pub segments: Vec<Vec<TransitionId>>,
    pub cycles: Vec<Vec<TransitionId>>,
}

impl Lcgs {
    pub fn new(
        base: Vass,
        start: StateId,
        segments: Vec<Vec<TransitionId>>,
        cycles: Vec<Vec<TransitionId>>,
    ) -> Result<Self, ModelError> {
        if segments.len() != cycles.len() + 1 {
            return Err(ModelError::MalformedCgs(format!(
                "{} cycles need {} segments",
                cycles.len(),
                cycles.len() + 1
            )));
        }
        let l = Lcgs {
            base,
            start,
            segments,
            cycles,
        };
        let mut cur = start;
        for (i, seg) in l.segments.iter().enumerate() {
            cur = Path::new(cur, seg.clone()).check(&l.base)?;
            if let Some(cycle) = l.cycles.get(i) {
                if cycle.is_empty() {
                    return Err(ModelError::MalformedCgs("empty cycle".into()));
                }
                let end = Path::new(cur, cycle.clone()).check(&l.base)?;
                if end != cur {
                    return Err(ModelError::MalformedCgs("cycle is not closed".into()));
                }
            }
        }
        Ok(l)
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn num_cycles(&self) -> usize {
        self.cycles.len()
    }

    /// `π_0 O_1^{x_1} π_1 … O_k^{x_k} π_k`.
    pub fn expand(&self, counts: &[u64]) -> Path {
        assert_eq!(counts.len(), self.cycles.len());
        let mut steps = Vec::new();
        for (i, seg) in self.segments.iter().enumerate() {
            steps.extend_from_slice(seg);
            if let Some(cycle) = self.cycles.get(i) {
                for _ in 0..counts[i] {
                    steps.extend_from_slice(cycle);
                }
            }
        }
        Path::new(self.start, steps)
    }

    /// Reads a sequence whose components are all trivial or circular as a
    /// path scheme over its union graph.
    pub fn from_cgs(cgs: &Cgs) -> Option<(Lcgs, UnionGraph)> {
        if !cgs.is_linear() {
            return None;
        }
        let u = cgs.union_graph();
        let mut segments = Vec::new();
        let mut cycles = Vec::new();
        let mut cur = Vec::new();
        for (j, c) in cgs.components.iter().enumerate() {
            if !c.is_trivial() {
                let off = u.trans_offset[j];
                let lap = c.lap_from(c.entry)?;
                segments.push(std::mem::take(&mut cur));
                cycles.push(lap.iter().map(|t| t + off).collect());
                cur.extend(c.entry_to_exit()?.iter().map(|t| t + off));
            }
            if j < cgs.connectors.len() {
                cur.push(u.connector_ids[j]);
            }
        }
        segments.push(cur);
        let l = Lcgs::new(u.graph.clone(), u.start, segments, cycles).ok()?;
        Some((l, u))
    }

    /// The equivalent sequence of trivial and circular components. Cycle
    /// states are copied, so repeated states on a cycle are fine.
    pub fn to_cgs(&self) -> Cgs {
        let dim = self.dim();
        let name = |s: StateId| self.base.state(s).name.clone();
        let origin = |s: StateId| self.base.state(s).origin;
        let mut components = vec![Cg::trivial(dim, name(self.start), origin(self.start))];
        let mut connectors = Vec::new();
        for (i, seg) in self.segments.iter().enumerate() {
            for &t in seg {
                let tr = self.base.transition(t);
                connectors.push(Connector {
                    delta: tr.delta.clone(),
                    label: tr.label,
                });
                components.push(Cg::trivial(dim, name(tr.dst), origin(tr.dst)));
            }
            if let Some(cycle) = self.cycles.get(i) {
                let mut g = Vass::new(dim).expect("positive dimension");
                for (n, &t) in cycle.iter().enumerate() {
                    let src = self.base.transition(t).src;
                    g.add_derived_state(format!("{}#{n}", name(src)), origin(src));
                }
                let len = cycle.len();
                for (n, &t) in cycle.iter().enumerate() {
                    let tr = self.base.transition(t);
                    g.add_labeled_transition(n, (n + 1) % len, tr.delta.clone(), tr.label)
                        .expect("ring states exist");
                }
                *components.last_mut().unwrap() = Cg {
                    graph: g,
                    entry: 0,
                    exit: 0,
                };
            }
        }
        Cgs {
            components,
            connectors,
            side_constraints: Vec::new(),
            boundary: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop_cg(deltas: &[i64]) -> Cg {
        let mut g = Vass::new(1).unwrap();
        let p = g.add_state("p");
        for (i, &d) in deltas.iter().enumerate() {
            g.add_labeled_transition(p, p, IntVec::from([d]), i).unwrap();
        }
        Cg::new(g, p, p).unwrap()
    }

    #[test]
    fn trivial_component_admits_only_empty_path() {
        let cgs = Cgs::single(Cg::trivial(1, "p", 0));
        assert!(admits(&cgs, &Path::empty(0)));
        assert!(!admits(&cgs, &Path::new(0, vec![0])));
    }

    #[test]
    fn connector_at_the_right_position() {
        let mut g = Vass::new(1).unwrap();
        g.add_state("p");
        let q_trivial = Cg::trivial(1, "q", 1);
        let cgs = Cgs::new(
            vec![Cg::trivial(1, "p", 0), q_trivial],
            vec![Connector {
                delta: IntVec::from([1]),
                label: 7,
            }],
        )
        .unwrap();
        assert!(admits(&cgs, &Path::new(0, vec![7])));
        assert!(!admits(&cgs, &Path::new(0, vec![])));
        assert!(!admits(&cgs, &Path::new(0, vec![7, 7])));
    }

    #[test]
    fn admits_concatenation_of_component_paths() {
        let cgs = Cgs::new(
            vec![loop_cg(&[1]), loop_cg(&[-1])],
            vec![Connector {
                delta: IntVec::from([0]),
                label: 5,
            }],
        )
        .unwrap();
        // both components are over labels 0; component 1 uses label 0 for -1 too
        assert!(admits(&cgs, &Path::new(0, vec![0, 0, 5, 0])));
        assert!(admits(&cgs, &Path::new(0, vec![5])));
        assert!(!admits(&cgs, &Path::new(0, vec![0])));
    }

    #[test]
    fn substitute_moves_side_constraints() {
        let mut cgs = Cgs::single(loop_cg(&[1, -1]));
        cgs.add_side_constraint(SideConstraint {
            component: 0,
            port: Port::Exit,
            index: 0,
            relation: Relation::AtLeast(3),
        });
        let part = Cgs::new(
            vec![loop_cg(&[1]), loop_cg(&[-1])],
            vec![Connector {
                delta: IntVec::from([0]),
                label: 9,
            }],
        )
        .unwrap();
        let out = cgs.substitute(0, &part);
        assert_eq!(out.len(), 2);
        assert_eq!(out.side_constraints[0].component, 1);
        out.check().unwrap();
    }

    #[test]
    fn lcgs_round_trip_through_cgs() {
        let mut base = Vass::new(1).unwrap();
        let p = base.add_state("p");
        let q = base.add_state("q");
        base.add_transition(p, q, IntVec::from([1])).unwrap();
        base.add_transition(q, q, IntVec::from([2])).unwrap();
        base.add_transition(q, p, IntVec::from([-1])).unwrap();
        let l = Lcgs::new(base.clone(), p, vec![vec![0], vec![2]], vec![vec![1]]).unwrap();
        let cgs = l.to_cgs();
        assert!(cgs.is_linear());
        let path = l.expand(&[3]);
        assert_eq!(path.steps, vec![0, 1, 1, 1, 2]);
        assert!(admits(&cgs, &path));
        let (back, u) = Lcgs::from_cgs(&cgs).unwrap();
        assert_eq!(u.project(&back.expand(&[3])), path);
    }

    #[test]
    fn circular_detection() {
        assert!(loop_cg(&[1]).is_circular());
        assert!(!loop_cg(&[1, -1]).is_circular());
        assert!(Cg::trivial(1, "p", 0).is_linear());
    }
}
