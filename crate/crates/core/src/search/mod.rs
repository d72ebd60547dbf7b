//! The decision driver: depth-first backtracking over refinements.
//!
//! A branch is closed only when its characteristic system has no solution.
//! Anything cut short by a budget, and any branch that went through a
//! low-dimensional replacement, taints the verdict: `Unreachable` is
//! reported only when no branch is tainted.

mod budget;
mod stats;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::charsys::{BoundednessReport, CharSystem, Mode};
use crate::diophantine::Bounded;
use crate::format::Instance;
use crate::geometry;
use crate::par::*;
use crate::model::{validate_walk, Cg, Cgs, Configuration, IntVec, StateId, Vass, Walk};
use crate::refine::{
    algebraic_decompose, combinatorial_decompose, eulerian_simplify, linearize, orthogonal_floors,
    refines_sample_check, replace_2d_component, RefineError, RefinementStep, StepKind, StepParams, TwoDimOutcome,
};
use crate::witness::{check_normal_at, synthesize_witness, Direction, NormalAt, NotNormalReason};

pub use budget::SearchBudget;
pub use stats::{tree_stats, TreeStats};

#[derive(Clone, Debug, Serialize)]
pub enum Verdict {
    Reachable {
        walk: Walk,
        trace: Vec<RefinementStep>,
    },
    /// Every branch was closed by an unsatisfiable characteristic system.
    Unreachable,
    Unknown {
        reasons: Vec<String>,
    },
}

impl Verdict {
    pub fn is_reachable(&self) -> bool {
        matches!(self, Verdict::Reachable { .. })
    }

    pub fn is_unreachable(&self) -> bool {
        matches!(self, Verdict::Unreachable)
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self, Verdict::Unknown { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Reachable { .. } => "reachable",
            Verdict::Unreachable => "unreachable",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub verdict: Verdict,
    pub stats: TreeStats,
    /// Every refinement step taken, in order.
    #[serde(skip)]
    pub steps: Vec<RefinementStep>,
}

enum Res {
    Found(Walk, Vec<RefinementStep>),
    Closed,
    Tainted,
}

struct Search<'a> {
    budget: &'a SearchBudget,
    stats: TreeStats,
    reasons: BTreeSet<String>,
    memo: HashMap<Cgs, bool>,
    in_progress: HashSet<Cgs>,
    /// Decompositions allowed along one lineage.
    depth_limit: u32,
    trail: Vec<RefinementStep>,
    log: Vec<RefinementStep>,
}

impl Search<'_> {
    fn taint(&mut self, why: impl Into<String>) -> Res {
        self.reasons.insert(why.into());
        Res::Tainted
    }

    /// Taint caused by a budget or cap.
    fn cut(&mut self, why: &str) -> Res {
        self.stats.partial = true;
        self.taint(why)
    }

    fn record(&mut self, step: &RefinementStep, depths: &[u32]) {
        *self.stats.steps_by_kind.entry(step.kind).or_default() += 1;
        self.stats.max_cgs_size = self.stats.max_cgs_size.max(step.child_size);
        if step.kind.is_decomposition() {
            if !step.descends() {
                self.stats.descent_violations += 1;
            }
            let d = depths[step.component];
            if d > self.depth_limit {
                self.stats.depth_violations += 1;
            }
        }
        if self.budget.audit_samples > 0 {
            let seed = self.budget.seed ^ self.log.len() as u64;
            if !refines_sample_check(&step.child, &step.parent, self.budget.audit_samples, seed) {
                self.stats.audit_failures += 1;
            }
        }
        self.log.push(step.clone());
    }

    /// Explores `child` as the refinement of `parent` at component `j`.
    fn descend(
        &mut self,
        kind: StepKind,
        params: StepParams,
        parent: &Arc<Cgs>,
        j: usize,
        child: Cgs,
        depths: &[u32],
        level: usize,
    ) -> Res {
        let child = Arc::new(child);
        let step = RefinementStep::new(kind, j, params, parent.clone(), child.clone());
        let parts = child.len() + 1 - parent.len();
        let inc = u32::from(kind.is_decomposition());
        let mut nd = Vec::with_capacity(child.len());
        nd.extend_from_slice(&depths[..j]);
        nd.extend(std::iter::repeat_n(depths[j] + inc, parts));
        nd.extend_from_slice(&depths[j + 1..]);
        self.record(&step, &nd);
        self.trail.push(step);
        let r = self.explore(child, nd, level + 1);
        self.trail.pop();
        r
    }

    fn explore(&mut self, cgs: Arc<Cgs>, depths: Vec<u32>, level: usize) -> Res {
        if let Some(&closed) = self.memo.get(&*cgs) {
            self.stats.memo_hits += 1;
            return if closed { Res::Closed } else { Res::Tainted };
        }
        if self.in_progress.contains(&*cgs) {
            return self.taint("refinement cycle");
        }
        self.in_progress.insert((*cgs).clone());
        let r = self.expand(&cgs, &depths, level);
        self.in_progress.remove(&*cgs);
        match &r {
            Res::Closed => {
                self.memo.insert((*cgs).clone(), true);
            }
            Res::Tainted => {
                self.memo.insert((*cgs).clone(), false);
            }
            Res::Found(..) => {}
        }
        r
    }

    fn expand(&mut self, cgs: &Arc<Cgs>, depths: &[u32], level: usize) -> Res {
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(level);
        self.stats.max_cgs_size = self.stats.max_cgs_size.max(cgs.size());
        if self.stats.nodes > self.budget.max_nodes {
            self.stats.partial = true;
            self.stats.leaves += 1;
            return self.taint("node budget");
        }
        if cgs.size() > self.budget.max_cgs_size || level > self.budget.max_depth {
            self.stats.partial = true;
            self.stats.leaves += 1;
            return self.taint("sequence size or depth budget");
        }
        let dio = self.budget.diophantine;

        // satisfiability, and the supports of all solutions
        let relaxed = CharSystem::build(cgs, None, Mode::Relaxed).expect("well-formed sequence");
        let Bounded::Done(sols) = relaxed.solve(dio) else {
            self.stats.leaves += 1;
            return self.cut("diophantine budget");
        };
        if sols.minimal.is_empty() {
            self.stats.leaves += 1;
            return Res::Closed;
        }
        let Some(supports) = self.supports(&relaxed, &sols.minimal, &sols.basis) else {
            self.stats.leaves += 1;
            return self.cut("support enumeration cap");
        };
        let mut tainted = false;
        let mut traversal = false;
        let mut eulerian: Vec<(usize, Vec<usize>)> = Vec::new();
        for s in &supports {
            match cgs
                .components
                .iter()
                .enumerate()
                .find(|(j, c)| s[*j].len() < c.graph.num_transitions())
            {
                None => traversal = true,
                Some((j, _)) => {
                    let key = (j, s[j].clone());
                    if !eulerian.contains(&key) {
                        eulerian.push(key);
                    }
                }
            }
        }

        // traversal mode: normality first
        let mut pending = None;
        if traversal {
            match self.traversal(cgs, depths, level) {
                Ok(Some(p)) => pending = Some(p),
                Ok(None) => {}
                Err(Res::Found(w, t)) => return Res::Found(w, t),
                Err(Res::Tainted) => tainted = true,
                Err(Res::Closed) => {}
            }
        }

        for (j, support) in eulerian {
            match eulerian_simplify(cgs, j, &support) {
                Ok(children) => {
                    for child in children {
                        match self.descend(
                            StepKind::Eulerian,
                            StepParams::Support(support.clone()),
                            cgs,
                            j,
                            child,
                            depths,
                            level,
                        ) {
                            Res::Found(w, t) => return Res::Found(w, t),
                            Res::Tainted => tainted = true,
                            Res::Closed => {}
                        }
                    }
                }
                Err(RefineError::NoLinearization) => {}
                Err(e) => {
                    self.taint(e.to_string());
                    tainted = true;
                }
            }
        }

        if let Some(p) = pending {
            match self.refine_traversal(p) {
                Res::Found(w, t) => return Res::Found(w, t),
                Res::Tainted => tainted = true,
                Res::Closed => {}
            }
        }
        if tainted {
            Res::Tainted
        } else {
            Res::Closed
        }
    }

    /// Supports of the relaxed solutions, per component: the support of each
    /// minimal solution joined with any union of homogeneous basis supports.
    fn supports(
        &mut self,
        sys: &CharSystem,
        minimal: &[Vec<i64>],
        basis: &[Vec<i64>],
    ) -> Option<Vec<Vec<Vec<usize>>>> {
        let edge_vars: Vec<usize> = sys
            .layout
            .iter()
            .flat_map(|l| l.edges..l.edges + l.num_edges)
            .collect();
        let bits = |v: &[i64]| -> Vec<bool> { edge_vars.iter().map(|&i| v[i] > 0).collect() };
        let mut basis_bits: Vec<Vec<bool>> = basis.iter().map(|v| bits(v)).collect();
        basis_bits.sort();
        basis_bits.dedup();
        basis_bits.retain(|b| b.iter().any(|&x| x));
        let mut seen: HashSet<Vec<bool>> = HashSet::new();
        let mut work: Vec<Vec<bool>> = Vec::new();
        for m in minimal {
            let b = bits(m);
            if seen.insert(b.clone()) {
                work.push(b);
            }
        }
        while let Some(s) = work.pop() {
            for o in &basis_bits {
                let u: Vec<bool> = s.iter().zip(o).map(|(a, b)| *a || *b).collect();
                if seen.insert(u.clone()) {
                    if seen.len() > self.budget.max_branches {
                        return None;
                    }
                    work.push(u);
                }
            }
        }
        let mut out: Vec<Vec<Vec<usize>>> = seen
            .into_iter()
            .map(|b| {
                let mut k = 0;
                sys.layout
                    .iter()
                    .map(|l| {
                        let v = (0..l.num_edges).filter(|&t| b[k + t]).collect();
                        k += l.num_edges;
                        v
                    })
                    .collect()
            })
            .collect();
        out.sort();
        Some(out)
    }

    /// Normality check on the sequence with orthogonal floors added. Returns
    /// the data needed to refine it further, or an early result.
    fn traversal(
        &mut self,
        cgs: &Arc<Cgs>,
        depths: &[u32],
        level: usize,
    ) -> Result<Option<Pending>, Res> {
        let floors = orthogonal_floors(cgs);
        let (node, step) = if floors.is_empty() {
            (cgs.clone(), None)
        } else {
            let mut child = (**cgs).clone();
            for sc in &floors {
                child.add_side_constraint(*sc);
            }
            let child = Arc::new(child);
            let step = RefinementStep::new(
                StepKind::Orthogonal,
                floors[0].component,
                StepParams::Floors(floors),
                cgs.clone(),
                child.clone(),
            );
            self.record(&step, depths);
            (child, Some(step))
        };
        if let Some(s) = &step {
            self.trail.push(s.clone());
        }
        let r = self.traversal_at(&node, depths);
        if step.is_some() {
            self.trail.pop();
        }
        match r {
            Ok(Some(mut p)) => {
                p.step = step;
                p.level = level + usize::from(p.step.is_some());
                Ok(Some(p))
            }
            other => other,
        }
    }

    fn traversal_at(&mut self, node: &Arc<Cgs>, depths: &[u32]) -> Result<Option<Pending>, Res> {
        let strict = CharSystem::build(node, None, Mode::Strict).expect("well-formed sequence");
        let Bounded::Done(sols) = strict.solve(self.budget.diophantine) else {
            return Err(self.cut("diophantine budget"));
        };
        if sols.minimal.is_empty() {
            return Err(Res::Closed);
        }
        let report = BoundednessReport::from_basis(node, &strict, &sols.basis);
        let mut failures = Vec::new();
        let mut tainted = false;
        for m in &sols.minimal {
            let n = strict.decode(m);
            match check_normal_at(node, &report, &n, self.budget.pump) {
                NormalAt::Normal(cert) => {
                    let walk = synthesize_witness(node, &cert);
                    return Err(Res::Found(walk, self.trail.clone()));
                }
                NormalAt::Budget => {
                    self.cut("pumpability budget");
                    tainted = true;
                }
                NormalAt::NotNormal { component, reason } => failures.push((n, component, reason)),
            }
        }
        Ok(Some(Pending {
            node: node.clone(),
            depths: depths.to_vec(),
            report,
            failures,
            tainted,
            step: None,
            level: 0,
        }))
    }

    fn refine_traversal(&mut self, p: Pending) -> Res {
        if let Some(s) = &p.step {
            self.trail.push(s.clone());
        }
        let r = self.refine_pending(&p);
        if p.step.is_some() {
            self.trail.pop();
        }
        r
    }

    fn refine_pending(&mut self, p: &Pending) -> Res {
        let node = &p.node;
        let depths = &p.depths;
        let level = p.level;
        let mut tainted = p.tainted;
        let mut replaced: HashSet<usize> = HashSet::new();
        let mut seen_children: HashSet<Cgs> = HashSet::new();
        for (mi, (n, j, reason)) in p.failures.iter().enumerate() {
            let j = *j;
            let cg: &Cg = &node.components[j];
            let dim = geometry::geometric_dimension(&cg.graph);
            let mut children: Vec<(StepKind, StepParams, Cgs)> = Vec::new();
            if dim <= 2 {
                if !replaced.insert(j) {
                    continue;
                }
                // low-dimensional components go through linear path schemes;
                // failure to find one is never a proof
                tainted = true;
                self.reasons.insert("low-dimensional replacement".into());
                match replace_2d_component(node, j, &self.budget.two_dim, self.budget.diophantine) {
                    TwoDimOutcome::Replaced(list) => {
                        for c in list {
                            let cycles = c.components.iter().filter(|x| x.is_circular()).count();
                            children.push((StepKind::TwoDimReplace, StepParams::Lcgs { cycles }, c));
                        }
                    }
                    TwoDimOutcome::NotFound => {}
                    TwoDimOutcome::Budget => {
                        self.cut("low-dimensional replacement budget");
                    }
                }
            } else {
                match reason {
                    NotNormalReason::BoundedNonLinear => {
                        match algebraic_decompose(
                            node,
                            j,
                            &p.report.edge_unbounded[j],
                            &n.counts[j],
                            self.budget.max_branches,
                        ) {
                            Ok(list) => {
                                for (k, c) in list.into_iter().enumerate() {
                                    children.push((
                                        StepKind::Algebraic,
                                        StepParams::Solution {
                                            solution: mi,
                                            arrangement: k,
                                        },
                                        c,
                                    ));
                                }
                            }
                            Err(e) => {
                                self.taint(e.to_string());
                                tainted = true;
                            }
                        }
                    }
                    NotNormalReason::NotPumpable {
                        direction,
                        index,
                        bound: Some(u),
                    } => {
                        if *u > self.budget.max_ridge {
                            self.cut("ridge bound above cap");
                            tainted = true;
                            continue;
                        }
                        let (ev, xv) = match direction {
                            Direction::Forward => (Some(n.entries[j][*index]), None),
                            Direction::Backward => (None, Some(n.exits[j][*index])),
                        };
                        match combinatorial_decompose(
                            node,
                            j,
                            *index,
                            *u,
                            ev,
                            xv,
                            self.budget.max_branches,
                        ) {
                            Ok(list) => {
                                for c in list {
                                    let params = StepParams::Ridge {
                                        index: *index,
                                        bound: *u,
                                        entry: ev.unwrap_or(-1),
                                        exit: xv.unwrap_or(-1),
                                    };
                                    children.push((StepKind::Combinatorial, params, c));
                                }
                            }
                            Err(e) => {
                                self.taint(e.to_string());
                                tainted = true;
                            }
                        }
                    }
                    NotNormalReason::NotPumpable { bound: None, .. } => {
                        self.taint("no bounded coordinate for decomposition");
                        tainted = true;
                    }
                    NotNormalReason::OrthogonalNegative { .. } => {
                        self.taint("orthogonal coordinate below floor");
                        tainted = true;
                    }
                }
            }
            for (kind, params, child) in children {
                if !seen_children.insert(child.clone()) {
                    continue;
                }
                match self.descend(kind, params, node, j, child, depths, level) {
                    Res::Found(w, t) => return Res::Found(w, t),
                    Res::Tainted => tainted = true,
                    Res::Closed => {}
                }
            }
        }
        if tainted {
            Res::Tainted
        } else {
            Res::Closed
        }
    }
}

struct Pending {
    node: Arc<Cgs>,
    depths: Vec<u32>,
    report: BoundednessReport,
    failures: Vec<(crate::charsys::CharSolution, usize, NotNormalReason)>,
    tainted: bool,
    step: Option<RefinementStep>,
    level: usize,
}

enum RootResult {
    Found(Walk, Vec<RefinementStep>),
    Closed,
    Tainted(BTreeSet<String>),
}

fn run_root(root: Cgs, input_dim: usize, budget: &SearchBudget) -> (RootResult, TreeStats, Vec<RefinementStep>) {
    let mut s = Search {
        budget,
        stats: TreeStats::default(),
        reasons: BTreeSet::new(),
        memo: HashMap::new(),
        in_progress: HashSet::new(),
        depth_limit: input_dim.saturating_sub(2) as u32,
        trail: Vec::new(),
        log: Vec::new(),
    };
    let depths = vec![0; root.len()];
    let r = match s.explore(Arc::new(root), depths, 0) {
        Res::Found(walk, trace) => RootResult::Found(walk, trace),
        Res::Closed => RootResult::Closed,
        Res::Tainted => RootResult::Tainted(s.reasons),
    };
    (r, s.stats, s.log)
}

/// Explores the roots independently, in parallel when the `parallel`
/// feature is on. Budgets apply per root. The verdict does not depend on
/// scheduling: the first root in order that yields a walk wins.
fn run(roots: Vec<Cgs>, input_dim: usize, budget: &SearchBudget) -> SearchReport {
    let results: Vec<_> = roots
        .into_par_iter()
        .map(|r| run_root(r, input_dim, budget))
        .collect();
    let mut stats = TreeStats::default();
    let mut steps = Vec::new();
    let mut reasons = BTreeSet::new();
    let mut found = None;
    let mut tainted = false;
    for (r, st, log) in results {
        stats.absorb(&st);
        steps.extend(log);
        match r {
            RootResult::Found(w, t) => {
                found.get_or_insert((w, t));
            }
            RootResult::Tainted(why) => {
                tainted = true;
                reasons.extend(why);
            }
            RootResult::Closed => {}
        }
    }
    let verdict = match found {
        Some((walk, trace)) => Verdict::Reachable { walk, trace },
        None if tainted => Verdict::Unknown {
            reasons: reasons.into_iter().collect(),
        },
        None => Verdict::Unreachable,
    };
    SearchReport {
        verdict,
        stats,
        steps,
    }
}

/// The input as constraint graph sequences: one per chain of strongly
/// connected parts from `p` to `q`.
pub fn initial_sequences(vass: &Vass, p: StateId, q: StateId, max: usize) -> Option<Vec<Cgs>> {
    let all = linearize::chains(vass, p, q, &|_| true, max)?;
    Some(
        all.iter()
            .map(|c| linearize::chain_to_cgs(vass, c, &|_| true))
            .collect(),
    )
}

/// Decides whether `(q, b)` is reachable from `(p, a)`.
pub fn decide(
    vass: &Vass,
    p: StateId,
    a: &IntVec,
    q: StateId,
    b: &IntVec,
    budget: &SearchBudget,
) -> SearchReport {
    let Some(roots) = initial_sequences(vass, p, q, budget.max_branches) else {
        let mut stats = TreeStats::default();
        stats.partial = true;
        return SearchReport {
            verdict: Verdict::Unknown {
                reasons: vec!["too many initial linearizations".into()],
            },
            stats,
            steps: Vec::new(),
        };
    };
    let roots: Vec<Cgs> = roots
        .into_iter()
        .map(|r| r.with_boundary(a.clone(), b.clone()))
        .collect();
    let report = run(roots, geometry::geometric_dimension(vass), budget);
    if let Verdict::Reachable { walk, .. } = &report.verdict {
        let start = Configuration {
            state: p,
            location: a.clone(),
        };
        let end = validate_walk(vass, &start, &walk.path).expect("witness is a walk of the input");
        assert_eq!((end.state, &end.location), (q, b), "witness reaches the target");
    }
    report
}

/// Decides every instance, in parallel when the `parallel` feature is on.
pub fn decide_batch(instances: &[Instance], budget: &SearchBudget) -> Vec<SearchReport> {
    instances
        .par_iter()
        .map(|i| decide(&i.vass, i.init.0, &i.init.1, i.target.0, &i.target.1, budget))
        .collect()
}

/// Decides reachability from `a` to `b` along paths admitted by `cgs`.
pub fn decide_cgs(cgs: &Cgs, a: &IntVec, b: &IntVec, budget: &SearchBudget) -> SearchReport {
    let dim = cgs
        .components
        .iter()
        .map(|c| geometry::geometric_dimension(&c.graph))
        .max()
        .unwrap_or(0);
    run(
        vec![cgs.clone().with_boundary(a.clone(), b.clone())],
        dim,
        budget,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Connector;

    fn single_loop(d: &[i64]) -> Vass {
        let mut g = Vass::new(d.len()).unwrap();
        let p = g.add_state("p");
        g.add_transition(p, p, IntVec::from(d.to_vec())).unwrap();
        g
    }

    fn run_decide(g: &Vass, a: &[i64], b: &[i64]) -> SearchReport {
        decide(
            g,
            0,
            &IntVec::from(a.to_vec()),
            0,
            &IntVec::from(b.to_vec()),
            &SearchBudget::desk(),
        )
    }

    #[test]
    fn increment_loop_reaches_five() {
        let rep = run_decide(&single_loop(&[1]), &[0], &[5]);
        match rep.verdict {
            Verdict::Reachable { walk, .. } => assert_eq!(walk.path.len(), 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decrement_loop_cannot_raise() {
        let rep = run_decide(&single_loop(&[-1]), &[0], &[1]);
        assert!(rep.verdict.is_unreachable(), "{:?}", rep.verdict);
    }

    #[test]
    fn transfer_loops() {
        let mut g = Vass::new(2).unwrap();
        let p = g.add_state("p");
        g.add_transition(p, p, IntVec::from([1, -1])).unwrap();
        g.add_transition(p, p, IntVec::from([-1, 1])).unwrap();
        let rep = run_decide(&g, &[1, 0], &[0, 1]);
        assert!(rep.verdict.is_reachable(), "{:?}", rep.verdict);
        let rep = run_decide(&g, &[1, 0], &[1, 1]);
        assert!(rep.verdict.is_unreachable(), "{:?}", rep.verdict);
    }

    #[test]
    fn empty_path_reaches_itself() {
        let g = single_loop(&[-1]);
        let rep = run_decide(&g, &[2], &[2]);
        match rep.verdict {
            Verdict::Reachable { walk, .. } => assert!(walk.path.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unreachable_target_state() {
        let mut g = Vass::new(1).unwrap();
        g.add_state("p");
        g.add_state("q");
        let rep = decide(
            &g,
            0,
            &IntVec::from([0]),
            1,
            &IntVec::from([0]),
            &SearchBudget::tiny(),
        );
        assert!(rep.verdict.is_unreachable());
    }

    #[test]
    fn decide_on_trivial_sequence() {
        let cgs = Cgs::new(
            vec![Cg::trivial(1, "p", 0), Cg::trivial(1, "q", 1)],
            vec![Connector {
                delta: IntVec::from([-1]),
                label: 0,
            }],
        )
        .unwrap();
        let b = SearchBudget::tiny();
        assert!(decide_cgs(&cgs, &IntVec::from([1]), &IntVec::from([0]), &b)
            .verdict
            .is_reachable());
        assert!(decide_cgs(&cgs, &IntVec::from([0]), &IntVec::from([0]), &b)
            .verdict
            .is_unreachable());
    }
}
