//! Randomized cross-checks of the kernels against brute-force oracles.
//!
//! Each suite draws its own cases from a seed and reports how many disagreed
//! with the oracle. The CLI `selftest` command and the acceptance tests both
//! run these, at different sizes.

use std::collections::{HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diophantine::{
    bruteforce_min_solutions, hilbert_basis, norm1, pottier_bound, rank_of_rows, Bounded,
    DiophantineBudget, IntMatrix,
};
use crate::format::Instance;
use crate::generate::{generate, GenParams};
use crate::geometry;
use crate::model::{
    admits, parikh, realize_parikh, validate_walk, Cg, Cgs, Configuration, IntVec, Lcgs,
    ParikhImage, Path, StateId, TransitionId, Vass,
};
use crate::oracle::{bfs_reach, certified_unreach, config, Certification, OracleBound, OracleReach};
use crate::refine::refines_sample_check;
use crate::search::{decide, SearchBudget, Verdict};
use crate::witness::{
    build_witness_system, check_pumpable, is_normal, solve_witness_system, synthesize_witness,
    Direction, NormalOutcome, PumpBudget, PumpOutcome, WitnessBudget, WitnessOutcome,
};

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    /// Cases the oracle could not settle within its bounds.
    pub skipped: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            ..SuiteReport::default()
        }
    }

    fn fail(&mut self, what: String) {
        self.failures += 1;
        self.first_failure.get_or_insert(what);
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A strongly connected multigraph: a shuffled ring plus a few extra edges.
pub fn random_strongly_connected(
    rng: &mut impl Rng,
    states: usize,
    dim: usize,
    norm: i64,
    extra: usize,
) -> Vass {
    let mut g = Vass::new(dim).expect("positive dimension");
    for s in 0..states {
        g.add_state(format!("s{s}"));
    }
    let mut order: Vec<StateId> = (0..states).collect();
    order.shuffle(rng);
    let mut edges: Vec<(StateId, StateId)> =
        (0..states).map(|k| (order[k], order[(k + 1) % states])).collect();
    for _ in 0..extra {
        edges.push((rng.gen_range(0..states), rng.gen_range(0..states)));
    }
    for (s, d) in edges {
        let delta: Vec<i64> = (0..dim).map(|_| rng.gen_range(-norm..=norm)).collect();
        g.add_transition(s, d, IntVec::from(delta)).expect("states exist");
    }
    g
}

/// Hilbert bases of random homogeneous systems against lattice enumeration
/// up to the Pottier bound.
pub fn hilbert_suite(cases: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("hilbert basis");
    let mut r = rng(seed);
    for c in 0..cases {
        let m = r.gen_range(1..=3);
        let k = r.gen_range(1..=4);
        let rows: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..k).map(|_| r.gen_range(-3..=3)).collect())
            .collect();
        let a = IntMatrix::from_rows(&rows);
        rep.cases += 1;
        let bound = pottier_bound(&a);
        let Bounded::Done(mut got) = hilbert_basis(&a, DiophantineBudget::default()) else {
            rep.fail(format!("case {c}: budget on {rows:?}"));
            continue;
        };
        let cap = bound.to_u64().expect("small bound");
        let mut want = bruteforce_min_solutions(&a, &vec![0; m], cap);
        got.sort();
        want.sort();
        if got != want {
            rep.fail(format!("case {c}: {rows:?}: got {got:?}, oracle {want:?}"));
        } else if got.iter().any(|n| BigUint::from(norm1(n)) > bound) {
            rep.fail(format!("case {c}: element above the Pottier bound"));
        }
    }
    rep
}

/// Parikh images of random paths are realized with the same image, and
/// imbalanced images are rejected.
pub fn euler_suite(paths: usize, imbalanced: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("euler round-trip");
    let mut r = rng(seed);
    for c in 0..paths {
        let n = r.gen_range(1..=5);
        let extra = r.gen_range(0..=n + 2);
        let g = random_strongly_connected(&mut r, n, 1, 1, extra);
        let adj = g.adjacency();
        let start = r.gen_range(0..n);
        let len = r.gen_range(0..=30);
        let mut cur = start;
        let mut steps = Vec::with_capacity(len);
        for _ in 0..len {
            let t = *adj[cur].choose(&mut r).expect("ring edge");
            steps.push(t);
            cur = g.transition(t).dst;
        }
        let path = Path::new(start, steps);
        let psi = parikh(&path);
        rep.cases += 1;
        match realize_parikh(&g, start, cur, &psi) {
            Ok(p) if parikh(&p) == psi && p.check(&g) == Ok(cur) && p.start == start => {}
            other => rep.fail(format!("path case {c}: {other:?}")),
        }
    }
    let mut made = 0;
    while made < imbalanced {
        let n = r.gen_range(2..=5);
        let g = random_strongly_connected(&mut r, n, 1, 1, n);
        let mut psi = ParikhImage::new();
        for t in 0..g.num_transitions() {
            psi.set(t, r.gen_range(0..=3));
        }
        let (s, e) = (r.gen_range(0..n), r.gen_range(0..n));
        let mut bal = vec![0i64; n];
        for (t, k) in psi.iter() {
            bal[g.transition(t).src] += k as i64;
            bal[g.transition(t).dst] -= k as i64;
        }
        if !psi.is_empty() {
            bal[s] -= 1;
            bal[e] += 1;
        }
        if bal.iter().all(|&b| b == 0) {
            continue;
        }
        made += 1;
        rep.cases += 1;
        if let Ok(p) = realize_parikh(&g, s, e, &psi) {
            rep.fail(format!("imbalanced image realized as {p:?}"));
        }
    }
    rep
}

fn random_lcgs(r: &mut impl Rng, dim: usize) -> Lcgs {
    let mut g = Vass::new(dim).expect("positive dimension");
    let mut cur = g.add_state("q0");
    let start = cur;
    let k = r.gen_range(0..=3);
    let mut segments = Vec::new();
    let mut cycles = Vec::new();
    let delta = |r: &mut dyn rand::RngCore| -> IntVec {
        (0..dim).map(|_| r.gen_range(-2..=2)).collect()
    };
    let segment = |g: &mut Vass, r: &mut dyn rand::RngCore, cur: &mut StateId| {
        let len = r.gen_range(0..=4);
        let mut seg = Vec::new();
        for _ in 0..len {
            let next = g.add_state(format!("q{}", g.num_states()));
            seg.push(g.add_transition(*cur, next, delta(r)).unwrap());
            *cur = next;
        }
        seg
    };
    for _ in 0..k {
        segments.push(segment(&mut g, r, &mut cur));
        let len = r.gen_range(1..=4);
        let mut cyc = Vec::new();
        let mut at = cur;
        for i in 0..len {
            let next = if i + 1 == len {
                cur
            } else {
                g.add_state(format!("q{}", g.num_states()))
            };
            cyc.push(g.add_transition(at, next, delta(r)).unwrap());
            at = next;
        }
        cycles.push(cyc);
    }
    segments.push(segment(&mut g, r, &mut cur));
    Lcgs::new(g, start, segments, cycles).expect("well-formed scheme")
}

/// Witness-system verdicts against enumeration of cycle counts.
pub fn witness_system_suite(cases: usize, max_count: u64, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("witness system");
    let mut r = rng(seed);
    for c in 0..cases {
        let dim = r.gen_range(1..=2);
        let l = random_lcgs(&mut r, dim);
        let a: IntVec = (0..dim).map(|_| r.gen_range(0..=5)).collect();
        let b: IntVec = (0..dim).map(|_| r.gen_range(0..=5)).collect();
        rep.cases += 1;
        let sys = build_witness_system(&l, &a, &b).expect("dimensions match");
        let got = solve_witness_system(&sys, DiophantineBudget::default());
        let start = Configuration {
            state: l.start,
            location: a.clone(),
        };
        let k = l.num_cycles();
        let mut counts = vec![1u64; k];
        let mut oracle = false;
        'enumerate: loop {
            let p = l.expand(&counts);
            if let Ok(end) = validate_walk(&l.base, &start, &p) {
                if end.location == b {
                    oracle = true;
                    break;
                }
            }
            let mut i = 0;
            loop {
                if i == k {
                    break 'enumerate;
                }
                counts[i] += 1;
                if counts[i] <= max_count {
                    break;
                }
                counts[i] = 1;
                i += 1;
            }
        }
        match got {
            WitnessOutcome::Budget => rep.skipped += 1,
            WitnessOutcome::Sat { counts, .. } if !oracle => {
                if counts.iter().all(|&x| x <= max_count) {
                    rep.fail(format!("case {c}: solver counts {counts:?} missed by enumeration"));
                } else {
                    rep.skipped += 1;
                }
            }
            WitnessOutcome::Unsat if oracle => {
                rep.fail(format!("case {c}: enumeration found a walk, solver says unsat"))
            }
            _ => {}
        }
    }
    rep
}

/// Breadth-first search for a circular walk at `root` raising every tracked
/// coordinate, with walks up to `max_len` steps and values up to `cap`.
pub fn bruteforce_pumpable(
    graph: &Vass,
    root: StateId,
    indices: &[usize],
    base: &[i64],
    max_len: usize,
    cap: i64,
) -> bool {
    let mut seen: HashSet<(StateId, Vec<i64>)> = HashSet::new();
    let mut queue = VecDeque::from([(root, base.to_vec(), 0usize)]);
    seen.insert((root, base.to_vec()));
    while let Some((s, v, len)) = queue.pop_front() {
        if len == max_len {
            continue;
        }
        for (_, t) in graph.out_edges(s) {
            let next: Vec<i64> = indices.iter().zip(&v).map(|(&i, x)| x + t.delta[i]).collect();
            if next.iter().any(|&x| x < 0 || x > cap) {
                continue;
            }
            if t.dst == root && next.iter().zip(base).all(|(x, b)| x > b) {
                return true;
            }
            if seen.insert((t.dst, next.clone())) {
                queue.push_back((t.dst, next, len + 1));
            }
        }
    }
    false
}

/// Pumpability verdicts against brute-force walk search.
pub fn pump_suite(cases: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("pumpability");
    let mut r = rng(seed);
    for c in 0..cases {
        let n = r.gen_range(1..=3);
        let dim = r.gen_range(1..=3);
        let extra = r.gen_range(0..=3);
        let g = random_strongly_connected(&mut r, n, dim, 2, extra);
        let entry = r.gen_range(0..n);
        let exit = r.gen_range(0..n);
        let cg = Cg::new(g, entry, exit).expect("strongly connected");
        let mut all: Vec<usize> = (0..dim).collect();
        all.shuffle(&mut r);
        let mut idx: Vec<usize> = all[..r.gen_range(1..=dim.min(2))].to_vec();
        idx.sort_unstable();
        let base: IntVec = (0..dim).map(|_| r.gen_range(0..=2)).collect();
        let dir = if r.gen_bool(0.5) {
            Direction::Forward
        } else {
            Direction::Backward
        };
        rep.cases += 1;
        let (graph, root) = match dir {
            Direction::Forward => (cg.graph.clone(), cg.entry),
            Direction::Backward => (cg.graph.reversed(), cg.exit),
        };
        let b: Vec<i64> = idx.iter().map(|&i| base[i]).collect();
        let oracle = bruteforce_pumpable(&graph, root, &idx, &b, 10_000, 200);
        match check_pumpable(&cg, dir, &idx, &base, PumpBudget::default()) {
            PumpOutcome::Budget => rep.skipped += 1,
            PumpOutcome::Pumpable(cert) => {
                let sign = if dir == Direction::Forward { 1 } else { -1 };
                let ok_disp = idx.iter().all(|&i| sign * cert.displacement[i] >= 1);
                if !oracle || !ok_disp {
                    rep.fail(format!("case {c}: pumpable but oracle {oracle}, cert {cert:?}"));
                }
            }
            PumpOutcome::NotPumpable { .. } if oracle => {
                rep.fail(format!("case {c}: oracle found a pumping cycle"))
            }
            PumpOutcome::NotPumpable { .. } => {}
        }
    }
    rep
}

/// Every simple cycle as a list of transitions, by depth-first search from
/// each state over larger-numbered states only.
pub fn enumerate_simple_cycles(g: &Vass) -> Vec<Vec<TransitionId>> {
    fn dfs(
        g: &Vass,
        root: StateId,
        at: StateId,
        on: &mut Vec<bool>,
        path: &mut Vec<TransitionId>,
        out: &mut Vec<Vec<TransitionId>>,
    ) {
        for (id, t) in g.out_edges(at) {
            if t.dst == root {
                path.push(id);
                out.push(path.clone());
                path.pop();
            } else if t.dst > root && !on[t.dst] {
                on[t.dst] = true;
                path.push(id);
                dfs(g, root, t.dst, on, path, out);
                path.pop();
                on[t.dst] = false;
            }
        }
    }
    let mut out = Vec::new();
    for root in 0..g.num_states() {
        let mut on = vec![false; g.num_states()];
        on[root] = true;
        dfs(g, root, root, &mut on, &mut Vec::new(), &mut out);
    }
    out
}

/// Cycle space and orthogonal indices against simple-cycle enumeration.
pub fn geometry_suite(cases: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("geometry");
    let mut r = rng(seed);
    for c in 0..cases {
        let n = r.gen_range(1..=6);
        let dim = r.gen_range(1..=4);
        let mut g = Vass::new(dim).unwrap();
        for s in 0..n {
            g.add_state(format!("s{s}"));
        }
        for _ in 0..r.gen_range(0..=2 * n + 2) {
            let delta: IntVec = (0..dim)
                .map(|_| if r.gen_bool(0.4) { 0 } else { r.gen_range(-2..=2) })
                .collect();
            g.add_transition(r.gen_range(0..n), r.gen_range(0..n), delta)
                .unwrap();
        }
        rep.cases += 1;
        let disp: Vec<Vec<i64>> = enumerate_simple_cycles(&g)
            .iter()
            .map(|cyc| {
                (0..dim)
                    .map(|i| cyc.iter().map(|&t| g.transition(t).delta[i]).sum())
                    .collect()
            })
            .collect();
        let want_dim = rank_of_rows(&disp);
        let want_orth: Vec<usize> = (0..dim).filter(|&i| disp.iter().all(|d| d[i] == 0)).collect();
        let space = geometry::cycle_space(&g);
        let got_orth = geometry::orthogonal_indices(&g);
        if space.dimension != want_dim
            || geometry::geometric_dimension(&g) != want_dim
            || got_orth != want_orth
            || !disp.iter().all(|d| space.contains(&IntVec::from(d.clone())))
        {
            rep.fail(format!(
                "case {c}: dimension {} vs {want_dim}, orthogonal {got_orth:?} vs {want_orth:?}",
                space.dimension
            ));
        }
    }
    rep
}

/// Checks a synthesized walk for one sequence; `None` if it is not normal.
pub fn synthesis_case(cgs: &Cgs, a: &IntVec, b: &IntVec) -> Option<Result<(), String>> {
    let NormalOutcome::Normal(cert) = is_normal(cgs, a, b, WitnessBudget::default()).ok()? else {
        return None;
    };
    let res = catch_unwind(AssertUnwindSafe(|| synthesize_witness(cgs, &cert)));
    Some(match res {
        Err(_) => Err("synthesis panicked".into()),
        Ok(w) => {
            let u = cgs.union_graph();
            let start = Configuration {
                state: u.graph.state(u.start).origin,
                location: a.clone(),
            };
            if !admits(cgs, &w.path) {
                Err("walk not admitted".into())
            } else if w.start != start || &w.end.location != b {
                Err("walk has the wrong endpoints".into())
            } else {
                Ok(())
            }
        }
    })
}

/// Random single-component sequences that turn out normal, each
/// synthesized and checked.
pub fn synthesis_suite(wanted: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("normal synthesis");
    let mut r = rng(seed);
    let mut tries = 0;
    while rep.cases < wanted && tries < 200 * wanted.max(1) {
        tries += 1;
        let n = r.gen_range(1..=3);
        let dim = r.gen_range(1..=2);
        let extra = r.gen_range(1..=4);
        let g = random_strongly_connected(&mut r, n, dim, 2, extra);
        let cg = Cg::new(g, r.gen_range(0..n), r.gen_range(0..n)).unwrap();
        let a: IntVec = (0..dim).map(|_| r.gen_range(0..=3)).collect();
        let b: IntVec = (0..dim).map(|_| r.gen_range(0..=3)).collect();
        let cgs = Cgs::single(cg).with_boundary(a.clone(), b.clone());
        if let Some(res) = synthesis_case(&cgs, &a, &b) {
            rep.cases += 1;
            if let Err(e) = res {
                rep.fail(format!("try {tries}: {e}"));
            }
        }
    }
    rep
}

/// Parameters of the oracle-agreement corpus, cycling through dimensions,
/// planted dimensions and state counts.
pub fn corpus_params(count: usize, seed: u64) -> Vec<GenParams> {
    (0..count as u64)
        .map(|k| {
            let dim = 1 + (k % 4) as usize;
            GenParams {
                dim,
                geom_dim: (((k / 4) % 4) as usize).min(dim),
                states: 1 + ((k / 16) % 4) as usize,
                norm: 2,
                max_entry: 3,
                seed: seed.wrapping_add(k),
            }
        })
        .collect()
}

pub fn corpus(count: usize, seed: u64) -> Vec<Instance> {
    corpus_params(count, seed).iter().map(generate).collect()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AgreementReport {
    pub instances: usize,
    pub decided: usize,
    pub oracle_decided: usize,
    pub both_decided: usize,
    pub disagreements: usize,
    /// Reachable verdicts on instances the oracle proved unreachable.
    pub never_wrong_violations: usize,
    pub invalid_walks: usize,
    pub decomposition_steps: usize,
    pub descent_violations: usize,
    /// Decompositions beyond `d - 2` along one component lineage.
    pub depth_violations: usize,
    pub refinement_steps: usize,
    pub refinement_violations: usize,
    pub first_problem: Option<String>,
}

/// Runs `decide` and the oracle on every instance and audits every recorded
/// refinement step.
pub fn oracle_agreement(
    instances: &[Instance],
    budget: &SearchBudget,
    bound: &OracleBound,
    samples: usize,
) -> AgreementReport {
    let mut rep = AgreementReport::default();
    for (k, inst) in instances.iter().enumerate() {
        rep.instances += 1;
        let s = config(inst.init.0, &inst.init.1);
        let t = config(inst.target.0, &inst.target.1);
        let res = decide(&inst.vass, s.state, &s.location, t.state, &t.location, budget);
        let oracle = match bfs_reach(&inst.vass, &s, &t, bound) {
            OracleReach::Reachable(_) => Some(true),
            OracleReach::NotWithinBound => match certified_unreach(&inst.vass, &s, &t, bound) {
                Certification::ProvenUnreachable => Some(false),
                Certification::Inconclusive => None,
            },
        };
        let problem = |rep: &mut AgreementReport, what: String| {
            rep.first_problem.get_or_insert(format!("instance {k}: {what}"));
        };
        if res.verdict.is_decided() {
            rep.decided += 1;
        }
        if oracle.is_some() {
            rep.oracle_decided += 1;
        }
        if let (Some(o), true) = (oracle, res.verdict.is_decided()) {
            rep.both_decided += 1;
            if o != res.verdict.is_reachable() {
                rep.disagreements += 1;
                problem(&mut rep, format!("decide {}, oracle {o}", res.verdict.name()));
            }
        }
        if let Verdict::Reachable { walk, .. } = &res.verdict {
            if oracle == Some(false) {
                rep.never_wrong_violations += 1;
            }
            // a walk of the input from the start configuration that ends
            // at the target is exactly what the input admits
            let end = validate_walk(&inst.vass, &s, &walk.path);
            if walk.path.start != s.state || (end.as_ref() != Ok(&t)) {
                rep.invalid_walks += 1;
                problem(&mut rep, "invalid walk".into());
            }
        }
        rep.depth_violations += res.stats.depth_violations;
        for (i, step) in res.steps.iter().enumerate() {
            rep.refinement_steps += 1;
            if step.kind.is_decomposition() {
                rep.decomposition_steps += 1;
                if !step.descends() {
                    rep.descent_violations += 1;
                    problem(&mut rep, format!("step {i} ({:?}) does not descend", step.kind));
                }
            }
            if !refines_sample_check(&step.child, &step.parent, samples, k as u64 ^ i as u64) {
                rep.refinement_violations += 1;
                problem(&mut rep, format!("step {i} ({:?}) admits an extra path", step.kind));
            }
        }
    }
    rep
}

/// All suites at a modest size, as run by the CLI.
pub fn desk_suites(seed: u64) -> Vec<SuiteReport> {
    let mut out = vec![
        hilbert_suite(60, seed),
        euler_suite(150, 60, seed),
        witness_system_suite(40, 12, seed),
        pump_suite(60, seed),
        geometry_suite(60, seed),
        synthesis_suite(15, seed),
    ];
    let inst = corpus(60, seed);
    let a = oracle_agreement(&inst, &SearchBudget::tiny(), &OracleBound::default(), 10);
    let mut s = SuiteReport::new("oracle agreement");
    s.cases = a.instances;
    s.skipped = a.instances - a.both_decided;
    s.failures = a.disagreements
        + a.never_wrong_violations
        + a.invalid_walks
        + a.descent_violations
        + a.refinement_violations;
    s.first_failure = a.first_problem;
    out.push(s);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_at_small_size() {
        for rep in [
            hilbert_suite(10, 1),
            euler_suite(20, 10, 1),
            witness_system_suite(10, 8, 1),
            pump_suite(10, 1),
            geometry_suite(10, 1),
            synthesis_suite(3, 1),
        ] {
            assert!(rep.passed(), "{rep:?}");
            assert!(rep.cases > 0, "{rep:?}");
        }
    }

    #[test]
    fn simple_cycles_of_two_loops() {
        let mut g = Vass::new(1).unwrap();
        let p = g.add_state("p");
        let q = g.add_state("q");
        g.add_transition(p, p, IntVec::from([1])).unwrap();
        g.add_transition(p, q, IntVec::from([1])).unwrap();
        g.add_transition(q, p, IntVec::from([1])).unwrap();
        assert_eq!(enumerate_simple_cycles(&g).len(), 2);
    }
}
