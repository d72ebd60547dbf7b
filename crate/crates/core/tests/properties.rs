use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vassreach::charsys::{CharSystem, Mode};
use vassreach::diophantine::{hilbert_basis, leq, solve, Bounded, DiophantineBudget, IntMatrix, LinearSystem};
use vassreach::generate::{generate, GenParams};
use vassreach::geometry;
use vassreach::model::{
    admits, delta_min, displacement, parikh, realize_parikh, validate_walk, Cg, Cgs, Configuration,
    Connector, IntVec, Path, Vass,
};
use vassreach::selftest::{bruteforce_pumpable, random_strongly_connected};
use vassreach::witness::{check_pumpable, Direction, PumpBudget, PumpOutcome};
use vassreach::{parse_instance, print_instance};

fn random_path(r: &mut impl Rng, g: &Vass, start: usize, len: usize) -> Path {
    let adj = g.adjacency();
    let mut cur = start;
    let mut steps = Vec::new();
    for _ in 0..len {
        let Some(&t) = adj[cur].choose(r) else { break };
        steps.push(t);
        cur = g.transition(t).dst;
    }
    Path::new(start, steps)
}

/// Extends `p` by a shortest path to `target`.
fn close(g: &Vass, mut p: Path, target: usize) -> Path {
    let from = p.end(g).unwrap();
    let mut prev: Vec<Option<usize>> = vec![None; g.num_states()];
    let mut queue = std::collections::VecDeque::from([from]);
    let mut seen = vec![false; g.num_states()];
    seen[from] = true;
    while let Some(s) = queue.pop_front() {
        for (id, t) in g.out_edges(s) {
            if !seen[t.dst] {
                seen[t.dst] = true;
                prev[t.dst] = Some(id);
                queue.push_back(t.dst);
            }
        }
    }
    let mut tail = Vec::new();
    let mut at = target;
    while at != from {
        let t = prev[at].expect("strongly connected");
        tail.push(t);
        at = g.transition(t).src;
    }
    tail.reverse();
    p.steps.extend(tail);
    p
}

fn graph(seed: u64, states: usize, dim: usize) -> (ChaCha8Rng, Vass) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let extra = r.gen_range(0..=states + 1);
    let g = random_strongly_connected(&mut r, states, dim, 2, extra);
    (r, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delta_min_bounds_every_prefix(seed in any::<u64>(), n in 1usize..5, dim in 1usize..4, len in 0usize..25) {
        let (mut r, g) = graph(seed, n, dim);
        let p = random_path(&mut r, &g, 0, len);
        let dmin = delta_min(&p, &g).unwrap();
        let total = displacement(&p, &g).unwrap();
        let mut prefix = IntVec::zeros(dim);
        for &t in &p.steps {
            prefix.add_assign(&g.transition(t).delta);
            prop_assert!(prefix.dominates(&dmin));
        }
        prop_assert_eq!(prefix, total);
    }

    #[test]
    fn walk_valid_iff_start_covers_the_dip(seed in any::<u64>(), n in 1usize..5, dim in 1usize..4, len in 0usize..25, a in prop::collection::vec(0i64..6, 3)) {
        let (mut r, g) = graph(seed, n, dim);
        let p = random_path(&mut r, &g, 0, len);
        let a = IntVec::from(a[..dim].to_vec());
        let dmin = delta_min(&p, &g).unwrap();
        let start = Configuration { state: 0, location: a.clone() };
        let mut low = a.clone();
        low.add_assign(&dmin);
        prop_assert_eq!(validate_walk(&g, &start, &p).is_ok(), low.is_nonneg());
    }

    #[test]
    fn parikh_round_trip(seed in any::<u64>(), n in 1usize..6, len in 0usize..40) {
        let (mut r, g) = graph(seed, n, 1);
        let start = r.gen_range(0..n);
        let p = random_path(&mut r, &g, start, len);
        let end = p.end(&g).unwrap();
        let q = realize_parikh(&g, start, end, &parikh(&p)).unwrap();
        prop_assert_eq!(parikh(&q), parikh(&p));
        prop_assert_eq!(q.end(&g).unwrap(), end);
    }

    #[test]
    fn hilbert_basis_is_an_antichain(rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..=3)) {
        let a = IntMatrix::from_rows(&rows);
        let Bounded::Done(basis) = hilbert_basis(&a, DiophantineBudget::default()) else {
            return Err(TestCaseError::fail("budget"));
        };
        for (i, u) in basis.iter().enumerate() {
            prop_assert!(u.iter().any(|&x| x != 0));
            prop_assert!(a.mul_vec(u).iter().all(|&x| x == 0));
            for v in &basis[i + 1..] {
                prop_assert!(!leq(u, v) && !leq(v, u));
            }
        }
    }

    #[test]
    fn solutions_decompose(rows in prop::collection::vec(prop::collection::vec(-2i64..=2, 3), 1..=2), w in prop::collection::vec(0i64..4, 3)) {
        // w solves A·x = A·w; it must be some minimal solution plus a
        // nonnegative combination of the homogeneous basis
        let a = IntMatrix::from_rows(&rows);
        let r = a.mul_vec(&w);
        let Bounded::Done(sols) = solve(&LinearSystem::new(a, r), DiophantineBudget::default()) else {
            return Err(TestCaseError::fail("budget"));
        };
        fn reachable(rest: Vec<i64>, basis: &[Vec<i64>]) -> bool {
            if rest.iter().all(|&x| x == 0) {
                return true;
            }
            basis.iter().any(|o| {
                leq(o, &rest) && reachable(rest.iter().zip(o).map(|(x, y)| x - y).collect(), basis)
            })
        }
        let ok = sols.minimal.iter().any(|m| {
            leq(m, &w) && reachable(w.iter().zip(m).map(|(x, y)| x - y).collect(), &sols.basis)
        });
        prop_assert!(ok);
    }

    #[test]
    fn traversals_satisfy_the_char_system(seed in any::<u64>(), n in 1usize..4, dim in 1usize..3, len in 0usize..20) {
        let (mut r, g) = graph(seed, n, dim);
        let entry = r.gen_range(0..n);
        let p = random_path(&mut r, &g, entry, len);
        let exit = p.end(&g).unwrap();
        let mut a = IntVec::zeros(dim);
        let dmin = delta_min(&p, &g).unwrap();
        for i in 0..dim {
            a.set(i, (-dmin[i]).max(0));
        }
        let start = Configuration { state: entry, location: a.clone() };
        let end = validate_walk(&g, &start, &p).unwrap();
        let cgs = Cgs::single(Cg::new(g.clone(), entry, exit).unwrap());
        let covers = (0..g.num_transitions()).all(|t| p.steps.contains(&t));
        for mode in [Mode::Relaxed, Mode::Strict] {
            if mode == Mode::Strict && !covers {
                continue;
            }
            let sys = CharSystem::build(&cgs, Some((&a, &end.location)), mode).unwrap();
            let l = sys.layout[0];
            let mut raw = vec![0i64; sys.num_vars()];
            for i in 0..dim {
                raw[l.entry + i] = a[i];
                raw[l.exit + i] = end.location[i];
            }
            for (t, c) in parikh(&p).iter() {
                raw[l.edges + t] = c as i64;
            }
            prop_assert!(sys.system.is_solution(&raw), "{:?}", mode);
        }
    }

    #[test]
    fn subgraphs_do_not_gain_dimension(seed in any::<u64>(), n in 1usize..6, dim in 1usize..4) {
        let (mut r, g) = graph(seed, n, dim);
        let keep: Vec<bool> = (0..g.num_transitions()).map(|_| r.gen_bool(0.6)).collect();
        let mut h = Vass::new(dim).unwrap();
        for s in g.states() {
            h.add_state(s.name.clone());
        }
        for (t, tr) in g.transitions().iter().enumerate() {
            if keep[t] {
                h.add_transition(tr.src, tr.dst, tr.delta.clone()).unwrap();
            }
        }
        prop_assert!(geometry::geometric_dimension(&h) <= geometry::geometric_dimension(&g));
        let space = geometry::cycle_space(&g);
        for i in 0..dim {
            let zero = space.basis.iter().all(|b| b[i] == 0);
            prop_assert_eq!(zero, geometry::orthogonal_indices(&g).contains(&i));
        }
    }

    #[test]
    fn generated_instances_round_trip(dim in 1usize..5, g in 0usize..4, states in 1usize..5, seed in any::<u64>()) {
        let p = GenParams { dim, geom_dim: g.min(dim), states, norm: 2, max_entry: 3, seed };
        let inst = generate(&p);
        prop_assert!(geometry::geometric_dimension(&inst.vass) <= p.geom_dim);
        prop_assert!(inst.vass.norm() <= 2);
        let text = print_instance(&inst);
        prop_assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn factorized_paths_are_admitted(seed in any::<u64>(), len1 in 0usize..8, len2 in 0usize..8) {
        let (mut r, g1) = graph(seed, 2, 1);
        let g2 = random_strongly_connected(&mut r, 2, 1, 2, 1);
        let cgs = Cgs::new(
            vec![Cg::new(g1.clone(), 0, 0).unwrap(), Cg::new(g2.clone(), 0, 1).unwrap()],
            vec![Connector { delta: IntVec::from([0]), label: 0 }],
        ).unwrap();
        // the same walk over the union graph, projected to labels
        let u = cgs.union_graph();
        let p1 = close(&g1, random_path(&mut r, &g1, 0, len1), 0);
        let p2 = close(&g2, random_path(&mut r, &g2, 0, len2), 1);
        let mut steps: Vec<usize> = p1.steps.iter().map(|t| t + u.trans_offset[0]).collect();
        steps.push(u.connector_ids[0]);
        steps.extend(p2.steps.iter().map(|t| t + u.trans_offset[1]));
        let projected = u.project(&Path::new(u.start, steps));
        prop_assert!(admits(&cgs, &projected));
    }

    #[test]
    fn not_pumpable_bound_holds_on_random_walks(seed in any::<u64>(), n in 1usize..4, dim in 1usize..3) {
        let (mut r, g) = graph(seed, n, dim);
        let cg = Cg::new(g.clone(), 0, 0).unwrap();
        let idx: Vec<usize> = (0..dim).collect();
        let base: IntVec = (0..dim).map(|_| r.gen_range(0..=2)).collect();
        match check_pumpable(&cg, Direction::Forward, &idx, &base, PumpBudget::default()) {
            PumpOutcome::NotPumpable { index, bound: Some(b) } => {
                for _ in 0..20 {
                    let mut cur = 0;
                    let mut v = base.clone();
                    for _ in 0..50 {
                        let outs: Vec<_> = g.out_edges(cur).collect();
                        let Some((_, t)) = outs.choose(&mut r) else { break };
                        let mut next = v.clone();
                        next.add_assign(&t.delta);
                        if !next.is_nonneg() {
                            break;
                        }
                        v = next;
                        cur = t.dst;
                        prop_assert!(v[index] <= b);
                    }
                }
                let bi: Vec<i64> = idx.iter().map(|&i| base[i]).collect();
                prop_assert!(!bruteforce_pumpable(&g, 0, &idx, &bi, 2000, 60));
            }
            PumpOutcome::Pumpable(c) => {
                prop_assert!(c.displacement.iter().all(|&d| d >= 1));
            }
            _ => {}
        }
    }
}
