//! Explicit walks for normal sequences.
//!
//! With `n` the certified minimal solution and `O` the homogeneous aggregate,
//! the walk realizes `s = n + K·O` for one global `K`. A pumpable component
//! with entry `p`, exit `q` and pumping cycles `Op`, `Oq` is traversed as
//!
//! ```text
//! Op^N · π · Oψ^N · Oq^N
//! ```
//!
//! where `π` is an Euler path of `Ψ^n`, `ψ = C·Ψ^O - Im(Op) - Im(Oq)` is a
//! positive circulation realized as an Euler circuit at `q`, and `K = N·C`.
//! After `Op^N` every non-orthogonal coordinate is at least `N`, and the same
//! holds before `Oq^N` by the symmetric argument, so `N ≥ |π|·‖T‖ + dip(Oψ)`
//! keeps the middle part nonnegative. `C` is also at least
//! `(|Op| + |Oq|)·‖T‖ + 1` so that unbounded coordinates absorb the pumping
//! cycles.

use num_integer::Integer;

use crate::model::{
    admits, delta_min_of, realize_parikh, validate_walk, Cg, Cgs, Configuration, IntVec,
    ParikhImage, Path, TransitionId, Walk,
};

use super::normal::{ComponentVerdict, NormalityCertificate};

/// Largest drop below the starting value along `steps`, per coordinate.
fn dip(cg: &Cg, steps: &[TransitionId]) -> i64 {
    let m = delta_min_of(cg.dim(), steps.iter().map(|&t| &cg.graph.transition(t).delta));
    m.iter().map(|&v| -v).max().unwrap_or(0).max(0)
}

fn image(steps: &[TransitionId], num_edges: usize) -> Vec<i64> {
    let mut im = vec![0i64; num_edges];
    for &t in steps {
        im[t] += 1;
    }
    im
}

fn to_parikh(counts: &[i64]) -> ParikhImage {
    counts
        .iter()
        .enumerate()
        .map(|(t, &c)| (t, u64::try_from(c).expect("nonnegative count")))
        .collect()
}

struct Pumped {
    c: i64,
    n_min: i64,
    pi: Path,
    psi_cycle: Path,
    up: Vec<TransitionId>,
    down: Vec<TransitionId>,
}

fn plan(cg: &Cg, n: &[i64], o: &[i64], up: &[TransitionId], down: &[TransitionId]) -> Pumped {
    let e = cg.graph.num_transitions();
    let norm = cg.graph.norm();
    let (ip, iq) = (image(up, e), image(down, e));
    let mut c = (up.len() + down.len()) as i64 * norm + 1;
    for t in 0..e {
        assert!(o[t] > 0, "pumpable component has only unbounded edges");
        c = c.max(Integer::div_floor(&(ip[t] + iq[t]), &o[t]) + 1);
    }
    let psi: Vec<i64> = (0..e).map(|t| c * o[t] - ip[t] - iq[t]).collect();
    let psi_cycle = realize_parikh(&cg.graph, cg.exit, cg.exit, &to_parikh(&psi))
        .expect("positive circulation on a strongly connected graph");
    let pi = realize_parikh(&cg.graph, cg.entry, cg.exit, &to_parikh(n))
        .expect("solution counts form an Euler path");
    let n_min = (pi.len() as i64 * norm + dip(cg, &psi_cycle.steps)).max(1);
    Pumped {
        c,
        n_min,
        pi,
        psi_cycle,
        up: up.to_vec(),
        down: down.to_vec(),
    }
}

/// Builds and validates a walk admitted by `cgs` from the certificate. Panics
/// if the constructed walk is invalid, which would be a bug.
pub fn synthesize_witness(cgs: &Cgs, cert: &NormalityCertificate) -> Walk {
    let n = &cert.solution;
    let o = &cert.aggregate;
    let plans: Vec<Option<Pumped>> = cgs
        .components
        .iter()
        .zip(&cert.components)
        .enumerate()
        .map(|(j, (cg, v))| match v {
            ComponentVerdict::Linear => None,
            ComponentVerdict::Pumpable { forward, backward } => Some(plan(
                cg,
                &n.counts[j],
                &o.counts[j],
                &forward.cycle.steps,
                &backward.cycle.steps,
            )),
        })
        .collect();

    let mut k: i64 = 0;
    if plans.iter().any(Option::is_some) {
        let l = plans
            .iter()
            .flatten()
            .fold(1i64, |acc, p| Integer::lcm(&acc, &p.c));
        let t = plans
            .iter()
            .flatten()
            .map(|p| Integer::div_ceil(&(p.n_min * p.c), &l))
            .max()
            .unwrap_or(1);
        k = l.checked_mul(t).expect("pumping exponent fits in i64");
    }

    let union = cgs.union_graph();
    let mut steps: Vec<TransitionId> = Vec::new();
    for (j, cg) in cgs.components.iter().enumerate() {
        if j > 0 {
            steps.push(union.connector_ids[j - 1]);
        }
        let off = union.trans_offset[j];
        let local: Vec<TransitionId> = match &plans[j] {
            Some(p) => {
                let reps = (k / p.c) as usize;
                let mut v = Vec::new();
                for _ in 0..reps {
                    v.extend_from_slice(&p.up);
                }
                v.extend_from_slice(&p.pi.steps);
                for _ in 0..reps {
                    v.extend_from_slice(&p.psi_cycle.steps);
                }
                for _ in 0..reps {
                    v.extend_from_slice(&p.down);
                }
                v
            }
            None if cg.is_trivial() => Vec::new(),
            None => {
                let laps = (0..cg.graph.num_transitions())
                    .map(|t| n.counts[j][t] + k * o.counts[j][t])
                    .min()
                    .expect("circular component has transitions");
                let lap = cg.lap_from(cg.entry).expect("linear component is circular");
                let mut v = Vec::new();
                for _ in 0..laps {
                    v.extend_from_slice(&lap);
                }
                v.extend(cg.entry_to_exit().expect("circular"));
                v
            }
        };
        steps.extend(local.into_iter().map(|t| t + off));
    }
    let a: IntVec = n.entries[0].clone();
    let upath = Path::new(union.start, steps);
    let ustart = Configuration {
        state: union.start,
        location: a.clone(),
    };
    let uend = match validate_walk(&union.graph, &ustart, &upath) {
        Ok(end) => end,
        Err(e) => panic!("synthesized walk is invalid: {e}"),
    };
    let b = n.exits.last().unwrap();
    assert_eq!(&uend.location, b, "synthesized walk reaches the target");
    assert_eq!(uend.state, union.end, "synthesized walk ends at the exit");
    let path = union.project(&upath);
    assert!(admits(cgs, &path), "synthesized walk is admitted");
    Walk {
        start: Configuration {
            state: path.start,
            location: a,
        },
        end: Configuration {
            state: union.graph.state(uend.state).origin,
            location: uend.location,
        },
        path,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Connector, Vass};
    use crate::witness::{is_normal, NormalOutcome, WitnessBudget};

    fn normal_walk(cgs: &Cgs, a: &[i64], b: &[i64]) -> Walk {
        let (a, b) = (IntVec::from(a.to_vec()), IntVec::from(b.to_vec()));
        match is_normal(cgs, &a, &b, WitnessBudget::default()).unwrap() {
            NormalOutcome::Normal(cert) => synthesize_witness(cgs, &cert),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trivial_chain() {
        let cgs = Cgs::new(
            vec![Cg::trivial(1, "p", 0), Cg::trivial(1, "q", 1)],
            vec![Connector {
                delta: IntVec::from([2]),
                label: 7,
            }],
        )
        .unwrap();
        let w = normal_walk(&cgs, &[1], &[3]);
        assert_eq!(w.path.steps, vec![7]);
    }

    #[test]
    fn plus_minus_loops() {
        let mut g = Vass::new(1).unwrap();
        let p = g.add_state("p");
        g.add_transition(p, p, IntVec::from([1])).unwrap();
        g.add_transition(p, p, IntVec::from([-1])).unwrap();
        let cgs = Cgs::single(Cg::new(g, p, p).unwrap());
        let w = normal_walk(&cgs, &[0], &[0]);
        assert!(!w.path.is_empty());
        assert_eq!(w.end.location, IntVec::from([0]));
    }

    #[test]
    fn naive_order_would_dip() {
        // two states; the solution path p -> q -> p uses (-2, 1) first,
        // which is impossible from (0, 0) without pumping first
        let mut g = Vass::new(2).unwrap();
        let p = g.add_state("p");
        let q = g.add_state("q");
        g.add_transition(p, q, IntVec::from([-2, 1])).unwrap();
        g.add_transition(q, p, IntVec::from([1, -2])).unwrap();
        g.add_transition(p, p, IntVec::from([1, 1])).unwrap();
        g.add_transition(p, p, IntVec::from([-1, -1])).unwrap();
        let cgs = Cgs::single(Cg::new(g, p, p).unwrap());
        let w = normal_walk(&cgs, &[0, 0], &[0, 0]);
        assert_eq!(w.end.location, IntVec::from([0, 0]));
    }

    #[test]
    fn circular_component_laps() {
        let mut g = Vass::new(1).unwrap();
        let p = g.add_state("p");
        let q = g.add_state("q");
        g.add_transition(p, q, IntVec::from([1])).unwrap();
        g.add_transition(q, p, IntVec::from([0])).unwrap();
        let cgs = Cgs::single(Cg::new(g, p, q).unwrap());
        let w = normal_walk(&cgs, &[0], &[3]);
        assert_eq!(w.path.len(), 5);
    }
}
