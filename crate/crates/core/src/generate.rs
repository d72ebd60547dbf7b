//! Random instances with a planted geometric dimension.
//!
//! Every transition gets displacement `φ(dst) - φ(src) + c`, with `φ` a
//! potential on states and `c` a small combination of `g` fixed vectors.
//! Around any cycle the potentials cancel, so cycle displacements lie in the
//! span of the planted vectors.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::format::Instance;
use crate::geometry;
use crate::model::{IntVec, StateId, Vass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    pub dim: usize,
    pub geom_dim: usize,
    pub states: usize,
    /// Bound on `‖T‖`.
    pub norm: i64,
    /// Bound on boundary entries.
    pub max_entry: i64,
    pub seed: u64,
}

fn rand_vec(rng: &mut impl Rng, dim: usize, r: i64) -> Vec<i64> {
    (0..dim).map(|_| rng.gen_range(-r..=r)).collect()
}

/// Draws an instance. Panics if `geom_dim > dim` or `norm < 1`.
pub fn generate(p: &GenParams) -> Instance {
    assert!(p.geom_dim <= p.dim && p.dim >= 1 && p.states >= 1 && p.norm >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let span: Vec<Vec<i64>> = loop {
        let cand: Vec<Vec<i64>> = (0..p.geom_dim).map(|_| rand_vec(&mut rng, p.dim, 1)).collect();
        if crate::diophantine::rank_of_rows(&cand) == p.geom_dim {
            break cand;
        }
    };
    let pot: Vec<Vec<i64>> = (0..p.states)
        .map(|_| rand_vec(&mut rng, p.dim, (p.norm / 2).max(1)))
        .collect();
    let mut vass = Vass::new(p.dim).expect("positive dimension");
    for s in 0..p.states {
        vass.add_state(format!("s{s}"));
    }
    let mut edges: Vec<(StateId, StateId)> = Vec::new();
    if rng.gen_bool(0.8) {
        let mut order: Vec<StateId> = (0..p.states).collect();
        order.shuffle(&mut rng);
        for k in 0..p.states {
            edges.push((order[k], order[(k + 1) % p.states]));
        }
    }
    let extra = rng.gen_range(p.geom_dim.max(1)..=p.states + p.geom_dim + 1);
    for _ in 0..extra {
        edges.push((rng.gen_range(0..p.states), rng.gen_range(0..p.states)));
    }
    for (src, dst) in edges {
        let delta = loop {
            let mut d: Vec<i64> = (0..p.dim).map(|i| pot[dst][i] - pot[src][i]).collect();
            for b in &span {
                let l = rng.gen_range(-1..=1i64);
                for i in 0..p.dim {
                    d[i] += l * b[i];
                }
            }
            if d.iter().all(|v| v.abs() <= p.norm) {
                break d;
            }
            // retry with a fresh combination, or fall back to the bare
            // potential difference clipped by a new draw
            if rng.gen_bool(0.2) {
                let z: Vec<i64> = (0..p.dim).map(|i| pot[dst][i] - pot[src][i]).collect();
                if z.iter().all(|v| v.abs() <= p.norm) {
                    break z;
                }
            }
        };
        vass.add_transition(src, dst, IntVec::from(delta))
            .expect("states exist");
    }
    assert!(
        geometry::geometric_dimension(&vass) <= p.geom_dim,
        "planted dimension holds"
    );
    let init = (
        rng.gen_range(0..p.states),
        IntVec::from((0..p.dim).map(|_| rng.gen_range(0..=p.max_entry)).collect::<Vec<_>>()),
    );
    let target = (
        rng.gen_range(0..p.states),
        IntVec::from((0..p.dim).map(|_| rng.gen_range(0..=p.max_entry)).collect::<Vec<_>>()),
    );
    Instance { vass, init, target }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_dimension() {
        for seed in 0..50 {
            let p = GenParams {
                dim: 4,
                geom_dim: 2,
                states: 3,
                norm: 2,
                max_entry: 3,
                seed,
            };
            let inst = generate(&p);
            assert!(geometry::geometric_dimension(&inst.vass) <= 2);
            assert!(inst.vass.norm() <= 2);
            assert_eq!(generate(&p), inst);
        }
    }

    #[test]
    fn planted_dimension_is_usually_attained() {
        let hits = (0..100)
            .filter(|&seed| {
                let p = GenParams {
                    dim: 4,
                    geom_dim: 2,
                    states: 3,
                    norm: 2,
                    max_entry: 3,
                    seed,
                };
                geometry::geometric_dimension(&generate(&p).vass) == 2
            })
            .count();
        assert!(hits >= 60, "{hits}");
    }
}
