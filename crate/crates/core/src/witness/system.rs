//! Witness systems of linear path schemes: linear constraints on cycle
//! counts that hold exactly when the expanded path is a walk.

use serde::{Deserialize, Serialize};

use crate::diophantine::{self, Bounded, DiophantineBudget, IntMatrix, LinearSystem};
use crate::model::{delta_min_of, validate_walk, Configuration, IntVec, Lcgs, Walk};

use super::WitnessError;

/// `Σ coefs[l]·x_l ≥ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Inequality {
    pub coefs: Vec<i64>,
    pub rhs: i64,
}

/// Constraints contributed by one cycle: the skeleton segment in front of
/// it stays nonnegative, and so do its first and its last lap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleGroups {
    pub skeleton: Vec<Inequality>,
    pub first_lap: Vec<Inequality>,
    pub last_lap: Vec<Inequality>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSystem {
    pub lcgs: Lcgs,
    pub a: IntVec,
    pub b: IntVec,
    pub groups: Vec<CycleGroups>,
    /// Nonnegativity of the segment after the last cycle.
    pub tail: Vec<Inequality>,
    /// `Σ x_l·Δ(O_l) = b - a - Δ(skeleton)`, one row per coordinate.
    pub balance: Vec<(Vec<i64>, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessOutcome {
    Sat { counts: Vec<u64>, walk: Walk },
    Unsat,
    Budget,
}

/// An affine expression `c + Σ coefs[l]·x_l` per coordinate.
#[derive(Clone)]
struct Affine {
    constant: IntVec,
    coefs: Vec<IntVec>,
}

impl Affine {
    /// `self + delta_min ≥ 0` as one inequality per coordinate.
    fn nonneg_after(&self, dmin: &IntVec) -> Vec<Inequality> {
        (0..dmin.dim())
            .map(|i| Inequality {
                coefs: self.coefs.iter().map(|c| c[i]).collect(),
                rhs: -(self.constant[i] + dmin[i]),
            })
            .collect()
    }
}

pub fn build_witness_system(
    lcgs: &Lcgs,
    a: &IntVec,
    b: &IntVec,
) -> Result<WitnessSystem, WitnessError> {
    let dim = lcgs.dim();
    for v in [a, b] {
        if v.dim() != dim {
            return Err(WitnessError::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
    }
    let k = lcgs.num_cycles();
    let deltas = |steps: &[usize]| -> (IntVec, IntVec) {
        let ds: Vec<&IntVec> = steps.iter().map(|&t| &lcgs.base.transition(t).delta).collect();
        let mut total = IntVec::zeros(dim);
        for d in &ds {
            total.add_assign(d);
        }
        (total, delta_min_of(dim, ds))
    };
    let mut pos = Affine {
        constant: a.clone(),
        coefs: vec![IntVec::zeros(dim); k],
    };
    let mut groups = Vec::with_capacity(k);
    for l in 0..k {
        let seg = &lcgs.segments[l];
        let (dseg, mseg) = deltas(seg);
        let skeleton = if seg.is_empty() {
            Vec::new()
        } else {
            pos.nonneg_after(&mseg)
        };
        pos.constant.add_assign(&dseg);
        let (dcyc, mcyc) = deltas(&lcgs.cycles[l]);
        let first_lap = pos.nonneg_after(&mcyc);
        // last lap starts after x_l - 1 laps
        let mut last = pos.clone();
        last.constant.add_assign(&-&dcyc);
        last.coefs[l] = dcyc.clone();
        let last_lap = last.nonneg_after(&mcyc);
        groups.push(CycleGroups {
            skeleton,
            first_lap,
            last_lap,
        });
        pos.coefs[l] = dcyc;
    }
    let tail_seg = &lcgs.segments[k];
    let (dtail, mtail) = deltas(tail_seg);
    let tail = if tail_seg.is_empty() {
        Vec::new()
    } else {
        pos.nonneg_after(&mtail)
    };
    pos.constant.add_assign(&dtail);
    let balance = (0..dim)
        .map(|i| (pos.coefs.iter().map(|c| c[i]).collect(), b[i] - pos.constant[i]))
        .collect();
    Ok(WitnessSystem {
        lcgs: lcgs.clone(),
        a: a.clone(),
        b: b.clone(),
        groups,
        tail,
        balance,
    })
}

impl WitnessSystem {
    pub fn inequalities(&self) -> impl Iterator<Item = &Inequality> {
        self.groups
            .iter()
            .flat_map(|g| g.skeleton.iter().chain(&g.first_lap).chain(&g.last_lap))
            .chain(&self.tail)
    }

    /// Whether the counts (each at least 1) satisfy every constraint.
    pub fn holds(&self, counts: &[u64]) -> bool {
        let x: Vec<i64> = counts.iter().map(|&c| c as i64).collect();
        let dot = |c: &[i64]| -> i64 { c.iter().zip(&x).map(|(a, b)| a * b).sum() };
        x.iter().all(|&v| v >= 1)
            && self.inequalities().all(|q| dot(&q.coefs) >= q.rhs)
            && self.balance.iter().all(|(c, r)| dot(c) == *r)
    }

    /// Diophantine form: cycle counts (at least 1) followed by one slack per
    /// distinct nonconstant inequality. `None` when a constant inequality
    /// already fails.
    pub fn to_linear_system(&self) -> Option<LinearSystem> {
        let k = self.lcgs.num_cycles();
        let mut ineqs: Vec<&Inequality> = Vec::new();
        for q in self.inequalities() {
            if q.coefs.iter().all(|&c| c == 0) {
                if q.rhs > 0 {
                    return None;
                }
            } else if q.coefs.iter().all(|&c| c >= 0) && q.coefs.iter().sum::<i64>() >= q.rhs {
                // implied by x ≥ 1
            } else if !ineqs.contains(&q) {
                ineqs.push(q);
            }
        }
        let nvars = k + ineqs.len();
        let mut a = IntMatrix::zeros(0, nvars);
        let mut rhs = Vec::new();
        for (c, r) in &self.balance {
            let mut row = c.clone();
            row.resize(nvars, 0);
            a.push_row(&row);
            rhs.push(*r);
        }
        for (s, q) in ineqs.iter().enumerate() {
            let mut row = q.coefs.clone();
            row.resize(nvars, 0);
            row[k + s] = -1;
            a.push_row(&row);
            rhs.push(q.rhs);
        }
        let mut lower = vec![0; nvars];
        lower[..k].iter_mut().for_each(|l| *l = 1);
        Some(LinearSystem::new(a, rhs).with_lower(lower))
    }

    /// Every minimal tuple of cycle counts, or `None` on budget exhaustion.
    pub fn minimal_counts(&self, budget: DiophantineBudget) -> Bounded<Vec<Vec<u64>>> {
        let k = self.lcgs.num_cycles();
        if k == 0 {
            return Bounded::Done(if self.holds(&[]) {
                vec![Vec::new()]
            } else {
                Vec::new()
            });
        }
        let Some(sys) = self.to_linear_system() else {
            return Bounded::Done(Vec::new());
        };
        diophantine::solve(&sys, budget).map(|s| {
            let mut out: Vec<Vec<u64>> = s
                .minimal
                .iter()
                .map(|m| m[..k].iter().map(|&v| v as u64).collect())
                .collect();
            out.sort_by_key(|c| (c.iter().copied().max(), c.clone()));
            out.dedup();
            out
        })
    }
}

/// Solves the system and expands the smallest solution into a validated
/// walk.
pub fn solve_witness_system(sys: &WitnessSystem, budget: DiophantineBudget) -> WitnessOutcome {
    let counts = match sys.minimal_counts(budget) {
        Bounded::Budget => return WitnessOutcome::Budget,
        Bounded::Done(c) => c,
    };
    let Some(counts) = counts.into_iter().next() else {
        return WitnessOutcome::Unsat;
    };
    let path = sys.lcgs.expand(&counts);
    let start = Configuration {
        state: sys.lcgs.start,
        location: sys.a.clone(),
    };
    let end = validate_walk(&sys.lcgs.base, &start, &path)
        .expect("witness system solution expands to a walk");
    assert_eq!(end.location, sys.b, "witness system solution reaches the target");
    WitnessOutcome::Sat {
        counts,
        walk: Walk { start, path, end },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vass;

    fn one_loop(d: i64) -> Lcgs {
        let mut v = Vass::new(1).unwrap();
        let p = v.add_state("p");
        v.add_transition(p, p, IntVec::from([d])).unwrap();
        Lcgs::new(v, p, vec![vec![], vec![]], vec![vec![0]]).unwrap()
    }

    fn b() -> DiophantineBudget {
        DiophantineBudget::default()
    }

    #[test]
    fn skeleton_only() {
        let mut v = Vass::new(1).unwrap();
        let p = v.add_state("p");
        let q = v.add_state("q");
        v.add_transition(p, q, IntVec::from([-1])).unwrap();
        let l = Lcgs::new(v, p, vec![vec![0]], vec![]).unwrap();
        let sys = build_witness_system(&l, &IntVec::from([1]), &IntVec::from([0])).unwrap();
        assert!(matches!(solve_witness_system(&sys, b()), WitnessOutcome::Sat { .. }));
        let sys = build_witness_system(&l, &IntVec::from([0]), &IntVec::from([-1])).unwrap();
        assert_eq!(solve_witness_system(&sys, b()), WitnessOutcome::Unsat);
    }

    #[test]
    fn single_increment_loop() {
        let sys = build_witness_system(&one_loop(1), &IntVec::from([0]), &IntVec::from([3])).unwrap();
        match solve_witness_system(&sys, b()) {
            WitnessOutcome::Sat { counts, walk } => {
                assert_eq!(counts, vec![3]);
                assert_eq!(walk.path.len(), 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decrement_cannot_raise() {
        let sys = build_witness_system(&one_loop(-1), &IntVec::from([0]), &IntVec::from([1])).unwrap();
        assert_eq!(solve_witness_system(&sys, b()), WitnessOutcome::Unsat);
    }

    #[test]
    fn last_lap_matters() {
        // cycle -2 then +1: from 3 the laps start at 3, 2, 1; the third dips below 0
        let mut v = Vass::new(1).unwrap();
        let p = v.add_state("p");
        let q = v.add_state("q");
        v.add_transition(p, q, IntVec::from([-2])).unwrap();
        v.add_transition(q, p, IntVec::from([1])).unwrap();
        let l = Lcgs::new(v, p, vec![vec![], vec![]], vec![vec![0, 1]]).unwrap();
        let sys = build_witness_system(&l, &IntVec::from([3]), &IntVec::from([1])).unwrap();
        assert_eq!(solve_witness_system(&sys, b()), WitnessOutcome::Sat {
            counts: vec![2],
            walk: match solve_witness_system(&sys, b()) {
                WitnessOutcome::Sat { walk, .. } => walk,
                _ => unreachable!(),
            },
        });
        let sys = build_witness_system(&l, &IntVec::from([3]), &IntVec::from([0])).unwrap();
        assert_eq!(solve_witness_system(&sys, b()), WitnessOutcome::Unsat);
    }
}
