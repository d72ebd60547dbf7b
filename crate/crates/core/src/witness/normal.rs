//! Normality: every component is linear, or has only unbounded edges and
//! can be pumped up from its entry and down into its exit.

use serde::{Deserialize, Serialize};

use crate::charsys::{build_char_system, BoundednessReport, CharSolution};
use crate::diophantine::{Bounded, DiophantineBudget};
use crate::geometry;
use crate::model::{Cgs, IntVec};

use super::pump::{check_pumpable, Direction, PumpBudget, PumpCertificate, PumpOutcome};
use super::WitnessError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessBudget {
    pub diophantine: DiophantineBudget,
    pub pump: PumpBudget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentVerdict {
    /// Trivial or a single simple cycle.
    Linear,
    Pumpable {
        forward: PumpCertificate,
        backward: PumpCertificate,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalityCertificate {
    /// The minimal solution the certificate is relative to.
    pub solution: CharSolution,
    /// Sum of the homogeneous basis.
    pub aggregate: CharSolution,
    pub components: Vec<ComponentVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NotNormalReason {
    /// Not linear and some edge is bounded.
    BoundedNonLinear,
    NotPumpable {
        direction: Direction,
        index: usize,
        bound: Option<i64>,
    },
    /// An orthogonal coordinate goes negative at some state whatever the
    /// path.
    OrthogonalNegative { index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalAt {
    Normal(NormalityCertificate),
    NotNormal {
        component: usize,
        reason: NotNormalReason,
    },
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalOutcome {
    Normal(NormalityCertificate),
    /// Failure at the first minimal solution.
    NotNormal {
        component: usize,
        reason: NotNormalReason,
    },
    Unsat,
    Budget,
}

/// Checks normality relative to the minimal solution `n`.
pub fn check_normal_at(
    cgs: &Cgs,
    report: &BoundednessReport,
    n: &CharSolution,
    budget: PumpBudget,
) -> NormalAt {
    let mut verdicts = Vec::with_capacity(cgs.len());
    for (j, c) in cgs.components.iter().enumerate() {
        if c.is_linear() {
            verdicts.push(ComponentVerdict::Linear);
            continue;
        }
        if report.component_bounded[j] {
            return NormalAt::NotNormal {
                component: j,
                reason: NotNormalReason::BoundedNonLinear,
            };
        }
        for i in geometry::orthogonal_indices(&c.graph) {
            let off = geometry::orthogonal_offsets(&c.graph, c.entry, i)
                .expect("orthogonal index has consistent offsets");
            if n.entries[j][i] + off.iter().min().copied().unwrap_or(0) < 0 {
                return NormalAt::NotNormal {
                    component: j,
                    reason: NotNormalReason::OrthogonalNegative { index: i },
                };
            }
        }
        let mut certs = Vec::with_capacity(2);
        for (dir, indices, base) in [
            (Direction::Forward, &report.entry_tracked[j], &n.entries[j]),
            (Direction::Backward, &report.exit_tracked[j], &n.exits[j]),
        ] {
            match check_pumpable(c, dir, indices, base, budget) {
                PumpOutcome::Pumpable(cert) => certs.push(cert),
                PumpOutcome::Budget => return NormalAt::Budget,
                PumpOutcome::NotPumpable { index, bound } => {
                    return NormalAt::NotNormal {
                        component: j,
                        reason: NotNormalReason::NotPumpable {
                            direction: dir,
                            index,
                            bound,
                        },
                    }
                }
            }
        }
        let backward = certs.pop().unwrap();
        let forward = certs.pop().unwrap();
        verdicts.push(ComponentVerdict::Pumpable { forward, backward });
    }
    NormalAt::Normal(NormalityCertificate {
        solution: n.clone(),
        aggregate: report.aggregate.clone(),
        components: verdicts,
    })
}

/// Tries every minimal solution of the strict characteristic system.
pub fn is_normal(
    cgs: &Cgs,
    a: &IntVec,
    b: &IntVec,
    budget: WitnessBudget,
) -> Result<NormalOutcome, WitnessError> {
    let sys = build_char_system(cgs, a, b)?;
    let Bounded::Done(sols) = sys.solve(budget.diophantine) else {
        return Ok(NormalOutcome::Budget);
    };
    let report = BoundednessReport::from_basis(cgs, &sys, &sols.basis);
    let mut first_failure = None;
    let mut saw_budget = false;
    for m in &sols.minimal {
        let n = sys.decode(m);
        match check_normal_at(cgs, &report, &n, budget.pump) {
            NormalAt::Normal(cert) => return Ok(NormalOutcome::Normal(cert)),
            NormalAt::Budget => saw_budget = true,
            NormalAt::NotNormal { component, reason } => {
                first_failure.get_or_insert((component, reason));
            }
        }
    }
    Ok(match first_failure {
        _ if sols.minimal.is_empty() => NormalOutcome::Unsat,
        _ if saw_budget => NormalOutcome::Budget,
        Some((component, reason)) => NormalOutcome::NotNormal { component, reason },
        None => unreachable!("a nonempty solution set yields a verdict"),
    })
}
