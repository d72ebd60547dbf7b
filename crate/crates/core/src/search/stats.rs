use std::collections::BTreeMap;

use serde::Serialize;

use crate::refine::{RefinementStep, StepKind};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub nodes: usize,
    pub leaves: usize,
    pub max_depth: usize,
    pub steps_by_kind: BTreeMap<StepKind, usize>,
    pub max_cgs_size: usize,
    /// Some budget cut the search short.
    pub partial: bool,
    /// Decomposition steps whose new components did not drop in dimension.
    pub descent_violations: usize,
    /// Decomposition steps beyond the per-lineage limit.
    pub depth_violations: usize,
    pub memo_hits: usize,
    /// Audited refinement steps whose child admitted a sampled path the
    /// parent does not.
    pub audit_failures: usize,
}

/// Statistics of a single branch given by its trace.
pub fn tree_stats(trace: &[RefinementStep]) -> TreeStats {
    let mut s = TreeStats {
        nodes: trace.len() + 1,
        leaves: 1,
        max_depth: trace.len(),
        ..TreeStats::default()
    };
    for step in trace {
        *s.steps_by_kind.entry(step.kind).or_default() += 1;
        s.max_cgs_size = s.max_cgs_size.max(step.parent_size).max(step.child_size);
        if step.kind.is_decomposition() && !step.descends() {
            s.descent_violations += 1;
        }
    }
    s
}

impl TreeStats {
    /// Merges the statistics of a separately explored tree.
    pub fn absorb(&mut self, other: &TreeStats) {
        self.nodes += other.nodes;
        self.leaves += other.leaves;
        self.max_depth = self.max_depth.max(other.max_depth);
        for (k, v) in &other.steps_by_kind {
            *self.steps_by_kind.entry(*k).or_default() += v;
        }
        self.max_cgs_size = self.max_cgs_size.max(other.max_cgs_size);
        self.partial |= other.partial;
        self.descent_violations += other.descent_violations;
        self.depth_violations += other.depth_violations;
        self.memo_hits += other.memo_hits;
        self.audit_failures += other.audit_failures;
    }

    pub fn steps(&self, kind: StepKind) -> usize {
        self.steps_by_kind.get(&kind).copied().unwrap_or(0)
    }
}
