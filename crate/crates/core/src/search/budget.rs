use serde::{Deserialize, Serialize};

use crate::diophantine::DiophantineBudget;
use crate::refine::TwoDimBudget;
use crate::witness::PumpBudget;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_nodes: usize,
    pub max_cgs_size: usize,
    pub max_depth: usize,
    pub diophantine: DiophantineBudget,
    pub pump: PumpBudget,
    pub two_dim: TwoDimBudget,
    /// Cap on supports, linearizations and arrangements at one node.
    pub max_branches: usize,
    /// Largest coordinate bound accepted for the ridge construction.
    pub max_ridge: i64,
    /// Sampled paths per refinement step for the in-process soundness
    /// audit; 0 turns the audit off.
    pub audit_samples: usize,
    /// Seeds the audit sampler.
    pub seed: u64,
}

impl SearchBudget {
    pub fn tiny() -> Self {
        SearchBudget {
            max_nodes: 60,
            max_cgs_size: 120,
            max_depth: 12,
            diophantine: DiophantineBudget { max_nodes: 20_000 },
            pump: PumpBudget { max_nodes: 5_000 },
            two_dim: TwoDimBudget {
                max_cycles: 2,
                max_segment: 3,
                max_cycle_len: 3,
                max_schemes: 300,
                max_candidates: 2,
            },
            max_branches: 64,
            max_ridge: 8,
            audit_samples: 0,
            seed: 0,
        }
    }

    pub fn desk() -> Self {
        SearchBudget {
            max_nodes: 400,
            max_cgs_size: 400,
            max_depth: 24,
            diophantine: DiophantineBudget { max_nodes: 100_000 },
            pump: PumpBudget { max_nodes: 50_000 },
            two_dim: TwoDimBudget::default(),
            max_branches: 256,
            max_ridge: 24,
            audit_samples: 0,
            seed: 0,
        }
    }

    pub fn stress() -> Self {
        SearchBudget {
            max_nodes: 20_000,
            max_cgs_size: 2_000,
            max_depth: 64,
            diophantine: DiophantineBudget { max_nodes: 2_000_000 },
            pump: PumpBudget { max_nodes: 1_000_000 },
            two_dim: TwoDimBudget {
                max_cycles: 4,
                max_segment: 6,
                max_cycle_len: 6,
                max_schemes: 50_000,
                max_candidates: 16,
            },
            max_branches: 4096,
            max_ridge: 128,
            audit_samples: 0,
            seed: 0,
        }
    }

    /// `tiny`, `desk` or `stress`.
    pub fn profile(name: &str) -> Option<Self> {
        match name {
            "tiny" => Some(Self::tiny()),
            "desk" => Some(Self::desk()),
            "stress" => Some(Self::stress()),
            _ => None,
        }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self::desk()
    }
}
