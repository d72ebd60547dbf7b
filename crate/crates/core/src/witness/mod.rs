//! Witnesses: linear path scheme systems, pumpability, normality and the
//! construction of explicit walks for normal sequences.

mod normal;
mod pump;
mod synth;
mod system;

use thiserror::Error;

use crate::charsys::CharSysError;

pub use normal::{
    check_normal_at, is_normal, ComponentVerdict, NormalAt, NormalOutcome, NormalityCertificate,
    NotNormalReason, WitnessBudget,
};
pub use pump::{check_pumpable, CoverabilityTree, Direction, PumpBudget, PumpCertificate, PumpOutcome};
pub use synth::synthesize_witness;
pub use system::{
    build_witness_system, solve_witness_system, CycleGroups, Inequality, WitnessOutcome,
    WitnessSystem,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("vector has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    CharSys(#[from] CharSysError),
}
