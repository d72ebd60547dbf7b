//! Vectors, systems, paths, walks and constraint graph sequences.

mod cgs;
mod path;
mod vass;
mod vector;

use thiserror::Error;

pub use cgs::{admits, Cg, Cgs, Connector, Lcgs, Port, Relation, SideConstraint, UnionGraph};
pub use path::{
    delta_min, delta_min_of, displacement, parikh, realize_parikh, validate_walk, Configuration,
    ParikhImage, Path, Walk,
};
pub use vass::{State, StateId, Transition, TransitionId, Vass};
pub use vector::IntVec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("unknown state {0}")]
    UnknownState(StateId),
    #[error("unknown transition {0}")]
    UnknownTransition(TransitionId),
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("step {step} does not start where the previous step ended")]
    Unchained { step: usize },
    #[error("an empty step list does not determine a start state")]
    EmptyPathWithoutStart,
    #[error("location {0} has a negative entry")]
    NegativeLocation(IntVec),
    #[error("malformed constraint graph sequence: {0}")]
    MalformedCgs(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("path starts at {path_start} but the configuration is at {state}")]
    StartMismatch { path_start: StateId, state: StateId },
    #[error("location {location} after step {step} leaves the first orthant")]
    Negative { step: usize, location: IntVec },
    #[error("counter overflow at step {step}")]
    Overflow { step: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EulerError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("flow is not balanced at state {state}")]
    Imbalance { state: StateId },
    #[error("support of the image is not connected to the entry")]
    Disconnected,
}
