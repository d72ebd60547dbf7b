//! Refinement operations. Each one maps a constraint graph sequence to
//! sequences that admit only paths the input admits, and together the
//! results admit every path of interest.

mod decompose;
pub mod linearize;
mod sample;
mod simplify;
mod twodim;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::geometry;
use crate::model::{Cgs, SideConstraint, TransitionId};

pub use decompose::{
    algebraic_decompose, arrangements, combinatorial_decompose, ridge_construction, ridge_graph,
    Arrangement,
};
pub use sample::{random_admitted_path, refines_sample_check};
pub use simplify::{eulerian_simplify, orthogonal_floors, orthogonal_simplify, OrthEntry};
pub use twodim::{lcgs_candidates, replace_2d_component, TwoDimBudget, TwoDimOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("no linearization from entry to exit")]
    NoLinearization,
    #[error("value {value} outside [0, {bound}]")]
    OutOfRange { value: i64, bound: i64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("more than {0} branches")]
    TooManyBranches(usize),
    #[error("entry and exit lie in different strongly connected parts")]
    Disconnected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum StepKind {
    Eulerian,
    Orthogonal,
    Ridge,
    Algebraic,
    Combinatorial,
    TwoDimReplace,
}

impl StepKind {
    pub fn is_decomposition(self) -> bool {
        matches!(self, StepKind::Algebraic | StepKind::Combinatorial)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StepParams {
    Support(Vec<TransitionId>),
    Linearization,
    Floors(Vec<SideConstraint>),
    Solution { solution: usize, arrangement: usize },
    Ridge { index: usize, bound: i64, entry: i64, exit: i64 },
    Lcgs { cycles: usize },
}

/// One applied refinement. The child's components `component ..
/// component + child_dims.len()` replace component `component` of the parent.
#[derive(Clone, Debug, Serialize)]
pub struct RefinementStep {
    pub kind: StepKind,
    pub component: usize,
    pub params: StepParams,
    #[serde(skip)]
    pub parent: Arc<Cgs>,
    #[serde(skip)]
    pub child: Arc<Cgs>,
    pub parent_dim: usize,
    pub child_dims: Vec<usize>,
    pub parent_size: usize,
    pub child_size: usize,
}

impl RefinementStep {
    pub fn new(
        kind: StepKind,
        component: usize,
        params: StepParams,
        parent: Arc<Cgs>,
        child: Arc<Cgs>,
    ) -> Self {
        let parts = child.len() + 1 - parent.len();
        let parent_dim = geometry::geometric_dimension(&parent.components[component].graph);
        let child_dims = child.components[component..component + parts]
            .iter()
            .map(|c| geometry::geometric_dimension(&c.graph))
            .collect();
        RefinementStep {
            kind,
            component,
            params,
            parent_size: parent.size(),
            child_size: child.size(),
            parent,
            child,
            parent_dim,
            child_dims,
        }
    }

    /// Every new component has strictly smaller geometric dimension.
    pub fn descends(&self) -> bool {
        self.child_dims.iter().all(|&d| d < self.parent_dim)
    }
}
