//! Reachability workbench for vector addition systems with states.
//!
//! The decision procedure refines constraint graph sequences until every
//! branch is either refuted by its characteristic system or reaches a normal
//! sequence, from which an explicit witness walk is synthesized. A bounded
//! breadth-first oracle is included for cross-checking.
//!
//! All state, transition, component and coordinate indices are 0-based.

pub mod charsys;
pub mod diophantine;
pub mod format;
pub mod generate;
pub mod geometry;
pub mod model;
pub mod oracle;
pub mod par;
pub mod refine;
pub mod scc;
pub mod search;
pub mod selftest;
pub mod witness;

pub use format::{parse_instance, print_instance, Instance, ParseError};
pub use model::*;
