//! The formula language of justification graphs: formulas, belief entities
//! and the graph structure that groups consistent evidence.

mod formula;
mod graph;
mod syntax;

pub use formula::{is_subgroup, Formula};
pub use graph::{BeliefEntity, EntityKind, JustificationGraph, ValidationReport, Violation};
pub use syntax::{is_identifier, is_keyword, parse_formula, SyntaxError};

/// Name of a belief entity (atom or compound).
pub type EntityId = String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("belief group must not be empty")]
    EmptyGroup,
}
