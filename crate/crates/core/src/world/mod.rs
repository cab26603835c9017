//! Possible worlds: the transition model, evidence grouped into maximal
//! consistent sets, strategies, runs and weighted goals.

mod goals;
mod mcs;
mod model;
mod strategy;

pub use goals::{maximal_subgoals, Goal, GoalBase, GoalId};
pub(crate) use mcs::bodies_by_atom;
pub use mcs::{max_consistent_sets, ConsistentGroup, PossibleWorldSet};
pub use model::{Assignment, Evidence, JointAction, Role, Rule, Run, WorldModel};
pub use strategy::{
    enumerate_strategies, reachable_histories, runs_of, Decisions, History, Strategy, StrategyMode,
};

use crate::temporal::TemporalError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WorldError {
    #[error("the world has no variables")]
    NoVariables,
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("{context}: unknown variable `{name}`")]
    UnknownVariable { context: String, name: String },
    #[error("{0}: temporal or epistemic operators are not allowed")]
    NotPropositional(String),
    #[error("agent {0} has no actions")]
    EmptyAlphabet(Role),
    #[error("action `{action}` listed twice for {role}")]
    DuplicateAction { role: Role, action: String },
    #[error("action `{0}` belongs to both agents; agent alphabets must be disjoint")]
    SharedAction(String),
    #[error("unknown action `{action}` for {role}")]
    UnknownAction { role: Role, action: String },
    #[error("{context}: variable `{var}` assigned twice")]
    DuplicateEffect { context: String, var: String },
    #[error("{role} has {count} strategies, over the budget of {budget}")]
    Budget { role: Role, count: String, budget: u64 },
    #[error(transparent)]
    Temporal(Box<TemporalError>),
}

impl From<TemporalError> for WorldError {
    fn from(e: TemporalError) -> Self {
        match e {
            TemporalError::World(w) => w,
            other => WorldError::Temporal(Box::new(other)),
        }
    }
}
