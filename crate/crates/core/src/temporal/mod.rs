//! Bounded encodings: flat reduction of belief bases, world unrolling over
//! a horizon, goal and strategy formulas over time-indexed variables.

mod check;
mod flatten;
mod goal;
mod strategy;
mod unroll;

pub use check::{check_winning, WinCheck};
pub use flatten::{flatten, FlatProblem};
pub use goal::encode_goal;
pub(crate) use strategy::strategy_obligations;
pub use strategy::encode_strategy;
pub use unroll::{unroll_world, TimedEncoding};

use crate::sat::{EncodeError, SatError};
use crate::world::{Role, WorldError};

/// Name of variable `v` at step `t`.
pub fn timed_name(v: &str, t: usize) -> String {
    format!("{v}@{t}")
}

/// Name of the variable recording that `role` takes `action` at step `t`.
pub fn action_name(role: Role, action: &str, t: usize) -> String {
    format!("act:{}:{action}@{t}", role.name())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemporalError {
    #[error("step {step} is outside horizon {horizon}")]
    StepOutOfRange { step: usize, horizon: usize },
    #[error("epistemic subformula not allowed here: {0}")]
    Epistemic(String),
    #[error("nested belief: {0}")]
    NestedBelief(String),
    #[error("belief group must be a single atom: {0}")]
    NonAtomicGroup(String),
    #[error("belief below the top level: {0}")]
    BeliefBelowTop(String),
    #[error("partial strategy: {0}")]
    PartialStrategy(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Sat(#[from] SatError),
}
