//! Conflict detection between A and B over A's possible worlds, conflict
//! explanations, and the four-level resolution ladder.

mod find;
mod justify;
mod peer;
mod resolve;
mod trace;
mod universe;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use find::analyze;
pub use justify::{justify, verify_cause};
pub use peer::{Commitment, PeerModel};
pub use trace::{ConflictCause, TraceEvent, WORLD_ATOM};

use crate::logic::Formula;
use crate::sat::SatError;
use crate::temporal::TemporalError;
use crate::world::{Evidence, GoalBase, GoalId, StrategyMode, WorldError, WorldModel};

pub const MAX_LEVEL: u8 = 4;
pub const MAX_GOALS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Options {
    pub horizon: usize,
    pub mode: StrategyMode,
    /// Upper bound on strategies per agent and on joint strategies.
    pub budget: u64,
    pub max_level: u8,
}

impl Default for Options {
    fn default() -> Self {
        Options { horizon: 3, mode: StrategyMode::Sequence, budget: 100_000, max_level: MAX_LEVEL }
    }
}

/// Everything A knows when it starts the analysis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub world: WorldModel,
    /// A's own evidence.
    pub evidence: Vec<Evidence>,
    /// Constraints on the current state that are not in doubt.
    pub facts: Vec<Formula>,
    pub goals_a: GoalBase,
    /// What A believes B wants.
    pub goals_b: GoalBase,
    pub peer: PeerModel,
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Temporal(#[from] TemporalError),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error("goal `{0}` is defined twice")]
    DuplicateGoal(String),
    #[error("{0} goals exceed the limit of {MAX_GOALS}")]
    TooManyGoals(usize),
    #[error("{count} joint strategies, over the budget of {budget}")]
    JointBudget { count: u128, budget: u64 },
    #[error("no evidence is consistent with the world and facts")]
    EmptyWorldSet,
    #[error("max level {0} is above {MAX_LEVEL}")]
    InvalidLevel(u8),
    #[error("the obligations are satisfiable, nothing to justify")]
    NoViolation,
}

/// A surviving joint strategy and the goals of A it wins.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Survivor {
    pub a: String,
    pub b: String,
    pub goals: Vec<GoalId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    /// No candidate survived before any resolution.
    pub conflict_at_start: bool,
    pub resolved: bool,
    /// Resolution level at which strategies were found; 0 without conflict.
    pub level: u8,
    pub survivors: Vec<Survivor>,
    /// Goals kept by negotiation, when that level was used.
    pub selected_goals: Option<BTreeSet<GoalId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub outcome: Outcome,
    pub events: Vec<TraceEvent>,
    /// Every distinct cause, referenced by index from the events.
    pub causes: Vec<ConflictCause>,
}
