//! The line-oriented scenario format.
//!
//! ```text
//! scenario: lane change
//! horizon: 3
//! vars: a_left, b_near
//! init: !a_left & !b_near
//! actions A: keep, change
//! actions B: cruise
//! rule A change: a_left := true
//! evidence radar from front radar: b_near
//! trust: radar
//! goal safe owner A weight 10: G !(a_left & b_near)
//! ```

mod parse;
mod render;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parse::parse_scenario;
pub use render::render_scenario;

use crate::engine::{Options, PeerModel, Problem};
use crate::logic::Formula;
use crate::world::{Evidence, Goal, GoalBase, GoalId, Role, WorldModel};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagnostic {
    /// 1-based; 0 for problems that concern the whole document.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic { line, column, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioDoc {
    pub name: String,
    pub options: Options,
    pub world: WorldModel,
    pub evidence: Vec<Evidence>,
    pub facts: Vec<Formula>,
    /// Goals of both agents, in file order.
    pub goals: Vec<Goal>,
    /// Explicit subset weights per owner.
    pub weights: Vec<(Role, BTreeSet<GoalId>, u64)>,
    pub peer: PeerModel,
}

impl ScenarioDoc {
    fn base(&self, owner: Role) -> GoalBase {
        GoalBase {
            goals: self.goals.iter().filter(|g| g.owner == owner).cloned().collect(),
            table: self.weights.iter().filter(|(r, _, _)| *r == owner).map(|(_, s, w)| (s.clone(), *w)).collect(),
        }
    }

    pub fn problem(&self) -> Problem {
        Problem {
            world: self.world.clone(),
            evidence: self.evidence.clone(),
            facts: self.facts.clone(),
            goals_a: self.base(Role::A),
            goals_b: self.base(Role::B),
            peer: self.peer.clone(),
            options: self.options.clone(),
        }
    }
}
