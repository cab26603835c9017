use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::logic::EntityId;
use crate::world::{GoalId, Run};

/// Pseudo-atom blamed when a conflict does not depend on any evidence.
pub const WORLD_ATOM: &str = "world";

/// Why one candidate failed against one of B's rational strategies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictCause {
    pub group: usize,
    pub members: BTreeSet<EntityId>,
    /// Minimal set of member atoms that, with the witness actions, rule out
    /// the violated goals. `{world}` when no evidence is needed.
    pub atoms: BTreeSet<EntityId>,
    /// Atoms outside the group that contradict one of `atoms`.
    pub rivals: BTreeSet<EntityId>,
    pub strategy_a: String,
    pub strategy_b: String,
    pub target_goals: BTreeSet<GoalId>,
    pub joint_goals: BTreeSet<GoalId>,
    pub violated_goals: BTreeSet<GoalId>,
    pub witness: Run,
    /// The witness initial state is part of the explanation.
    pub pinned_state: bool,
}

impl ConflictCause {
    pub fn all_atoms(&self) -> BTreeSet<EntityId> {
        self.atoms.union(&self.rivals).cloned().collect()
    }

    /// One line per link of the justification chain.
    pub fn chain(&self) -> Vec<String> {
        let atoms: Vec<&str> = self.atoms.iter().map(String::as_str).collect();
        let mut out = vec![format!(
            "group {} {{{}}}: A plays [{}], B plays [{}]",
            self.group,
            self.members.iter().cloned().collect::<Vec<_>>().join(", "),
            self.strategy_a,
            self.strategy_b
        )];
        out.push(format!(
            "  violates {{{}}} of joint goal {{{}}}",
            self.violated_goals.iter().cloned().collect::<Vec<_>>().join(", "),
            self.joint_goals.iter().cloned().collect::<Vec<_>>().join(", ")
        ));
        out.push(format!("  witness: {}", self.witness));
        out.push(format!(
            "  because of {{{}}}{}",
            atoms.join(", "),
            if self.pinned_state { " given the witness initial state" } else { "" }
        ));
        if !self.rivals.is_empty() {
            out.push(format!(
                "  contradicted by {{{}}}",
                self.rivals.iter().cloned().collect::<Vec<_>>().join(", ")
            ));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    AttemptStarted {
        attempt: usize,
        evidence: Vec<EntityId>,
        discarded: Vec<EntityId>,
        commitments: Vec<String>,
        goals_a: Vec<GoalId>,
        goals_b: Vec<GoalId>,
    },
    WorldSet {
        attempt: usize,
        groups: Vec<Vec<EntityId>>,
        degenerate: Vec<EntityId>,
    },
    Maxima {
        attempt: usize,
        goals_a: Vec<Vec<GoalId>>,
        goals_b: Vec<Vec<Vec<GoalId>>>,
    },
    Vacuity {
        attempt: usize,
        group: usize,
        joint_strategies: usize,
    },
    Candidates {
        attempt: usize,
        count: usize,
    },
    Verdict {
        attempt: usize,
        a: String,
        b: String,
        goals: Vec<GoalId>,
        winning: bool,
        cause: Option<usize>,
    },
    Cause {
        attempt: usize,
        index: usize,
        cause: ConflictCause,
    },
    Conflict {
        attempt: usize,
        causes: usize,
    },
    Resolution {
        attempt: usize,
        level: u8,
        changed: bool,
        actions: Vec<String>,
        /// Whether the new world set refines the old one; set for evidence
        /// and commitment steps that changed something.
        refines: Option<bool>,
        groups_before: Vec<Vec<EntityId>>,
        groups_after: Vec<Vec<EntityId>>,
    },
    AttemptReused {
        attempt: Option<usize>,
    },
    AttemptFinished {
        attempt: usize,
        winning: usize,
        level: u8,
    },
}
