use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::logic::{EntityId, Formula};
use crate::world::{Evidence, GoalId, Strategy};

/// A promise by B about its own actions, over B's action names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commitment {
    /// `None` means every step.
    pub step: Option<usize>,
    pub constraint: Formula,
}

impl Commitment {
    /// Whether every action `s` may take at the committed steps satisfies the constraint.
    pub fn allows(&self, s: &Strategy, horizon: usize) -> bool {
        let steps: Vec<usize> = match self.step {
            Some(t) => vec![t],
            None => (0..horizon).collect(),
        };
        steps.into_iter().filter(|&t| t < horizon).all(|t| {
            s.actions_at(t).into_iter().all(|a| self.constraint.eval_prop(&|v| v == a).unwrap_or(false))
        })
    }
}

/// What B is scripted to answer at each resolution level.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeerModel {
    /// Observations B can share.
    pub truths: Vec<Evidence>,
    pub commitments: Vec<Commitment>,
    /// Whether B takes on A's goals.
    pub adoptable: bool,
    /// Weights B gives to adopted goals; A's weight otherwise.
    pub adopt_weights: Vec<(GoalId, u64)>,
    /// Weights of goal subsets used when negotiating which goals to keep.
    pub combined: Vec<(BTreeSet<GoalId>, u64)>,
    /// Belief atoms from most to least trusted.
    pub trust: Vec<EntityId>,
}

impl PeerModel {
    pub fn trust_rank(&self, atom: &str) -> usize {
        self.trust.iter().position(|a| a == atom).unwrap_or(usize::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::world::Role;

    #[test]
    fn commitment_filters_strategies() {
        let c = Commitment { step: None, constraint: parse_formula("!brake").unwrap() };
        assert!(c.allows(&Strategy::sequence(Role::B, &["cruise", "cruise"]), 2));
        assert!(!c.allows(&Strategy::sequence(Role::B, &["cruise", "brake"]), 2));
        let c = Commitment { step: Some(0), constraint: parse_formula("!brake").unwrap() };
        assert!(c.allows(&Strategy::sequence(Role::B, &["cruise", "brake"]), 2));
    }
}
