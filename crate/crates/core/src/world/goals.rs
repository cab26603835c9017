use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Role;
use crate::logic::Formula;

pub type GoalId = String;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Goal {
    pub id: GoalId,
    pub owner: Role,
    pub formula: Formula,
    pub weight: u64,
}

/// Goals with a weight for every subset: explicit table entries win, all
/// other subsets weigh the sum of their goals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalBase {
    pub goals: Vec<Goal>,
    pub table: Vec<(BTreeSet<GoalId>, u64)>,
}

impl GoalBase {
    pub fn new(goals: Vec<Goal>) -> Self {
        GoalBase { goals, table: Vec::new() }
    }

    pub fn ids(&self) -> BTreeSet<GoalId> {
        self.goals.iter().map(|g| g.id.clone()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&Goal> {
        self.goals.iter().find(|g| g.id == id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.get(id).is_some()
    }

    pub fn weight(&self, subset: &BTreeSet<GoalId>) -> u64 {
        if subset.is_empty() {
            return 0;
        }
        if let Some((_, w)) = self.table.iter().find(|(k, _)| k == subset) {
            return *w;
        }
        subset.iter().filter_map(|id| self.get(id)).map(|g| g.weight).sum()
    }

    /// The base limited to `keep`; table rows mentioning other goals are dropped.
    pub fn restrict(&self, keep: &BTreeSet<GoalId>) -> GoalBase {
        GoalBase {
            goals: self.goals.iter().filter(|g| keep.contains(&g.id)).cloned().collect(),
            table: self.table.iter().filter(|(k, _)| k.is_subset(keep)).cloned().collect(),
        }
    }
}

/// Achievable subsets of maximum weight, sorted. `achievable` must accept
/// every subset of an accepted set; the empty set is always achievable.
pub fn maximal_subgoals(
    base: &GoalBase,
    mut achievable: impl FnMut(&BTreeSet<GoalId>) -> bool,
) -> Vec<BTreeSet<GoalId>> {
    let ids: Vec<GoalId> = base.ids().into_iter().collect();
    assert!(ids.len() < 32, "too many goals for subset enumeration");
    let mut best = 0u64;
    let mut out: Vec<BTreeSet<GoalId>> = vec![BTreeSet::new()];
    for mask in 1u64..(1 << ids.len()) {
        let subset: BTreeSet<GoalId> =
            ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, g)| g.clone()).collect();
        let w = base.weight(&subset);
        if w < best || !achievable(&subset) {
            continue;
        }
        if w > best {
            best = w;
            out.clear();
        }
        out.push(subset);
    }
    out.sort();
    out
}
