use std::collections::BTreeMap;

use crate::logic::{EntityId, Formula};
use crate::sat::{CnfBuilder, SolveResult};

use super::TemporalError;

/// Belief-atom bodies with the epistemic layer removed, plus plain facts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlatProblem {
    pub atoms: BTreeMap<EntityId, Formula>,
    pub facts: Vec<Formula>,
}

/// Strips the single outer belief layer of each entry.
///
/// An entry is either `(Some(atom), body)`, `(None, {atom}: body)` or an
/// epistemic-free fact `(None, body)`. Repeated atoms have their bodies conjoined.
pub fn flatten(sigma: &[(Option<EntityId>, Formula)]) -> Result<FlatProblem, TemporalError> {
    let mut out = FlatProblem::default();
    for (atom, f) in sigma {
        let (atom, body) = match (atom, f) {
            (Some(a), body) => (Some(a.clone()), body),
            (None, Formula::Belief(group, body)) => {
                if group.len() != 1 {
                    return Err(TemporalError::NonAtomicGroup(f.to_string()));
                }
                (group.iter().next().cloned(), body.as_ref())
            }
            (None, body) => (None, body),
        };
        if body.has_belief() {
            return Err(match (&atom, body) {
                (Some(_), _) | (None, Formula::Belief(..)) => TemporalError::NestedBelief(f.to_string()),
                _ => TemporalError::BeliefBelowTop(f.to_string()),
            });
        }
        match atom {
            Some(a) => {
                let slot = out.atoms.entry(a).or_insert(Formula::Top);
                *slot = if *slot == Formula::Top { body.clone() } else { Formula::and(slot.clone(), body.clone()) };
            }
            None => out.facts.push(body.clone()),
        }
    }
    Ok(out)
}

impl FlatProblem {
    /// The conjunction of every body and fact.
    pub fn conjunction(&self) -> Formula {
        Formula::and_all(self.atoms.values().cloned().chain(self.facts.iter().cloned()))
    }

    /// Satisfiability of the stripped bodies together with the facts.
    pub fn is_consistent(&self) -> Result<bool, TemporalError> {
        let mut b = CnfBuilder::new();
        b.assert_formula(&self.conjunction())?;
        Ok(matches!(b.into_problem().solve()?, SolveResult::Sat(_)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn atom_prefixed_entries_map_to_bodies() {
        let p = flatten(&[(Some("radar".into()), f("fast"))]).unwrap();
        assert_eq!(p.atoms.get("radar"), Some(&f("fast")));
        let p = flatten(&[(None, f("{radar}: fast"))]).unwrap();
        assert_eq!(p.atoms.get("radar"), Some(&f("fast")));
    }

    #[test]
    fn facts_pass_through() {
        let p = flatten(&[(None, f("obstacle_ahead"))]).unwrap();
        assert_eq!(p.facts, vec![f("obstacle_ahead")]);
        assert!(p.atoms.is_empty());
    }

    #[test]
    fn outside_the_fragment_is_rejected() {
        assert!(matches!(
            flatten(&[(Some("radar".into()), f("{lidar}: x"))]),
            Err(TemporalError::NestedBelief(_))
        ));
        assert!(matches!(flatten(&[(None, f("{a, b}: x"))]), Err(TemporalError::NonAtomicGroup(_))));
        assert!(matches!(flatten(&[(None, f("p & {a}: x"))]), Err(TemporalError::BeliefBelowTop(_))));
    }

    #[test]
    fn consistency_follows_the_bodies() {
        let p = flatten(&[(Some("radar".into()), f("fast")), (Some("lidar".into()), f("!fast"))]).unwrap();
        assert!(!p.is_consistent().unwrap());
        let p = flatten(&[(Some("radar".into()), f("fast")), (None, f("obstacle"))]).unwrap();
        assert!(p.is_consistent().unwrap());
    }
}
