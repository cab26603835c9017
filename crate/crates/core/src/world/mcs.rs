use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Evidence, WorldError, WorldModel};
use crate::logic::{EntityId, Formula};
use crate::sat::{lit_value, Lit, SolveResult};
use crate::temporal::{encode_goal, TimedEncoding};

/// A maximal set of evidence atoms that is consistent with the world and the facts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistentGroup {
    pub members: BTreeSet<EntityId>,
    /// Conjunction of the member bodies and the facts, read at step 0.
    pub constraint: Formula,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PossibleWorldSet {
    pub groups: Vec<ConsistentGroup>,
    /// Evidence that contradicts the world and facts on its own.
    pub degenerate: Vec<EntityId>,
}

/// Merges evidence by atom, conjoining repeated bodies.
pub(crate) fn bodies_by_atom(evidence: &[Evidence]) -> BTreeMap<EntityId, Formula> {
    let mut out: BTreeMap<EntityId, Formula> = BTreeMap::new();
    for e in evidence {
        out.entry(e.atom.clone())
            .and_modify(|b| *b = Formula::and(b.clone(), e.body.clone()))
            .or_insert_with(|| e.body.clone());
    }
    out
}

/// Grows each group from a solver model and blocks it before searching for
/// the next one. Groups come out sorted by member ids.
pub fn max_consistent_sets(
    evidence: &[Evidence],
    facts: &[Formula],
    w: &WorldModel,
    horizon: usize,
) -> Result<PossibleWorldSet, WorldError> {
    let mut enc = TimedEncoding::new(w, horizon)?;
    for f in facts {
        let timed = encode_goal(f, horizon, 0)?;
        enc.assert_timed(&timed)?;
    }
    let bodies = bodies_by_atom(evidence);
    let mut lits: BTreeMap<EntityId, Lit> = BTreeMap::new();
    for (atom, body) in &bodies {
        lits.insert(atom.clone(), enc.goal_lit(body, 0)?);
    }
    let mut solver = enc.solver();
    let mut out = PossibleWorldSet::default();
    if !solver.solve_lits(&[]).is_sat() {
        out.degenerate = bodies.keys().cloned().collect();
        return Ok(out);
    }
    let mut live = Vec::new();
    for (atom, &l) in &lits {
        if solver.solve_lits(&[l]).is_sat() {
            live.push((atom.clone(), l));
        } else {
            out.degenerate.push(atom.clone());
        }
    }
    while let SolveResult::Sat(model) = solver.solve_lits(&[]) {
        let mut inside: Vec<bool> = live.iter().map(|(_, l)| lit_value(&model, *l)).collect();
        for i in 0..live.len() {
            if inside[i] {
                continue;
            }
            let mut trial: Vec<Lit> = live.iter().zip(&inside).filter(|(_, &b)| b).map(|((_, l), _)| *l).collect();
            trial.push(live[i].1);
            if solver.solve_lits(&trial).is_sat() {
                inside[i] = true;
            }
        }
        let members: BTreeSet<EntityId> =
            live.iter().zip(&inside).filter(|(_, &b)| b).map(|((a, _), _)| a.clone()).collect();
        let block: Vec<Lit> = live.iter().zip(&inside).filter(|(_, &b)| !b).map(|((_, l), _)| *l).collect();
        let constraint = Formula::and_all(
            members.iter().map(|a| bodies[a].clone()).chain(facts.iter().cloned()),
        );
        out.groups.push(ConsistentGroup { members, constraint });
        if block.is_empty() {
            break;
        }
        solver.add_clause(&block);
    }
    out.groups.sort_by(|a, b| a.members.cmp(&b.members));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn world() -> WorldModel {
        let mut w = WorldModel::new(vec!["fast".into(), "obstacle".into()]);
        w.actions_a = vec!["a".into()];
        w.actions_b = vec!["b".into()];
        w
    }

    fn ev(atom: &str, body: &str) -> Evidence {
        Evidence::new(atom, parse_formula(body).unwrap())
    }

    fn members(ws: &PossibleWorldSet) -> Vec<Vec<&str>> {
        ws.groups.iter().map(|g| g.members.iter().map(String::as_str).collect()).collect()
    }

    #[test]
    fn sensors_split_into_two_groups() {
        let e = [ev("radar", "fast"), ev("lidar", "!fast"), ev("cam", "obstacle")];
        let ws = max_consistent_sets(&e, &[], &world(), 1).unwrap();
        assert_eq!(members(&ws), vec![vec!["cam", "lidar"], vec!["cam", "radar"]]);
    }

    #[test]
    fn consistent_evidence_forms_one_group() {
        let e = [ev("radar", "fast"), ev("cam", "obstacle")];
        let ws = max_consistent_sets(&e, &[], &world(), 1).unwrap();
        assert_eq!(members(&ws), vec![vec!["cam", "radar"]]);
    }

    #[test]
    fn no_evidence_gives_one_empty_group() {
        let ws = max_consistent_sets(&[], &[], &world(), 1).unwrap();
        assert_eq!(ws.groups.len(), 1);
        assert!(ws.groups[0].members.is_empty());
    }

    #[test]
    fn self_contradictory_evidence_is_degenerate() {
        let e = [ev("broken", "fast & !fast"), ev("radar", "fast")];
        let ws = max_consistent_sets(&e, &[], &world(), 1).unwrap();
        assert_eq!(ws.degenerate, vec!["broken".to_string()]);
        assert_eq!(members(&ws), vec![vec!["radar"]]);
        let ws = max_consistent_sets(&[ev("radar", "fast")], &[parse_formula("!fast").unwrap()], &world(), 1).unwrap();
        assert_eq!(ws.degenerate, vec!["radar".to_string()]);
    }
}
