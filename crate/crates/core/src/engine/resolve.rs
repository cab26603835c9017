use std::collections::{BTreeMap, BTreeSet};

use super::find::{Evaluation, State};
use super::trace::{ConflictCause, WORLD_ATOM};
use super::universe::Universe;
use crate::logic::EntityId;
use crate::world::GoalId;

/// The state after one resolution step, the actions taken and, for the
/// negotiation level, the goals that were kept.
pub(crate) struct Step {
    pub state: State,
    pub actions: Vec<String>,
    pub selected: Option<BTreeSet<GoalId>>,
}

pub(crate) fn fix(u: &Universe<'_>, level: u8, state: &State, eval: &Evaluation, causes: &[&ConflictCause]) -> Step {
    match level {
        1 => share_evidence(u, state, causes),
        2 => share_commitments(u, state),
        3 => adopt_goals(u, state, eval, causes),
        _ => negotiate(u, state, eval),
    }
}

fn unchanged(state: &State) -> Step {
    Step { state: state.clone(), actions: Vec::new(), selected: None }
}

/// Adds the peer's observations that speak about the variables behind the
/// causes, then settles contradictions with the trust rank.
fn share_evidence(u: &Universe<'_>, state: &State, causes: &[&ConflictCause]) -> Step {
    let peer = &u.problem.peer;
    let mut vars = BTreeSet::new();
    for c in causes {
        for a in c.all_atoms() {
            if a != WORLD_ATOM {
                vars.extend(u.bodies[&a].vars());
            }
        }
    }
    let mut next = state.clone();
    let mut actions = Vec::new();
    let mut added: Vec<EntityId> = Vec::new();
    for t in &peer.truths {
        if next.evidence.contains(&t.atom) || next.discarded.contains(&t.atom) || added.contains(&t.atom) {
            continue;
        }
        if u.bodies[&t.atom].vars().iter().any(|v| vars.contains(v)) {
            added.push(t.atom.clone());
            actions.push(format!("add {}", t.atom));
        }
    }
    next.evidence.extend(added.iter().cloned());
    let mut solver = u.solver();
    for t in &added {
        if !next.evidence.contains(t) {
            continue;
        }
        let others: Vec<EntityId> = next.evidence.iter().filter(|o| *o != t).cloned().collect();
        for o in others {
            if !next.evidence.contains(t) {
                break;
            }
            if solver.solve_lits(&[u.evidence_lit(t), u.evidence_lit(&o)]).is_sat() {
                continue;
            }
            let (keep, drop) =
                if peer.trust_rank(t) <= peer.trust_rank(&o) { (t.clone(), o) } else { (o, t.clone()) };
            next.evidence.remove(&drop);
            next.discarded.insert(drop.clone());
            actions.push(format!("discard {drop} (contradicts {keep})"));
        }
    }
    Step { state: next, actions, selected: None }
}

fn share_commitments(u: &Universe<'_>, state: &State) -> Step {
    let mut next = state.clone();
    let mut actions = Vec::new();
    for (n, c) in u.problem.peer.commitments.iter().enumerate() {
        if next.commitments.insert(n) {
            let at = c.step.map_or("*".to_string(), |t| t.to_string());
            actions.push(format!("commit {at}: {}", c.constraint));
        }
    }
    Step { state: next, actions, selected: None }
}

/// B takes on the goals A was aiming for when the conflict arose.
fn adopt_goals(u: &Universe<'_>, state: &State, eval: &Evaluation, causes: &[&ConflictCause]) -> Step {
    let peer = &u.problem.peer;
    if !peer.adoptable {
        return unchanged(state);
    }
    let mut targets: BTreeSet<GoalId> = causes.iter().flat_map(|c| c.target_goals.iter().cloned()).collect();
    if causes.is_empty() {
        targets = eval.maxima_a.iter().flatten().cloned().collect();
    }
    let mut next = state.clone();
    let mut actions = Vec::new();
    for id in targets {
        if !state.goals_a.contains(&id) || next.adopted.contains_key(&id) {
            continue;
        }
        let Some(goal) = u.problem.goals_a.get(&id) else { continue };
        let w = peer.adopt_weights.iter().find(|(g, _)| *g == id).map_or(goal.weight, |(_, w)| *w);
        next.adopted.insert(id.clone(), w);
        actions.push(format!("adopt {id} with weight {w}"));
    }
    Step { state: next, actions, selected: None }
}

/// Weight of a goal set for both agents together.
pub(crate) fn combined_weight(u: &Universe<'_>, set: &BTreeSet<GoalId>) -> u64 {
    if let Some((_, w)) = u.problem.peer.combined.iter().find(|(k, _)| k == set) {
        return *w;
    }
    let own: BTreeMap<&str, u64> = u
        .problem
        .goals_a
        .goals
        .iter()
        .chain(&u.problem.goals_b.goals)
        .map(|g| (g.id.as_str(), g.weight))
        .collect();
    set.iter().filter_map(|id| own.get(id.as_str())).sum()
}

/// Keeps the heaviest goal set that one joint strategy wins in every group.
fn negotiate(u: &Universe<'_>, state: &State, eval: &Evaluation) -> Step {
    let pool: Vec<GoalId> = state.goals_a.union(&state.goals_b).cloned().collect();
    let mut subsets: Vec<(u64, BTreeSet<GoalId>)> = (0u64..1 << pool.len())
        .map(|m| {
            let s: BTreeSet<GoalId> =
                pool.iter().enumerate().filter(|(k, _)| m >> k & 1 == 1).map(|(_, g)| g.clone()).collect();
            (combined_weight(u, &s), s)
        })
        .collect();
    subsets.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
    let Some((_, best)) = subsets.into_iter().find(|(_, s)| eval.jointly_achievable(u.mask_of(s))) else {
        return unchanged(state);
    };
    let mut next = state.clone();
    next.goals_a.retain(|g| best.contains(g));
    next.goals_b.retain(|g| best.contains(g));
    next.adopted.retain(|g, _| best.contains(g));
    if next == *state {
        return unchanged(state);
    }
    let names: Vec<&str> = best.iter().map(String::as_str).collect();
    Step { state: next, actions: vec![format!("keep {{{}}}", names.join(", "))], selected: Some(best) }
}
