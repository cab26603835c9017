use std::collections::BTreeSet;

use super::trace::{ConflictCause, WORLD_ATOM};
use super::universe::Universe;
use super::{EngineError, Problem};
use crate::logic::{EntityId, Formula};
use crate::sat::{lit_value, shrink_core, AssumptionId, CnfBuilder, Lit, SolveResult, Solver};
use crate::temporal::{encode_goal, TimedEncoding};
use crate::world::{bodies_by_atom, Evidence};

const OBLIGATION_BASE: u32 = 1_000_000;

/// Minimal set of evidence atoms that, together with `facts`, makes the
/// obligations unsatisfiable. Returns `{world}` when the obligations fail
/// on their own.
pub fn justify(
    evidence: &[Evidence],
    facts: &[Formula],
    obligations: &[Formula],
) -> Result<BTreeSet<EntityId>, EngineError> {
    let mut b = CnfBuilder::new();
    for f in facts.iter().chain(obligations) {
        b.assert_formula(f).map_err(crate::temporal::TemporalError::from)?;
    }
    let bodies = bodies_by_atom(evidence);
    let mut named = Vec::new();
    for (atom, body) in &bodies {
        let l = b.lit(body).map_err(crate::temporal::TemporalError::from)?;
        named.push((atom.clone(), l));
    }
    let p = b.problem();
    let mut solver = Solver::new(p.num_vars, &p.clauses);
    let ids: BTreeSet<AssumptionId> = (0..named.len() as u32).map(AssumptionId).collect();
    let core = match shrink_core(&ids, |keep| {
        let lits: Vec<(AssumptionId, Lit)> = keep.iter().map(|id| (*id, named[id.0 as usize].1)).collect();
        solver.solve(&lits)
    }) {
        Ok(c) => c,
        Err(crate::sat::SatError::CoreSatisfiable) => return Err(EngineError::NoViolation),
        Err(e) => return Err(e.into()),
    };
    Ok(atoms_or_world(core.iter().map(|id| named[id.0 as usize].0.clone()).collect()))
}

fn atoms_or_world(atoms: BTreeSet<EntityId>) -> BTreeSet<EntityId> {
    if atoms.is_empty() {
        [WORLD_ATOM.to_string()].into()
    } else {
        atoms
    }
}

/// Re-derives a cause from scratch: the bodies of its atoms, the witness
/// actions (and initial state when pinned) and the violated goals must be
/// unsatisfiable together.
pub fn verify_cause(problem: &Problem, cause: &ConflictCause) -> Result<bool, EngineError> {
    let h = problem.options.horizon;
    let mut enc = TimedEncoding::new(&problem.world, h)?;
    for f in &problem.facts {
        enc.assert_timed(&encode_goal(f, h, 0)?)?;
    }
    let all: Vec<Evidence> = problem.evidence.iter().chain(&problem.peer.truths).cloned().collect();
    let bodies = bodies_by_atom(&all);
    for atom in &cause.atoms {
        if atom == WORLD_ATOM {
            continue;
        }
        let Some(body) = bodies.get(atom) else { return Ok(false) };
        enc.assert_timed(&encode_goal(body, h, 0)?)?;
    }
    let goals = problem.goals_a.goals.iter().chain(&problem.goals_b.goals);
    for g in goals.filter(|g| cause.violated_goals.contains(&g.id)) {
        enc.assert_timed(&encode_goal(&g.formula, h, 0)?)?;
    }
    let lits = enc.run_lits(&cause.witness, true, false);
    let mut assumptions = lits;
    if cause.pinned_state {
        let mut first = cause.witness.clone();
        first.states.truncate(1);
        first.actions.clear();
        assumptions.extend(enc.run_lits(&first, false, true));
    }
    Ok(!enc.solver().solve_lits(&assumptions).is_sat())
}

pub(crate) struct Failure<'a> {
    pub group: usize,
    pub members: &'a BTreeSet<EntityId>,
    pub i: usize,
    pub j: usize,
    pub mask: u64,
    pub joint: u64,
    pub target: u64,
}

/// Explains why joint strategy `(i, j)` misses `joint` in a group.
pub(crate) fn explain(
    u: &Universe<'_>,
    f: &Failure<'_>,
    active: &BTreeSet<EntityId>,
) -> Result<ConflictCause, EngineError> {
    let group_lits = u.group_lits(f.members);
    let mut base = group_lits.clone();
    base.extend(u.joint_lits(f.i, f.j));
    let k = (0..u.goal_ids.len())
        .find(|k| f.joint >> k & 1 == 1 && f.mask >> k & 1 == 0)
        .ok_or(EngineError::NoViolation)?;
    base.push(!u.goal_lit(k));
    let mut solver = u.solver();
    let model = match solver.solve_lits(&base) {
        SolveResult::Sat(m) => m,
        SolveResult::Unsat(_) => return Err(EngineError::NoViolation),
    };
    let witness = u.enc.decode_run(&model);
    let violated: u64 = (0..u.goal_ids.len())
        .filter(|&k| f.joint >> k & 1 == 1 && !lit_value(&model, u.goal_lit(k)))
        .fold(0, |m, k| m | 1 << k);
    let mut obligations = u.enc.run_lits(&witness, true, false);
    obligations.extend((0..u.goal_ids.len()).filter(|k| violated >> k & 1 == 1).map(|k| u.goal_lit(k)));
    let mut with_group = group_lits.clone();
    with_group.extend(&obligations);
    let mut pinned = false;
    if solver.solve_lits(&with_group).is_sat() {
        pinned = true;
        let mut first = witness.clone();
        first.states.truncate(1);
        first.actions.clear();
        obligations.extend(u.enc.run_lits(&first, false, true));
    }
    let members: Vec<&EntityId> = f.members.iter().collect();
    let mut assumptions: Vec<(AssumptionId, Lit)> =
        group_lits.iter().enumerate().map(|(n, l)| (AssumptionId(n as u32), *l)).collect();
    assumptions.extend(obligations.iter().enumerate().map(|(n, l)| (AssumptionId(OBLIGATION_BASE + n as u32), *l)));
    let ids: BTreeSet<AssumptionId> = (0..members.len() as u32).map(AssumptionId).collect();
    let core = shrink_core(&ids, |keep| {
        let lits: Vec<(AssumptionId, Lit)> =
            assumptions.iter().filter(|(id, _)| id.0 >= OBLIGATION_BASE || keep.contains(id)).copied().collect();
        solver.solve(&lits)
    })?;
    let atoms: BTreeSet<EntityId> = core.iter().map(|id| members[id.0 as usize].clone()).collect();
    let mut rivals = BTreeSet::new();
    for e in active.iter().filter(|e| !f.members.contains(*e)) {
        let le = u.evidence_lit(e);
        if atoms.iter().any(|c| !solver.solve_lits(&[le, u.evidence_lit(c)]).is_sat()) {
            rivals.insert(e.clone());
        }
    }
    Ok(ConflictCause {
        group: f.group,
        members: f.members.clone(),
        atoms: atoms_or_world(atoms),
        rivals,
        strategy_a: u.strats_a[f.i].to_string(),
        strategy_b: u.strats_b[f.j].to_string(),
        target_goals: u.ids_of(f.target),
        joint_goals: u.ids_of(f.joint),
        violated_goals: u.ids_of(violated),
        witness,
        pinned_state: pinned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn ev(atom: &str, body: &str) -> Evidence {
        Evidence::new(atom, parse_formula(body).unwrap())
    }

    fn set(ids: &[&str]) -> BTreeSet<EntityId> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn contradicting_sensors_are_blamed() {
        let evidence = [ev("radar", "fast"), ev("lidar", "!fast"), ev("cam", "left")];
        assert_eq!(justify(&evidence, &[], &[]).unwrap(), set(&["lidar", "radar"]));
    }

    #[test]
    fn uninvolved_evidence_is_left_out() {
        let evidence = [ev("e1", "p"), ev("e2", "q"), ev("e3", "r")];
        let got = justify(&evidence, &[], &[parse_formula("!p | !q").unwrap()]).unwrap();
        assert_eq!(got, set(&["e1", "e2"]));
    }

    #[test]
    fn evidence_independent_conflict_blames_world() {
        let got = justify(&[], &[parse_formula("p").unwrap()], &[parse_formula("!p").unwrap()]).unwrap();
        assert_eq!(got, set(&[WORLD_ATOM]));
    }

    #[test]
    fn satisfiable_context_is_rejected() {
        assert_eq!(justify(&[ev("e", "p")], &[], &[]), Err(EngineError::NoViolation));
    }
}
