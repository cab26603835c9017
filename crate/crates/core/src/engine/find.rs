use std::collections::{BTreeMap, BTreeSet};

use super::justify::{explain, Failure};
use super::resolve::fix;
use super::trace::{ConflictCause, TraceEvent};
use super::universe::{Table, Universe};
use super::{Analysis, EngineError, Outcome, Problem, Survivor, MAX_LEVEL};
use crate::logic::EntityId;
use crate::sat::Lit;
use crate::world::{max_consistent_sets, maximal_subgoals, Evidence, Goal, GoalBase, GoalId, Role};

/// A failed candidate: group, B's reply and the joint goal mask it breaks.
type Verdict = Result<(), (usize, usize, u64)>;

/// The information an attempt starts from. Attempts on equal states are
/// computed once.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct State {
    pub evidence: BTreeSet<EntityId>,
    pub discarded: BTreeSet<EntityId>,
    pub commitments: BTreeSet<usize>,
    pub goals_a: BTreeSet<GoalId>,
    pub goals_b: BTreeSet<GoalId>,
    /// A's goals that B has taken on, with B's weight.
    pub adopted: BTreeMap<GoalId, u64>,
}

/// What one attempt learned about its state.
pub(crate) struct Evaluation {
    pub groups: Vec<BTreeSet<EntityId>>,
    allowed_b: Vec<bool>,
    achieved_all: Vec<u64>,
    pub maxima_a: Vec<BTreeSet<GoalId>>,
    survivors: Vec<Survivor>,
    causes: Vec<usize>,
}

impl Evaluation {
    /// Whether one allowed joint strategy wins every goal of `mask` in every group.
    pub(crate) fn jointly_achievable(&self, mask: u64) -> bool {
        let nb = self.allowed_b.len();
        self.achieved_all.iter().enumerate().any(|(c, &m)| self.allowed_b[c % nb] && mask & !m == 0)
    }
}

#[derive(Clone)]
struct Attempt {
    conflict: bool,
    survivors: Vec<Survivor>,
    level: u8,
    selected: Option<BTreeSet<GoalId>>,
}

struct Engine<'p> {
    u: Universe<'p>,
    memo: BTreeMap<State, Option<(usize, Attempt)>>,
    events: Vec<TraceEvent>,
    causes: Vec<ConflictCause>,
    cause_index: BTreeMap<(BTreeSet<EntityId>, usize, usize, u64, u64), usize>,
    attempts: usize,
}

/// Looks for strategies of A that win in all possible worlds whatever
/// rational strategy B follows, climbing the resolution ladder when none
/// exists.
pub fn analyze(problem: &Problem) -> Result<Analysis, EngineError> {
    if problem.options.max_level > MAX_LEVEL {
        return Err(EngineError::InvalidLevel(problem.options.max_level));
    }
    let u = Universe::new(problem)?;
    let mut engine =
        Engine { u, memo: BTreeMap::new(), events: Vec::new(), causes: Vec::new(), cause_index: BTreeMap::new(), attempts: 0 };
    let start = State {
        evidence: problem.evidence.iter().map(|e| e.atom.clone()).collect(),
        discarded: BTreeSet::new(),
        commitments: BTreeSet::new(),
        goals_a: problem.goals_a.ids(),
        goals_b: problem.goals_b.ids(),
        adopted: BTreeMap::new(),
    };
    let result = engine.find(&start)?;
    let resolved = !result.survivors.is_empty();
    Ok(Analysis {
        outcome: Outcome {
            conflict_at_start: result.conflict,
            resolved,
            level: if resolved { result.level } else { problem.options.max_level },
            survivors: result.survivors,
            selected_goals: result.selected,
        },
        events: engine.events,
        causes: engine.causes,
    })
}

fn names(set: &BTreeSet<String>) -> Vec<String> {
    set.iter().cloned().collect()
}

impl<'p> Engine<'p> {
    fn find(&mut self, state: &State) -> Result<Attempt, EngineError> {
        match self.memo.get(state) {
            Some(Some((id, a))) => {
                self.events.push(TraceEvent::AttemptReused { attempt: Some(*id) });
                return Ok(a.clone());
            }
            Some(None) => {
                self.events.push(TraceEvent::AttemptReused { attempt: None });
                return Ok(Attempt { conflict: true, survivors: Vec::new(), level: 0, selected: None });
            }
            None => {}
        }
        self.memo.insert(state.clone(), None);
        let id = self.attempts;
        self.attempts += 1;
        let problem = self.u.problem;
        self.events.push(TraceEvent::AttemptStarted {
            attempt: id,
            evidence: names(&state.evidence),
            discarded: names(&state.discarded),
            commitments: state.commitments.iter().map(|&n| describe_commitment(problem, n)).collect(),
            goals_a: names(&state.goals_a),
            goals_b: names(&state.goals_b),
        });
        let eval = self.evaluate(id, state)?;
        let mut result = Attempt {
            conflict: eval.survivors.is_empty(),
            survivors: eval.survivors.clone(),
            level: 0,
            selected: None,
        };
        if result.conflict {
            self.events.push(TraceEvent::Conflict { attempt: id, causes: eval.causes.len() });
            let causes: Vec<ConflictCause> = eval.causes.iter().map(|&c| self.causes[c].clone()).collect();
            let cause_refs: Vec<&ConflictCause> = causes.iter().collect();
            for level in 1..=problem.options.max_level {
                let step = fix(&self.u, level, state, &eval, &cause_refs);
                let changed = step.state != *state;
                let (groups_before, groups_after, refines) = if changed && level <= 2 {
                    let after = self.world_groups(&step.state)?;
                    let refines = after.as_ref().map(|a| self.refines(a, &eval.groups));
                    (listing(&eval.groups), after.as_deref().map(listing).unwrap_or_default(), refines.or(Some(true)))
                } else {
                    (Vec::new(), Vec::new(), None)
                };
                self.events.push(TraceEvent::Resolution {
                    attempt: id,
                    level,
                    changed,
                    actions: step.actions,
                    refines,
                    groups_before,
                    groups_after,
                });
                if !changed {
                    continue;
                }
                let r = self.find(&step.state)?;
                if !r.survivors.is_empty() {
                    result.survivors = r.survivors;
                    result.level = level.max(r.level);
                    result.selected = step.selected.or(r.selected);
                    break;
                }
            }
        }
        self.events.push(TraceEvent::AttemptFinished {
            attempt: id,
            winning: result.survivors.len(),
            level: result.level,
        });
        self.memo.insert(state.clone(), Some((id, result.clone())));
        Ok(result)
    }

    fn active_evidence(&self, state: &State) -> Vec<Evidence> {
        state.evidence.iter().map(|a| Evidence::new(a.clone(), self.u.bodies[a].clone())).collect()
    }

    /// Member sets of the maximal consistent groups; `None` when no group exists.
    fn world_groups(&self, state: &State) -> Result<Option<Vec<BTreeSet<EntityId>>>, EngineError> {
        let p = self.u.problem;
        let ws = max_consistent_sets(&self.active_evidence(state), &p.facts, &p.world, p.options.horizon)?;
        if ws.groups.is_empty() {
            return Ok(None);
        }
        Ok(Some(ws.groups.into_iter().map(|g| g.members).collect()))
    }

    /// Every new group implies the constraint of some old group.
    fn refines(&self, new: &[BTreeSet<EntityId>], old: &[BTreeSet<EntityId>]) -> bool {
        let mut solver = self.u.solver();
        new.iter().all(|g| {
            let lits = self.u.group_lits(g);
            old.iter().any(|o| {
                self.u.group_lits(o).into_iter().all(|l: Lit| {
                    let mut q = lits.clone();
                    q.push(!l);
                    !solver.solve_lits(&q).is_sat()
                })
            })
        })
    }

    fn base_b(&self, state: &State) -> GoalBase {
        let p = self.u.problem;
        let mut base = p.goals_b.restrict(&state.goals_b);
        for (id, &w) in &state.adopted {
            if let Some(g) = p.goals_a.get(id) {
                base.goals.push(Goal { id: id.clone(), owner: Role::B, formula: g.formula.clone(), weight: w });
            }
        }
        base
    }

    fn evaluate(&mut self, id: usize, state: &State) -> Result<Evaluation, EngineError> {
        let p = self.u.problem;
        let h = p.options.horizon;
        let ws = max_consistent_sets(&self.active_evidence(state), &p.facts, &p.world, h)?;
        self.events.push(TraceEvent::WorldSet {
            attempt: id,
            groups: ws.groups.iter().map(|g| names(&g.members)).collect(),
            degenerate: ws.degenerate.clone(),
        });
        if ws.groups.is_empty() {
            return Err(EngineError::EmptyWorldSet);
        }
        let groups: Vec<BTreeSet<EntityId>> = ws.groups.into_iter().map(|g| g.members).collect();
        let tables: Vec<Table> = groups.iter().map(|g| self.u.table(g).clone()).collect();
        let na = self.u.strats_a.len();
        let nb = self.u.strats_b.len();
        let allowed_b: Vec<bool> = self
            .u
            .strats_b
            .iter()
            .map(|s| state.commitments.iter().all(|&c| p.peer.commitments[c].allows(s, h)))
            .collect();
        let achieved_all: Vec<u64> = (0..na * nb)
            .map(|c| tables.iter().fold(u64::MAX, |m, t| m & t.mask(c / nb, c % nb)))
            .collect();
        for (g, t) in tables.iter().enumerate() {
            let vacuous = (0..na * nb).filter(|&c| allowed_b[c % nb] && t.vacuous(c / nb, c % nb)).count();
            if vacuous > 0 {
                self.events.push(TraceEvent::Vacuity { attempt: id, group: g, joint_strategies: vacuous });
            }
        }
        let cells = |m: u64, masks: &dyn Fn(usize) -> u64| (0..na * nb).any(|c| allowed_b[c % nb] && m & !masks(c) == 0);
        let base_a = p.goals_a.restrict(&state.goals_a);
        let maxima_a = maximal_subgoals(&base_a, |s| cells(self.u.mask_of(s), &|c| achieved_all[c]));
        let base_b = self.base_b(state);
        let maxima_b: Vec<Vec<BTreeSet<GoalId>>> = tables
            .iter()
            .map(|t| maximal_subgoals(&base_b, |s| cells(self.u.mask_of(s), &|c| t.mask(c / nb, c % nb))))
            .collect();
        self.events.push(TraceEvent::Maxima {
            attempt: id,
            goals_a: maxima_a.iter().map(names).collect(),
            goals_b: maxima_b.iter().map(|v| v.iter().map(names).collect()).collect(),
        });
        let masks_a: Vec<u64> = maxima_a.iter().map(|s| self.u.mask_of(s)).collect();
        // B's rational replies per group: (strategy, goal mask) pairs.
        let replies: Vec<Vec<(usize, u64)>> = tables
            .iter()
            .zip(&maxima_b)
            .map(|(t, maxima)| {
                let mut out = Vec::new();
                for j in (0..nb).filter(|&j| allowed_b[j]) {
                    for s in maxima {
                        let m = self.u.mask_of(s);
                        if (0..na).any(|i| m & !t.mask(i, j) == 0) {
                            out.push((j, m));
                        }
                    }
                }
                out
            })
            .collect();
        let mut verdicts: BTreeMap<(usize, usize), Verdict> = BTreeMap::new();
        let mut survivors = Vec::new();
        let mut causes = Vec::new();
        let mut count = 0;
        let mut pending = Vec::new();
        for i in 0..na {
            for j0 in (0..nb).filter(|&j| allowed_b[j]) {
                let phis: Vec<usize> =
                    (0..masks_a.len()).filter(|&k| masks_a[k] & !achieved_all[i * nb + j0] == 0).collect();
                if phis.is_empty() {
                    continue;
                }
                count += 1;
                let mut first_failure = None;
                let mut won = None;
                for &k in &phis {
                    let v = *verdicts.entry((i, k)).or_insert_with(|| {
                        for (g, t) in tables.iter().enumerate() {
                            for &(j, mb) in &replies[g] {
                                let joint = masks_a[k] | mb;
                                if joint & !t.mask(i, j) != 0 {
                                    return Err((g, j, joint));
                                }
                            }
                        }
                        Ok(())
                    });
                    match v {
                        Ok(()) => {
                            won = Some(k);
                            break;
                        }
                        Err(f) => {
                            first_failure.get_or_insert((k, f));
                        }
                    }
                }
                pending.push((i, j0, won, first_failure));
            }
        }
        self.events.push(TraceEvent::Candidates { attempt: id, count });
        for (i, j0, won, failure) in pending {
            let a = self.u.strats_a[i].to_string();
            let b = self.u.strats_b[j0].to_string();
            match (won, failure) {
                (Some(k), _) => {
                    let goals = names(&maxima_a[k]);
                    self.events.push(TraceEvent::Verdict { attempt: id, a: a.clone(), b: b.clone(), goals: goals.clone(), winning: true, cause: None });
                    survivors.push(Survivor { a, b, goals });
                }
                (None, Some((k, (g, j, joint)))) => {
                    let key = (groups[g].clone(), i, j, joint, masks_a[k]);
                    let c = match self.cause_index.get(&key) {
                        Some(&c) => c,
                        None => {
                            let failure = Failure {
                                group: g,
                                members: &groups[g],
                                i,
                                j,
                                mask: tables[g].mask(i, j),
                                joint,
                                target: masks_a[k],
                            };
                            let cause = explain(&self.u, &failure, &state.evidence)?;
                            self.causes.push(cause.clone());
                            let c = self.causes.len() - 1;
                            self.cause_index.insert(key, c);
                            self.events.push(TraceEvent::Cause { attempt: id, index: c, cause });
                            c
                        }
                    };
                    if !causes.contains(&c) {
                        causes.push(c);
                    }
                    self.events.push(TraceEvent::Verdict {
                        attempt: id,
                        a,
                        b,
                        goals: names(&maxima_a[k]),
                        winning: false,
                        cause: Some(c),
                    });
                }
                (None, None) => unreachable!("candidate without a goal"),
            }
        }
        Ok(Evaluation { groups, allowed_b, achieved_all, maxima_a, survivors, causes })
    }
}

fn listing(groups: &[BTreeSet<EntityId>]) -> Vec<Vec<EntityId>> {
    groups.iter().map(names).collect()
}

fn describe_commitment(p: &Problem, n: usize) -> String {
    let c = &p.peer.commitments[n];
    format!("{}: {}", c.step.map_or("*".to_string(), |t| t.to_string()), c.constraint)
}
