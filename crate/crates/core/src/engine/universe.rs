use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::{EngineError, Problem};
use crate::logic::{EntityId, Formula};
use crate::sat::{lit_value, Lit, SolveResult, Solver};
use crate::temporal::{encode_goal, TimedEncoding};
use crate::world::{bodies_by_atom, enumerate_strategies, reachable_histories, Evidence, Role, Strategy};

/// Goal outcomes of every joint strategy inside one consistent group.
#[derive(Clone, Debug)]
pub(crate) struct Table {
    nb: usize,
    masks: Vec<u64>,
    vacuous: Vec<bool>,
}

impl Table {
    pub(crate) fn mask(&self, i: usize, j: usize) -> u64 {
        self.masks[i * self.nb + j]
    }

    pub(crate) fn vacuous(&self, i: usize, j: usize) -> bool {
        self.vacuous[i * self.nb + j]
    }
}

/// Everything that stays fixed across attempts: the encoding, literals for
/// every evidence body and goal, and both strategy spaces.
pub(crate) struct Universe<'p> {
    pub(crate) problem: &'p Problem,
    pub(crate) enc: TimedEncoding,
    pub(crate) bodies: BTreeMap<EntityId, Formula>,
    evidence_lits: BTreeMap<EntityId, Lit>,
    /// Goal ids in index order; bit `k` of a mask refers to `goal_ids[k]`.
    pub(crate) goal_ids: Vec<String>,
    goal_lits: Vec<Lit>,
    pub(crate) strats_a: Vec<Strategy>,
    pub(crate) strats_b: Vec<Strategy>,
    lits_a: Vec<Vec<Lit>>,
    lits_b: Vec<Vec<Lit>>,
    solver: Solver,
    tables: BTreeMap<BTreeSet<EntityId>, Table>,
}

impl<'p> Universe<'p> {
    pub(crate) fn new(problem: &'p Problem) -> Result<Self, EngineError> {
        let w = &problem.world;
        let h = problem.options.horizon;
        let mut enc = TimedEncoding::new(w, h)?;
        for f in &problem.facts {
            let timed = encode_goal(f, h, 0)?;
            enc.assert_timed(&timed)?;
        }
        let all_evidence: Vec<Evidence> =
            problem.evidence.iter().chain(problem.peer.truths.iter()).cloned().collect();
        let bodies = bodies_by_atom(&all_evidence);
        let mut evidence_lits = BTreeMap::new();
        for (atom, body) in &bodies {
            evidence_lits.insert(atom.clone(), enc.goal_lit(body, 0)?);
        }
        let mut goal_ids = Vec::new();
        let mut goal_lits = Vec::new();
        for g in problem.goals_a.goals.iter().chain(&problem.goals_b.goals) {
            if goal_ids.contains(&g.id) {
                return Err(EngineError::DuplicateGoal(g.id.clone()));
            }
            goal_ids.push(g.id.clone());
            goal_lits.push(enc.goal_lit(&g.formula, 0)?);
        }
        if goal_ids.len() > 20 {
            return Err(EngineError::TooManyGoals(goal_ids.len()));
        }
        let opts = &problem.options;
        let strats_a = enumerate_strategies(Role::A, w, h, opts.mode, opts.budget)?;
        let strats_b = enumerate_strategies(Role::B, w, h, opts.mode, opts.budget)?;
        let joint = (strats_a.len() as u128) * (strats_b.len() as u128);
        if joint > u128::from(opts.budget) {
            return Err(EngineError::JointBudget { count: joint, budget: opts.budget });
        }
        let mut lits_a = Vec::new();
        let mut lits_b = Vec::new();
        for (role, strats, out) in [(Role::A, &strats_a, &mut lits_a), (Role::B, &strats_b, &mut lits_b)] {
            let histories = match opts.mode {
                crate::world::StrategyMode::Sequence => Vec::new(),
                crate::world::StrategyMode::Reactive => reachable_histories(w, h, role, usize::MAX)?,
            };
            for s in strats {
                out.push(enc.strategy_lits(s, w, &histories)?);
            }
        }
        let solver = enc.solver();
        Ok(Universe {
            problem,
            enc,
            bodies,
            evidence_lits,
            goal_ids,
            goal_lits,
            strats_a,
            strats_b,
            lits_a,
            lits_b,
            solver,
            tables: BTreeMap::new(),
        })
    }

    pub(crate) fn solver(&self) -> Solver {
        self.solver.clone()
    }

    pub(crate) fn evidence_lit(&self, atom: &str) -> Lit {
        self.evidence_lits[atom]
    }

    pub(crate) fn group_lits(&self, members: &BTreeSet<EntityId>) -> Vec<Lit> {
        members.iter().map(|a| self.evidence_lit(a)).collect()
    }

    pub(crate) fn goal_lit(&self, k: usize) -> Lit {
        self.goal_lits[k]
    }

    pub(crate) fn goal_index(&self, id: &str) -> Option<usize> {
        self.goal_ids.iter().position(|g| g == id)
    }

    pub(crate) fn mask_of<'a>(&self, ids: impl IntoIterator<Item = &'a String>) -> u64 {
        ids.into_iter().filter_map(|id| self.goal_index(id)).fold(0, |m, k| m | 1 << k)
    }

    pub(crate) fn ids_of(&self, mask: u64) -> BTreeSet<String> {
        (0..self.goal_ids.len()).filter(|k| mask >> k & 1 == 1).map(|k| self.goal_ids[k].clone()).collect()
    }

    pub(crate) fn all_goals_mask(&self) -> u64 {
        (1u64 << self.goal_ids.len()) - 1
    }

    pub(crate) fn joint_lits(&self, i: usize, j: usize) -> Vec<Lit> {
        self.lits_a[i].iter().chain(&self.lits_b[j]).copied().collect()
    }

    /// The outcome table of a group, computed once per member set.
    pub(crate) fn table(&mut self, members: &BTreeSet<EntityId>) -> &Table {
        if !self.tables.contains_key(members) {
            let t = self.compute_table(members);
            self.tables.insert(members.clone(), t);
        }
        &self.tables[members]
    }

    fn compute_table(&self, members: &BTreeSet<EntityId>) -> Table {
        let group = self.group_lits(members);
        let nb = self.strats_b.len();
        let all = self.all_goals_mask();
        let rows: Vec<Vec<(u64, bool)>> = (0..self.strats_a.len())
            .into_par_iter()
            .map(|i| {
                let mut solver = self.solver.clone();
                (0..nb)
                    .map(|j| {
                        let mut base = group.clone();
                        base.extend(self.joint_lits(i, j));
                        let model = match solver.solve_lits(&base) {
                            SolveResult::Unsat(_) => return (all, true),
                            SolveResult::Sat(m) => m,
                        };
                        let mut open: Vec<bool> =
                            self.goal_lits.iter().map(|&g| lit_value(&model, g)).collect();
                        let mut mask = 0u64;
                        for k in 0..self.goal_lits.len() {
                            if !open[k] {
                                continue;
                            }
                            base.push(!self.goal_lits[k]);
                            match solver.solve_lits(&base) {
                                SolveResult::Unsat(_) => mask |= 1 << k,
                                SolveResult::Sat(m) => {
                                    for (o, &g) in open.iter_mut().zip(&self.goal_lits) {
                                        *o = *o && lit_value(&m, g);
                                    }
                                }
                            }
                            base.pop();
                        }
                        (mask, false)
                    })
                    .collect()
            })
            .collect();
        let mut masks = Vec::with_capacity(rows.len() * nb);
        let mut vacuous = Vec::with_capacity(rows.len() * nb);
        for row in rows {
            for (m, v) in row {
                masks.push(m);
                vacuous.push(v);
            }
        }
        Table { nb, masks, vacuous }
    }
}
