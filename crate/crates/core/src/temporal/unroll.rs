use std::collections::{BTreeMap, BTreeSet};

use crate::logic::Formula;
use crate::sat::{lit_value, CnfBuilder, Lit, SolveResult, Solver};
use crate::world::{JointAction, Role, Run, Strategy, WorldModel};

use super::{action_name, encode_goal, timed_name, TemporalError};

fn timed_var(v: &str, t: usize) -> Formula {
    Formula::Var(timed_name(v, t))
}

fn act_var(role: Role, action: &str, t: usize) -> Formula {
    Formula::Var(action_name(role, action, t))
}

/// Propositional formula whose models are the length-`horizon` runs of `w`.
///
/// Step 0 satisfies `init` and `current`. Every step picks exactly one action
/// per role. A rule fires when its action is taken and its guard holds; a
/// variable takes the value given by each fired rule that assigns it (so
/// disagreeing rules admit no successor) and keeps its value otherwise.
pub fn unroll_world(w: &WorldModel, horizon: usize) -> Result<Formula, TemporalError> {
    w.validate()?;
    let mut parts = Vec::new();
    for f in [&w.init, &w.current] {
        if *f != Formula::Top {
            parts.push(encode_goal(f, horizon, 0)?);
        }
    }
    for t in 0..horizon {
        for role in Role::ALL {
            let acts: Vec<Formula> = w.alphabet(role).iter().map(|a| act_var(role, a, t)).collect();
            parts.push(Formula::or_all(acts.iter().cloned()));
            for i in 0..acts.len() {
                for j in (i + 1)..acts.len() {
                    parts.push(Formula::not(Formula::and(acts[i].clone(), acts[j].clone())));
                }
            }
        }
        let fires: Vec<Formula> = w
            .rules
            .iter()
            .map(|r| {
                let act = act_var(r.role, &r.action, t);
                if r.guard == Formula::Top {
                    Ok(act)
                } else {
                    Ok(Formula::and(act, encode_goal(&r.guard, horizon, t)?))
                }
            })
            .collect::<Result<_, TemporalError>>()?;
        for (r, fire) in w.rules.iter().zip(&fires) {
            for e in &r.effects {
                let value = encode_goal(&e.value, horizon, t)?;
                parts.push(Formula::implies(fire.clone(), Formula::iff(timed_var(&e.var, t + 1), value)));
            }
        }
        for v in &w.vars {
            let keep = Formula::iff(timed_var(v, t + 1), timed_var(v, t));
            let assigning: Vec<Formula> = w
                .rules
                .iter()
                .zip(&fires)
                .filter(|(r, _)| r.effects.iter().any(|e| e.var == *v))
                .map(|(_, f)| f.clone())
                .collect();
            if assigning.is_empty() {
                parts.push(keep);
            } else {
                parts.push(Formula::implies(Formula::not(Formula::or_all(assigning)), keep));
            }
        }
    }
    Ok(Formula::and_all(parts))
}

/// A CNF encoding of an unrolled world with a fixed variable numbering:
/// state variables first (step-major), then action variables.
#[derive(Clone, Debug)]
pub struct TimedEncoding {
    builder: CnfBuilder,
    horizon: usize,
    vars: Vec<String>,
    alphabets: [Vec<String>; 3],
}

impl TimedEncoding {
    /// Declares every timed variable and asserts the unrolled world.
    pub fn new(w: &WorldModel, horizon: usize) -> Result<Self, TemporalError> {
        let world = unroll_world(w, horizon)?;
        let mut enc = Self::declare(w, horizon)?;
        enc.builder.assert_formula(&world)?;
        Ok(enc)
    }

    /// Declares every timed variable without constraining them.
    pub fn declare(w: &WorldModel, horizon: usize) -> Result<Self, TemporalError> {
        w.validate()?;
        let mut builder = CnfBuilder::new();
        for t in 0..=horizon {
            for v in &w.vars {
                builder.declare(&timed_name(v, t));
            }
        }
        for t in 0..horizon {
            for role in Role::ALL {
                for a in w.alphabet(role) {
                    builder.declare(&action_name(role, a, t));
                }
            }
        }
        builder.close();
        Ok(TimedEncoding {
            builder,
            horizon,
            vars: w.vars.clone(),
            alphabets: [w.actions_a.clone(), w.actions_b.clone(), w.actions_env.clone()],
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn builder(&self) -> &CnfBuilder {
        &self.builder
    }

    pub fn builder_mut(&mut self) -> &mut CnfBuilder {
        &mut self.builder
    }

    fn alphabet(&self, role: Role) -> &[String] {
        match role {
            Role::A => &self.alphabets[0],
            Role::B => &self.alphabets[1],
            Role::Env => &self.alphabets[2],
        }
    }

    pub fn state_lit(&self, var: &str, t: usize) -> Option<Lit> {
        self.builder.lookup(&timed_name(var, t))
    }

    pub fn action_lit(&self, role: Role, action: &str, t: usize) -> Option<Lit> {
        self.builder.lookup(&action_name(role, action, t))
    }

    /// Literal for an untimed formula read at step `at`.
    pub fn goal_lit(&mut self, g: &Formula, at: usize) -> Result<Lit, TemporalError> {
        let timed = encode_goal(g, self.horizon, at)?;
        Ok(self.builder.lit(&timed)?)
    }

    /// Literal for a formula that already mentions timed variables.
    pub fn timed_lit(&mut self, f: &Formula) -> Result<Lit, TemporalError> {
        Ok(self.builder.lit(f)?)
    }

    pub fn assert_timed(&mut self, f: &Formula) -> Result<(), TemporalError> {
        Ok(self.builder.assert_formula(f)?)
    }

    /// Assumption literals that restrict runs to those following `s`.
    pub fn strategy_lits(
        &mut self,
        s: &Strategy,
        w: &WorldModel,
        histories: &[Vec<Vec<bool>>],
    ) -> Result<Vec<Lit>, TemporalError> {
        let mut out = Vec::new();
        for (cond, role, action, t) in super::strategy_obligations(s, w, self.horizon, histories)? {
            let act = self
                .action_lit(role, &action, t)
                .ok_or_else(|| TemporalError::UnknownAction(action.clone()))?;
            if cond == Formula::Top {
                out.push(act);
            } else {
                out.push(self.builder.lit(&Formula::implies(cond, act_var(role, &action, t)))?);
            }
        }
        Ok(out)
    }

    pub fn solver(&self) -> Solver {
        let p = self.builder.problem();
        Solver::new(p.num_vars, &p.clauses)
    }

    pub fn decode_run(&self, model: &[bool]) -> Run {
        let states = (0..=self.horizon)
            .map(|t| {
                self.vars
                    .iter()
                    .filter(|v| lit_value(model, self.state_lit(v, t).expect("declared")))
                    .cloned()
                    .collect::<BTreeSet<String>>()
            })
            .collect();
        let pick = |role: Role, t: usize| {
            self.alphabet(role)
                .iter()
                .find(|a| lit_value(model, self.action_lit(role, a, t).expect("declared")))
                .cloned()
                .unwrap_or_default()
        };
        let actions = (0..self.horizon)
            .map(|t| JointAction { a: pick(Role::A, t), b: pick(Role::B, t), env: pick(Role::Env, t) })
            .collect();
        Run { states, actions }
    }

    /// Literals pinning the state and action variables of `run`.
    pub fn run_lits(&self, run: &Run, with_actions: bool, with_states: bool) -> Vec<Lit> {
        let mut out = Vec::new();
        if with_states {
            for (t, s) in run.states.iter().enumerate() {
                for v in &self.vars {
                    let l = self.state_lit(v, t).expect("declared");
                    out.push(if s.contains(v) { l } else { !l });
                }
            }
        }
        if with_actions {
            for (t, a) in run.actions.iter().enumerate() {
                for (role, name) in [(Role::A, &a.a), (Role::B, &a.b), (Role::Env, &a.env)] {
                    out.push(self.action_lit(role, name, t).expect("declared"));
                }
            }
        }
        out
    }

    /// Models of the encoding under `assumptions`, projected onto state and
    /// action variables, in solver order. Stops after `limit` runs.
    pub fn enumerate_runs(&self, assumptions: &[Lit], limit: usize) -> Vec<Run> {
        let mut solver = self.solver();
        let mut runs = Vec::new();
        while runs.len() < limit {
            match solver.solve_lits(assumptions) {
                SolveResult::Unsat(_) => break,
                SolveResult::Sat(model) => {
                    let run = self.decode_run(&model);
                    let block: Vec<Lit> = self.run_lits(&run, true, true).into_iter().map(|l| !l).collect();
                    runs.push(run);
                    solver.add_clause(&block);
                }
            }
        }
        runs
    }

    /// Name-to-index map of the declared timed variables.
    pub fn names(&self) -> BTreeMap<String, u32> {
        self.builder.names()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::world::{Assignment, Rule};

    fn toggle_world() -> WorldModel {
        let mut w = WorldModel::new(vec!["p".into()]);
        w.init = parse_formula("!p").unwrap();
        w.actions_a = vec!["toggle".into()];
        w.actions_b = vec!["idle".into()];
        w.rules.push(Rule {
            role: Role::A,
            action: "toggle".into(),
            guard: Formula::Top,
            effects: vec![Assignment { var: "p".into(), value: parse_formula("!p").unwrap() }],
        });
        w
    }

    #[test]
    fn toggle_has_one_run() {
        let enc = TimedEncoding::new(&toggle_world(), 1).unwrap();
        let runs = enc.enumerate_runs(&[], 10);
        assert_eq!(runs.len(), 1);
        assert!(!runs[0].holds("p", 0));
        assert!(runs[0].holds("p", 1));
    }

    #[test]
    fn zero_horizon_is_the_initial_condition() {
        let w = toggle_world();
        assert_eq!(unroll_world(&w, 0).unwrap(), parse_formula("!p").unwrap().map_vars(&|v| timed_name(v, 0)));
    }

    #[test]
    fn environment_choices_multiply_runs() {
        let mut w = WorldModel::new(vec!["p".into(), "q".into()]);
        w.init = parse_formula("!p & !q").unwrap();
        w.actions_a = vec!["a".into()];
        w.actions_b = vec!["b".into()];
        w.actions_env = vec!["left".into(), "right".into()];
        for (act, var) in [("left", "p"), ("right", "q")] {
            w.rules.push(Rule {
                role: Role::Env,
                action: act.into(),
                guard: Formula::Top,
                effects: vec![Assignment { var: var.into(), value: Formula::Top }],
            });
        }
        let enc = TimedEncoding::new(&w, 1).unwrap();
        assert_eq!(enc.enumerate_runs(&[], 10).len(), 2);
    }

    #[test]
    fn empty_variable_set_is_rejected() {
        let mut w = toggle_world();
        w.vars.clear();
        w.init = Formula::Top;
        w.rules.clear();
        assert!(unroll_world(&w, 1).is_err());
    }
}
