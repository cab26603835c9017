//! Independent reference implementations used as test oracles. Nothing here
//! goes through the SAT encoding.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use conflict_core::logic::Formula;
use conflict_core::world::{Assignment, Evidence, Goal, GoalBase, JointAction, Role, Rule, Run, WorldModel};
use conflict_core::engine::{Options, PeerModel, Problem};
use rand::rngs::StdRng;
use rand::Rng;

/// Finite-trace value of `f` at step `t` of a trace with `h + 1` states.
pub fn eval_trace(f: &Formula, val: &dyn Fn(&str, usize) -> bool, t: usize, h: usize) -> bool {
    use Formula::*;
    let ev = |g: &Formula, k: usize| eval_trace(g, val, k, h);
    match f {
        Bottom => false,
        Top => true,
        Var(v) => val(v, t),
        Not(a) => !ev(a, t),
        And(a, b) => ev(a, t) && ev(b, t),
        Or(a, b) => ev(a, t) || ev(b, t),
        Implies(a, b) => !ev(a, t) || ev(b, t),
        Iff(a, b) => ev(a, t) == ev(b, t),
        Next(a) => t < h && ev(a, t + 1),
        Prev(a) => t > 0 && ev(a, t - 1),
        Until(a, b) => (t..=h).any(|k| ev(b, k) && (t..k).all(|m| ev(a, m))),
        Since(a, b) => (0..=t).any(|k| ev(b, k) && (k + 1..=t).all(|m| ev(a, m))),
        Globally(a) => (t..=h).all(|k| ev(a, k)),
        Finally(a) => (t..=h).any(|k| ev(a, k)),
        Historically(a) => (0..=t).all(|k| ev(a, k)),
        Belief(..) => panic!("belief operators have no trace semantics"),
    }
}

pub fn holds_on_run(f: &Formula, run: &Run, t: usize) -> bool {
    let h = run.actions.len();
    eval_trace(f, &|v, k| run.states[k].contains(v), t, h)
}

fn eval_state(f: &Formula, state: &BTreeSet<String>) -> bool {
    eval_trace(f, &|v, _| state.contains(v), 0, 0)
}

/// Every run of `w` with `h` steps, by explicit state exploration.
pub fn simulate(w: &WorldModel, h: usize) -> Vec<Run> {
    let mut out = Vec::new();
    for bits in 0u32..1 << w.vars.len() {
        let state: BTreeSet<String> =
            w.vars.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).map(|(_, v)| v.clone()).collect();
        if eval_state(&w.init, &state) && eval_state(&w.current, &state) {
            extend(w, h, Run { states: vec![state], actions: Vec::new() }, &mut out);
        }
    }
    out.sort();
    out
}

fn successor(w: &WorldModel, state: &BTreeSet<String>, joint: &JointAction) -> Option<BTreeSet<String>> {
    let mut assigned: BTreeMap<&str, bool> = BTreeMap::new();
    for r in &w.rules {
        let chosen = match r.role {
            Role::A => &joint.a,
            Role::B => &joint.b,
            Role::Env => &joint.env,
        };
        if *chosen != r.action || !eval_state(&r.guard, state) {
            continue;
        }
        for e in &r.effects {
            let value = eval_state(&e.value, state);
            if let Some(old) = assigned.insert(e.var.as_str(), value) {
                if old != value {
                    return None;
                }
            }
        }
    }
    Some(
        w.vars
            .iter()
            .filter(|v| assigned.get(v.as_str()).copied().unwrap_or_else(|| state.contains(*v)))
            .cloned()
            .collect(),
    )
}

fn extend(w: &WorldModel, h: usize, run: Run, out: &mut Vec<Run>) {
    if run.actions.len() == h {
        out.push(run);
        return;
    }
    let state = run.states.last().expect("non-empty").clone();
    for a in &w.actions_a {
        for b in &w.actions_b {
            for env in &w.actions_env {
                let joint = JointAction { a: a.clone(), b: b.clone(), env: env.clone() };
                if let Some(next) = successor(w, &state, &joint) {
                    let mut r = run.clone();
                    r.states.push(next);
                    r.actions.push(joint);
                    extend(w, h, r, out);
                }
            }
        }
    }
}

/// All action sequences of length `h` over `alphabet`, in lexicographic
/// order of action positions.
pub fn sequences(alphabet: &[String], h: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..h {
        out = out
            .into_iter()
            .flat_map(|s| {
                alphabet.iter().map(move |a| {
                    let mut t = s.clone();
                    t.push(a.clone());
                    t
                })
            })
            .collect();
    }
    out
}

pub fn follows(run: &Run, a: &[String], b: &[String]) -> bool {
    run.actions.iter().enumerate().all(|(t, j)| j.a == a[t] && j.b == b[t])
}

/// Maximal consistent evidence sets by trying every subset, plus the atoms
/// that are inconsistent on their own.
pub fn brute_mcs(
    runs: &[Run],
    bodies: &BTreeMap<String, Formula>,
    facts: &[Formula],
) -> (Vec<BTreeSet<String>>, Vec<String>) {
    let runs: Vec<&Run> = runs.iter().filter(|r| facts.iter().all(|f| holds_on_run(f, r, 0))).collect();
    let atoms: Vec<&String> = bodies.keys().collect();
    if runs.is_empty() {
        return (Vec::new(), atoms.into_iter().cloned().collect());
    }
    let truth: Vec<Vec<bool>> =
        runs.iter().map(|r| atoms.iter().map(|a| holds_on_run(&bodies[*a], r, 0)).collect()).collect();
    let consistent = |mask: u32| truth.iter().any(|row| (0..atoms.len()).all(|k| mask >> k & 1 == 0 || row[k]));
    let degenerate: Vec<String> =
        (0..atoms.len()).filter(|&k| !consistent(1 << k)).map(|k| atoms[k].clone()).collect();
    let mut groups = Vec::new();
    for mask in 0u32..1 << atoms.len() {
        if !consistent(mask) {
            continue;
        }
        let maximal = (0..atoms.len()).all(|k| mask >> k & 1 == 1 || !consistent(mask | 1 << k));
        if maximal {
            groups.push((0..atoms.len()).filter(|k| mask >> k & 1 == 1).map(|k| atoms[k].clone()).collect());
        }
    }
    groups.sort();
    (groups, degenerate)
}

pub struct MicroGoal {
    pub formula: Formula,
    pub weight: u64,
}

/// Maximum-weight masks among `achievable` subsets of `n` goals.
fn maxima(n: usize, weights: &[u64], achievable: impl Fn(u32) -> bool) -> Vec<u32> {
    let mut best = 0;
    let mut out = Vec::new();
    for mask in 0u32..1 << n {
        if !achievable(mask) {
            continue;
        }
        let w: u64 = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| weights[k]).sum();
        if w > best || out.is_empty() {
            if w > best {
                out.clear();
            }
            best = best.max(w);
            out.push(mask);
        } else if w == best {
            out.push(mask);
        }
    }
    out
}

/// Whether A believes it is in a possible conflict with B, quantifying over
/// all strategy pairs in every possible world. `None` when there is no
/// possible world.
pub fn believed_conflict(
    w: &WorldModel,
    h: usize,
    bodies: &BTreeMap<String, Formula>,
    facts: &[Formula],
    goals_a: &[MicroGoal],
    goals_b: &[MicroGoal],
) -> Option<bool> {
    let all = simulate(w, h);
    let (groups, _) = brute_mcs(&all, bodies, facts);
    if groups.is_empty() {
        return None;
    }
    let na = goals_a.len();
    let goals: Vec<&MicroGoal> = goals_a.iter().chain(goals_b).collect();
    let seqs_a = sequences(&w.actions_a, h);
    let seqs_b = sequences(&w.actions_b, h);
    // won[g][i][j]: goals true on every run of group g under (i, j).
    let won: Vec<Vec<Vec<u32>>> = groups
        .iter()
        .map(|g| {
            let runs: Vec<&Run> = all
                .iter()
                .filter(|r| facts.iter().all(|f| holds_on_run(f, r, 0)))
                .filter(|r| g.iter().all(|a| holds_on_run(&bodies[a], r, 0)))
                .collect();
            seqs_a
                .iter()
                .map(|a| {
                    seqs_b
                        .iter()
                        .map(|b| {
                            let mine: Vec<&&Run> = runs.iter().filter(|r| follows(r, a, b)).collect();
                            (0..goals.len())
                                .filter(|&k| mine.iter().all(|r| holds_on_run(&goals[k].formula, r, 0)))
                                .fold(0, |m, k| m | 1 << k)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let subset = |m: u32, of: u32| m & !of == 0;
    let wa: Vec<u64> = goals_a.iter().map(|g| g.weight).collect();
    let wb: Vec<u64> = goals_b.iter().map(|g| g.weight).collect();
    let pairs: Vec<(usize, usize)> =
        (0..seqs_a.len()).flat_map(|i| (0..seqs_b.len()).map(move |j| (i, j))).collect();
    let max_a = maxima(na, &wa, |m| pairs.iter().any(|&(i, j)| won.iter().all(|g| subset(m, g[i][j]))));
    let max_b: Vec<Vec<u32>> = won
        .iter()
        .map(|g| maxima(goals_b.len(), &wb, |m| pairs.iter().any(|&(i, j)| subset(m << na, g[i][j]))))
        .collect();
    let conflict = pairs.iter().all(|&(i, j_help)| {
        max_a.iter().all(|&phi_a| {
            let winning = won.iter().all(|g| subset(phi_a, g[i][j_help]));
            !winning
                || won.iter().enumerate().any(|(g, table)| {
                    max_b[g].iter().any(|&phi_b| {
                        let phi_b = phi_b << na;
                        (0..seqs_b.len()).any(|j| {
                            (0..seqs_a.len()).any(|i2| subset(phi_b, table[i2][j]))
                                && !subset(phi_a | phi_b, table[i][j])
                        })
                    })
                })
        })
    });
    Some(conflict)
}

pub fn var_names(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("v{k}")).collect()
}

/// A random formula of at most `depth` levels over `vars`.
pub fn random_formula(rng: &mut StdRng, vars: &[String], depth: usize, temporal: bool) -> Formula {
    if depth <= 1 || rng.gen_ratio(1, 4) {
        return match rng.gen_range(0..10) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            _ => Formula::Var(vars[rng.gen_range(0..vars.len())].clone()),
        };
    }
    let sub = |rng: &mut StdRng| random_formula(rng, vars, depth - 1, temporal);
    let ops = if temporal { 12 } else { 5 };
    match rng.gen_range(0..ops) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        4 => Formula::iff(sub(rng), sub(rng)),
        5 => Formula::next(sub(rng)),
        6 => Formula::prev(sub(rng)),
        7 => Formula::until(sub(rng), sub(rng)),
        8 => Formula::since(sub(rng), sub(rng)),
        9 => Formula::globally(sub(rng)),
        10 => Formula::finally(sub(rng)),
        _ => Formula::historically(sub(rng)),
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

/// A small random world: up to 3 variables and 2 actions per agent.
pub fn random_world(rng: &mut StdRng) -> WorldModel {
    let vars = var_names(rng.gen_range(1..=3));
    let mut w = WorldModel::new(vars.clone());
    w.actions_a = names("a", rng.gen_range(1..=2));
    w.actions_b = names("b", rng.gen_range(1..=2));
    w.actions_env = names("e", rng.gen_range(1..=2));
    if rng.gen_bool(0.5) {
        w.init = random_formula(rng, &vars, 2, false);
    }
    for role in Role::ALL {
        for action in w.alphabet(role).to_vec() {
            for _ in 0..rng.gen_range(0..=2) {
                let guard = if rng.gen_bool(0.5) { Formula::Top } else { random_formula(rng, &vars, 2, false) };
                let mut targets = vars.clone();
                let mut effects = Vec::new();
                for _ in 0..rng.gen_range(1..=2.min(vars.len())) {
                    let var = targets.remove(rng.gen_range(0..targets.len()));
                    effects.push(Assignment { var, value: random_formula(rng, &vars, 2, false) });
                }
                w.rules.push(Rule { role, action: action.clone(), guard, effects });
            }
        }
    }
    w
}

/// Random evidence over `w` with at most `max_atoms` atoms.
pub fn random_evidence(rng: &mut StdRng, w: &WorldModel, max_atoms: usize, depth: usize) -> Vec<Evidence> {
    (0..rng.gen_range(0..=max_atoms))
        .map(|k| Evidence::new(format!("e{k}"), random_formula(rng, &w.vars, depth, true)))
        .collect()
}

pub fn bodies(evidence: &[Evidence]) -> BTreeMap<String, Formula> {
    let mut out: BTreeMap<String, Formula> = BTreeMap::new();
    for e in evidence {
        out.entry(e.atom.clone())
            .and_modify(|b| *b = Formula::and(b.clone(), e.body.clone()))
            .or_insert_with(|| e.body.clone());
    }
    out
}

pub fn random_goals(rng: &mut StdRng, vars: &[String], owner: Role, prefix: &str, n: usize) -> Vec<Goal> {
    (0..n)
        .map(|k| Goal {
            id: format!("{prefix}{k}"),
            owner,
            formula: random_formula(rng, vars, 3, true),
            weight: rng.gen_range(1..=5),
        })
        .collect()
}

/// A random analysis problem small enough for brute force, stopping at level 0.
pub fn random_problem(rng: &mut StdRng) -> Problem {
    let world = random_world(rng);
    let horizon = rng.gen_range(0..=2);
    let evidence = random_evidence(rng, &world, 3, 2);
    let facts = if rng.gen_bool(0.3) { vec![random_formula(rng, &world.vars, 2, true)] } else { Vec::new() };
    let na = rng.gen_range(1..=2);
    let nb = rng.gen_range(0..=2);
    let goals_a = GoalBase::new(random_goals(rng, &world.vars, Role::A, "ga", na));
    let goals_b = GoalBase::new(random_goals(rng, &world.vars, Role::B, "gb", nb));
    Problem {
        world,
        evidence,
        facts,
        goals_a,
        goals_b,
        peer: PeerModel::default(),
        options: Options { horizon, max_level: 0, ..Options::default() },
    }
}

/// The brute-force verdict for a problem built by [`random_problem`].
pub fn problem_verdict(p: &Problem) -> Option<bool> {
    let micro = |b: &GoalBase| -> Vec<MicroGoal> {
        b.goals.iter().map(|g| MicroGoal { formula: g.formula.clone(), weight: g.weight }).collect()
    };
    believed_conflict(
        &p.world,
        p.options.horizon,
        &bodies(&p.evidence),
        &p.facts,
        &micro(&p.goals_a),
        &micro(&p.goals_b),
    )
}
