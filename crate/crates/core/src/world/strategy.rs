use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ConsistentGroup, Role, Run, WorldError, WorldModel};
use crate::sat::{Lit, SolveResult};
use crate::temporal::{TemporalError, TimedEncoding};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyMode {
    #[default]
    Sequence,
    Reactive,
}

impl StrategyMode {
    pub fn name(self) -> &'static str {
        match self {
            StrategyMode::Sequence => "sequence",
            StrategyMode::Reactive => "reactive",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "sequence" => Some(StrategyMode::Sequence),
            "reactive" => Some(StrategyMode::Reactive),
            _ => None,
        }
    }
}

/// Observed valuations `s_0 .. s_t`; decides the action at step `t`.
pub type History = Vec<Vec<bool>>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Decisions {
    /// One action per step, ignoring observations.
    Sequence(Vec<String>),
    /// One action per reachable history, sorted by history.
    Reactive(Vec<(History, String)>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Strategy {
    pub owner: Role,
    pub decisions: Decisions,
}

impl Strategy {
    pub fn sequence(owner: Role, actions: &[&str]) -> Self {
        Strategy { owner, decisions: Decisions::Sequence(actions.iter().map(|a| a.to_string()).collect()) }
    }

    /// Every action the strategy may take at step `t`.
    pub fn actions_at(&self, t: usize) -> BTreeSet<&str> {
        match &self.decisions {
            Decisions::Sequence(seq) => seq.get(t).map(String::as_str).into_iter().collect(),
            Decisions::Reactive(map) => {
                map.iter().filter(|(h, _)| h.len() == t + 1).map(|(_, a)| a.as_str()).collect()
            }
        }
    }

    /// The action chosen after observing `history`.
    pub fn decide(&self, history: &[Vec<bool>]) -> Option<&str> {
        let t = history.len().checked_sub(1)?;
        match &self.decisions {
            Decisions::Sequence(seq) => seq.get(t).map(String::as_str),
            Decisions::Reactive(map) => map.iter().find(|(h, _)| h == history).map(|(_, a)| a.as_str()),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.decisions {
            Decisions::Sequence(seq) => write!(f, "{}", seq.join(", ")),
            Decisions::Reactive(map) => {
                let parts: Vec<String> = map
                    .iter()
                    .map(|(h, a)| {
                        let obs: Vec<String> = h
                            .iter()
                            .map(|s| s.iter().map(|&b| if b { '1' } else { '0' }).collect())
                            .collect();
                        format!("{} -> {a}", obs.join("."))
                    })
                    .collect();
                write!(f, "{{{}}}", parts.join("; "))
            }
        }
    }
}

/// Observation histories of length `1..=horizon` that occur on some run of
/// `w`, sorted by length and then lexicographically.
pub fn reachable_histories(
    w: &WorldModel,
    horizon: usize,
    role: Role,
    limit: usize,
) -> Result<Vec<History>, TemporalError> {
    if horizon == 0 {
        return Ok(Vec::new());
    }
    let enc = TimedEncoding::new(w, horizon)?;
    let observed = w.observed(role);
    let lits: Vec<Vec<Lit>> = (0..horizon)
        .map(|t| observed.iter().map(|v| enc.state_lit(v, t).expect("declared")).collect())
        .collect();
    let mut solver = enc.solver();
    let mut full = BTreeSet::new();
    while let SolveResult::Sat(model) = solver.solve_lits(&[]) {
        let proj: History = lits
            .iter()
            .map(|row| row.iter().map(|&l| crate::sat::lit_value(&model, l)).collect())
            .collect();
        let block: Vec<Lit> = lits
            .iter()
            .zip(&proj)
            .flat_map(|(row, vals)| row.iter().zip(vals).map(|(&l, &b)| if b { !l } else { l }))
            .collect();
        full.insert(proj);
        if full.len() > limit {
            return Err(WorldError::Budget { role, count: format!("more than {limit}"), budget: limit as u64 }.into());
        }
        solver.add_clause(&block);
    }
    let mut out: BTreeSet<(usize, History)> = BTreeSet::new();
    for h in &full {
        for len in 1..=horizon {
            out.insert((len, h[..len].to_vec()));
        }
    }
    Ok(out.into_iter().map(|(_, h)| h).collect())
}

fn count(base: usize, exp: usize) -> u128 {
    (base as u128).checked_pow(exp as u32).filter(|_| exp <= u32::MAX as usize).unwrap_or(u128::MAX)
}

/// Every strategy of `role` in lexicographic order of the declared alphabet.
pub fn enumerate_strategies(
    role: Role,
    w: &WorldModel,
    horizon: usize,
    mode: StrategyMode,
    budget: u64,
) -> Result<Vec<Strategy>, WorldError> {
    let alphabet = w.alphabet(role);
    if alphabet.is_empty() {
        return Err(WorldError::EmptyAlphabet(role));
    }
    let histories = match mode {
        StrategyMode::Sequence => Vec::new(),
        StrategyMode::Reactive => {
            reachable_histories(w, horizon, role, usize::try_from(budget).unwrap_or(usize::MAX))?
        }
    };
    let slots = match mode {
        StrategyMode::Sequence => horizon,
        StrategyMode::Reactive => histories.len(),
    };
    let total = count(alphabet.len(), slots);
    if total > u128::from(budget) {
        let shown = if total == u128::MAX { "more than 2^127".to_string() } else { total.to_string() };
        return Err(WorldError::Budget { role, count: shown, budget });
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut digits = vec![0usize; slots];
    loop {
        let picks = digits.iter().map(|&d| alphabet[d].clone());
        let decisions = match mode {
            StrategyMode::Sequence => Decisions::Sequence(picks.collect()),
            StrategyMode::Reactive => Decisions::Reactive(histories.iter().cloned().zip(picks).collect()),
        };
        out.push(Strategy { owner: role, decisions });
        let mut i = slots;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < alphabet.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Runs of `w` under both strategies inside one consistent group.
pub fn runs_of(
    a: &Strategy,
    b: &Strategy,
    group: &ConsistentGroup,
    w: &WorldModel,
    horizon: usize,
) -> Result<Vec<Run>, WorldError> {
    let mut enc = TimedEncoding::new(w, horizon)?;
    let g = enc.goal_lit(&group.constraint, 0)?;
    let mut lits = vec![g];
    for s in [a, b] {
        let histories = match s.decisions {
            Decisions::Sequence(_) => Vec::new(),
            Decisions::Reactive(_) => reachable_histories(w, horizon, s.owner, usize::MAX)?,
        };
        lits.extend(enc.strategy_lits(s, w, &histories)?);
    }
    let mut runs = enc.enumerate_runs(&lits, usize::MAX);
    runs.sort();
    Ok(runs)
}
