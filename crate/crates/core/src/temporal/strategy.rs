use crate::logic::Formula;
use crate::world::{reachable_histories, Decisions, Role, Strategy, WorldModel};

use super::{action_name, timed_name, TemporalError};

/// Obligations `(history condition, role, action, step)` imposed by `s`.
pub(crate) fn strategy_obligations(
    s: &Strategy,
    w: &WorldModel,
    horizon: usize,
    histories: &[Vec<Vec<bool>>],
) -> Result<Vec<(Formula, Role, String, usize)>, TemporalError> {
    let alphabet = w.alphabet(s.owner);
    let check = |a: &String| {
        if alphabet.contains(a) {
            Ok(())
        } else {
            Err(TemporalError::UnknownAction(a.clone()))
        }
    };
    let mut out = Vec::new();
    match &s.decisions {
        Decisions::Sequence(seq) => {
            if seq.len() != horizon {
                return Err(TemporalError::PartialStrategy(format!(
                    "sequence has {} actions for horizon {horizon}",
                    seq.len()
                )));
            }
            for (t, a) in seq.iter().enumerate() {
                check(a)?;
                out.push((Formula::Top, s.owner, a.clone(), t));
            }
        }
        Decisions::Reactive(map) => {
            let observed = w.observed(s.owner);
            for h in histories {
                let Some(t) = h.len().checked_sub(1).filter(|t| *t < horizon) else {
                    continue;
                };
                let action = map
                    .iter()
                    .find(|(k, _)| k == h)
                    .map(|(_, a)| a)
                    .ok_or_else(|| TemporalError::PartialStrategy(format!("no decision for history {h:?}")))?;
                check(action)?;
                let cond = Formula::and_all(h.iter().enumerate().flat_map(|(k, vals)| {
                    observed.iter().zip(vals).map(move |(v, &b)| {
                        let x = Formula::Var(timed_name(v, k));
                        if b {
                            x
                        } else {
                            Formula::not(x)
                        }
                    })
                }));
                out.push((cond, s.owner, action.clone(), t));
            }
        }
    }
    Ok(out)
}

/// Formula over timed variables whose conjunction with the unrolled world
/// has exactly the runs that follow `s`.
pub fn encode_strategy(s: &Strategy, w: &WorldModel, horizon: usize) -> Result<Formula, TemporalError> {
    let histories = match s.decisions {
        Decisions::Sequence(_) => Vec::new(),
        Decisions::Reactive(_) => reachable_histories(w, horizon, s.owner, usize::MAX)?,
    };
    let parts = strategy_obligations(s, w, horizon, &histories)?.into_iter().map(|(cond, role, a, t)| {
        let act = Formula::Var(action_name(role, &a, t));
        if cond == Formula::Top {
            act
        } else {
            Formula::implies(cond, act)
        }
    });
    Ok(Formula::and_all(parts))
}
