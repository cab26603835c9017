use crate::logic::Formula;
use crate::sat::SolveResult;
use crate::world::{Run, WorldModel};

use super::{TemporalError, TimedEncoding};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WinCheck {
    /// Every run satisfies the goals. `vacuous` when there is no run at all.
    Winning { vacuous: bool },
    Counterexample(Run),
}

/// Decides whether `world ∧ psi ∧ ¬goals` is unsatisfiable. All three
/// formulas mention timed variables of `w` unrolled to `horizon`.
pub fn check_winning(
    w: &WorldModel,
    horizon: usize,
    psi: &Formula,
    world: &Formula,
    goals: &Formula,
) -> Result<WinCheck, TemporalError> {
    let mut enc = TimedEncoding::declare(w, horizon)?;
    enc.assert_timed(world)?;
    enc.assert_timed(psi)?;
    let g = enc.timed_lit(goals)?;
    let mut solver = enc.solver();
    if !solver.solve_lits(&[]).is_sat() {
        return Ok(WinCheck::Winning { vacuous: true });
    }
    Ok(match solver.solve_lits(&[!g]) {
        SolveResult::Unsat(_) => WinCheck::Winning { vacuous: false },
        SolveResult::Sat(model) => WinCheck::Counterexample(enc.decode_run(&model)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temporal::{encode_goal, unroll_world};

    fn world() -> WorldModel {
        let mut w = WorldModel::new(vec!["p".into()]);
        w.actions_a = vec!["a".into()];
        w.actions_b = vec!["b".into()];
        w
    }

    #[test]
    fn trivial_goal_is_winning() {
        let w = world();
        let u = unroll_world(&w, 1).unwrap();
        assert_eq!(
            check_winning(&w, 1, &Formula::Top, &u, &Formula::Top).unwrap(),
            WinCheck::Winning { vacuous: false }
        );
    }

    #[test]
    fn empty_run_set_is_vacuous() {
        let w = world();
        let u = Formula::and(unroll_world(&w, 1).unwrap(), Formula::Bottom);
        assert_eq!(
            check_winning(&w, 1, &Formula::Top, &u, &Formula::Bottom).unwrap(),
            WinCheck::Winning { vacuous: true }
        );
    }

    #[test]
    fn free_variable_yields_counterexample() {
        let w = world();
        let u = unroll_world(&w, 1).unwrap();
        let g = encode_goal(&Formula::var("p"), 1, 0).unwrap();
        match check_winning(&w, 1, &Formula::Top, &u, &g).unwrap() {
            WinCheck::Counterexample(run) => assert!(!run.holds("p", 0)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
