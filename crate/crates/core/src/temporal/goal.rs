use crate::logic::Formula;

use super::{timed_name, TemporalError};

/// Bounded finite-trace encoding of `g` at step `at` over steps `0..=horizon`.
///
/// `X` past the last step and `P` before step 0 are false. The result only
/// mentions timed variables `v@t`.
pub fn encode_goal(g: &Formula, horizon: usize, at: usize) -> Result<Formula, TemporalError> {
    if at > horizon {
        return Err(TemporalError::StepOutOfRange { step: at, horizon });
    }
    if g.has_belief() {
        return Err(TemporalError::Epistemic(g.to_string()));
    }
    Ok(enc(g, horizon, at))
}

fn enc(g: &Formula, h: usize, t: usize) -> Formula {
    use Formula::*;
    match g {
        Top => Top,
        Bottom => Bottom,
        Var(v) => Var(timed_name(v, t)),
        Not(a) => Formula::not(enc(a, h, t)),
        And(a, b) => Formula::and(enc(a, h, t), enc(b, h, t)),
        Or(a, b) => Formula::or(enc(a, h, t), enc(b, h, t)),
        Implies(a, b) => Formula::implies(enc(a, h, t), enc(b, h, t)),
        Iff(a, b) => Formula::iff(enc(a, h, t), enc(b, h, t)),
        Next(a) => {
            if t < h {
                enc(a, h, t + 1)
            } else {
                Bottom
            }
        }
        Prev(a) => {
            if t > 0 {
                enc(a, h, t - 1)
            } else {
                Bottom
            }
        }
        Until(a, b) => {
            let mut acc = enc(b, h, h);
            for k in (t..h).rev() {
                acc = Formula::or(enc(b, h, k), Formula::and(enc(a, h, k), acc));
            }
            acc
        }
        Since(a, b) => {
            let mut acc = enc(b, h, 0);
            for k in 1..=t {
                acc = Formula::or(enc(b, h, k), Formula::and(enc(a, h, k), acc));
            }
            acc
        }
        Globally(a) => Formula::and_all((t..=h).map(|k| enc(a, h, k))),
        Finally(a) => Formula::or_all((t..=h).map(|k| enc(a, h, k))),
        Historically(a) => Formula::and_all((0..=t).map(|k| enc(a, h, k))),
        Belief(..) => unreachable!("rejected above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    #[test]
    fn globally_expands_over_the_horizon() {
        let f = encode_goal(&parse_formula("G safe").unwrap(), 2, 0).unwrap();
        let names: Vec<String> = f.vars().into_iter().collect();
        assert_eq!(names, ["safe@0", "safe@1", "safe@2"]);
        assert_eq!(f.eval_prop(&|_| true), Some(true));
        assert_eq!(f.eval_prop(&|v| v != "safe@1"), Some(false));
    }

    #[test]
    fn next_beyond_horizon_is_false() {
        assert_eq!(encode_goal(&parse_formula("X goal").unwrap(), 1, 1).unwrap(), Formula::Bottom);
        assert_eq!(encode_goal(&parse_formula("P goal").unwrap(), 1, 0).unwrap(), Formula::Bottom);
    }

    #[test]
    fn rejects_beliefs_and_bad_steps() {
        let b = Formula::belief(["radar"], Formula::var("p")).unwrap();
        assert!(matches!(encode_goal(&b, 1, 0), Err(TemporalError::Epistemic(_))));
        assert!(matches!(encode_goal(&Formula::Top, 1, 2), Err(TemporalError::StepOutOfRange { .. })));
    }
}
