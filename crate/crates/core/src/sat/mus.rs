use std::collections::BTreeSet;

use super::cnf::{AssumptionId, CnfProblem, SolveResult};
use super::solver::Solver;
use super::SatError;

/// Shrinks `core` to a deletion-minimal unsatisfiable subset of assumptions.
///
/// Each removal attempt that stays unsatisfiable also intersects the
/// working set with the core the solver returns.
pub fn minimize_core(
    problem: &CnfProblem,
    core: &BTreeSet<AssumptionId>,
) -> Result<BTreeSet<AssumptionId>, SatError> {
    problem.validate()?;
    let mut solver = Solver::new(problem.num_vars, &problem.clauses);
    shrink_core(core, |keep| {
        let assumptions: Vec<_> =
            problem.assumptions.iter().filter(|(id, _)| keep.contains(id)).copied().collect();
        solver.solve(&assumptions)
    })
}

/// Deletion-based minimization against an arbitrary oracle. `check` solves
/// under the given subset and must be monotone.
pub fn shrink_core(
    core: &BTreeSet<AssumptionId>,
    mut check: impl FnMut(&BTreeSet<AssumptionId>) -> SolveResult,
) -> Result<BTreeSet<AssumptionId>, SatError> {
    let mut current: Vec<AssumptionId> = match check(core) {
        SolveResult::Sat(_) => return Err(SatError::CoreSatisfiable),
        SolveResult::Unsat(c) => core.iter().filter(|id| c.contains(id)).copied().collect(),
    };
    let mut i = 0;
    while i < current.len() {
        let trial: BTreeSet<AssumptionId> =
            current.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, id)| *id).collect();
        match check(&trial) {
            SolveResult::Unsat(c) => {
                current = trial.into_iter().filter(|id| c.contains(id)).collect();
            }
            SolveResult::Sat(_) => i += 1,
        }
    }
    Ok(current.into_iter().collect())
}

/// Solves with every assumption and, when unsatisfiable, returns a minimal core.
pub fn find_mus(problem: &CnfProblem) -> Result<Option<BTreeSet<AssumptionId>>, SatError> {
    match problem.solve()? {
        SolveResult::Sat(_) => Ok(None),
        SolveResult::Unsat(c) => minimize_core(problem, &c).map(Some),
    }
}
