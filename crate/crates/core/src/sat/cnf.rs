use std::collections::BTreeSet;
use std::fmt;
use std::ops::Not;

use serde::{Deserialize, Serialize};

use super::SatError;

/// A literal over a 1-based variable index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    /// Panics if `var` is zero or beyond `i32::MAX`.
    pub fn new(var: u32, positive: bool) -> Lit {
        assert!(var >= 1 && var <= i32::MAX as u32, "variable index out of range: {var}");
        Lit(((var - 1) << 1) | u32::from(!positive))
    }

    pub fn from_dimacs(n: i64) -> Option<Lit> {
        if n == 0 || n.unsigned_abs() > i32::MAX as u64 {
            return None;
        }
        Some(Lit::new(n.unsigned_abs() as u32, n > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var());
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn var(self) -> u32 {
        (self.0 >> 1) + 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub(crate) fn code(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn var_index(self) -> usize {
        (self.0 >> 1) as usize
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Names an assumption so cores can be reported without ambiguity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AssumptionId(pub u32);

/// A CNF instance plus assumption literals that act as selectors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfProblem {
    pub num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
    pub assumptions: Vec<(AssumptionId, Lit)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// Total assignment; index `i` holds the value of variable `i + 1`.
    Sat(Vec<bool>),
    /// Assumptions sufficient for unsatisfiability. Empty when the clauses alone are unsatisfiable.
    Unsat(BTreeSet<AssumptionId>),
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn model(&self) -> Option<&[bool]> {
        match self {
            SolveResult::Sat(m) => Some(m),
            SolveResult::Unsat(_) => None,
        }
    }

    pub fn core(&self) -> Option<&BTreeSet<AssumptionId>> {
        match self {
            SolveResult::Sat(_) => None,
            SolveResult::Unsat(c) => Some(c),
        }
    }
}

/// Value of `lit` under a model returned by the solver.
pub fn lit_value(model: &[bool], lit: Lit) -> bool {
    model[lit.var_index()] == lit.is_positive()
}

impl CnfProblem {
    pub fn new(num_vars: u32) -> Self {
        CnfProblem { num_vars, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), SatError> {
        for (i, c) in self.clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(SatError::EmptyClause { index: i });
            }
            for l in c {
                if l.var() > self.num_vars {
                    return Err(SatError::VariableOutOfRange { var: l.var(), num_vars: self.num_vars });
                }
            }
        }
        let mut ids = BTreeSet::new();
        for (id, l) in &self.assumptions {
            if l.var() > self.num_vars {
                return Err(SatError::VariableOutOfRange { var: l.var(), num_vars: self.num_vars });
            }
            if !ids.insert(*id) {
                return Err(SatError::DuplicateAssumption { id: id.0 });
            }
        }
        Ok(())
    }

    /// Solves under every assumption.
    pub fn solve(&self) -> Result<SolveResult, SatError> {
        self.validate()?;
        Ok(super::solver::Solver::new(self.num_vars, &self.clauses).solve(&self.assumptions))
    }

    /// Solves under the subset of assumptions whose ids are in `keep`.
    pub fn solve_subset(&self, keep: &BTreeSet<AssumptionId>) -> Result<SolveResult, SatError> {
        self.validate()?;
        let assumptions: Vec<_> = self.assumptions.iter().filter(|(id, _)| keep.contains(id)).copied().collect();
        Ok(super::solver::Solver::new(self.num_vars, &self.clauses).solve(&assumptions))
    }

    /// Checks every clause and assumption against a model.
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        model.len() == self.num_vars as usize
            && self.clauses.iter().all(|c| c.iter().any(|&l| lit_value(model, l)))
            && self.assumptions.iter().all(|&(_, l)| lit_value(model, l))
    }

    pub fn assumption_ids(&self) -> BTreeSet<AssumptionId> {
        self.assumptions.iter().map(|(id, _)| *id).collect()
    }
}
