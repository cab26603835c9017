//! Propositional satisfiability: CNF, a CDCL solver with assumptions,
//! core minimization, DIMACS I/O and the Tseitin encoding.

mod cnf;
mod dimacs;
mod mus;
mod solver;
mod tseitin;

pub use cnf::{lit_value, AssumptionId, CnfProblem, Lit, SolveResult};
pub use dimacs::{parse_assumptions, parse_dimacs, write_dimacs, DimacsError};
pub use mus::{find_mus, minimize_core, shrink_core};
pub use solver::Solver;
pub use tseitin::{tseitin, CnfBuilder, EncodeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SatError {
    #[error("clause {index} is empty")]
    EmptyClause { index: usize },
    #[error("variable {var} exceeds declared count {num_vars}")]
    VariableOutOfRange { var: u32, num_vars: u32 },
    #[error("assumption id {id} appears twice")]
    DuplicateAssumption { id: u32 },
    #[error("the given core is satisfiable")]
    CoreSatisfiable,
}
