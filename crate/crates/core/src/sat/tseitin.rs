use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::cnf::{CnfProblem, Lit};
use crate::logic::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("formula is not propositional: {0}")]
    NotPropositional(String),
}

/// Incremental Tseitin encoder. Variables are named; gates get fresh
/// auxiliary indices above every named variable allocated so far.
#[derive(Clone, Debug, Default)]
pub struct CnfBuilder {
    num_vars: u32,
    names: HashMap<String, Lit>,
    clauses: Vec<Vec<Lit>>,
    truth: Option<Lit>,
    memo: HashMap<Formula, Lit>,
    closed: bool,
}

impl CnfBuilder {
    /// A builder that allocates a variable for every new name it meets.
    pub fn new() -> Self {
        Self::default()
    }

    /// A builder with a fixed name map; unknown names are errors.
    pub fn with_vars(map: &BTreeMap<String, u32>) -> Self {
        let mut b = CnfBuilder { closed: true, ..Default::default() };
        for (name, &idx) in map {
            b.num_vars = b.num_vars.max(idx);
            b.names.insert(name.clone(), Lit::new(idx, true));
        }
        b
    }

    /// From now on unknown names are errors.
    pub fn close(&mut self) {
        self.closed = true;
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    /// Returns the literal for `name`, allocating it if needed.
    pub fn declare(&mut self, name: &str) -> Lit {
        if let Some(&l) = self.names.get(name) {
            return l;
        }
        let l = self.fresh();
        self.names.insert(name.to_string(), l);
        l
    }

    pub fn lookup(&self, name: &str) -> Option<Lit> {
        self.names.get(name).copied()
    }

    pub fn fresh(&mut self) -> Lit {
        self.num_vars += 1;
        Lit::new(self.num_vars, true)
    }

    /// A literal forced true by a unit clause.
    pub fn truth(&mut self) -> Lit {
        if let Some(t) = self.truth {
            return t;
        }
        let t = self.fresh();
        self.clauses.push(vec![t]);
        self.truth = Some(t);
        t
    }

    pub fn add_clause(&mut self, clause: Vec<Lit>) {
        debug_assert!(!clause.is_empty());
        self.clauses.push(clause);
    }

    /// Name to variable index, sorted by name.
    pub fn names(&self) -> BTreeMap<String, u32> {
        self.names.iter().map(|(k, l)| (k.clone(), l.var())).collect()
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn problem(&self) -> CnfProblem {
        CnfProblem { num_vars: self.num_vars, clauses: self.clauses.clone(), assumptions: Vec::new() }
    }

    pub fn into_problem(self) -> CnfProblem {
        CnfProblem { num_vars: self.num_vars, clauses: self.clauses, assumptions: Vec::new() }
    }

    /// A literal equivalent to `f` under the added definitions.
    pub fn lit(&mut self, f: &Formula) -> Result<Lit, EncodeError> {
        match f {
            Formula::Top => return Ok(self.truth()),
            Formula::Bottom => return Ok(!self.truth()),
            Formula::Var(v) => {
                return match self.names.get(v) {
                    Some(&l) => Ok(l),
                    None if self.closed => Err(EncodeError::UnknownVariable(v.clone())),
                    None => Ok(self.declare(v)),
                }
            }
            Formula::Not(a) => return Ok(!self.lit(a)?),
            Formula::Belief(..)
            | Formula::Next(_)
            | Formula::Prev(_)
            | Formula::Until(..)
            | Formula::Since(..)
            | Formula::Globally(_)
            | Formula::Finally(_)
            | Formula::Historically(_) => return Err(EncodeError::NotPropositional(f.to_string())),
            _ => {}
        }
        if let Some(&l) = self.memo.get(f) {
            return Ok(l);
        }
        let l = match f {
            Formula::And(..) => {
                let mut parts = Vec::new();
                collect(f, true, &mut parts);
                let lits = self.lits(&parts)?;
                self.and_gate(lits)
            }
            Formula::Or(..) => {
                let mut parts = Vec::new();
                collect(f, false, &mut parts);
                let lits = self.lits(&parts)?;
                self.or_gate(lits)
            }
            Formula::Implies(a, b) => {
                let la = self.lit(a)?;
                let lb = self.lit(b)?;
                self.or_gate(vec![!la, lb])
            }
            Formula::Iff(a, b) => {
                let la = self.lit(a)?;
                let lb = self.lit(b)?;
                self.iff_gate(la, lb)
            }
            _ => unreachable!("handled above"),
        };
        self.memo.insert(f.clone(), l);
        Ok(l)
    }

    fn lits(&mut self, parts: &[&Formula]) -> Result<Vec<Lit>, EncodeError> {
        parts.iter().map(|p| self.lit(p)).collect()
    }

    pub fn and_gate(&mut self, mut lits: Vec<Lit>) -> Lit {
        lits.sort_unstable();
        lits.dedup();
        match lits.len() {
            0 => return self.truth(),
            1 => return lits[0],
            _ => {}
        }
        let g = self.fresh();
        let mut big = vec![g];
        for &l in &lits {
            self.clauses.push(vec![!g, l]);
            big.push(!l);
        }
        self.clauses.push(big);
        g
    }

    pub fn or_gate(&mut self, lits: Vec<Lit>) -> Lit {
        let neg: Vec<Lit> = lits.into_iter().map(|l| !l).collect();
        !self.and_gate(neg)
    }

    pub fn iff_gate(&mut self, a: Lit, b: Lit) -> Lit {
        let g = self.fresh();
        self.clauses.push(vec![!g, !a, b]);
        self.clauses.push(vec![!g, a, !b]);
        self.clauses.push(vec![g, a, b]);
        self.clauses.push(vec![g, !a, !b]);
        g
    }

    /// Adds clauses forcing `f` to hold.
    pub fn assert_formula(&mut self, f: &Formula) -> Result<(), EncodeError> {
        match f {
            Formula::Top => Ok(()),
            Formula::And(..) => {
                let mut parts = Vec::new();
                collect(f, true, &mut parts);
                for p in parts {
                    self.assert_formula(p)?;
                }
                Ok(())
            }
            Formula::Or(..) => {
                let mut parts = Vec::new();
                collect(f, false, &mut parts);
                let lits = self.lits(&parts)?;
                self.clauses.push(lits);
                Ok(())
            }
            Formula::Implies(a, b) => {
                let la = self.lit(a)?;
                let lb = self.lit(b)?;
                self.clauses.push(vec![!la, lb]);
                Ok(())
            }
            _ => {
                let l = self.lit(f)?;
                self.clauses.push(vec![l]);
                Ok(())
            }
        }
    }
}

/// Flattens nested conjunctions (or disjunctions) into their operands.
fn collect<'a>(f: &'a Formula, conj: bool, out: &mut Vec<&'a Formula>) {
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        match (g, conj) {
            (Formula::And(a, b), true) | (Formula::Or(a, b), false) => {
                stack.push(b);
                stack.push(a);
            }
            _ => out.push(g),
        }
    }
}

/// Encodes `f` as an equisatisfiable CNF over the given variable numbering.
pub fn tseitin(f: &Formula, var_map: &BTreeMap<String, u32>) -> Result<CnfProblem, EncodeError> {
    let mut b = CnfBuilder::with_vars(var_map);
    b.assert_formula(f)?;
    Ok(b.into_problem())
}
