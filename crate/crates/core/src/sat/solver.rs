//! Conflict-driven clause learning with two watched literals.
//!
//! Assumptions occupy the first decision levels. Branching always picks the
//! lowest-index unassigned variable with positive polarity, so identical
//! input gives identical output. There are no restarts and no clause
//! deletion.

use std::collections::BTreeSet;

use super::cnf::{AssumptionId, CnfProblem, Lit, SolveResult};
use super::SatError;

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

/// Incremental solver: clauses may be added between calls and learnt
/// clauses are kept, since they follow from the clauses alone.
#[derive(Clone, Debug)]
pub struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<u32>>,
    assign: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    next_var: usize,
    ok: bool,
}

impl Solver {
    /// Panics if a clause mentions a variable above `num_vars`.
    pub fn new(num_vars: u32, clauses: &[Vec<Lit>]) -> Self {
        let n = num_vars as usize;
        let mut s = Solver {
            clauses: Vec::with_capacity(clauses.len()),
            watches: vec![Vec::new(); 2 * n],
            assign: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: vec![false; n],
            next_var: 0,
            ok: true,
        };
        for c in clauses {
            s.add_clause(c);
        }
        s
    }

    pub fn from_problem(problem: &CnfProblem) -> Result<Self, SatError> {
        problem.validate()?;
        Ok(Solver::new(problem.num_vars, &problem.clauses))
    }

    pub fn num_vars(&self) -> u32 {
        self.assign.len() as u32
    }

    /// Adds a clause. An empty clause makes the instance unsatisfiable.
    pub fn add_clause(&mut self, clause: &[Lit]) {
        if !self.ok {
            return;
        }
        debug_assert_eq!(self.decision_level(), 0);
        let mut c = clause.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) || c.iter().any(|&l| self.value(l) == TRUE) {
            return;
        }
        c.retain(|&l| self.value(l) != FALSE);
        match c.len() {
            0 => self.ok = false,
            1 => match self.value(c[0]) {
                TRUE => {}
                FALSE => self.ok = false,
                _ => self.enqueue(c[0], None),
            },
            _ => {
                self.attach(c);
            }
        }
    }

    fn attach(&mut self, c: Vec<Lit>) -> u32 {
        let idx = self.clauses.len() as u32;
        self.watches[(!c[0]).code()].push(idx);
        self.watches[(!c[1]).code()].push(idx);
        self.clauses.push(c);
        idx
    }

    #[inline]
    fn value(&self, l: Lit) -> i8 {
        let v = self.assign[l.var_index()];
        if l.is_positive() {
            v
        } else {
            -v
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: Option<u32>) {
        let v = l.var_index();
        self.assign[v] = if l.is_positive() { TRUE } else { FALSE };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Watch lists are keyed by the literal whose truth falsifies the watched literal.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let c = &mut self.clauses[ci as usize];
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                let first_val = {
                    let v = self.assign[first.var_index()];
                    if first.is_positive() { v } else { -v }
                };
                if first_val == TRUE {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.len() {
                    let l = c[k];
                    let v = self.assign[l.var_index()];
                    let lv = if l.is_positive() { v } else { -v };
                    if lv != FALSE {
                        c.swap(1, k);
                        self.watches[(!c[1]).code()].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = ci;
                j += 1;
                if first_val == FALSE {
                    conflict = Some(ci);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(ci));
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    /// First-UIP learning. Returns the learnt clause (asserting literal first) and the backjump level.
    fn analyze(&mut self, confl: u32) -> (Vec<Lit>, usize) {
        let current = self.decision_level() as u32;
        let mut learnt = vec![Lit::new(1, true)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut confl = confl;
        let mut idx = self.trail.len();
        loop {
            let start = usize::from(p.is_some());
            let clause = self.clauses[confl as usize].clone();
            for &q in &clause[start..] {
                let v = q.var_index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var_index()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            self.seen[lit.var_index()] = false;
            path -= 1;
            p = Some(lit);
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var_index()].expect("implied literal has a reason");
        }
        learnt[0] = !p.expect("uip");
        for l in &learnt[1..] {
            self.seen[l.var_index()] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var_index()] > self.level[learnt[max_i].var_index()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            back = self.level[learnt[1].var_index()] as usize;
        }
        (learnt, back)
    }

    /// Assumption literals responsible for `failed` being false.
    fn analyze_final(&mut self, failed: Lit) -> Vec<Lit> {
        let mut out = vec![failed];
        if self.decision_level() == 0 {
            return out;
        }
        self.seen[failed.var_index()] = true;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let x = self.trail[i].var_index();
            if !self.seen[x] {
                continue;
            }
            match self.reason[x] {
                None => out.push(self.trail[i]),
                Some(r) => {
                    for k in 1..self.clauses[r as usize].len() {
                        let q = self.clauses[r as usize][k];
                        if self.level[q.var_index()] > 0 {
                            self.seen[q.var_index()] = true;
                        }
                    }
                }
            }
            self.seen[x] = false;
        }
        self.seen[failed.var_index()] = false;
        out
    }

    fn cancel_until(&mut self, lvl: usize) {
        if self.decision_level() <= lvl {
            return;
        }
        let start = self.trail_lim[lvl];
        for i in (start..self.trail.len()).rev() {
            let v = self.trail[i].var_index();
            self.assign[v] = UNDEF;
            self.reason[v] = None;
            self.next_var = self.next_var.min(v);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(lvl);
        self.qhead = start;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while self.next_var < self.assign.len() {
            if self.assign[self.next_var] == UNDEF {
                return Some(Lit::new(self.next_var as u32 + 1, true));
            }
            self.next_var += 1;
        }
        None
    }

    /// Solves under assumption literals identified by their position.
    pub fn solve_lits(&mut self, lits: &[Lit]) -> SolveResult {
        let assumptions: Vec<(AssumptionId, Lit)> =
            lits.iter().enumerate().map(|(i, &l)| (AssumptionId(i as u32), l)).collect();
        self.solve(&assumptions)
    }

    pub fn solve(&mut self, assumptions: &[(AssumptionId, Lit)]) -> SolveResult {
        let r = self.search(assumptions);
        self.cancel_until(0);
        r
    }

    fn search(&mut self, assumptions: &[(AssumptionId, Lit)]) -> SolveResult {
        if !self.ok {
            return SolveResult::Unsat(BTreeSet::new());
        }
        loop {
            if let Some(confl) = self.propagate() {
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SolveResult::Unsat(BTreeSet::new());
                }
                let (learnt, back) = self.analyze(confl);
                self.cancel_until(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let ci = self.attach(learnt);
                    self.enqueue(asserting, Some(ci));
                }
                continue;
            }

            let mut next = None;
            while self.decision_level() < assumptions.len() {
                let (id, p) = assumptions[self.decision_level()];
                match self.value(p) {
                    TRUE => self.trail_lim.push(self.trail.len()),
                    FALSE => {
                        let lits = self.analyze_final(p);
                        let mut core = BTreeSet::new();
                        core.insert(id);
                        for l in lits.into_iter().skip(1) {
                            if let Some((aid, _)) = assumptions.iter().find(|(_, a)| *a == l) {
                                core.insert(*aid);
                            }
                        }
                        return SolveResult::Unsat(core);
                    }
                    _ => {
                        next = Some(p);
                        break;
                    }
                }
            }
            let decision = match next {
                Some(l) => l,
                None => match self.pick_branch() {
                    Some(l) => l,
                    None => {
                        let model: Vec<bool> = self.assign.iter().map(|&v| v == TRUE).collect();
                        debug_assert!(self
                            .clauses
                            .iter()
                            .all(|c| c.iter().any(|&l| super::cnf::lit_value(&model, l))));
                        debug_assert!(assumptions.iter().all(|&(_, l)| super::cnf::lit_value(&model, l)));
                        return SolveResult::Sat(model);
                    }
                },
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(decision, None);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(xs: &[i64]) -> Vec<Lit> {
        xs.iter().map(|&x| Lit::from_dimacs(x).unwrap()).collect()
    }

    fn problem(n: u32, clauses: &[&[i64]], assumptions: &[i64]) -> CnfProblem {
        CnfProblem {
            num_vars: n,
            clauses: clauses.iter().map(|c| lits(c)).collect(),
            assumptions: assumptions
                .iter()
                .enumerate()
                .map(|(i, &a)| (AssumptionId(i as u32), Lit::from_dimacs(a).unwrap()))
                .collect(),
        }
    }

    #[test]
    fn contradiction_without_assumptions_has_empty_core() {
        let r = problem(1, &[&[1], &[-1]], &[]).solve().unwrap();
        assert_eq!(r, SolveResult::Unsat(BTreeSet::new()));
    }

    #[test]
    fn single_binary_clause_is_sat() {
        let p = problem(2, &[&[1, 2]], &[]);
        let r = p.solve().unwrap();
        assert!(p.satisfied_by(r.model().unwrap()));
    }

    #[test]
    fn conflicting_assumptions_form_the_core() {
        let r = problem(2, &[&[1, 2]], &[1, -1]).solve().unwrap();
        let core: Vec<u32> = r.core().unwrap().iter().map(|a| a.0).collect();
        assert_eq!(core, vec![0, 1]);
    }

    #[test]
    fn core_traces_through_implications() {
        // a -> b, b -> c, assume a and !c, plus an irrelevant d.
        let p = problem(4, &[&[-1, 2], &[-2, 3]], &[4, 1, -3]);
        let r = p.solve().unwrap();
        let core: Vec<u32> = r.core().unwrap().iter().map(|a| a.0).collect();
        assert_eq!(core, vec![1, 2]);
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        // p_ij: pigeon i in hole j, vars 1..6
        let v = |i: i64, j: i64| i * 2 + j + 1;
        let mut cs: Vec<Vec<i64>> = (0..3).map(|i| vec![v(i, 0), v(i, 1)]).collect();
        for j in 0..2 {
            for a in 0..3 {
                for b in (a + 1)..3 {
                    cs.push(vec![-v(a, j), -v(b, j)]);
                }
            }
        }
        let refs: Vec<&[i64]> = cs.iter().map(|c| c.as_slice()).collect();
        assert!(!problem(6, &refs, &[]).solve().unwrap().is_sat());
    }

    #[test]
    fn incremental_use_keeps_answers_consistent() {
        let p = problem(3, &[&[1, 2], &[-1, 3]], &[]);
        let mut s = Solver::from_problem(&p).unwrap();
        assert!(s.solve_lits(&lits(&[1, -3])).core().is_some());
        assert!(s.solve_lits(&lits(&[1])).is_sat());
        s.add_clause(&lits(&[-2]));
        assert!(s.solve_lits(&lits(&[-1])).core().is_some());
        s.add_clause(&lits(&[-3]));
        assert_eq!(s.solve_lits(&[]), SolveResult::Unsat(BTreeSet::new()));
    }

    #[test]
    fn solving_is_deterministic() {
        let p = problem(4, &[&[1, 2, -3], &[-1, 4], &[3, -4, 2]], &[]);
        assert_eq!(p.solve().unwrap(), p.solve().unwrap());
    }
}
