use std::fmt::Write as _;

use thiserror::Error;

use super::cnf::{CnfProblem, Lit};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("header declares {declared} clauses but {found} were given")]
    ClauseCount { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    Unterminated,
}

fn syntax(line: usize, message: impl Into<String>) -> DimacsError {
    DimacsError::Syntax { line, message: message.into() }
}

/// Parses a DIMACS CNF file. A line holding only `%` ends the input.
pub fn parse_dimacs(text: &str) -> Result<CnfProblem, DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line == "%" {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line_no, "duplicate header"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(syntax(line_no, "expected `p cnf <vars> <clauses>`"));
            }
            let vars: u32 = parts[2].parse().map_err(|_| syntax(line_no, "bad variable count"))?;
            if vars > i32::MAX as u32 {
                return Err(syntax(line_no, "variable count too large"));
            }
            let count: usize = parts[3].parse().map_err(|_| syntax(line_no, "bad clause count"))?;
            header = Some((vars, count));
            continue;
        }
        let (vars, _) = header.ok_or(DimacsError::MissingHeader)?;
        for tok in line.split_whitespace() {
            let n: i64 = tok.parse().map_err(|_| syntax(line_no, format!("bad literal `{tok}`")))?;
            if n == 0 {
                if current.is_empty() {
                    return Err(syntax(line_no, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if n.unsigned_abs() > u64::from(vars) {
                return Err(syntax(line_no, format!("literal {n} exceeds declared variable count {vars}")));
            }
            current.push(Lit::from_dimacs(n).expect("nonzero in range"));
        }
    }
    let (num_vars, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCount { declared, found: clauses.len() });
    }
    Ok(CnfProblem { num_vars, clauses, assumptions: Vec::new() })
}

pub fn write_dimacs(problem: &CnfProblem) -> String {
    let mut out = format!("p cnf {} {}\n", problem.num_vars, problem.clauses.len());
    for c in &problem.clauses {
        for l in c {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

/// Parses an assumptions sidecar: whitespace-separated nonzero literals, `c` comment lines allowed.
pub fn parse_assumptions(text: &str, num_vars: u32) -> Result<Vec<Lit>, DimacsError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('c') {
            continue;
        }
        for tok in line.split_whitespace() {
            let n: i64 = tok.parse().map_err(|_| syntax(i + 1, format!("bad literal `{tok}`")))?;
            if n == 0 {
                return Err(syntax(i + 1, "assumption literal must be nonzero"));
            }
            if n.unsigned_abs() > u64::from(num_vars) {
                return Err(syntax(i + 1, format!("literal {n} exceeds variable count {num_vars}")));
            }
            out.push(Lit::from_dimacs(n).expect("nonzero in range"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "c hello\np cnf 3 2\n1 -2 0\n2 3\n-1 0\n";
        let p = parse_dimacs(text).unwrap();
        assert_eq!(p.clauses.len(), 2);
        assert_eq!(p.clauses[1].len(), 3);
        assert_eq!(parse_dimacs(&write_dimacs(&p)).unwrap(), p);
    }

    #[test]
    fn malformed_inputs() {
        assert_eq!(parse_dimacs("1 0\n"), Err(DimacsError::MissingHeader));
        assert!(parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n0\n").is_err());
        assert_eq!(parse_dimacs("p cnf 1 1\n1\n"), Err(DimacsError::Unterminated));
        assert!(matches!(parse_dimacs("p cnf 1 2\n1 0\n"), Err(DimacsError::ClauseCount { .. })));
        assert!(parse_dimacs("p cnf 1 1\nx 0\n").is_err());
    }

    #[test]
    fn percent_terminates() {
        let p = parse_dimacs("p cnf 1 1\n1 0\n%\n0\n").unwrap();
        assert_eq!(p.clauses.len(), 1);
    }

    #[test]
    fn assumptions_sidecar() {
        let a = parse_assumptions("c x\n1 -2\n", 2).unwrap();
        assert_eq!(a, vec![Lit::new(1, true), Lit::new(2, false)]);
        assert!(parse_assumptions("3", 2).is_err());
        assert!(parse_assumptions("0", 2).is_err());
    }
}
