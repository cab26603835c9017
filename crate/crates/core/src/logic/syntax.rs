//! Textual syntax for formulas.
//!
//! Binding strength, tightest first: `{..}:`, the unary operators
//! (`!`, `X`, `P`, `G`, `F`, `H`), `U`/`S`, `|`, `&`, `->` (right
//! associative) and `<->`.

use std::collections::BTreeSet;
use std::fmt;

use super::formula::Formula;

const MAX_NESTING: usize = 1000;

const KEYWORDS: &[&str] = &["false", "true", "X", "P", "U", "S", "G", "F", "H"];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// `[A-Za-z_][A-Za-z0-9_]*` and not a keyword.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !is_keyword(s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    /// Character offset into the parsed text.
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::DArrow => f.write_str("`<->`"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Arrow
            }
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                i += 2;
                Tok::DArrow
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                Tok::Ident(chars[start..=i].iter().collect())
            }
            other => {
                return Err(SyntaxError {
                    offset: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError { offset: self.offset(), message: message.into() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => self.err(format!("expected {tok}, found {t}")),
            None => self.err(format!("expected {tok}, found end of input")),
        }
    }

    fn enter(&mut self) -> Result<(), SyntaxError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return self.err("formula nested too deeply");
        }
        Ok(())
    }

    fn iff(&mut self) -> Result<Formula, SyntaxError> {
        self.enter()?;
        let mut lhs = self.imp()?;
        while self.peek() == Some(&Tok::DArrow) {
            self.pos += 1;
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, SyntaxError> {
        self.enter()?;
        let lhs = self.and()?;
        let out = if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            Formula::implies(lhs, self.imp()?)
        } else {
            lhs
        };
        self.depth -= 1;
        Ok(out)
    }

    fn and(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.or()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            lhs = Formula::and(lhs, self.or()?);
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.temporal()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            lhs = Formula::or(lhs, self.temporal()?);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Formula, SyntaxError> {
        self.enter()?;
        let lhs = self.unary()?;
        let out = if self.is_kw("U") {
            self.pos += 1;
            Formula::until(lhs, self.temporal()?)
        } else if self.is_kw("S") {
            self.pos += 1;
            Formula::since(lhs, self.temporal()?)
        } else {
            lhs
        };
        self.depth -= 1;
        Ok(out)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        self.enter()?;
        let ctor: Option<fn(Formula) -> Formula> = match self.peek() {
            Some(Tok::Bang) => Some(Formula::not),
            Some(Tok::Ident(s)) => match s.as_str() {
                "X" => Some(Formula::next),
                "P" => Some(Formula::prev),
                "G" => Some(Formula::globally),
                "F" => Some(Formula::finally),
                "H" => Some(Formula::historically),
                _ => None,
            },
            _ => None,
        };
        let out = match ctor {
            Some(ctor) => {
                self.pos += 1;
                ctor(self.unary()?)
            }
            None => self.belief()?,
        };
        self.depth -= 1;
        Ok(out)
    }

    fn belief(&mut self) -> Result<Formula, SyntaxError> {
        if self.peek() != Some(&Tok::LBrace) {
            return self.primary();
        }
        self.pos += 1;
        let mut group = BTreeSet::new();
        loop {
            match self.bump() {
                Some(Tok::Ident(s)) if is_identifier(&s) => {
                    group.insert(s);
                }
                Some(Tok::RBrace) if group.is_empty() => {
                    self.pos -= 1;
                    return self.err("belief group must not be empty");
                }
                _ => {
                    self.pos -= 1;
                    return self.err("expected entity identifier in belief group");
                }
            }
            match self.bump() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBrace) => break,
                _ => {
                    self.pos -= 1;
                    return self.err("expected `,` or `}` in belief group");
                }
            }
        }
        self.expect(Tok::Colon)?;
        let body = self.unary()?;
        Ok(Formula::Belief(group, Box::new(body)))
    }

    fn primary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Ident(s)) => match s.as_str() {
                "false" => {
                    self.pos += 1;
                    Ok(Formula::Bottom)
                }
                "true" => {
                    self.pos += 1;
                    Ok(Formula::Top)
                }
                s if is_keyword(s) => self.err(format!("operator `{s}` cannot start an operand")),
                _ => {
                    self.pos += 1;
                    Ok(Formula::Var(s))
                }
            },
            Some(t) => self.err(format!("unexpected {t}")),
            None => self.err("unexpected end of formula"),
        }
    }
}

/// Parses a complete formula.
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.chars().count(), depth: 0 };
    if p.peek().is_none() {
        return p.err("empty formula");
    }
    let f = p.iff()?;
    if let Some(t) = p.peek() {
        let t = t.clone();
        return p.err(format!("unexpected {t} after formula"));
    }
    Ok(f)
}

fn level(f: &Formula) -> u8 {
    use Formula::*;
    match f {
        Iff(..) => 1,
        Implies(..) => 2,
        And(..) => 3,
        Or(..) => 4,
        Until(..) | Since(..) => 5,
        Not(_) | Next(_) | Prev(_) | Globally(_) | Finally(_) | Historically(_) | Belief(..) => 6,
        Bottom | Top | Var(_) => 7,
    }
}

fn child(out: &mut fmt::Formatter<'_>, f: &Formula, min: u8) -> fmt::Result {
    if level(f) < min {
        out.write_str("(")?;
        write_formula(out, f)?;
        out.write_str(")")
    } else {
        write_formula(out, f)
    }
}

pub(crate) fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula) -> fmt::Result {
    use Formula::*;
    let bin = |out: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula, la: u8, lb: u8| {
        child(out, a, la)?;
        write!(out, " {op} ")?;
        child(out, b, lb)
    };
    match f {
        Bottom => out.write_str("false"),
        Top => out.write_str("true"),
        Var(v) => out.write_str(v),
        Iff(a, b) => bin(out, a, "<->", b, 1, 2),
        Implies(a, b) => bin(out, a, "->", b, 3, 2),
        And(a, b) => bin(out, a, "&", b, 3, 4),
        Or(a, b) => bin(out, a, "|", b, 4, 5),
        Until(a, b) => bin(out, a, "U", b, 6, 5),
        Since(a, b) => bin(out, a, "S", b, 6, 5),
        Not(a) => {
            out.write_str("!")?;
            child(out, a, 6)
        }
        Next(a) | Prev(a) | Globally(a) | Finally(a) | Historically(a) => {
            let op = match f {
                Next(_) => "X",
                Prev(_) => "P",
                Globally(_) => "G",
                Finally(_) => "F",
                _ => "H",
            };
            write!(out, "{op} ")?;
            child(out, a, 6)
        }
        Belief(g, body) => {
            out.write_str("{")?;
            for (i, e) in g.iter().enumerate() {
                if i > 0 {
                    out.write_str(",")?;
                }
                out.write_str(e)?;
            }
            out.write_str("}: (")?;
            write_formula(out, body)?;
            out.write_str(")")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn v(s: &str) -> Formula {
        Formula::var(s)
    }

    #[test]
    fn or_binds_tighter_than_and() {
        assert_eq!(p("a & b | c"), Formula::and(v("a"), Formula::or(v("b"), v("c"))));
    }

    #[test]
    fn implication_is_right_associative() {
        assert_eq!(p("a -> b -> c"), Formula::implies(v("a"), Formula::implies(v("b"), v("c"))));
    }

    #[test]
    fn belief_binds_tightest() {
        let f = p("{radar}: fast & x");
        let radar = Formula::belief(["radar"], v("fast")).unwrap();
        assert_eq!(f, Formula::and(radar, v("x")));
        let g = p("{lidar,radar}: (!fast)");
        assert_eq!(g.atoms_of().len(), 2);
    }

    #[test]
    fn temporal_operators() {
        assert_eq!(p("G !crash"), Formula::globally(Formula::not(v("crash"))));
        assert_eq!(p("a U b | c"), Formula::or(Formula::until(v("a"), v("b")), v("c")));
        assert_eq!(p("X X p"), Formula::next(Formula::next(v("p"))));
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "a & b | c",
            "(a & b) | c",
            "a -> b -> c",
            "(a -> b) -> c",
            "a <-> b <-> c",
            "a <-> (b <-> c)",
            "!(a U b) S c",
            "{lidar,radar}: (X fast) -> false",
            "G !(hit | a_left & b_near)",
            "H P true",
        ] {
            let f = p(s);
            assert_eq!(p(&f.to_string()), f, "{s} printed as {f}");
        }
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse_formula("a & ").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(parse_formula("{}: a").is_err());
        assert!(parse_formula("a b").is_err());
        assert!(parse_formula("a $ b").is_err());
        assert!(parse_formula("").is_err());
        assert!(parse_formula("U").is_err());
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowed() {
        let s = "(".repeat(10_000) + "a" + &")".repeat(10_000);
        assert!(parse_formula(&s).is_err());
        let s = "!".repeat(10_000) + "a";
        assert!(parse_formula(&s).is_err());
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("b_fast"));
        assert!(is_identifier("_x9"));
        assert!(!is_identifier("9x"));
        assert!(!is_identifier("X"));
        assert!(!is_identifier("a-b"));
    }
}
