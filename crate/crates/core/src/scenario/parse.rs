use std::collections::BTreeSet;

use super::validate::{validate, Spans};
use super::{Diagnostic, ScenarioDoc};
use crate::engine::{Commitment, Options, PeerModel, MAX_LEVEL};
use crate::logic::{is_identifier, parse_formula, Formula};
use crate::world::{Assignment, Evidence, Goal, Role, Rule, StrategyMode, WorldModel};

/// Parses and validates a scenario. Every line is examined, so all
/// diagnostics come back at once.
pub fn parse_scenario(text: &str) -> Result<ScenarioDoc, Vec<Diagnostic>> {
    let mut p = Parser::default();
    for (n, raw) in text.lines().enumerate() {
        p.line(n + 1, raw);
    }
    if !p.diags.is_empty() {
        return Err(p.diags);
    }
    let doc = p.finish();
    let diags = validate(&doc, &p.spans);
    if diags.is_empty() {
        Ok(doc)
    } else {
        Err(diags)
    }
}

/// A word of a key with its column.
#[derive(Clone, Copy)]
struct Word<'a> {
    text: &'a str,
    col: usize,
    /// Byte offset in the line.
    at: usize,
}

fn words(s: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices().chain(std::iter::once((s.len(), ' '))) {
        if c.is_whitespace() {
            if let Some(b) = start.take() {
                out.push(Word { text: &s[b..i], col: s[..b].chars().count() + 1, at: b });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    out
}

/// Column of the first non-blank character of `s[at..]`, and that text trimmed.
fn trimmed(line: &str, at: usize, end: usize) -> (usize, &str) {
    let slice = &line[at..end];
    let lead = slice.len() - slice.trim_start().len();
    (line[..at + lead].chars().count() + 1, slice.trim())
}

#[derive(Default)]
struct Parser {
    diags: Vec<Diagnostic>,
    spans: Spans,
    name: Option<String>,
    horizon: Option<usize>,
    mode: Option<StrategyMode>,
    max_level: Option<u8>,
    budget: Option<u64>,
    vars: Option<Vec<String>>,
    init: Option<Formula>,
    current: Option<Formula>,
    actions: [Option<Vec<String>>; 3],
    observe: [Option<Vec<String>>; 2],
    rules: Vec<Rule>,
    evidence: Vec<Evidence>,
    facts: Vec<Formula>,
    trust: Option<Vec<String>>,
    goals: Vec<Goal>,
    weights: Vec<(Role, BTreeSet<String>, u64)>,
    truths: Vec<Evidence>,
    commitments: Vec<Commitment>,
    adoptable: Option<bool>,
    adopt_weights: Vec<(String, u64)>,
    combined: Vec<(BTreeSet<String>, u64)>,
}

fn role_index(r: Role) -> usize {
    match r {
        Role::A => 0,
        Role::B => 1,
        Role::Env => 2,
    }
}

impl Parser {
    fn err(&mut self, line: usize, col: usize, msg: impl Into<String>) {
        self.diags.push(Diagnostic::new(line, col, msg));
    }

    fn once(&mut self, slot_full: bool, line: usize, col: usize, key: &str) -> bool {
        if slot_full {
            self.err(line, col, format!("`{key}` given more than once"));
            return false;
        }
        true
    }

    fn line(&mut self, n: usize, raw: &str) {
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if content.trim().is_empty() {
            return;
        }
        let Some(colon) = content.find(':') else {
            let (col, _) = trimmed(content, 0, content.len());
            self.err(n, col, "expected `key: value`");
            return;
        };
        let key = words(&content[..colon]);
        let (vcol, value) = trimmed(content, colon + 1, content.len());
        let rest = &content[colon + 1..];
        let at = colon + 1 + rest.len() - rest.trim_start().len();
        let v = Value { line: n, col: vcol, text: value, content, at };
        match key.first().map(|w| w.text) {
            Some("scenario") if key.len() == 1 => {
                if self.once(self.name.is_some(), n, key[0].col, "scenario") {
                    self.name = Some(value.to_string());
                }
            }
            Some("horizon") if key.len() == 1 => {
                let full = self.horizon.is_some();
                if self.once(full, n, key[0].col, "horizon") {
                    self.horizon = self.number(&v).map(|h| h as usize);
                }
            }
            Some("mode") if key.len() == 1 => {
                let full = self.mode.is_some();
                if self.once(full, n, key[0].col, "mode") {
                    match StrategyMode::from_name(value) {
                        Some(m) => self.mode = Some(m),
                        None => self.err(n, vcol, format!("unknown mode `{value}`, expected sequence or reactive")),
                    }
                }
            }
            Some("max_level") if key.len() == 1 => {
                let full = self.max_level.is_some();
                if self.once(full, n, key[0].col, "max_level") {
                    if let Some(l) = self.number(&v) {
                        if l > u64::from(MAX_LEVEL) {
                            self.err(n, vcol, format!("max_level must be between 0 and {MAX_LEVEL}"));
                        } else {
                            self.max_level = Some(l as u8);
                        }
                    }
                }
            }
            Some("budget") if key.len() == 1 => {
                let full = self.budget.is_some();
                if self.once(full, n, key[0].col, "budget") {
                    match self.number(&v) {
                        Some(0) => self.err(n, vcol, "budget must be positive"),
                        b => self.budget = b,
                    }
                }
            }
            Some("vars") if key.len() == 1 => {
                let full = self.vars.is_some();
                if self.once(full, n, key[0].col, "vars") {
                    self.spans.vars = n;
                    self.vars = self.list(&v);
                }
            }
            Some(k @ ("init" | "current")) if key.len() == 1 => {
                let full = if k == "init" { self.init.is_some() } else { self.current.is_some() };
                if self.once(full, n, key[0].col, k) {
                    let f = self.formula(&v);
                    if k == "init" {
                        self.spans.init = n;
                        self.init = f;
                    } else {
                        self.spans.current = n;
                        self.current = f;
                    }
                }
            }
            Some("actions") if key.len() == 2 => {
                let Some(role) = self.role(n, key[1], true) else { return };
                let r = role_index(role);
                let full = self.actions[r].is_some();
                if self.once(full, n, key[0].col, &format!("actions {role}")) {
                    self.spans.actions[r] = n;
                    self.actions[r] = self.list(&v);
                }
            }
            Some("observe") if key.len() == 2 => {
                let Some(role) = self.role(n, key[1], false) else { return };
                let r = role_index(role);
                let full = self.observe[r].is_some();
                if self.once(full, n, key[0].col, &format!("observe {role}")) {
                    self.spans.observe[r] = n;
                    self.observe[r] = self.list(&v);
                }
            }
            Some("rule") => self.rule(n, content, &key, colon, &v),
            Some("evidence") => {
                if let Some(e) = self.evidence(n, content, &key[1..], colon, &v) {
                    self.spans.evidence.push(n);
                    self.evidence.push(e);
                }
            }
            Some("fact") if key.len() == 1 => {
                if let Some(f) = self.formula(&v) {
                    self.spans.facts.push(n);
                    self.facts.push(f);
                }
            }
            Some("trust") if key.len() == 1 => {
                let full = self.trust.is_some();
                if self.once(full, n, key[0].col, "trust") {
                    self.spans.trust = n;
                    self.trust = self.separated(&v, '>');
                }
            }
            Some("goal") => self.goal(n, &key, &v),
            Some("weight") if key.len() >= 2 => {
                let Some(role) = self.role(n, key[1], false) else { return };
                let Some(set) = self.set(n, content, key.get(2).map_or(colon, |w| w.at), colon) else { return };
                if let Some(w) = self.number(&v) {
                    self.spans.weights.push(n);
                    self.weights.push((role, set, w));
                }
            }
            Some("combined") => {
                let Some(set) = self.set(n, content, key.get(1).map_or(colon, |w| w.at), colon) else { return };
                if let Some(w) = self.number(&v) {
                    self.spans.combined.push(n);
                    self.combined.push((set, w));
                }
            }
            Some("peer") if key.len() >= 2 => self.peer(n, content, &key, colon, &v),
            Some(_) => self.err(n, key[0].col, format!("unknown key `{}`", content[..colon].trim())),
            None => self.err(n, 1, "missing key before `:`"),
        }
    }

    fn role(&mut self, n: usize, w: Word<'_>, env: bool) -> Option<Role> {
        match Role::from_name(w.text) {
            Some(Role::Env) if !env => {
                self.err(n, w.col, "expected A or B");
                None
            }
            Some(r) => Some(r),
            None => {
                self.err(n, w.col, format!("unknown agent `{}`", w.text));
                None
            }
        }
    }

    fn number(&mut self, v: &Value<'_>) -> Option<u64> {
        match v.text.parse::<u64>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.err(v.line, v.col, format!("expected a non-negative integer, found `{}`", v.text));
                None
            }
        }
    }

    fn formula(&mut self, v: &Value<'_>) -> Option<Formula> {
        self.formula_at(v.line, v.col, v.text)
    }

    fn formula_at(&mut self, line: usize, col: usize, text: &str) -> Option<Formula> {
        if text.is_empty() {
            self.err(line, col, "expected a formula");
            return None;
        }
        match parse_formula(text) {
            Ok(f) => Some(f),
            Err(e) => {
                self.err(line, col + e.offset, e.message);
                None
            }
        }
    }

    fn separated(&mut self, v: &Value<'_>, sep: char) -> Option<Vec<String>> {
        if v.text.is_empty() {
            return Some(Vec::new());
        }
        let mut out = Vec::new();
        let mut ok = true;
        let mut at = v.at;
        for part in v.text.split(sep) {
            let (col, name) = trimmed(v.content, at, at + part.len());
            if is_identifier(name) {
                out.push(name.to_string());
            } else {
                self.err(v.line, col, format!("`{name}` is not an identifier"));
                ok = false;
            }
            at += part.len() + sep.len_utf8();
        }
        ok.then_some(out)
    }

    fn list(&mut self, v: &Value<'_>) -> Option<Vec<String>> {
        self.separated(v, ',')
    }

    /// `{a, b}` spanning `content[from..to]`.
    fn set(&mut self, n: usize, content: &str, from: usize, to: usize) -> Option<BTreeSet<String>> {
        let (col, text) = trimmed(content, from, to);
        let inner = text.strip_prefix('{').and_then(|t| t.strip_suffix('}'));
        let Some(inner) = inner else {
            self.err(n, col, "expected a goal set `{g1, g2}`");
            return None;
        };
        let mut out = BTreeSet::new();
        for name in inner.split(',').map(str::trim) {
            if !is_identifier(name) {
                self.err(n, col, format!("`{name}` is not an identifier"));
                return None;
            }
            if !out.insert(name.to_string()) {
                self.err(n, col, format!("`{name}` listed twice"));
                return None;
            }
        }
        Some(out)
    }

    fn ident(&mut self, n: usize, w: Option<&Word<'_>>, what: &str, col: usize) -> Option<String> {
        match w {
            Some(w) if is_identifier(w.text) => Some(w.text.to_string()),
            Some(w) => {
                self.err(n, w.col, format!("`{}` is not a valid {what}", w.text));
                None
            }
            None => {
                self.err(n, col, format!("missing {what}"));
                None
            }
        }
    }

    fn rule(&mut self, n: usize, content: &str, key: &[Word<'_>], colon: usize, v: &Value<'_>) {
        let end_col = content[..colon].chars().count() + 1;
        let Some(role) = (match key.get(1) {
            Some(w) => self.role(n, *w, true),
            None => {
                self.err(n, end_col, "missing agent");
                None
            }
        }) else {
            return;
        };
        let Some(action) = self.ident(n, key.get(2), "action name", end_col) else { return };
        let guard = match key.get(3) {
            None => Some(Formula::Top),
            Some(w) if w.text == "when" => {
                let start = key.get(4).map_or(colon, |w| w.at);
                let (col, text) = trimmed(content, start, colon);
                self.formula_at(n, col, text)
            }
            Some(w) => {
                self.err(n, w.col, "expected `when` or `:`");
                None
            }
        };
        let mut effects = Vec::new();
        let mut ok = guard.is_some();
        if !v.text.is_empty() {
            let mut at = v.at;
            for part in v.text.split(';') {
                let (col, piece) = trimmed(content, at, at + part.len());
                at += part.len() + 1;
                let Some(eq) = piece.find(":=") else {
                    self.err(n, col, "expected `variable := formula`");
                    ok = false;
                    continue;
                };
                let var = piece[..eq].trim();
                if !is_identifier(var) {
                    self.err(n, col, format!("`{var}` is not a variable name"));
                    ok = false;
                    continue;
                }
                let rest = &piece[eq + 2..];
                let lead = rest.len() - rest.trim_start().len();
                let fcol = col + piece[..eq + 2].chars().count() + rest[..lead].chars().count();
                match self.formula_at(n, fcol, rest.trim()) {
                    Some(value) => effects.push(Assignment { var: var.to_string(), value }),
                    None => ok = false,
                }
            }
        }
        if ok {
            self.spans.rules.push(n);
            self.rules.push(Rule { role, action, guard: guard.unwrap_or(Formula::Top), effects });
        }
    }

    /// `<atom> [from <text>]: body`, with `key` starting at the atom.
    fn evidence(
        &mut self,
        n: usize,
        content: &str,
        key: &[Word<'_>],
        colon: usize,
        v: &Value<'_>,
    ) -> Option<Evidence> {
        let end_col = content[..colon].chars().count() + 1;
        let atom = self.ident(n, key.first(), "atom name", end_col)?;
        let provenance = match key.get(1) {
            None => String::new(),
            Some(w) if w.text == "from" && key.len() > 2 => {
                trimmed(content, key[2].at, colon).1.to_string()
            }
            Some(w) => {
                self.err(n, w.col, "expected `from <source>` or `:`");
                return None;
            }
        };
        let body = self.formula(v)?;
        Some(Evidence { atom, body, provenance })
    }

    fn goal(&mut self, n: usize, key: &[Word<'_>], v: &Value<'_>) {
        let shape = key.len() == 6 && key[2].text == "owner" && key[4].text == "weight";
        if !shape {
            self.err(n, key[0].col, "expected `goal <id> owner <A|B> weight <n>: formula`");
            return;
        }
        let Some(id) = self.ident(n, Some(&key[1]), "goal id", key[1].col) else { return };
        let Some(owner) = self.role(n, key[3], false) else { return };
        let weight = match key[5].text.parse::<u64>() {
            Ok(w) => w,
            Err(_) => {
                self.err(n, key[5].col, format!("expected a non-negative integer, found `{}`", key[5].text));
                return;
            }
        };
        if let Some(formula) = self.formula(v) {
            self.spans.goals.push(n);
            self.goals.push(Goal { id, owner, formula, weight });
        }
    }

    fn peer(&mut self, n: usize, content: &str, key: &[Word<'_>], colon: usize, v: &Value<'_>) {
        let end_col = content[..colon].chars().count() + 1;
        match key[1].text {
            "truth" => {
                if let Some(e) = self.evidence(n, content, &key[2..], colon, v) {
                    self.spans.truths.push(n);
                    self.truths.push(e);
                }
            }
            "commit" if key.len() == 3 => {
                let step = match key[2].text {
                    "*" => None,
                    s => match s.parse::<usize>() {
                        Ok(t) => Some(t),
                        Err(_) => {
                            self.err(n, key[2].col, "expected a step number or `*`");
                            return;
                        }
                    },
                };
                if let Some(constraint) = self.formula(v) {
                    self.spans.commitments.push(n);
                    self.commitments.push(Commitment { step, constraint });
                }
            }
            "commit" => self.err(n, end_col, "expected `peer commit <step|*>: formula`"),
            "adopt" if key.len() == 2 => {
                let full = self.adoptable.is_some();
                if self.once(full, n, key[0].col, "peer adopt") {
                    match v.text {
                        "yes" => self.adoptable = Some(true),
                        "no" => self.adoptable = Some(false),
                        other => self.err(n, v.col, format!("expected yes or no, found `{other}`")),
                    }
                }
            }
            "adopt_weight" if key.len() == 3 => {
                let Some(id) = self.ident(n, Some(&key[2]), "goal id", key[2].col) else { return };
                if let Some(w) = self.number(v) {
                    self.spans.adopt_weights.push(n);
                    self.adopt_weights.push((id, w));
                }
            }
            other => self.err(n, key[1].col, format!("unknown peer key `{other}`")),
        }
    }

    fn finish(&mut self) -> ScenarioDoc {
        let defaults = Options::default();
        let options = Options {
            horizon: self.horizon.unwrap_or(defaults.horizon),
            mode: self.mode.unwrap_or(defaults.mode),
            budget: self.budget.unwrap_or(defaults.budget),
            max_level: self.max_level.unwrap_or(defaults.max_level),
        };
        let mut world = WorldModel::new(self.vars.take().unwrap_or_default());
        world.init = self.init.take().unwrap_or(Formula::Top);
        world.current = self.current.take().unwrap_or(Formula::Top);
        world.actions_a = self.actions[0].take().unwrap_or_default();
        world.actions_b = self.actions[1].take().unwrap_or_default();
        if let Some(env) = self.actions[2].take() {
            world.actions_env = env;
        }
        world.observe_a = self.observe[0].take();
        world.observe_b = self.observe[1].take();
        world.rules = std::mem::take(&mut self.rules);
        ScenarioDoc {
            name: self.name.take().unwrap_or_default(),
            options,
            world,
            evidence: std::mem::take(&mut self.evidence),
            facts: std::mem::take(&mut self.facts),
            goals: std::mem::take(&mut self.goals),
            weights: std::mem::take(&mut self.weights),
            peer: PeerModel {
                truths: std::mem::take(&mut self.truths),
                commitments: std::mem::take(&mut self.commitments),
                adoptable: self.adoptable.unwrap_or(false),
                adopt_weights: std::mem::take(&mut self.adopt_weights),
                combined: std::mem::take(&mut self.combined),
                trust: self.trust.take().unwrap_or_default(),
            },
        }
    }
}

struct Value<'a> {
    line: usize,
    col: usize,
    text: &'a str,
    content: &'a str,
    /// Byte offset of `text` in `content`.
    at: usize,
}
