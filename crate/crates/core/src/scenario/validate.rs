use std::collections::{BTreeMap, BTreeSet};

use super::{Diagnostic, ScenarioDoc};
use crate::engine::{MAX_GOALS, WORLD_ATOM};
use crate::logic::Formula;
use crate::world::Role;

/// Line numbers of parsed items, in the order they appear in the document.
#[derive(Default)]
pub(crate) struct Spans {
    pub vars: usize,
    pub init: usize,
    pub current: usize,
    pub actions: [usize; 3],
    pub observe: [usize; 2],
    pub rules: Vec<usize>,
    pub evidence: Vec<usize>,
    pub facts: Vec<usize>,
    pub trust: usize,
    pub goals: Vec<usize>,
    pub weights: Vec<usize>,
    pub truths: Vec<usize>,
    pub commitments: Vec<usize>,
    pub adopt_weights: Vec<usize>,
    pub combined: Vec<usize>,
}

struct Checker<'d> {
    vars: BTreeSet<&'d str>,
    out: Vec<Diagnostic>,
}

impl<'d> Checker<'d> {
    fn err(&mut self, line: usize, msg: impl Into<String>) {
        self.out.push(Diagnostic::new(line, 1, msg));
    }

    fn state_formula(&mut self, line: usize, what: &str, f: &Formula, temporal: bool) {
        if f.has_belief() {
            self.err(line, format!("{what}: belief operators are not allowed here"));
        } else if !temporal && f.has_temporal() {
            self.err(line, format!("{what}: temporal operators are not allowed here"));
        }
        for v in f.vars() {
            if !self.vars.contains(v.as_str()) {
                self.err(line, format!("{what}: undeclared variable `{v}`"));
            }
        }
    }
}

pub(crate) fn validate(doc: &ScenarioDoc, spans: &Spans) -> Vec<Diagnostic> {
    let w = &doc.world;
    let mut c = Checker { vars: BTreeSet::new(), out: Vec::new() };
    if w.vars.is_empty() {
        c.err(spans.vars, "at least one variable must be declared with `vars:`");
    }
    for v in &w.vars {
        if !c.vars.insert(v.as_str()) {
            c.err(spans.vars, format!("variable `{v}` declared twice"));
        }
    }
    c.state_formula(spans.init, "init", &w.init, false);
    c.state_formula(spans.current, "current", &w.current, false);
    for role in Role::ALL {
        let line = spans.actions[role as usize];
        let alpha = w.alphabet(role);
        if alpha.is_empty() {
            c.err(line, format!("agent {role} needs at least one action (`actions {role}:`)"));
        }
        let mut seen = BTreeSet::new();
        for a in alpha {
            if !seen.insert(a) {
                c.err(line, format!("action `{a}` listed twice for {role}"));
            }
        }
    }
    for a in w.actions_a.iter().filter(|a| w.actions_b.contains(a)) {
        c.err(
            spans.actions[1],
            format!("action `{a}` belongs to both A and B; agent alphabets must be disjoint"),
        );
    }
    for (k, role) in [Role::A, Role::B].into_iter().enumerate() {
        let observed = if k == 0 { &w.observe_a } else { &w.observe_b };
        for v in observed.iter().flatten() {
            if !c.vars.contains(v.as_str()) {
                c.err(spans.observe[k], format!("observe {role}: undeclared variable `{v}`"));
            }
        }
    }
    for (r, &line) in w.rules.iter().zip(&spans.rules) {
        let what = format!("rule {} {}", r.role, r.action);
        if !w.alphabet(r.role).contains(&r.action) {
            c.err(line, format!("{what}: `{}` is not an action of {}", r.action, r.role));
        }
        c.state_formula(line, &what, &r.guard, false);
        let mut targets = BTreeSet::new();
        for e in &r.effects {
            if !c.vars.contains(e.var.as_str()) {
                c.err(line, format!("{what}: undeclared variable `{}`", e.var));
            }
            if !targets.insert(e.var.as_str()) {
                c.err(line, format!("{what}: `{}` assigned twice", e.var));
            }
            c.state_formula(line, &what, &e.value, false);
        }
    }
    let mut atoms: BTreeMap<&str, usize> = BTreeMap::new();
    let items = doc.evidence.iter().zip(&spans.evidence).chain(doc.peer.truths.iter().zip(&spans.truths));
    for (e, &line) in items {
        if e.atom == WORLD_ATOM {
            c.err(line, format!("`{WORLD_ATOM}` is reserved and cannot name evidence"));
        }
        if atoms.insert(e.atom.as_str(), line).is_some() {
            c.err(line, format!("atom `{}` defined twice", e.atom));
        }
        if e.provenance.contains(':') {
            c.err(line, "a source may not contain `:`");
        }
        c.state_formula(line, &format!("evidence {}", e.atom), &e.body, true);
    }
    for (f, &line) in doc.facts.iter().zip(&spans.facts) {
        c.state_formula(line, "fact", f, true);
    }
    let mut ranked = BTreeSet::new();
    for t in &doc.peer.trust {
        if !atoms.contains_key(t.as_str()) {
            c.err(spans.trust, format!("trust: unknown atom `{t}`"));
        }
        if !ranked.insert(t.as_str()) {
            c.err(spans.trust, format!("trust: `{t}` ranked twice"));
        }
    }
    for (a, &line) in &atoms {
        if !ranked.contains(a) {
            c.err(if spans.trust > 0 { spans.trust } else { line }, format!("trust rank must be total: `{a}` is not ranked"));
        }
    }
    let mut owners: BTreeMap<&str, Role> = BTreeMap::new();
    for (g, &line) in doc.goals.iter().zip(&spans.goals) {
        if owners.insert(g.id.as_str(), g.owner).is_some() {
            c.err(line, format!("goal `{}` defined twice", g.id));
        }
        c.state_formula(line, &format!("goal {}", g.id), &g.formula, true);
    }
    if doc.goals.len() > MAX_GOALS {
        c.err(spans.goals[MAX_GOALS], format!("at most {MAX_GOALS} goals are supported"));
    }
    for ((role, set, _), &line) in doc.weights.iter().zip(&spans.weights) {
        for id in set {
            if owners.get(id.as_str()) != Some(role) {
                c.err(line, format!("weight {role}: `{id}` is not a goal of {role}"));
            }
        }
    }
    for ((set, _), &line) in doc.peer.combined.iter().zip(&spans.combined) {
        for id in set.iter().filter(|id| !owners.contains_key(id.as_str())) {
            c.err(line, format!("combined: unknown goal `{id}`"));
        }
    }
    for ((id, _), &line) in doc.peer.adopt_weights.iter().zip(&spans.adopt_weights) {
        if owners.get(id.as_str()) != Some(&Role::A) {
            c.err(line, format!("peer adopt_weight: `{id}` is not a goal of A"));
        }
    }
    let horizon = doc.options.horizon;
    for (cm, &line) in doc.peer.commitments.iter().zip(&spans.commitments) {
        if cm.constraint.has_belief() || cm.constraint.has_temporal() {
            c.err(line, "peer commit: only propositional constraints over B's actions are allowed");
        }
        for v in cm.constraint.vars() {
            if !w.actions_b.contains(&v) {
                c.err(line, format!("peer commit: `{v}` is not an action of B"));
            }
        }
        if let Some(t) = cm.step {
            if t >= horizon {
                c.err(line, format!("peer commit: step {t} is outside the horizon {horizon}"));
            }
        }
    }
    if c.out.is_empty() {
        if let Err(e) = w.validate() {
            c.err(0, e.to_string());
        }
    }
    c.out.sort();
    c.out.dedup();
    c.out
}
