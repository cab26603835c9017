use std::collections::BTreeSet;
use std::fmt::Write;

use super::ScenarioDoc;
use crate::logic::Formula;
use crate::world::{Evidence, Role};

fn set(ids: &BTreeSet<String>) -> String {
    format!("{{{}}}", ids.iter().cloned().collect::<Vec<_>>().join(", "))
}

fn evidence_key(e: &Evidence) -> String {
    if e.provenance.is_empty() {
        e.atom.clone()
    } else {
        format!("{} from {}", e.atom, e.provenance)
    }
}

/// Canonical text of a document; parsing it gives the document back.
pub fn render_scenario(doc: &ScenarioDoc) -> String {
    let mut out = String::new();
    let w = &doc.world;
    let o = &doc.options;
    let _ = writeln!(out, "scenario: {}", doc.name);
    let _ = writeln!(out, "horizon: {}", o.horizon);
    let _ = writeln!(out, "mode: {}", o.mode.name());
    let _ = writeln!(out, "max_level: {}", o.max_level);
    let _ = writeln!(out, "budget: {}", o.budget);
    let _ = writeln!(out, "vars: {}", w.vars.join(", "));
    if w.init != Formula::Top {
        let _ = writeln!(out, "init: {}", w.init);
    }
    if w.current != Formula::Top {
        let _ = writeln!(out, "current: {}", w.current);
    }
    for role in Role::ALL {
        let _ = writeln!(out, "actions {role}: {}", w.alphabet(role).join(", "));
    }
    for (role, obs) in [(Role::A, &w.observe_a), (Role::B, &w.observe_b)] {
        if let Some(vars) = obs {
            let _ = writeln!(out, "observe {role}: {}", vars.join(", "));
        }
    }
    for r in &w.rules {
        let guard = if r.guard == Formula::Top { String::new() } else { format!(" when {}", r.guard) };
        let effects: Vec<String> = r.effects.iter().map(|e| format!("{} := {}", e.var, e.value)).collect();
        let _ = writeln!(out, "rule {} {}{guard}: {}", r.role, r.action, effects.join("; "));
    }
    for e in &doc.evidence {
        let _ = writeln!(out, "evidence {}: {}", evidence_key(e), e.body);
    }
    for f in &doc.facts {
        let _ = writeln!(out, "fact: {f}");
    }
    if !doc.peer.trust.is_empty() {
        let _ = writeln!(out, "trust: {}", doc.peer.trust.join(" > "));
    }
    for g in &doc.goals {
        let _ = writeln!(out, "goal {} owner {} weight {}: {}", g.id, g.owner, g.weight, g.formula);
    }
    for (role, ids, weight) in &doc.weights {
        let _ = writeln!(out, "weight {role} {}: {weight}", set(ids));
    }
    for e in &doc.peer.truths {
        let _ = writeln!(out, "peer truth {}: {}", evidence_key(e), e.body);
    }
    for c in &doc.peer.commitments {
        let step = c.step.map_or("*".to_string(), |t| t.to_string());
        let _ = writeln!(out, "peer commit {step}: {}", c.constraint);
    }
    let _ = writeln!(out, "peer adopt: {}", if doc.peer.adoptable { "yes" } else { "no" });
    for (id, weight) in &doc.peer.adopt_weights {
        let _ = writeln!(out, "peer adopt_weight {id}: {weight}");
    }
    for (ids, weight) in &doc.peer.combined {
        let _ = writeln!(out, "combined {}: {weight}", set(ids));
    }
    out
}
