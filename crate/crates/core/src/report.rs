//! Machine and human renderings of an analysis.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::engine::{Analysis, ConflictCause, Options, Outcome, TraceEvent};
use crate::scenario::{render_scenario, ScenarioDoc};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceReport {
    pub schema: u32,
    pub scenario: String,
    /// Canonical text of the analyzed document.
    pub input: String,
    /// Options in effect after command-line overrides.
    pub flags: Options,
    pub outcome: Outcome,
    pub events: Vec<TraceEvent>,
    pub causes: Vec<ConflictCause>,
    /// Justification chain of every cause, one line per link.
    pub chains: Vec<Vec<String>>,
}

impl TraceReport {
    pub fn new(doc: &ScenarioDoc, analysis: Analysis) -> Self {
        TraceReport {
            schema: SCHEMA,
            scenario: doc.name.clone(),
            input: render_scenario(doc),
            flags: doc.options.clone(),
            chains: analysis.causes.iter().map(ConflictCause::chain).collect(),
            outcome: analysis.outcome,
            events: analysis.events,
            causes: analysis.causes,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn chains_text(&self) -> String {
        let mut out = String::new();
        for (n, chain) in self.chains.iter().enumerate() {
            let _ = writeln!(out, "cause {n}:");
            for line in chain {
                let _ = writeln!(out, "  {line}");
            }
        }
        out
    }

    pub fn human(&self) -> String {
        let o = &self.outcome;
        let mut out = String::new();
        let _ = writeln!(out, "scenario: {}", self.scenario);
        let _ = writeln!(
            out,
            "horizon {}, mode {}, max level {}",
            self.flags.horizon,
            self.flags.mode.name(),
            self.flags.max_level
        );
        let _ = writeln!(out, "conflict at level 0: {}", if o.conflict_at_start { "yes" } else { "no" });
        for e in &self.events {
            if let TraceEvent::Resolution { attempt, level, changed: true, actions, refines, .. } = e {
                let _ = writeln!(out, "attempt {attempt}, C{level}: {}", actions.join("; "));
                if let Some(r) = refines {
                    let _ = writeln!(out, "  world set refines its predecessor: {r}");
                }
            }
        }
        if let Some(goals) = &o.selected_goals {
            let names: Vec<&str> = goals.iter().map(String::as_str).collect();
            let _ = writeln!(out, "selected goals: {{{}}}", names.join(", "));
        }
        if o.resolved {
            let _ = writeln!(out, "winning strategies found at level {}:", o.level);
            let mut partners: BTreeMap<(&str, Vec<String>), usize> = BTreeMap::new();
            for s in &o.survivors {
                *partners.entry((s.a.as_str(), s.goals.clone())).or_default() += 1;
            }
            for ((a, goals), n) in partners {
                let noun = if n == 1 { "strategy" } else { "strategies" };
                let _ = writeln!(out, "  A [{a}] for {{{}}} ({n} helping B {noun})", goals.join(", "));
            }
        } else {
            let _ = writeln!(out, "unresolved after level {}", o.level);
        }
        if !self.causes.is_empty() {
            let _ = writeln!(out, "{} conflict cause(s); `explain` prints the chains", self.causes.len());
        }
        out
    }
}
