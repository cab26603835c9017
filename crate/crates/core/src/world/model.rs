use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::WorldError;
use crate::logic::{EntityId, Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    A,
    B,
    Env,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::A, Role::B, Role::Env];

    pub fn name(self) -> &'static str {
        match self {
            Role::A => "A",
            Role::B => "B",
            Role::Env => "Env",
        }
    }

    pub fn from_name(s: &str) -> Option<Role> {
        match s {
            "A" => Some(Role::A),
            "B" => Some(Role::B),
            "Env" => Some(Role::Env),
            _ => None,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub var: String,
    pub value: Formula,
}

/// When `role` performs `action` and `guard` holds, every effect is applied
/// to the next state. The right-hand sides are read in the current state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub role: Role,
    pub action: String,
    pub guard: Formula,
    pub effects: Vec<Assignment>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldModel {
    pub vars: Vec<String>,
    pub init: Formula,
    pub current: Formula,
    pub actions_a: Vec<String>,
    pub actions_b: Vec<String>,
    pub actions_env: Vec<String>,
    pub rules: Vec<Rule>,
    /// Observed variables per agent; `None` means all variables.
    pub observe_a: Option<Vec<String>>,
    pub observe_b: Option<Vec<String>>,
}

impl WorldModel {
    pub fn new(vars: Vec<String>) -> Self {
        WorldModel {
            vars,
            init: Formula::Top,
            current: Formula::Top,
            actions_a: Vec::new(),
            actions_b: Vec::new(),
            actions_env: vec!["tick".to_string()],
            rules: Vec::new(),
            observe_a: None,
            observe_b: None,
        }
    }

    pub fn alphabet(&self, role: Role) -> &[String] {
        match role {
            Role::A => &self.actions_a,
            Role::B => &self.actions_b,
            Role::Env => &self.actions_env,
        }
    }

    pub fn observed(&self, role: Role) -> &[String] {
        let o = match role {
            Role::A => &self.observe_a,
            Role::B => &self.observe_b,
            Role::Env => &None,
        };
        o.as_deref().unwrap_or(&self.vars)
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        if self.vars.is_empty() {
            return Err(WorldError::NoVariables);
        }
        let mut declared = BTreeSet::new();
        for v in &self.vars {
            if !declared.insert(v.as_str()) {
                return Err(WorldError::DuplicateVariable(v.clone()));
            }
        }
        let check = |what: &str, f: &Formula| -> Result<(), WorldError> {
            if !f.is_propositional() {
                return Err(WorldError::NotPropositional(what.to_string()));
            }
            for v in f.vars() {
                if !declared.contains(v.as_str()) {
                    return Err(WorldError::UnknownVariable { context: what.to_string(), name: v });
                }
            }
            Ok(())
        };
        check("init", &self.init)?;
        check("current", &self.current)?;
        for role in Role::ALL {
            let alpha = self.alphabet(role);
            if alpha.is_empty() {
                return Err(WorldError::EmptyAlphabet(role));
            }
            let mut seen = BTreeSet::new();
            for a in alpha {
                if !seen.insert(a) {
                    return Err(WorldError::DuplicateAction { role, action: a.clone() });
                }
            }
        }
        if let Some(a) = self.actions_a.iter().find(|a| self.actions_b.contains(a)) {
            return Err(WorldError::SharedAction(a.clone()));
        }
        for role in [Role::A, Role::B] {
            for v in self.observed(role) {
                if !declared.contains(v.as_str()) {
                    return Err(WorldError::UnknownVariable { context: format!("observe {role}"), name: v.clone() });
                }
            }
        }
        for r in &self.rules {
            if !self.alphabet(r.role).contains(&r.action) {
                return Err(WorldError::UnknownAction { role: r.role, action: r.action.clone() });
            }
            let ctx = format!("rule {} {}", r.role, r.action);
            check(&ctx, &r.guard)?;
            let mut targets = BTreeSet::new();
            for e in &r.effects {
                if !declared.contains(e.var.as_str()) {
                    return Err(WorldError::UnknownVariable { context: ctx, name: e.var.clone() });
                }
                if !targets.insert(e.var.as_str()) {
                    return Err(WorldError::DuplicateEffect { context: ctx, var: e.var.clone() });
                }
                check(&ctx, &e.value)?;
            }
        }
        Ok(())
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

/// A piece of external information labeled by the belief atom that carries it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub atom: EntityId,
    pub body: Formula,
    pub provenance: String,
}

impl Evidence {
    pub fn new(atom: impl Into<EntityId>, body: Formula) -> Self {
        Evidence { atom: atom.into(), body, provenance: String::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JointAction {
    pub a: String,
    pub b: String,
    pub env: String,
}

/// A finite run: `states.len() == actions.len() + 1`. Each state lists the true variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Run {
    pub states: Vec<BTreeSet<String>>,
    pub actions: Vec<JointAction>,
}

impl Run {
    pub fn holds(&self, var: &str, step: usize) -> bool {
        self.states[step].contains(var)
    }

    /// State `step` as a valuation over `vars`.
    pub fn valuation(&self, vars: &[String], step: usize) -> Vec<bool> {
        vars.iter().map(|v| self.states[step].contains(v)).collect()
    }
}

impl fmt::Display for Run {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, s) in self.states.iter().enumerate() {
            let vars: Vec<&str> = s.iter().map(String::as_str).collect();
            write!(f, "[{}]", vars.join(" "))?;
            if let Some(a) = self.actions.get(t) {
                write!(f, " --{}/{}/{}--> ", a.a, a.b, a.env)?;
            }
        }
        Ok(())
    }
}
