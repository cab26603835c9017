use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use super::EntityId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Atom,
    Compound,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BeliefEntity {
    pub id: EntityId,
    pub kind: EntityKind,
}

/// Belief entities and their component edges (`parent` has component `child`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JustificationGraph {
    entities: BTreeMap<EntityId, EntityKind>,
    edges: BTreeSet<(EntityId, EntityId)>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Entities on a directed cycle, sorted.
    Cycle { members: Vec<EntityId> },
    /// A compound entity without components.
    CompoundLeaf { entity: EntityId },
    /// An atom with components.
    AtomWithComponents { entity: EntityId },
    /// An edge mentions an entity that was never declared.
    UnknownEntity { entity: EntityId },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl JustificationGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entity. Returns `false` if the id is already taken.
    pub fn add_entity(&mut self, id: impl Into<EntityId>, kind: EntityKind) -> bool {
        let id = id.into();
        if self.entities.contains_key(&id) {
            return false;
        }
        self.entities.insert(id, kind);
        true
    }

    pub fn add_edge(&mut self, parent: impl Into<EntityId>, child: impl Into<EntityId>) {
        self.edges.insert((parent.into(), child.into()));
    }

    /// The graph `root ↦ atom` for every atom; the shape used for one group of evidence.
    pub fn star(root: impl Into<EntityId>, atoms: impl IntoIterator<Item = EntityId>) -> Self {
        let root = root.into();
        let mut g = Self::new();
        g.add_entity(root.clone(), EntityKind::Compound);
        for a in atoms {
            g.add_entity(a.clone(), EntityKind::Atom);
            g.add_edge(root.clone(), a);
        }
        g
    }

    pub fn entities(&self) -> impl Iterator<Item = BeliefEntity> + '_ {
        self.entities.iter().map(|(id, kind)| BeliefEntity { id: id.clone(), kind: *kind })
    }

    pub fn edges(&self) -> impl Iterator<Item = (&EntityId, &EntityId)> {
        self.edges.iter().map(|(p, c)| (p, c))
    }

    /// Direct components of `e`.
    pub fn components(&self, e: &str) -> BTreeSet<&EntityId> {
        self.edges.iter().filter(|(p, _)| p == e).map(|(_, c)| c).collect()
    }

    pub fn atoms(&self) -> BTreeSet<&EntityId> {
        self.entities.iter().filter(|(_, k)| **k == EntityKind::Atom).map(|(id, _)| id).collect()
    }

    /// Checks acyclicity and the leaf-iff-atom rule.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (p, c) in &self.edges {
            for e in [p, c] {
                if !self.entities.contains_key(e) {
                    violations.push(Violation::UnknownEntity { entity: e.clone() });
                }
            }
        }

        let mut graph = DiGraph::<&str, ()>::new();
        let mut index = BTreeMap::new();
        for id in self.entities.keys() {
            index.insert(id.as_str(), graph.add_node(id.as_str()));
        }
        for (p, c) in &self.edges {
            if let (Some(&a), Some(&b)) = (index.get(p.as_str()), index.get(c.as_str())) {
                graph.add_edge(a, b, ());
            }
        }
        for scc in tarjan_scc(&graph) {
            let self_loop = scc.len() == 1 && graph.contains_edge(scc[0], scc[0]);
            if scc.len() > 1 || self_loop {
                let mut members: Vec<EntityId> = scc.iter().map(|n| graph[*n].to_string()).collect();
                members.sort();
                violations.push(Violation::Cycle { members });
            }
        }

        for (id, kind) in &self.entities {
            let has_children = self.edges.iter().any(|(p, _)| p == id);
            match (kind, has_children) {
                (EntityKind::Compound, false) => {
                    violations.push(Violation::CompoundLeaf { entity: id.clone() })
                }
                (EntityKind::Atom, true) => {
                    violations.push(Violation::AtomWithComponents { entity: id.clone() })
                }
                _ => {}
            }
        }
        violations.sort();
        violations.dedup();
        ValidationReport { violations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_is_reported() {
        let mut g = JustificationGraph::new();
        g.add_entity("e", EntityKind::Compound);
        g.add_entity("f", EntityKind::Compound);
        g.add_edge("e", "f");
        g.add_edge("f", "e");
        let r = g.validate();
        assert!(r.violations.contains(&Violation::Cycle { members: vec!["e".into(), "f".into()] }));
    }

    #[test]
    fn childless_compound_is_reported() {
        let mut g = JustificationGraph::new();
        g.add_entity("agentA", EntityKind::Compound);
        let r = g.validate();
        assert_eq!(r.violations, vec![Violation::CompoundLeaf { entity: "agentA".into() }]);
    }

    #[test]
    fn sensor_graph_is_valid() {
        let mut g = JustificationGraph::new();
        g.add_entity("agentA", EntityKind::Compound);
        g.add_entity("radar", EntityKind::Atom);
        g.add_entity("cam", EntityKind::Atom);
        g.add_edge("agentA", "radar");
        g.add_edge("agentA", "cam");
        assert!(g.validate().is_valid());
        assert_eq!(g.components("agentA").len(), 2);
    }

    #[test]
    fn duplicate_ids_are_refused() {
        let mut g = JustificationGraph::new();
        assert!(g.add_entity("radar", EntityKind::Atom));
        assert!(!g.add_entity("radar", EntityKind::Compound));
    }

    #[test]
    fn atom_with_children_and_unknown_endpoint() {
        let mut g = JustificationGraph::new();
        g.add_entity("radar", EntityKind::Atom);
        g.add_edge("radar", "ghost");
        let r = g.validate();
        assert!(r.violations.contains(&Violation::AtomWithComponents { entity: "radar".into() }));
        assert!(r.violations.contains(&Violation::UnknownEntity { entity: "ghost".into() }));
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let mut g = JustificationGraph::new();
        g.add_entity("e", EntityKind::Compound);
        g.add_edge("e", "e");
        assert!(matches!(g.validate().violations[0], Violation::Cycle { .. }));
    }
}
