use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::EntityId;

/// A formula of the justification-graph language.
///
/// The core grammar is `Bottom`, `Var`, `Implies`, `Belief`, `Next`, `Prev`,
/// `Until` and `Since`. Every other variant is sugar that [`Formula::expand_derived`]
/// rewrites into the core grammar.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Formula {
    Bottom,
    Var(String),
    Implies(Box<Formula>, Box<Formula>),
    /// `E:(body)`; the group is a non-empty sorted set of entities.
    Belief(BTreeSet<EntityId>, Box<Formula>),
    Next(Box<Formula>),
    Prev(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Since(Box<Formula>, Box<Formula>),

    Top,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Globally(Box<Formula>),
    Finally(Box<Formula>),
    /// Always in the past.
    Historically(Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn prev(f: Formula) -> Self {
        Formula::Prev(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn since(a: Formula, b: Formula) -> Self {
        Formula::Since(Box::new(a), Box::new(b))
    }

    pub fn globally(f: Formula) -> Self {
        Formula::Globally(Box::new(f))
    }

    pub fn finally(f: Formula) -> Self {
        Formula::Finally(Box::new(f))
    }

    pub fn historically(f: Formula) -> Self {
        Formula::Historically(Box::new(f))
    }

    /// Builds `group:(body)`. Returns `None` for an empty group.
    pub fn belief<I, S>(group: I, body: Formula) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<EntityId>,
    {
        let group: BTreeSet<EntityId> = group.into_iter().map(Into::into).collect();
        if group.is_empty() {
            return None;
        }
        Some(Formula::Belief(group, Box::new(body)))
    }

    /// Balanced conjunction; `Top` for an empty input.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Self {
        let items: Vec<Formula> = items.into_iter().collect();
        balanced(items, Formula::Top, Formula::and)
    }

    /// Balanced disjunction; `Bottom` for an empty input.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Self {
        let items: Vec<Formula> = items.into_iter().collect();
        balanced(items, Formula::Bottom, Formula::or)
    }

    /// Rewrites every derived connective into the core grammar.
    ///
    /// `¬φ ≡ φ→⊥`, `φ∨ψ ≡ ¬φ→ψ`, `φ∧ψ ≡ ¬(φ→¬ψ)`, `⊤ ≡ ⊥→⊥`,
    /// `φ↔ψ ≡ (φ→ψ)∧(ψ→φ)`, `Fφ ≡ ⊤Uφ`, `Gφ ≡ ¬(⊤U¬φ)` and `Hφ ≡ ¬(⊤S¬φ)`.
    pub fn expand_derived(&self) -> Formula {
        use Formula::*;
        fn neg(f: Formula) -> Formula {
            Implies(Box::new(f), Box::new(Bottom))
        }
        fn top() -> Formula {
            Implies(Box::new(Bottom), Box::new(Bottom))
        }
        fn and(a: Formula, b: Formula) -> Formula {
            neg(Implies(Box::new(a), Box::new(neg(b))))
        }
        match self {
            Bottom => Bottom,
            Var(v) => Var(v.clone()),
            Implies(a, b) => Implies(Box::new(a.expand_derived()), Box::new(b.expand_derived())),
            Belief(g, body) => Belief(g.clone(), Box::new(body.expand_derived())),
            Next(f) => Next(Box::new(f.expand_derived())),
            Prev(f) => Prev(Box::new(f.expand_derived())),
            Until(a, b) => Until(Box::new(a.expand_derived()), Box::new(b.expand_derived())),
            Since(a, b) => Since(Box::new(a.expand_derived()), Box::new(b.expand_derived())),
            Top => top(),
            Not(f) => neg(f.expand_derived()),
            And(a, b) => and(a.expand_derived(), b.expand_derived()),
            Or(a, b) => Implies(Box::new(neg(a.expand_derived())), Box::new(b.expand_derived())),
            Iff(a, b) => {
                let (a, b) = (a.expand_derived(), b.expand_derived());
                and(
                    Implies(Box::new(a.clone()), Box::new(b.clone())),
                    Implies(Box::new(b), Box::new(a)),
                )
            }
            Finally(f) => Until(Box::new(top()), Box::new(f.expand_derived())),
            Globally(f) => neg(Until(Box::new(top()), Box::new(neg(f.expand_derived())))),
            Historically(f) => neg(Since(Box::new(top()), Box::new(neg(f.expand_derived())))),
        }
    }

    /// True when only core-grammar nodes occur.
    pub fn is_core(&self) -> bool {
        use Formula::*;
        match self {
            Bottom | Var(_) => true,
            Implies(a, b) | Until(a, b) | Since(a, b) => a.is_core() && b.is_core(),
            Belief(_, f) | Next(f) | Prev(f) => f.is_core(),
            _ => false,
        }
    }

    /// Every entity occurring in a belief group, at any depth.
    pub fn atoms_of(&self) -> BTreeSet<EntityId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Belief(g, _) = f {
                out.extend(g.iter().cloned());
            }
        });
        out
    }

    /// Propositional variable names, in sorted order.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Var(v) = f {
                out.insert(v.clone());
            }
        });
        out
    }

    pub fn has_belief(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Belief(..)))
    }

    pub fn has_temporal(&self) -> bool {
        use Formula::*;
        self.any(&|f| {
            matches!(
                f,
                Next(_) | Prev(_) | Until(..) | Since(..) | Globally(_) | Finally(_) | Historically(_)
            )
        })
    }

    /// Propositional means: no belief and no temporal operator.
    pub fn is_propositional(&self) -> bool {
        !self.has_belief() && !self.has_temporal()
    }

    pub fn depth(&self) -> usize {
        self.children().iter().map(|c| c.depth()).max().unwrap_or(0) + 1
    }

    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            Bottom | Top | Var(_) => vec![],
            Belief(_, f) | Next(f) | Prev(f) | Not(f) | Globally(f) | Finally(f)
            | Historically(f) => vec![f],
            Implies(a, b) | Until(a, b) | Since(a, b) | And(a, b) | Or(a, b) | Iff(a, b) => {
                vec![a, b]
            }
        }
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    fn any(&self, pred: &impl Fn(&Formula) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    /// Renames every variable through `rename`.
    pub fn map_vars(&self, rename: &impl Fn(&str) -> String) -> Formula {
        use Formula::*;
        let m = |f: &Formula| Box::new(f.map_vars(rename));
        match self {
            Bottom => Bottom,
            Top => Top,
            Var(v) => Var(rename(v)),
            Implies(a, b) => Implies(m(a), m(b)),
            Belief(g, f) => Belief(g.clone(), m(f)),
            Next(f) => Next(m(f)),
            Prev(f) => Prev(m(f)),
            Until(a, b) => Until(m(a), m(b)),
            Since(a, b) => Since(m(a), m(b)),
            Not(f) => Not(m(f)),
            And(a, b) => And(m(a), m(b)),
            Or(a, b) => Or(m(a), m(b)),
            Iff(a, b) => Iff(m(a), m(b)),
            Globally(f) => Globally(m(f)),
            Finally(f) => Finally(m(f)),
            Historically(f) => Historically(m(f)),
        }
    }

    /// Classical evaluation of a propositional formula (sugar allowed).
    ///
    /// Returns `None` when a belief or temporal node is met.
    pub fn eval_prop(&self, value: &impl Fn(&str) -> bool) -> Option<bool> {
        use Formula::*;
        Some(match self {
            Bottom => false,
            Top => true,
            Var(v) => value(v),
            Not(f) => !f.eval_prop(value)?,
            Implies(a, b) => !a.eval_prop(value)? || b.eval_prop(value)?,
            And(a, b) => a.eval_prop(value)? && b.eval_prop(value)?,
            Or(a, b) => a.eval_prop(value)? || b.eval_prop(value)?,
            Iff(a, b) => a.eval_prop(value)? == b.eval_prop(value)?,
            _ => return None,
        })
    }
}

fn balanced(mut items: Vec<Formula>, empty: Formula, join: fn(Formula, Formula) -> Formula) -> Formula {
    match items.len() {
        0 => empty,
        1 => items.pop().expect("one item"),
        n => {
            let right = items.split_off(n / 2);
            join(balanced(items, empty.clone(), join), balanced(right, empty, join))
        }
    }
}

/// Checks the `Dist_{E,F}` side condition: `e` is a subgroup of `f`.
pub fn is_subgroup(e: &BTreeSet<EntityId>, f: &BTreeSet<EntityId>) -> Result<bool, super::LogicError> {
    if e.is_empty() || f.is_empty() {
        return Err(super::LogicError::EmptyGroup);
    }
    Ok(e.is_subset(f))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::syntax::write_formula(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Formula {
        Formula::var(s)
    }

    #[test]
    fn not_expands_to_implication_of_bottom() {
        assert_eq!(
            Formula::not(v("a")).expand_derived(),
            Formula::Implies(Box::new(v("a")), Box::new(Formula::Bottom))
        );
    }

    #[test]
    fn or_expands_to_negated_antecedent() {
        let expected = Formula::implies(Formula::implies(v("a"), Formula::Bottom), v("b"));
        assert_eq!(Formula::or(v("a"), v("b")).expand_derived(), expected);
    }

    #[test]
    fn and_matches_truth_table_after_expansion() {
        let f = Formula::and(v("a"), v("b")).expand_derived();
        assert!(f.is_core());
        for bits in 0..4u8 {
            let val = |n: &str| if n == "a" { bits & 1 != 0 } else { bits & 2 != 0 };
            assert_eq!(f.eval_prop(&val), Some(bits == 3));
        }
    }

    #[test]
    fn atoms_of_collects_groups() {
        let radar = Formula::belief(["radar"], v("fast")).unwrap();
        assert_eq!(radar.atoms_of(), ["radar".to_string()].into());
        let lidar = Formula::belief(["lidar"], Formula::not(v("fast"))).unwrap();
        let both = Formula::and(radar, lidar);
        assert_eq!(both.atoms_of(), ["lidar".to_string(), "radar".to_string()].into());
        assert!(v("a").atoms_of().is_empty());
    }

    #[test]
    fn empty_belief_group_is_refused() {
        assert!(Formula::belief(Vec::<String>::new(), v("a")).is_none());
    }

    #[test]
    fn subgroup_relation() {
        let s = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<BTreeSet<_>>();
        assert!(is_subgroup(&s(&["radar"]), &s(&["radar", "cam"])).unwrap());
        assert!(!is_subgroup(&s(&["radar", "lidar"]), &s(&["radar"])).unwrap());
        assert!(is_subgroup(&s(&["cam"]), &s(&["cam"])).unwrap());
        assert!(is_subgroup(&s(&[]), &s(&["cam"])).is_err());
    }

    #[test]
    fn and_all_is_balanced() {
        let f = Formula::and_all((0..1024).map(|i| v(&format!("x{i}"))));
        assert!(f.depth() <= 12);
        assert_eq!(Formula::and_all([]), Formula::Top);
        assert_eq!(Formula::or_all([]), Formula::Bottom);
    }
}
