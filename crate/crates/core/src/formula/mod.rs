//! Abstract syntax of the language, plus substitution and sugar
//! normalization. Concrete syntax lives in [`parse`](self::parse) and the
//! printer.

mod parse;
mod print;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use parse::{parse, ParseError};

/// An agent position: a concrete name, or a schema metavariable
/// (uppercase initial).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Agent {
    Name(String),
    Var(String),
}

impl Agent {
    pub fn from_ident(ident: &str) -> Self {
        if ident.starts_with(|c: char| c.is_ascii_uppercase()) {
            Agent::Var(ident.to_string())
        } else {
            Agent::Name(ident.to_string())
        }
    }

    pub fn text(&self) -> &str {
        match self {
            Agent::Name(s) | Agent::Var(s) => s,
        }
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.text())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    /// A formula metavariable in a schema.
    Var(String),
    Top,
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// Historical necessity.
    Box(Box<Formula>),
    Diamond(Box<Formula>),
    Stit(Agent, Box<Formula>),
    Knows(Agent, Box<Formula>),
    /// Conditional belief; `None` is the unconditional form.
    Believes(Agent, Option<Box<Formula>>, Box<Formula>),
    OughtObj(Agent, Box<Formula>),
    OughtSubj(Agent, Box<Formula>),
    OughtDox(Agent, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstitutionError {
    #[error("no assignment for formula metavariable `{0}`")]
    MissingFormula(String),
    #[error("no assignment for agent metavariable `{0}`")]
    MissingAgent(String),
}

/// Values for the metavariables of a schema.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub formulas: BTreeMap<String, Formula>,
    pub agents: BTreeMap<String, String>,
}

impl Assignment {
    pub fn formula(mut self, var: &str, f: Formula) -> Self {
        self.formulas.insert(var.to_string(), f);
        self
    }

    pub fn agent(mut self, var: &str, name: &str) -> Self {
        self.agents.insert(var.to_string(), name.to_string());
        self
    }
}

fn bx(f: Formula) -> Box<Formula> {
    Box::new(f)
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(name.to_string())
    }

    pub fn var(name: &str) -> Self {
        Formula::Var(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(bx(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(bx(a), bx(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(bx(a), bx(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(bx(a), bx(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(bx(a), bx(b))
    }

    /// Direct subformulas, left to right (a belief condition comes first).
    pub fn children(&self) -> Vec<&Formula> {
        use Formula as F;
        match self {
            F::Atom(_) | F::Var(_) | F::Top | F::Bottom => vec![],
            F::Not(a)
            | F::Box(a)
            | F::Diamond(a)
            | F::Stit(_, a)
            | F::Knows(_, a)
            | F::OughtObj(_, a)
            | F::OughtSubj(_, a)
            | F::OughtDox(_, a) => vec![a],
            F::Believes(_, c, a) => match c {
                Some(c) => vec![c, a],
                None => vec![a],
            },
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Iff(a, b) => vec![a, b],
        }
    }

    pub fn agent(&self) -> Option<&Agent> {
        use Formula as F;
        match self {
            F::Stit(a, _)
            | F::Knows(a, _)
            | F::Believes(a, _, _)
            | F::OughtObj(a, _)
            | F::OughtSubj(a, _)
            | F::OughtDox(a, _) => Some(a),
            _ => None,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        for c in self.children() {
            c.walk(visit);
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Atom(a) = f {
                out.insert(a.clone());
            }
        });
        out
    }

    /// Concrete agent names mentioned.
    pub fn agent_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Some(Agent::Name(n)) = f.agent() {
                out.insert(n.clone());
            }
        });
        out
    }

    pub fn formula_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Var(v) = f {
                out.insert(v.clone());
            }
        });
        out
    }

    pub fn agent_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Some(Agent::Var(v)) = f.agent() {
                out.insert(v.clone());
            }
        });
        out
    }

    pub fn is_closed(&self) -> bool {
        self.formula_vars().is_empty() && self.agent_vars().is_empty()
    }

    /// Rebuilds the node with `f` applied to each direct subformula and `g`
    /// to its agent.
    fn map_parts<E>(
        &self,
        f: &mut impl FnMut(&Formula) -> Result<Formula, E>,
        g: &mut impl FnMut(&Agent) -> Result<Agent, E>,
    ) -> Result<Formula, E> {
        use Formula as F;
        Ok(match self {
            F::Atom(_) | F::Var(_) | F::Top | F::Bottom => self.clone(),
            F::Not(a) => F::Not(bx(f(a)?)),
            F::And(a, b) => F::And(bx(f(a)?), bx(f(b)?)),
            F::Or(a, b) => F::Or(bx(f(a)?), bx(f(b)?)),
            F::Implies(a, b) => F::Implies(bx(f(a)?), bx(f(b)?)),
            F::Iff(a, b) => F::Iff(bx(f(a)?), bx(f(b)?)),
            F::Box(a) => F::Box(bx(f(a)?)),
            F::Diamond(a) => F::Diamond(bx(f(a)?)),
            F::Stit(ag, a) => F::Stit(g(ag)?, bx(f(a)?)),
            F::Knows(ag, a) => F::Knows(g(ag)?, bx(f(a)?)),
            F::Believes(ag, c, a) => {
                let c = match c {
                    Some(c) => Some(bx(f(c)?)),
                    None => None,
                };
                F::Believes(g(ag)?, c, bx(f(a)?))
            }
            F::OughtObj(ag, a) => F::OughtObj(g(ag)?, bx(f(a)?)),
            F::OughtSubj(ag, a) => F::OughtSubj(g(ag)?, bx(f(a)?)),
            F::OughtDox(ag, a) => F::OughtDox(g(ag)?, bx(f(a)?)),
        })
    }

    /// Uniform substitution of every metavariable.
    pub fn substitute(&self, assignment: &Assignment) -> Result<Formula, SubstitutionError> {
        if let Formula::Var(v) = self {
            return assignment
                .formulas
                .get(v)
                .cloned()
                .ok_or_else(|| SubstitutionError::MissingFormula(v.clone()));
        }
        self.map_parts(&mut |c| c.substitute(assignment), &mut |a| match a {
            Agent::Name(_) => Ok(a.clone()),
            Agent::Var(v) => assignment
                .agents
                .get(v)
                .map(|n| Agent::Name(n.clone()))
                .ok_or_else(|| SubstitutionError::MissingAgent(v.clone())),
        })
    }

    /// Rewrites the defined connectives into `!`, `&`, `[]`, the agent
    /// modalities and the constant `#t`; supplies `#t` as the condition of
    /// unconditional belief.
    pub fn normalize(&self) -> Formula {
        use Formula as F;
        let n = |x: &Formula| x.normalize();
        let not = |x: Formula| F::Not(bx(x));
        let and = |x: Formula, y: Formula| F::And(bx(x), bx(y));
        match self {
            F::Bottom => not(F::Top),
            F::Or(a, b) => not(and(not(n(a)), not(n(b)))),
            F::Implies(a, b) => not(and(n(a), not(n(b)))),
            F::Iff(a, b) => {
                let (a, b) = (n(a), n(b));
                and(not(and(a.clone(), not(b.clone()))), not(and(b, not(a))))
            }
            F::Diamond(a) => not(F::Box(bx(not(n(a))))),
            F::Believes(ag, c, a) => {
                let c = c.as_deref().map(n).unwrap_or(F::Top);
                F::Believes(ag.clone(), Some(bx(c)), bx(n(a)))
            }
            _ => self
                .map_parts::<std::convert::Infallible>(&mut |c| Ok(n(c)), &mut |a| Ok(a.clone()))
                .unwrap_or_else(|e| match e {}),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::print(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn substitution_instance() {
        let schema = p("O:A X -> <> [A] X");
        let asg = Assignment::default().agent("A", "doctor").formula("X", Formula::atom("a"));
        let inst = schema.substitute(&asg).unwrap();
        assert_eq!(inst, p("O:doctor a -> <> [doctor] a"));
        assert!(inst.is_closed());
    }

    #[test]
    fn substitution_reaches_belief_condition() {
        let schema = p("B:A[Y] Z");
        let asg = Assignment::default()
            .agent("A", "bob")
            .formula("Y", p("q & r"))
            .formula("Z", p("!s"));
        assert_eq!(schema.substitute(&asg).unwrap(), p("B:bob[q & r] !s"));
    }

    #[test]
    fn substitution_without_metavariables_is_identity() {
        let f = p("B:doctor[!e](!e & O:doctor a)");
        assert_eq!(f.substitute(&Assignment::default()).unwrap(), f);
    }

    #[test]
    fn missing_assignment() {
        let err = p("K:A X").substitute(&Assignment::default().formula("X", Formula::Top));
        assert_eq!(err, Err(SubstitutionError::MissingAgent("A".into())));
        let err = p("K:a X").substitute(&Assignment::default());
        assert_eq!(err, Err(SubstitutionError::MissingFormula("X".into())));
    }

    #[test]
    fn sugar_laws() {
        assert_eq!(p("<> p").normalize(), p("![] !p"));
        assert_eq!(p("B:a p").normalize(), p("B:a[#t] p"));
        assert_eq!(p("p | q").normalize(), p("!(!p & !q)"));
        assert_eq!(p("p -> q").normalize(), p("!(p & !q)"));
        assert_eq!(p("#f").normalize(), p("!#t"));
    }

    #[test]
    fn metavariable_inventory() {
        let f = p("B:A[Y] X -> K:b (X | p)");
        assert_eq!(f.formula_vars().into_iter().collect::<Vec<_>>(), ["X", "Y"]);
        assert_eq!(f.agent_vars().into_iter().collect::<Vec<_>>(), ["A"]);
        assert_eq!(f.agent_names().into_iter().collect::<Vec<_>>(), ["b"]);
        assert_eq!(f.atoms().into_iter().collect::<Vec<_>>(), ["p"]);
    }
}
