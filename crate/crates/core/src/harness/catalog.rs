//! The axiom schemata of the proof system, the belief-revision schemata,
//! and the non-implications the semantics must refute.

use serde::Serialize;

use crate::formula::{parse, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemaKind {
    /// Expected valid on every model.
    Asserted,
    /// A reading whose validity is reported, not required.
    Disputed,
    /// Expected to have countermodels.
    NonImplication,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub name: String,
    pub kind: SchemaKind,
    pub formula: Formula,
    /// Agent metavariables must denote pairwise different agents.
    pub distinct_agents: bool,
}

impl Schema {
    fn new(name: &str, kind: SchemaKind, text: &str) -> Self {
        let formula = parse(text).unwrap_or_else(|e| panic!("schema {name}: {e}"));
        Self {
            name: name.to_string(),
            kind,
            formula,
            distinct_agents: false,
        }
    }

    pub fn text(&self) -> String {
        self.formula.to_string()
    }
}

use SchemaKind::{Asserted, Disputed, NonImplication};

const TAUTOLOGIES: &[(&str, &str)] = &[
    ("taut-excluded-middle", "X | !X"),
    ("taut-contraposition", "(X -> Y) -> !Y -> !X"),
    ("taut-peirce", "((X -> Y) -> X) -> X"),
    ("taut-distribution", "X & (Y | Z) <-> X & Y | X & Z"),
    ("taut-de-morgan", "!(X & Y) <-> !X | !Y"),
];

const INTERACTION: &[(&str, &str)] = &[
    ("A1", "O:A (X -> Y) -> O:A X -> O:A Y"),
    ("A2", "[] X -> [A] X & O:A X"),
    ("A3", "[] O:A X | [] !O:A X"),
    ("A4", "O:A X -> O:A [A] X"),
    ("Oic", "O:A X -> <> [A] X"),
    ("OAC", "K:A X -> [A] X"),
    ("Unif-H", "<> K:A X -> K:A <> X"),
    ("A5", "Os:A (X -> Y) -> Os:A X -> Os:A Y"),
    ("A6", "Os:A X -> Os:A K:A X"),
    ("s.N", "K:A [] X -> Os:A X"),
    ("s.Oic", "Os:A X -> <> K:A X"),
    ("s.Cl1", "Os:A X -> K:A [] Os:A X"),
    ("s.Cl2", "!Os:A X -> K:A [] !Os:A X"),
    ("A7", "B:A (X -> Z) -> B:A X -> B:A Z"),
    ("PK", "K:A X -> B:A X"),
    ("FIB1", "B:A X -> K:A B:A X"),
    ("FIB2", "!B:A X -> K:A !B:A X"),
    ("HA", "B:A[X] X"),
    // revision axioms with the condition carried through on both sides
    ("MBR1", "B:A[Y] X -> (B:A[X & Y] Z <-> B:A[Y] Z)"),
    ("MBR2", "!B:A[Y] !X -> (B:A[X & Y] Z <-> B:A[Y] (X -> Z))"),
    ("A9", "Ob:A (X -> Y) -> Ob:A X -> Ob:A Y"),
    ("A10", "Ob:A X -> Ob:A K:A X"),
    ("d.N", "K:A [] X -> Ob:A X"),
    ("d.Oic", "Ob:A X -> <> K:A X"),
    ("d.Cl1", "Ob:A X -> K:A [] Ob:A X"),
    ("d.Cl2", "!Ob:A X -> K:A [] !Ob:A X"),
    // conditional forms of the knowledge/belief interaction
    ("PK-cond", "K:A X -> B:A[Y] X"),
    ("FIB1-cond", "B:A[Y] X -> K:A B:A[Y] X"),
    ("FIB2-cond", "!B:A[Y] X -> K:A !B:A[Y] X"),
    ("K-belief-cond", "B:A[Y] (X -> Z) -> B:A[Y] X -> B:A[Y] Z"),
    // the doxastic ought as a KD45 modality
    ("KD45-K", "Ob:A (X -> Y) -> Ob:A X -> Ob:A Y"),
    ("KD45-D", "Ob:A X -> !Ob:A !X"),
    ("KD45-4", "Ob:A X -> Ob:A Ob:A X"),
    ("KD45-5", "!Ob:A X -> Ob:A !Ob:A X"),
];

const DISPUTED: &[(&str, &str)] = &[
    ("A8-printed", "(Y <-> X) -> (B:A Z <-> B:A[X] Z)"),
    ("A8-knowledge", "K:A (Y <-> X) -> (B:A[Y] Z <-> B:A[X] Z)"),
    ("WCon-printed", "Y -> !B:A #f"),
    ("WCon-conditional", "X -> !B:A[X] #f"),
    ("MBR1-printed", "B:A X -> (B:A[X & Y] Z <-> B:A Z)"),
    ("MBR2-printed", "!B:A !X -> (B:A[X & Y] Z <-> B:A (X -> Z))"),
];

const NON_IMPLICATIONS: &[(&str, &str)] = &[
    ("ni-dox-to-obj", "Ob:A X -> O:A X"),
    ("ni-obj-to-dox", "O:A X -> Ob:A X"),
    ("ni-dox-to-subj", "Ob:A X -> Os:A X"),
    ("ni-subj-to-dox", "Os:A X -> Ob:A X"),
];

/// The `n`-agent independence schema over agents `A1..An`.
fn independence(n: usize) -> Schema {
    let parts: Vec<String> = (1..=n).map(|k| format!("[A{k}] X{k}")).collect();
    let premise: Vec<String> = parts.iter().map(|p| format!("<> {p}")).collect();
    let text = format!("{} -> <> ({})", premise.join(" & "), parts.join(" & "));
    Schema {
        distinct_agents: true,
        ..Schema::new(&format!("IA-{n}"), Asserted, &text)
    }
}

/// Every schema, in a fixed order.
pub fn catalog() -> Vec<Schema> {
    let mut out = Vec::new();
    for (name, text) in TAUTOLOGIES {
        out.push(Schema::new(name, Asserted, text));
    }
    for (op, prefix) in [("box", "[]"), ("stit", "[A]"), ("knows", "K:A")] {
        let forms = [
            ("K", format!("{prefix} (X -> Y) -> {prefix} X -> {prefix} Y")),
            ("T", format!("{prefix} X -> X")),
            ("4", format!("{prefix} X -> {prefix} {prefix} X")),
            ("5", format!("!{prefix} X -> {prefix} !{prefix} X")),
        ];
        for (axiom, text) in forms {
            out.push(Schema::new(&format!("S5-{axiom}-{op}"), Asserted, &text));
        }
    }
    for (name, text) in INTERACTION {
        out.push(Schema::new(name, Asserted, text));
    }
    for n in 1..=3 {
        out.push(independence(n));
    }
    for (name, text) in DISPUTED {
        out.push(Schema::new(name, Disputed, text));
    }
    for (name, text) in NON_IMPLICATIONS {
        out.push(Schema::new(name, NonImplication, text));
    }
    out
}

/// Names of the schemata checked as the modal shape of the logic: S5 for
/// the three S5 modalities, KD45 for the doxastic ought, the ought-implies-
/// can family and settledness of doxastic oughts.
pub fn logic_shape(schema: &Schema) -> bool {
    schema.name.starts_with("S5-")
        || schema.name.starts_with("KD45-")
        || matches!(schema.name.as_str(), "Oic" | "s.Oic" | "d.Oic" | "d.Cl1")
}
