//! Model checking for epistemic, doxastic and deontic stit logic.
//!
//! A [`Model`] is a finite branching-time frame with per-agent choice
//! partitions, epistemic equivalence relations, a deontic value on every
//! history, a lexicographic conditional-probability measure per agent and a
//! valuation of atoms. On top of that the crate provides
//!
//! * the three optimality notions behind the ought operators ([`deontic`]),
//! * a parser and printer for the formula language ([`formula`]),
//! * truth-set evaluation ([`eval`]),
//! * random model generation, axiom sweeps and countermodel search
//!   ([`harness`]),
//! * the JSON model file format ([`document`]).

pub mod deontic;
pub mod document;
pub mod eval;
pub mod formula;
pub mod frame;
pub mod harness;
pub mod prob;
pub mod rational;
pub mod sets;

pub use deontic::{Action, DeonticReport, DeonticSummary};
pub use document::{load_document, load_model, save_model, DocumentCheck, DocumentError, ModelDocument};
pub use eval::{EvalError, Evaluator, Model, ModelError, TruthSet, Validity};
pub use formula::{parse, Agent, Assignment, Formula, ParseError};
pub use frame::{
    AgentId, BranchingFrame, Constraint, FrameError, HistoryId, Index, IndexId, MomentId,
    ValidationReport, Violation,
};
pub use prob::{ClassicalDistribution, ConditionalProbability, LexMeasure, ProbabilityReport};
pub use rational::Rational;
pub use sets::{HistorySet, IndexSet};
