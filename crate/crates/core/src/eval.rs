//! Models and the truth clauses.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_traits::One;

use crate::deontic::{expected_utility_terms, Action, DeonticReport};
use crate::formula::{Agent, Formula};
use crate::frame::{AgentId, BranchingFrame, IndexId, MomentId};
use crate::prob::{ConditionalProbability, LexMeasure};
use crate::rational::Exact;
use crate::sets::IndexSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("measures: expected one measure per agent ({expected}), found {found}")]
    MeasureCount { expected: usize, found: usize },
    #[error("measures: measure #{position} belongs to agent #{owner}")]
    MeasureOwner { position: usize, owner: usize },
    #[error("measures: agent `{agent}` has a measure over {found} indices, the frame has {expected}")]
    MeasureDomain {
        agent: String,
        expected: usize,
        found: usize,
    },
    #[error("valuation: atom `{atom}` has a set over {found} indices, the frame has {expected}")]
    ValuationDomain {
        atom: String,
        expected: usize,
        found: usize,
    },
}

/// A frame with one measure per agent and a valuation of atoms.
#[derive(Debug, Clone)]
pub struct Model {
    frame: BranchingFrame,
    measures: Vec<LexMeasure>,
    valuation: BTreeMap<String, IndexSet>,
}

impl Model {
    /// `measures[k]` must belong to agent `k`.
    pub fn new(
        frame: BranchingFrame,
        measures: Vec<LexMeasure>,
        valuation: BTreeMap<String, IndexSet>,
    ) -> Result<Self, ModelError> {
        if measures.len() != frame.agent_count() {
            return Err(ModelError::MeasureCount {
                expected: frame.agent_count(),
                found: measures.len(),
            });
        }
        for (position, m) in measures.iter().enumerate() {
            if m.agent().0 != position {
                return Err(ModelError::MeasureOwner {
                    position,
                    owner: m.agent().0,
                });
            }
            if m.domain() != frame.index_count() {
                return Err(ModelError::MeasureDomain {
                    agent: frame.agent_name(m.agent()).to_string(),
                    expected: frame.index_count(),
                    found: m.domain(),
                });
            }
        }
        for (atom, set) in &valuation {
            if set.capacity() != frame.index_count() {
                return Err(ModelError::ValuationDomain {
                    atom: atom.clone(),
                    expected: frame.index_count(),
                    found: set.capacity(),
                });
            }
        }
        Ok(Self {
            frame,
            measures,
            valuation,
        })
    }

    pub fn frame(&self) -> &BranchingFrame {
        &self.frame
    }

    pub fn measure(&self, agent: AgentId) -> &LexMeasure {
        &self.measures[agent.0]
    }

    pub fn measures(&self) -> &[LexMeasure] {
        &self.measures
    }

    pub fn valuation(&self) -> &BTreeMap<String, IndexSet> {
        &self.valuation
    }

    /// `V(p)`; empty for atoms the valuation does not mention.
    pub fn atom(&self, name: &str) -> IndexSet {
        self.valuation
            .get(name)
            .cloned()
            .unwrap_or_else(|| self.frame.empty_indices())
    }

    pub fn deontic_report(&self, agent: AgentId, moment: MomentId) -> DeonticReport {
        DeonticReport::compute(&self.frame, self.measure(agent), agent, moment)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("formula contains metavariable `{0}`; instantiate the schema first")]
    Metavariable(String),
}

/// `‖φ‖` together with the formula it interprets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthSet {
    pub formula: Formula,
    pub indices: IndexSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// The least falsifying index (by moment name, then history name).
    Counterexample(IndexId),
}

/// Evaluation context over one model. Truth sets and deontic reports are
/// memoized for the lifetime of the evaluator.
pub struct Evaluator<'m> {
    model: &'m Model,
    truth: HashMap<Formula, IndexSet>,
    reports: HashMap<(AgentId, MomentId), Rc<DeonticReport>>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m Model) -> Self {
        Self {
            model,
            truth: HashMap::new(),
            reports: HashMap::new(),
        }
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    fn agent_id(&self, agent: &Agent) -> Result<AgentId, EvalError> {
        match agent {
            Agent::Name(n) => self
                .model
                .frame
                .agent_id(n)
                .map_err(|_| EvalError::UnknownAgent(n.clone())),
            Agent::Var(v) => Err(EvalError::Metavariable(v.clone())),
        }
    }

    pub fn report(&mut self, agent: AgentId, moment: MomentId) -> Rc<DeonticReport> {
        self.reports
            .entry((agent, moment))
            .or_insert_with(|| Rc::new(self.model.deontic_report(agent, moment)))
            .clone()
    }

    pub fn truth_set(&mut self, f: &Formula) -> Result<TruthSet, EvalError> {
        Ok(TruthSet {
            formula: f.clone(),
            indices: self.set(f)?,
        })
    }

    pub fn eval(&mut self, i: IndexId, f: &Formula) -> Result<bool, EvalError> {
        Ok(self.set(f)?.contains(i))
    }

    pub fn valid_on_model(&mut self, f: &Formula) -> Result<Validity, EvalError> {
        let set = self.set(f)?;
        Ok(match set.complement().first() {
            None => Validity::Valid,
            Some(i) => Validity::Counterexample(i),
        })
    }

    /// All indices at the moments where `holds_at` is true.
    fn by_moment(&self, mut holds_at: impl FnMut(MomentId) -> bool) -> IndexSet {
        let frame = &self.model.frame;
        let mut out = frame.empty_indices();
        for m in frame.moment_ids() {
            if holds_at(m) {
                out.union_with(frame.indices_at(m));
            }
        }
        out
    }

    /// `‖φ‖`, memoized.
    pub fn set(&mut self, f: &Formula) -> Result<IndexSet, EvalError> {
        if let Some(s) = self.truth.get(f) {
            return Ok(s.clone());
        }
        let s = self.compute(f)?;
        self.truth.insert(f.clone(), s.clone());
        Ok(s)
    }

    fn compute(&mut self, f: &Formula) -> Result<IndexSet, EvalError> {
        use Formula as F;
        let model = self.model;
        let frame = &model.frame;
        Ok(match f {
            F::Atom(p) => model.atom(p),
            F::Var(v) => return Err(EvalError::Metavariable(v.clone())),
            F::Top => frame.all_indices(),
            F::Bottom => frame.empty_indices(),
            F::Not(a) => self.set(a)?.complement(),
            F::And(a, b) => self.set(a)?.intersection(&self.set(b)?),
            F::Or(a, b) => self.set(a)?.union(&self.set(b)?),
            F::Implies(a, b) => self.set(a)?.complement().union(&self.set(b)?),
            F::Iff(a, b) => {
                let (a, b) = (self.set(a)?, self.set(b)?);
                a.intersection(&b).union(&a.complement().intersection(&b.complement()))
            }
            F::Box(a) => {
                let s = self.set(a)?;
                self.by_moment(|m| frame.indices_at(m).is_subset(&s))
            }
            F::Diamond(a) => {
                let s = self.set(a)?;
                self.by_moment(|m| !frame.indices_at(m).is_disjoint(&s))
            }
            F::Stit(ag, a) => {
                let agent = self.agent_id(ag)?;
                let s = self.set(a)?;
                let mut out = frame.empty_indices();
                for m in frame.moment_ids() {
                    for cell in frame.choice_cells(agent, m) {
                        let lifted = frame.lift(m, cell);
                        if lifted.is_subset(&s) {
                            out.union_with(&lifted);
                        }
                    }
                }
                out
            }
            F::Knows(ag, a) => {
                let agent = self.agent_id(ag)?;
                let s = self.set(a)?;
                let mut out = frame.empty_indices();
                for class in frame.epistemic_classes(agent) {
                    if class.is_subset(&s) {
                        out.union_with(class);
                    }
                }
                out
            }
            F::Believes(ag, c, a) => {
                let agent = self.agent_id(ag)?;
                let cond = match c {
                    Some(c) => self.set(c)?,
                    None => frame.all_indices(),
                };
                let body = self.set(a)?;
                let mu = model.measure(agent);
                let mut out = frame.empty_indices();
                for class in frame.epistemic_classes(agent) {
                    if mu.mu(&body, &cond.intersection(class)).is_one() {
                        out.union_with(class);
                    }
                }
                out
            }
            F::OughtObj(ag, a) => {
                let agent = self.agent_id(ag)?;
                let s = self.set(a)?;
                let mut out = frame.empty_indices();
                for m in frame.moment_ids() {
                    let r = self.report(agent, m);
                    if r.optimal.iter().all(|k| frame.lift(m, &r.cells[*k]).is_subset(&s)) {
                        out.union_with(frame.indices_at(m));
                    }
                }
                out
            }
            F::OughtSubj(ag, a) => {
                let agent = self.agent_id(ag)?;
                let s = self.set(a)?;
                let mut out = frame.empty_indices();
                for m in frame.moment_ids() {
                    let r = self.report(agent, m);
                    if r.s_optimal.iter().all(|k| self.reach(agent, m, *k).is_subset(&s)) {
                        out.union_with(frame.indices_at(m));
                    }
                }
                out
            }
            F::OughtDox(ag, a) => {
                let agent = self.agent_id(ag)?;
                let s = self.set(a)?;
                let mut out = frame.empty_indices();
                for m in frame.moment_ids() {
                    let r = self.report(agent, m);
                    if r.eu_max.iter().all(|k| self.reach(agent, m, *k).is_subset(&s)) {
                        out.union_with(frame.indices_at(m));
                    }
                }
                out
            }
        })
    }

    /// Indices `⟨m',h'⟩` with `m' ~ m` and `h' ∈ [L]^{m'}` for cell `k` at `m`.
    fn reach(&self, agent: AgentId, m: MomentId, k: usize) -> IndexSet {
        let frame = &self.model.frame;
        let cell = &frame.choice_cells(agent, m)[k];
        let mut out = frame.empty_indices();
        for at in frame.related_moments(agent, m) {
            let cluster = frame.epistemic_cluster(agent, cell, m, at);
            out.union_with(&frame.lift(at, &cluster));
        }
        out
    }

    fn labels(&self, set: &IndexSet) -> String {
        format!("{{{}}}", self.model.frame.index_labels(set).join(", "))
    }

    fn cell_text(&self, r: &DeonticReport, k: usize) -> String {
        format!("{{{}}}", self.model.frame.history_labels(&r.cells[k]).join(","))
    }

    fn cells_text(&self, r: &DeonticReport, which: &[usize]) -> String {
        let cells: Vec<String> = which.iter().map(|k| self.cell_text(r, *k)).collect();
        format!("{{{}}}", cells.join(", "))
    }

    /// A clause-by-clause account of `f` at `i`: connectives are unfolded
    /// at `i`; modal clauses report the sets, deontic choices and exact
    /// ratios they were decided by.
    pub fn explain(&mut self, i: IndexId, f: &Formula) -> Result<Vec<String>, EvalError> {
        let mut lines = Vec::new();
        self.explain_into(i, f, 0, &mut lines)?;
        Ok(lines)
    }

    fn explain_into(&mut self, i: IndexId, f: &Formula, depth: usize, out: &mut Vec<String>) -> Result<(), EvalError> {
        use Formula as F;
        let model = self.model;
        let frame = &model.frame;
        let pad = "  ".repeat(depth);
        let value = self.eval(i, f)?;
        let at = frame.index_label(i);
        out.push(format!("{pad}{f} at {at}: {value}"));
        let pad = "  ".repeat(depth + 1);
        let idx = frame.index(i);
        let m = idx.moment;
        match f {
            F::Atom(p) if !model.valuation.contains_key(p) => {
                out.push(format!("{pad}atom `{p}` is not in the valuation; false everywhere"));
            }
            F::Not(a) => self.explain_into(i, a, depth + 1, out)?,
            F::And(a, b) | F::Or(a, b) | F::Implies(a, b) | F::Iff(a, b) => {
                self.explain_into(i, a, depth + 1, out)?;
                self.explain_into(i, b, depth + 1, out)?;
            }
            F::Box(a) | F::Diamond(a) => {
                let s = self.set(a)?;
                let here = frame.indices_at(m);
                out.push(format!("{pad}indices at {}: {}", frame.moment_name(m), self.labels(here)));
                out.push(format!("{pad}of these, ||{a}|| holds at {}", self.labels(&here.intersection(&s))));
            }
            F::Stit(ag, a) => {
                let agent = self.agent_id(ag)?;
                let s = self.set(a)?;
                let cell = frame
                    .choice_cell(agent, m, idx.history)
                    .expect("index histories pass through their moment");
                let lifted = frame.lift(m, cell);
                out.push(format!("{pad}choice cell = {}", self.labels(&lifted)));
                out.push(format!("{pad}of these, ||{a}|| holds at {}", self.labels(&lifted.intersection(&s))));
            }
            F::Knows(ag, a) => {
                let agent = self.agent_id(ag)?;
                let s = self.set(a)?;
                let info = frame.information_set(agent, i);
                out.push(format!("{pad}information set = {}", self.labels(info)));
                out.push(format!("{pad}of these, ||{a}|| holds at {}", self.labels(&info.intersection(&s))));
            }
            F::Believes(ag, c, a) => {
                let agent = self.agent_id(ag)?;
                let cond = match c {
                    Some(c) => self.set(c)?,
                    None => frame.all_indices(),
                };
                let body = self.set(a)?;
                let info = frame.information_set(agent, i);
                let given = cond.intersection(info);
                out.push(format!("{pad}information set = {}", self.labels(info)));
                out.push(format!("{pad}conditioning event = {}", self.labels(&given)));
                let mu = model.measure(agent);
                match mu.active_layer(&given) {
                    Some(layer) => {
                        let p = &mu.layers()[layer];
                        let num = p.measure(&body.intersection(&given));
                        let den = p.measure(&given);
                        out.push(format!(
                            "{pad}mu = {} / {} = {} (layer {layer})",
                            Exact(&num),
                            Exact(&den),
                            Exact(&(num.clone() / den.clone()))
                        ));
                    }
                    None => out.push(format!("{pad}mu = 1 (conditioning event has no mass in any layer)")),
                }
            }
            F::OughtObj(ag, a) | F::OughtSubj(ag, a) | F::OughtDox(ag, a) => {
                let agent = self.agent_id(ag)?;
                let s = self.set(a)?;
                let r = self.report(agent, m);
                out.push(format!("{pad}choices = {}", self.cells_text(&r, &(0..r.cells.len()).collect::<Vec<_>>())));
                match f {
                    F::OughtObj(..) => {
                        out.push(format!("{pad}optimal = {}", self.cells_text(&r, &r.optimal)));
                        for k in &r.optimal {
                            let lifted = frame.lift(m, &r.cells[*k]);
                            out.push(format!(
                                "{pad}{} within ||{a}||: {}",
                                self.labels(&lifted),
                                lifted.is_subset(&s)
                            ));
                        }
                    }
                    F::OughtSubj(..) => {
                        out.push(format!("{pad}s-optimal = {}", self.cells_text(&r, &r.s_optimal)));
                        for k in &r.s_optimal {
                            let reach = self.reach(agent, m, *k);
                            out.push(format!("{pad}{} within ||{a}||: {}", self.labels(&reach), reach.is_subset(&s)));
                        }
                    }
                    _ => {
                        for (k, eu) in r.eu.iter().enumerate() {
                            let action = Action { agent, moment: m, cell: k };
                            let terms = expected_utility_terms(frame, model.measure(agent), action)
                                .expect("cell positions come from the frame");
                            let shown: Vec<String> = terms
                                .iter()
                                .map(|t| {
                                    let at = frame.index_id(t.moment, t.history).expect("terms lie on indices");
                                    format!("{t} [{}]", frame.index_label(at))
                                })
                                .collect();
                            let sum = if shown.is_empty() { "0".to_string() } else { shown.join(" + ") };
                            out.push(format!(
                                "{pad}eu {} = {} = {}",
                                self.cell_text(&r, k),
                                sum,
                                Exact(eu)
                            ));
                        }
                        out.push(format!("{pad}eu-max = {}", self.cells_text(&r, &r.eu_max)));
                        for k in &r.eu_max {
                            let reach = self.reach(agent, m, *k);
                            out.push(format!("{pad}{} within ||{a}||: {}", self.labels(&reach), reach.is_subset(&s)));
                        }
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Convenience wrapper around a fresh [`Evaluator`].
pub fn truth_set(model: &Model, f: &Formula) -> Result<TruthSet, EvalError> {
    Evaluator::new(model).truth_set(f)
}

pub fn eval(model: &Model, i: IndexId, f: &Formula) -> Result<bool, EvalError> {
    Evaluator::new(model).eval(i, f)
}

pub fn valid_on_model(model: &Model, f: &Formula) -> Result<Validity, EvalError> {
    Evaluator::new(model).valid_on_model(f)
}
