//! The JSON model file: one document per model, rationals as strings,
//! indices spelled `moment/history`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::eval::{Model, ModelError};
use crate::frame::{AgentId, BranchingFrame, FrameError, ValidationReport};
use crate::prob::{check_popper_renyi, CheckMode, ClassicalDistribution, LexMeasure, ProbabilityReport};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::sets::{HistorySet, IndexSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentEntry {
    pub name: String,
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    /// Free-form remarks; kept at the top of the file.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub agents: Vec<String>,
    /// Tree nodes. Nodes without children are history tips, and each
    /// history is named by its tip.
    pub moments: Vec<MomentEntry>,
    /// `"moment/agent"` to cells; a missing entry is the vacuous choice.
    #[serde(default)]
    pub choices: BTreeMap<String, Vec<Vec<String>>>,
    /// Generators of each agent's indistinguishability relation.
    #[serde(default)]
    pub epistemic: BTreeMap<String, Vec<[String; 2]>>,
    /// History values; missing histories are worth 0.
    #[serde(default)]
    pub values: BTreeMap<String, String>,
    /// Per agent, the layers of its measure; missing indices have mass 0.
    pub measures: BTreeMap<String, Vec<BTreeMap<String, String>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("not a model document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{section}: entry `{entry}`: {message}")]
    Entry {
        section: &'static str,
        entry: String,
        message: String,
    },
    #[error(transparent)]
    Frame(FrameError),
    #[error("frame constraints violated:\n{0}")]
    Constraints(ValidationReport),
    #[error("measures: entry `{agent}`: conditional-probability axioms violated: {detail}")]
    Probability { agent: String, detail: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn entry(section: &'static str, entry: impl Into<String>, message: impl ToString) -> DocumentError {
    DocumentError::Entry {
        section,
        entry: entry.into(),
        message: message.to_string(),
    }
}

/// Everything learned from a structurally sound document.
#[derive(Debug)]
pub struct DocumentCheck {
    pub frame: ValidationReport,
    pub probability: Vec<(String, ProbabilityReport)>,
    /// Present unless the moments fail to form a tree.
    pub model: Option<Model>,
}

impl DocumentCheck {
    pub fn passed(&self) -> bool {
        self.model.is_some() && self.frame.all_pass() && self.probability.iter().all(|(_, r)| r.passed())
    }
}

fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_lowercase() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ModelDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    /// Builds the model and runs every frame and probability check, without
    /// stopping at the first failing constraint.
    pub fn check(&self) -> Result<DocumentCheck, DocumentError> {
        let nodes: Vec<(String, Option<String>)> = self
            .moments
            .iter()
            .map(|m| (m.name.clone(), m.parent.clone()))
            .collect();
        let mut frame = match BranchingFrame::new(self.agents.clone(), &nodes) {
            Ok(f) => f,
            Err(FrameError::Tree(v)) => {
                return Ok(DocumentCheck {
                    frame: ValidationReport::tree_failure(v),
                    probability: Vec::new(),
                    model: None,
                })
            }
            Err(e) => return Err(DocumentError::Frame(e)),
        };

        for (key, cells) in &self.choices {
            let err = |m: &dyn ToString| entry("choices", key.clone(), m.to_string());
            let (m, a) = key
                .split_once('/')
                .ok_or_else(|| err(&"expected a key of the form `moment/agent`"))?;
            let moment = frame.moment_id(m).map_err(|e| err(&e))?;
            let agent = frame.agent_id(a).map_err(|e| err(&e))?;
            let mut sets = Vec::new();
            for cell in cells {
                let mut set = frame.empty_histories();
                for h in cell {
                    set.insert(frame.history_id(h).map_err(|e| err(&e))?);
                }
                sets.push(set);
            }
            frame.set_choice(agent, moment, sets).map_err(|e| err(&e))?;
        }

        for (a, pairs) in &self.epistemic {
            let agent = frame.agent_id(a).map_err(|e| entry("epistemic", a.clone(), e))?;
            let mut ids = Vec::new();
            for [x, y] in pairs {
                let at = |s: &str| frame.parse_index(s).map_err(|e| entry("epistemic", a.clone(), e));
                ids.push((at(x)?, at(y)?));
            }
            frame.set_epistemic(agent, &ids);
        }

        for (h, v) in &self.values {
            let id = frame.history_id(h).map_err(|e| entry("values", h.clone(), e))?;
            let v = parse_rational(v).map_err(|e| entry("values", h.clone(), e))?;
            frame.set_value(id, v);
        }

        let report = frame.validate();

        for a in self.measures.keys() {
            frame.agent_id(a).map_err(|e| entry("measures", a.clone(), e))?;
        }
        let mut measures = Vec::new();
        let mut probability = Vec::new();
        for (k, a) in frame.agent_names().iter().enumerate() {
            let layers = self
                .measures
                .get(a)
                .ok_or_else(|| entry("measures", a.clone(), "every agent needs a measure"))?;
            let mut dists = Vec::new();
            for (l, layer) in layers.iter().enumerate() {
                let mut mass = vec![Rational::zero(); frame.index_count()];
                for (i, p) in layer {
                    let name = format!("{a} layer {l} `{i}`");
                    let id = frame.parse_index(i).map_err(|e| entry("measures", name.clone(), e))?;
                    mass[id.0] = parse_rational(p).map_err(|e| entry("measures", name, e))?;
                }
                let d = ClassicalDistribution::new(mass)
                    .map_err(|e| entry("measures", format!("{a} layer {l}"), e))?;
                dists.push(d);
            }
            let mu = LexMeasure::new(AgentId(k), dists).map_err(|e| entry("measures", a.clone(), e))?;
            probability.push((a.clone(), check_popper_renyi(&mu, CheckMode::default())));
            measures.push(mu);
        }

        let mut valuation = BTreeMap::new();
        for (atom, indices) in &self.valuation {
            if !is_atom_name(atom) {
                return Err(entry("valuation", atom.clone(), "atoms are lowercase identifiers"));
            }
            let mut set = frame.empty_indices();
            for i in indices {
                set.insert(frame.parse_index(i).map_err(|e| entry("valuation", atom.clone(), e))?);
            }
            valuation.insert(atom.clone(), set);
        }

        let model = Model::new(frame, measures, valuation)?;
        Ok(DocumentCheck {
            frame: report,
            probability,
            model: Some(model),
        })
    }

    /// Builds a model that passes every check.
    pub fn build(&self) -> Result<Model, DocumentError> {
        let checked = self.check()?;
        let Some(model) = checked.model else {
            return Err(DocumentError::Constraints(checked.frame));
        };
        if !checked.frame.all_pass() {
            return Err(DocumentError::Constraints(checked.frame));
        }
        for (agent, r) in &checked.probability {
            if !r.passed() {
                let detail = r
                    .violations
                    .first()
                    .map(|v| v.describe(model.frame()))
                    .unwrap_or_default();
                return Err(DocumentError::Probability {
                    agent: agent.clone(),
                    detail,
                });
            }
        }
        Ok(model)
    }

    /// The canonical document for `model`: sorted names, explicit values,
    /// non-vacuous choices only, one generator per non-trivial class member,
    /// zero masses omitted.
    pub fn from_model(model: &Model, notes: Vec<String>) -> Self {
        let frame = model.frame();
        let mut moments: Vec<MomentEntry> = frame
            .moment_ids()
            .map(|m| MomentEntry {
                name: frame.moment_name(m).to_string(),
                parent: frame.parent(m).map(|p| frame.moment_name(p).to_string()),
            })
            .chain(frame.history_ids().map(|h| MomentEntry {
                name: frame.history_name(h).to_string(),
                parent: frame.chain(h).last().map(|m| frame.moment_name(*m).to_string()),
            }))
            .collect();
        moments.sort_by(|a, b| a.name.cmp(&b.name));

        let mut choices = BTreeMap::new();
        for m in frame.moment_ids() {
            for a in frame.agent_ids() {
                let cells = frame.choice_cells(a, m);
                if cells.len() == 1 && &cells[0] == frame.histories_through(m) {
                    continue;
                }
                let mut cells: Vec<&HistorySet> = cells.iter().collect();
                cells.sort_by_key(|c| c.first());
                let key = format!("{}/{}", frame.moment_name(m), frame.agent_name(a));
                choices.insert(key, cells.into_iter().map(|c| frame.history_labels(c)).collect());
            }
        }

        let mut epistemic = BTreeMap::new();
        for a in frame.agent_ids() {
            let mut pairs = Vec::new();
            for class in frame.epistemic_classes(a) {
                let mut members = class.iter();
                let Some(first) = members.next() else { continue };
                for other in members {
                    pairs.push([frame.index_label(first), frame.index_label(other)]);
                }
            }
            if !pairs.is_empty() {
                epistemic.insert(frame.agent_name(a).to_string(), pairs);
            }
        }

        let values = frame
            .history_ids()
            .map(|h| (frame.history_name(h).to_string(), format_rational(frame.value(h))))
            .collect();

        let measures = frame
            .agent_ids()
            .map(|a| {
                let layers = model
                    .measure(a)
                    .layers()
                    .iter()
                    .map(|layer| {
                        frame
                            .index_ids()
                            .filter(|i| !layer.mass_of(*i).is_zero())
                            .map(|i| (frame.index_label(i), format_rational(layer.mass_of(i))))
                            .collect()
                    })
                    .collect();
                (frame.agent_name(a).to_string(), layers)
            })
            .collect();

        let valuation = model
            .valuation()
            .iter()
            .map(|(atom, set): (&String, &IndexSet)| (atom.clone(), frame.index_labels(set)))
            .collect();

        Self {
            notes,
            agents: frame.agent_names().to_vec(),
            moments,
            choices,
            epistemic,
            values,
            measures,
            valuation,
        }
    }

    /// Rebuilds through a model; fails if the document is invalid.
    pub fn normalized(&self) -> Result<Self, DocumentError> {
        Ok(Self::from_model(&self.build()?, self.notes.clone()))
    }
}

fn read(path: &Path) -> Result<String, DocumentError> {
    fs::read_to_string(path).map_err(|source| DocumentError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_document(path: impl AsRef<Path>) -> Result<ModelDocument, DocumentError> {
    ModelDocument::from_json(&read(path.as_ref())?)
}

/// Reads, builds and validates a model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<Model, DocumentError> {
    load_document(path)?.build()
}

/// Writes `model` in canonical form.
pub fn save_model(model: &Model, notes: Vec<String>, path: impl AsRef<Path>) -> Result<(), DocumentError> {
    let path = path.as_ref();
    fs::write(path, ModelDocument::from_model(model, notes).to_json()).map_err(|source| DocumentError::Io {
        path: path.display().to_string(),
        source,
    })
}
