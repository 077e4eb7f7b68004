//! Schema instantiation and validity sweeps over many models.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::catalog::{Schema, SchemaKind};
use super::generate::{generate_model, GenParams};
use super::random::random_formula;
use crate::document::ModelDocument;
use crate::eval::{Evaluator, Model, Validity};
use crate::formula::{parse, Assignment, Formula};

/// Hex SHA-256 of the model's canonical document.
pub fn model_digest(model: &Model) -> String {
    let json = ModelDocument::from_model(model, Vec::new()).to_json();
    hex::encode(Sha256::digest(json.as_bytes()))
}

/// A model taking part in a sweep, with enough provenance to rebuild it.
#[derive(Debug, Clone)]
pub struct SweepModel {
    pub label: String,
    pub model: Model,
    pub digest: String,
    pub params: Option<GenParams>,
}

impl SweepModel {
    pub fn generated(params: GenParams) -> Self {
        let model = generate_model(&params).expect("sweep parameters are valid");
        Self {
            label: format!("generated seed {}", params.seed),
            digest: model_digest(&model),
            model,
            params: Some(params),
        }
    }

    pub fn fixture(label: impl Into<String>, model: Model) -> Self {
        Self {
            label: label.into(),
            digest: model_digest(&model),
            model,
            params: None,
        }
    }
}

/// `count` generated models from the varied family of `seed`.
pub fn generated_pool(seed: u64, count: usize) -> Vec<SweepModel> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| SweepModel::generated(GenParams::varied(seed, i)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepConfig {
    pub seed: u64,
    pub instantiations: usize,
    /// Depth bound for substituted formulas.
    pub max_depth: usize,
    /// Counterexamples kept per schema (all are counted).
    pub max_recorded: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            instantiations: 5,
            max_depth: 3,
            max_recorded: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub schema: String,
    pub model: String,
    pub digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<GenParams>,
    pub instance: String,
    pub index: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemaResult {
    pub name: String,
    pub kind: SchemaKind,
    pub schema: String,
    pub models_tested: usize,
    /// Models lacking enough distinct agents for the schema.
    pub models_skipped: usize,
    pub instantiations_tested: usize,
    pub counterexample_count: usize,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub models: usize,
    pub schemas: Vec<SchemaResult>,
}

impl SweepReport {
    pub fn schema(&self, name: &str) -> Option<&SchemaResult> {
        self.schemas.iter().find(|s| s.name == name)
    }

    /// Asserted schemata with at least one counterexample.
    pub fn asserted_failures(&self) -> Vec<&SchemaResult> {
        self.schemas
            .iter()
            .filter(|s| s.kind == SchemaKind::Asserted && s.counterexample_count > 0)
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} models, {} instantiations per schema and model, seed {}",
            self.models, self.config.instantiations, self.config.seed
        )?;
        for s in &self.schemas {
            let kind = match s.kind {
                SchemaKind::Asserted => "asserted",
                SchemaKind::Disputed => "disputed",
                SchemaKind::NonImplication => "non-implication",
            };
            let verdict = match (s.kind, s.counterexample_count) {
                (_, 0) if s.instantiations_tested == 0 => "untested",
                (SchemaKind::Asserted, 0) => "ok",
                (SchemaKind::Asserted, _) => "FAIL",
                (_, 0) => "no counterexample",
                _ => "refuted",
            };
            writeln!(
                f,
                "{:<18} {:<15} {:>5} models {:>6} instances {:>6} counterexamples  {verdict}",
                s.name, kind, s.models_tested, s.instantiations_tested, s.counterexample_count
            )?;
            if let Some(c) = s.counterexamples.first() {
                writeln!(f, "{:<18} e.g. {} at {} in {}", "", c.instance, c.index, c.model)?;
            }
        }
        Ok(())
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn instance_rng(seed: u64, schema: usize, model: usize, k: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(mix(mix(seed ^ schema as u64) ^ model as u64) ^ k as u64))
}

/// Assignment number `k`: 0 gives every formula variable the same formula,
/// 1 gives them pairwise different atoms where possible, the rest are
/// independent random formulas.
pub fn instantiate(
    schema: &Schema,
    atoms: &[String],
    agents: &[String],
    rng: &mut ChaCha8Rng,
    k: usize,
    max_depth: usize,
) -> Option<Assignment> {
    let formula_vars: BTreeSet<String> = schema.formula.formula_vars();
    let agent_vars: BTreeSet<String> = schema.formula.agent_vars();
    let mut asg = Assignment::default();
    if schema.distinct_agents {
        if agents.len() < agent_vars.len() {
            return None;
        }
        let mut shuffled = agents.to_vec();
        shuffled.shuffle(rng);
        for (v, a) in agent_vars.iter().zip(shuffled) {
            asg = asg.agent(v, &a);
        }
    } else {
        for v in &agent_vars {
            let a = &agents[rng.random_range(0..agents.len())];
            asg = asg.agent(v, a);
        }
    }
    let random = |rng: &mut ChaCha8Rng| {
        let depth = rng.random_range(1..=max_depth);
        random_formula(rng, depth, atoms, agents)
    };
    match k {
        0 => {
            let shared = random(rng);
            for v in &formula_vars {
                asg = asg.formula(v, shared.clone());
            }
        }
        1 if atoms.len() >= formula_vars.len() => {
            for (v, a) in formula_vars.iter().zip(atoms) {
                asg = asg.formula(v, Formula::atom(a));
            }
        }
        _ => {
            for v in &formula_vars {
                asg = asg.formula(v, random(rng));
            }
        }
    }
    Some(asg)
}

#[derive(Default)]
struct Tally {
    tested: bool,
    instances: usize,
    counterexamples: Vec<Counterexample>,
}

fn vocabulary(model: &Model) -> (Vec<String>, Vec<String>) {
    let mut atoms: Vec<String> = model.valuation().keys().cloned().collect();
    if atoms.is_empty() {
        atoms.push("p".into());
    }
    (atoms, model.frame().agent_names().to_vec())
}

fn sweep_one(catalog: &[Schema], j: usize, entry: &SweepModel, config: &SweepConfig) -> Vec<Tally> {
    let (atoms, agents) = vocabulary(&entry.model);
    let mut ev = Evaluator::new(&entry.model);
    catalog
        .iter()
        .enumerate()
        .map(|(s, schema)| {
            let mut tally = Tally::default();
            for k in 0..config.instantiations {
                let mut rng = instance_rng(config.seed, s, j, k);
                let Some(asg) = instantiate(schema, &atoms, &agents, &mut rng, k, config.max_depth) else {
                    return tally;
                };
                tally.tested = true;
                let instance = schema.formula.substitute(&asg).expect("assignments cover the schema");
                tally.instances += 1;
                let verdict = ev.valid_on_model(&instance).expect("instances use the model's agents");
                if let Validity::Counterexample(i) = verdict {
                    tally.counterexamples.push(Counterexample {
                        schema: schema.name.clone(),
                        model: entry.label.clone(),
                        digest: entry.digest.clone(),
                        params: entry.params.clone(),
                        instance: instance.to_string(),
                        index: entry.model.frame().index_label(i),
                    });
                }
            }
            tally
        })
        .collect()
}

/// Runs every schema on every model, in parallel across models; the report
/// lists schemata in catalog order and counterexamples in model order.
pub fn sweep_axioms(catalog: &[Schema], models: &[SweepModel], config: &SweepConfig) -> SweepReport {
    let per_model: Vec<Vec<Tally>> = models
        .par_iter()
        .enumerate()
        .map(|(j, m)| sweep_one(catalog, j, m, config))
        .collect();
    let schemas = catalog
        .iter()
        .enumerate()
        .map(|(s, schema)| {
            let mut result = SchemaResult {
                name: schema.name.clone(),
                kind: schema.kind,
                schema: schema.text(),
                models_tested: 0,
                models_skipped: 0,
                instantiations_tested: 0,
                counterexample_count: 0,
                counterexamples: Vec::new(),
            };
            for tallies in &per_model {
                let t = &tallies[s];
                if t.tested {
                    result.models_tested += 1;
                } else {
                    result.models_skipped += 1;
                }
                result.instantiations_tested += t.instances;
                result.counterexample_count += t.counterexamples.len();
                for c in &t.counterexamples {
                    if result.counterexamples.len() < config.max_recorded {
                        result.counterexamples.push(c.clone());
                    }
                }
            }
            result
        })
        .collect();
    SweepReport {
        config: *config,
        models: models.len(),
        schemas,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("no model with digest {0}")]
    UnknownModel(String),
    #[error("regenerated model has digest {found}, expected {expected}")]
    DigestMismatch { expected: String, found: String },
    #[error("instance does not parse: {0}")]
    Parse(String),
    #[error("`{instance}` holds at {index}")]
    Holds { instance: String, index: String },
    #[error("{0}")]
    Other(String),
}

/// Rebuilds the model of `c` (from its parameters, or from `fixtures` by
/// digest) and checks that the instance really fails at the index.
pub fn replay(c: &Counterexample, fixtures: &[SweepModel]) -> Result<(), ReplayError> {
    let model = match &c.params {
        Some(p) => generate_model(p).map_err(|e| ReplayError::Other(e.to_string()))?,
        None => fixtures
            .iter()
            .find(|m| m.digest == c.digest)
            .map(|m| m.model.clone())
            .ok_or_else(|| ReplayError::UnknownModel(c.digest.clone()))?,
    };
    let digest = model_digest(&model);
    if digest != c.digest {
        return Err(ReplayError::DigestMismatch {
            expected: c.digest.clone(),
            found: digest,
        });
    }
    let f = parse(&c.instance).map_err(|e| ReplayError::Parse(e.to_string()))?;
    let i = model
        .frame()
        .parse_index(&c.index)
        .map_err(|e| ReplayError::Other(e.to_string()))?;
    let holds = Evaluator::new(&model)
        .eval(i, &f)
        .map_err(|e| ReplayError::Other(e.to_string()))?;
    if holds {
        return Err(ReplayError::Holds {
            instance: c.instance.clone(),
            index: c.index.clone(),
        });
    }
    Ok(())
}
