//! Bounded countermodel search.

use itertools::Itertools;

use super::generate::GenParams;
use super::sweep::SweepModel;
use crate::eval::{EvalError, Evaluator, Validity};
use crate::formula::{Assignment, Formula};
use crate::frame::IndexId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("formula metavariable `{0}` cannot be searched over; only agent metavariables are")]
pub struct SearchError(String);

#[derive(Debug, Clone)]
pub struct Countermodel {
    pub model: SweepModel,
    /// The closed formula that fails (agent metavariables filled in).
    pub instance: Formula,
    pub index: IndexId,
    /// Generated models tried, including this one if generated.
    pub generated: usize,
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found(Box<Countermodel>),
    Exhausted { generated: usize },
}

/// Tries `pool` in order, then `budget` generated models from the varied
/// family of `seed`. Agent metavariables range over each model's agents;
/// closed formulas naming agents a model lacks skip that model.
pub fn find_countermodel(
    f: &Formula,
    pool: &[SweepModel],
    seed: u64,
    budget: usize,
) -> Result<SearchOutcome, SearchError> {
    if let Some(v) = f.formula_vars().into_iter().next() {
        return Err(SearchError(v));
    }
    let check = |entry: &SweepModel| -> Option<(Formula, IndexId)> {
        let agents = entry.model.frame().agent_names();
        let vars: Vec<String> = f.agent_vars().into_iter().collect();
        let mut ev = Evaluator::new(&entry.model);
        let choices = vars.iter().map(|_| agents.iter()).multi_cartesian_product();
        // with no agent variables there is exactly one (empty) choice
        let choices: Vec<Vec<&String>> = if vars.is_empty() { vec![vec![]] } else { choices.collect() };
        for choice in choices {
            let mut asg = Assignment::default();
            for (v, a) in vars.iter().zip(choice) {
                asg = asg.agent(v, a);
            }
            let instance = f.substitute(&asg).expect("every metavariable is assigned");
            match ev.valid_on_model(&instance) {
                Ok(Validity::Counterexample(i)) => return Some((instance, i)),
                Ok(Validity::Valid) | Err(EvalError::UnknownAgent(_)) => {}
                Err(EvalError::Metavariable(_)) => unreachable!("instance is closed"),
            }
        }
        None
    };
    for entry in pool {
        if let Some((instance, index)) = check(entry) {
            return Ok(SearchOutcome::Found(Box::new(Countermodel {
                model: entry.clone(),
                instance,
                index,
                generated: 0,
            })));
        }
    }
    for i in 0..budget {
        let entry = SweepModel::generated(GenParams::varied(seed, i as u64));
        if let Some((instance, index)) = check(&entry) {
            return Ok(SearchOutcome::Found(Box::new(Countermodel {
                model: entry,
                instance,
                index,
                generated: i + 1,
            })));
        }
    }
    Ok(SearchOutcome::Exhausted { generated: budget })
}
