//! Seeded random models that satisfy every frame constraint by
//! construction.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eval::Model;
use crate::frame::{AgentId, BranchingFrame, HistoryId, IndexId, MomentId};
use crate::prob::{ClassicalDistribution, LexMeasure};
use crate::rational::Rational;
use crate::sets::{HistorySet, IndexSet};

pub const AGENT_NAMES: [&str; 3] = ["alice", "bob", "carol"];
pub const ATOM_NAMES: [&str; 4] = ["p", "q", "r", "s"];
pub const MAX_INDICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenParams {
    pub seed: u64,
    /// Levels of moments; 1 gives a single moment.
    pub max_depth: usize,
    pub max_branching: usize,
    pub num_agents: usize,
    pub num_atoms: usize,
    /// Upper bound on the layers of each measure.
    pub num_prob_layers: usize,
    /// History values are drawn from `[lo, hi]` in steps of `1/denominator`.
    pub value_range: (i64, i64),
    pub value_denominator: i64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            seed: 0,
            max_depth: 3,
            max_branching: 3,
            num_agents: 2,
            num_atoms: 3,
            num_prob_layers: 2,
            value_range: (-2, 2),
            value_denominator: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid generator parameters: {0}")]
pub struct ParamsError(String);

impl GenParams {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// The `i`-th member of a family of models with varying shape; used by
    /// sweeps and search so that small and large frames, and one to three
    /// agents, all occur.
    pub fn varied(seed: u64, i: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let num_agents = match rng.random_range(0..10) {
            0 => 1,
            1..=3 => 2,
            _ => 3,
        };
        Self {
            seed: rng.random(),
            max_depth: rng.random_range(1..=4),
            max_branching: rng.random_range(2..=3),
            num_agents,
            num_atoms: rng.random_range(2..=4),
            num_prob_layers: rng.random_range(1..=2),
            value_range: (-2, 2),
            value_denominator: rng.random_range(1..=4),
        }
    }

    pub fn check(&self) -> Result<(), ParamsError> {
        let bounds = [
            ("max_depth", self.max_depth, 4),
            ("max_branching", self.max_branching, 3),
            ("num_agents", self.num_agents, 3),
            ("num_atoms", self.num_atoms, 4),
            ("num_prob_layers", self.num_prob_layers, 2),
        ];
        for (name, v, hi) in bounds {
            if v == 0 || v > hi {
                return Err(ParamsError(format!("{name} must be in 1..={hi}, got {v}")));
            }
        }
        if self.value_range.0 > self.value_range.1 {
            return Err(ParamsError("value_range is empty".into()));
        }
        if self.value_denominator <= 0 {
            return Err(ParamsError("value_denominator must be positive".into()));
        }
        Ok(())
    }
}

struct Tree {
    /// `(name, parent)`; moments are `m*`, tips `h*`.
    nodes: Vec<(String, Option<String>)>,
}

fn build_tree(rng: &mut ChaCha8Rng, params: &GenParams) -> Tree {
    loop {
        let mut nodes = vec![("m0".to_string(), None)];
        let (mut moments, mut tips) = (1, 0);
        let mut frontier = vec![("m0".to_string(), 1usize)];
        let mut indices = 0usize;
        while let Some((name, level)) = frontier.pop() {
            let k = rng.random_range(1..=params.max_branching);
            for _ in 0..k {
                let nested = level < params.max_depth && rng.random_bool(0.5);
                let child = if nested {
                    moments += 1;
                    frontier.push((format!("m{}", moments - 1), level + 1));
                    format!("m{}", moments - 1)
                } else {
                    tips += 1;
                    indices += level;
                    format!("h{}", tips - 1)
                };
                nodes.push((child, Some(name.clone())));
            }
        }
        if indices <= MAX_INDICES {
            return Tree { nodes };
        }
    }
}

/// Per moment, every agent's cells: each child of the moment is labelled
/// with a joint action, and the first children realize every joint action.
fn build_choices(rng: &mut ChaCha8Rng, frame: &mut BranchingFrame) {
    let agents: Vec<AgentId> = frame.agent_ids().collect();
    for m in frame.moment_ids().collect::<Vec<_>>() {
        // group H_m by the node following m
        let mut by_child: BTreeMap<String, HistorySet> = BTreeMap::new();
        for h in frame.histories_through(m).iter() {
            let chain = frame.chain(h);
            let pos = chain.iter().position(|x| *x == m).unwrap();
            let key = match chain.get(pos + 1) {
                Some(next) => frame.moment_name(*next).to_string(),
                None => frame.history_name(h).to_string(),
            };
            by_child.entry(key).or_insert_with(|| frame.empty_histories()).insert(h);
        }
        let children: Vec<HistorySet> = by_child.into_values().collect();
        let k = children.len();

        let mut order = agents.clone();
        order.shuffle(rng);
        let mut counts = vec![1usize; agents.len()];
        let mut product = 1;
        for a in order {
            let n = rng.random_range(1..=k / product);
            counts[a.0] = n;
            product *= n;
        }
        let tuples: Vec<Vec<usize>> = counts.iter().map(|n| 0..*n).multi_cartesian_product().collect();
        let mut labels: Vec<Vec<usize>> = tuples.clone();
        while labels.len() < k {
            labels.push(tuples[rng.random_range(0..tuples.len())].clone());
        }
        labels.shuffle(rng);

        for a in &agents {
            let mut cells = vec![frame.empty_histories(); counts[a.0]];
            for (child, label) in children.iter().zip(&labels) {
                cells[label[a.0]].union_with(child);
            }
            frame.set_choice(*a, m, cells).expect("cells sized by the frame");
        }
    }
}

/// Moments are grouped; within a group every moment's cells are mapped
/// onto the same number of classes, so classes are unions of cells and
/// meet every moment of their group.
fn build_epistemic(rng: &mut ChaCha8Rng, frame: &mut BranchingFrame) {
    let moments: Vec<MomentId> = frame.moment_ids().collect();
    for a in frame.agent_ids().collect::<Vec<_>>() {
        let groups_wanted = rng.random_range(1..=moments.len());
        let mut groups: BTreeMap<usize, Vec<MomentId>> = BTreeMap::new();
        for m in &moments {
            groups.entry(rng.random_range(0..groups_wanted)).or_default().push(*m);
        }
        let mut pairs: Vec<(IndexId, IndexId)> = Vec::new();
        for members in groups.values() {
            let min_cells = members.iter().map(|m| frame.choice_cells(a, *m).len()).min().unwrap();
            let k = rng.random_range(1..=min_cells);
            // representative index of each class, from the first moment
            let mut reps: Vec<Option<IndexId>> = vec![None; k];
            for m in members {
                let cells = frame.choice_cells(a, *m).to_vec();
                let mut targets: Vec<usize> = (0..k).collect();
                while targets.len() < cells.len() {
                    targets.push(rng.random_range(0..k));
                }
                targets.shuffle(rng);
                for (cell, class) in cells.iter().zip(targets) {
                    for h in cell.iter() {
                        let i = frame.index_id(*m, h).unwrap();
                        match reps[class] {
                            Some(r) => pairs.push((r, i)),
                            None => reps[class] = Some(i),
                        }
                    }
                }
            }
        }
        frame.set_epistemic(a, &pairs);
    }
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> ClassicalDistribution {
    let mut weights: Vec<i64> = (0..n)
        .map(|_| if rng.random_bool(0.25) { 0 } else { rng.random_range(1..=9) })
        .collect();
    if weights.iter().all(|w| *w == 0) {
        weights[rng.random_range(0..n)] = 1;
    }
    let total: i64 = weights.iter().sum();
    let mass = weights
        .into_iter()
        .map(|w| Rational::new(BigInt::from(w), BigInt::from(total)))
        .collect();
    ClassicalDistribution::new(mass).expect("normalized by construction")
}

/// A model passing every frame and probability check. Identical
/// parameters give identical models.
pub fn generate_model(params: &GenParams) -> Result<Model, ParamsError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let tree = build_tree(&mut rng, params);
    let agents = AGENT_NAMES[..params.num_agents].iter().map(|s| s.to_string()).collect();
    let mut frame = BranchingFrame::new(agents, &tree.nodes).expect("generated trees are well-formed");
    build_choices(&mut rng, &mut frame);
    build_epistemic(&mut rng, &mut frame);

    let (lo, hi) = params.value_range;
    let den = params.value_denominator;
    for h in frame.history_ids().collect::<Vec<HistoryId>>() {
        let k = rng.random_range(lo * den..=hi * den);
        frame.set_value(h, Rational::new(BigInt::from(k), BigInt::from(den)));
    }

    let n = frame.index_count();
    let measures = frame
        .agent_ids()
        .map(|a| {
            let layers = (0..rng.random_range(1..=params.num_prob_layers))
                .map(|_| random_distribution(&mut rng, n))
                .collect();
            LexMeasure::new(a, layers).expect("layers share the frame's domain")
        })
        .collect();

    let mut valuation = BTreeMap::new();
    for atom in &ATOM_NAMES[..params.num_atoms] {
        let set = IndexSet::from_ids(n, (0..n).filter(|_| rng.random_bool(0.5)).map(IndexId));
        valuation.insert(atom.to_string(), set);
    }
    Ok(Model::new(frame, measures, valuation).expect("components built for this frame"))
}
