//! Finite branching-time frames: moments, histories, indices, choice
//! partitions, epistemic equivalence relations and deontic values, plus the
//! validators for every frame constraint.
//!
//! Moments form a tree given by parent links. A node without children is the
//! terminal point of exactly one history and names it; it is not itself a
//! moment. Histories are therefore the root-to-leaf paths, and a frame with a
//! single moment has that moment as root with one or more history tips.
//!
//! Ids are assigned in name order, so [`IndexId`] order is "by moment name,
//! then by history name".

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;
use num_traits::Zero;

use crate::rational::Rational;
use crate::sets::{DenseId, HistorySet, IndexSet};

macro_rules! dense_id {
    ($name:ident) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub usize);

        impl DenseId for $name {
            fn from_usize(raw: usize) -> Self {
                $name(raw)
            }
            fn to_usize(self) -> usize {
                self.0
            }
        }
    };
}

dense_id!(AgentId);
dense_id!(MomentId);
dense_id!(HistoryId);
dense_id!(IndexId);

/// A moment/history pair with the moment lying on the history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Index {
    pub moment: MomentId,
    pub history: HistoryId,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("agents: the agent list is empty")]
    NoAgents,
    #[error("agents: duplicate agent `{0}`")]
    DuplicateAgent(String),
    #[error("{section}: `{name}` is not a valid name (identifier characters only, no `/`)")]
    InvalidName { section: &'static str, name: String },
    #[error("moments: duplicate moment `{0}`")]
    DuplicateMoment(String),
    #[error("moments: `{moment}` has unknown parent `{parent}`")]
    UnknownParent { moment: String, parent: String },
    #[error("moments: not a rooted tree: {}", .0.iter().map(|v| v.to_string()).join("; "))]
    Tree(Vec<Violation>),
    #[error("moments: the root `{0}` has no children, so there is no history")]
    NoHistories(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown moment `{0}`")]
    UnknownMoment(String),
    #[error("unknown history `{0}`")]
    UnknownHistory(String),
    #[error("`{0}` is not an index: expected `moment/history` with the moment on the history")]
    InvalidIndex(String),
    #[error("history `{history}` does not pass through moment `{moment}`")]
    NotThrough { moment: String, history: String },
    #[error("agent `{agent}` has no choice cell containing `{history}` at `{moment}`")]
    NoCell {
        agent: String,
        moment: String,
        history: String,
    },
    #[error("agent `{agent}` / moment `{moment}`: expected cells over {expected} histories")]
    CellCapacity {
        agent: String,
        moment: String,
        expected: usize,
    },
}

/// The frame constraints reported by [`BranchingFrame::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    Tree,
    Partition,
    NoChoiceBetweenUndivided,
    IndependenceOfAgency,
    OwnAction,
    UniformHistoricalPossibility,
}

impl Constraint {
    pub const ALL: [Constraint; 6] = [
        Constraint::Tree,
        Constraint::Partition,
        Constraint::NoChoiceBetweenUndivided,
        Constraint::IndependenceOfAgency,
        Constraint::OwnAction,
        Constraint::UniformHistoricalPossibility,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Constraint::Tree => "tree",
            Constraint::Partition => "partition",
            Constraint::NoChoiceBetweenUndivided => "NC",
            Constraint::IndependenceOfAgency => "IA",
            Constraint::OwnAction => "OAC",
            Constraint::UniformHistoricalPossibility => "Unif-H",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A concrete constraint violation. Indices are spelled `moment/history`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoRoot,
    MultipleRoots {
        roots: Vec<String>,
    },
    Cycle {
        moment: String,
    },
    EmptyCell {
        agent: String,
        moment: String,
    },
    ForeignHistory {
        agent: String,
        moment: String,
        history: String,
    },
    OverlappingCells {
        agent: String,
        moment: String,
        history: String,
    },
    UncoveredHistory {
        agent: String,
        moment: String,
        history: String,
    },
    /// Histories `first` and `second` both continue through `shared` after
    /// `moment` but lie in different cells of `agent`.
    UndividedSplit {
        agent: String,
        moment: String,
        first: String,
        second: String,
        shared: String,
    },
    /// The chosen cells (one per agent) have empty intersection.
    EmptyJointAction {
        moment: String,
        selection: Vec<(String, Vec<String>)>,
    },
    /// `from ~ to`, yet `missing` (same choice cell as `from`) is not `~ to`.
    OwnAction {
        agent: String,
        from: String,
        to: String,
        missing: String,
    },
    /// `from ~ to`, yet `unmatched` (at the moment of `from`) relates to no
    /// index at `target`.
    UniformHistory {
        agent: String,
        from: String,
        to: String,
        unmatched: String,
        target: String,
    },
}

impl Violation {
    pub fn constraint(&self) -> Constraint {
        match self {
            Violation::NoRoot | Violation::MultipleRoots { .. } | Violation::Cycle { .. } => {
                Constraint::Tree
            }
            Violation::EmptyCell { .. }
            | Violation::ForeignHistory { .. }
            | Violation::OverlappingCells { .. }
            | Violation::UncoveredHistory { .. } => Constraint::Partition,
            Violation::UndividedSplit { .. } => Constraint::NoChoiceBetweenUndivided,
            Violation::EmptyJointAction { .. } => Constraint::IndependenceOfAgency,
            Violation::OwnAction { .. } => Constraint::OwnAction,
            Violation::UniformHistory { .. } => Constraint::UniformHistoricalPossibility,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoRoot => write!(f, "no root moment"),
            Violation::MultipleRoots { roots } => {
                write!(f, "multiple roots: {}", roots.join(", "))
            }
            Violation::Cycle { moment } => write!(f, "parent links of `{moment}` form a cycle"),
            Violation::EmptyCell { agent, moment } => {
                write!(f, "choices `{moment}/{agent}`: empty cell")
            }
            Violation::ForeignHistory {
                agent,
                moment,
                history,
            } => write!(
                f,
                "choices `{moment}/{agent}`: `{history}` does not pass through `{moment}`"
            ),
            Violation::OverlappingCells {
                agent,
                moment,
                history,
            } => write!(
                f,
                "choices `{moment}/{agent}`: `{history}` appears in more than one cell"
            ),
            Violation::UncoveredHistory {
                agent,
                moment,
                history,
            } => write!(f, "choices `{moment}/{agent}`: `{history}` is in no cell"),
            Violation::UndividedSplit {
                agent,
                moment,
                first,
                second,
                shared,
            } => write!(
                f,
                "choices `{moment}/{agent}`: `{first}` and `{second}` are undivided at `{moment}` (both pass `{shared}`) but lie in different cells"
            ),
            Violation::EmptyJointAction { moment, selection } => {
                let parts = selection
                    .iter()
                    .map(|(a, cell)| format!("{a}:{{{}}}", cell.join(",")))
                    .join(" ");
                write!(f, "moment `{moment}`: joint action {parts} is empty")
            }
            Violation::OwnAction {
                agent,
                from,
                to,
                missing,
            } => write!(
                f,
                "epistemic `{agent}`: {from} ~ {to} but {missing} (same choice cell as {from}) is not ~ {to}"
            ),
            Violation::UniformHistory {
                agent,
                from,
                to,
                unmatched,
                target,
            } => write!(
                f,
                "epistemic `{agent}`: {from} ~ {to} but {unmatched} is related to no index at `{target}`"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail(Vec<Violation>),
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintResult {
    pub constraint: Constraint,
    pub status: CheckStatus,
}

/// Outcome of every frame constraint; all violations are collected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub results: Vec<ConstraintResult>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.results
            .iter()
            .all(|r| matches!(r.status, CheckStatus::Pass))
    }

    pub fn status(&self, constraint: Constraint) -> &CheckStatus {
        &self
            .results
            .iter()
            .find(|r| r.constraint == constraint)
            .expect("every constraint is reported")
            .status
    }

    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.results.iter().flat_map(|r| match &r.status {
            CheckStatus::Fail(v) => v.as_slice(),
            _ => &[],
        })
    }

    pub fn failed(&self) -> Vec<Constraint> {
        self.results
            .iter()
            .filter(|r| matches!(r.status, CheckStatus::Fail(_)))
            .map(|r| r.constraint)
            .collect()
    }

    /// Report for an input whose moment links are not a rooted tree.
    pub fn tree_failure(violations: Vec<Violation>) -> Self {
        let mut results = vec![ConstraintResult {
            constraint: Constraint::Tree,
            status: CheckStatus::Fail(violations),
        }];
        for c in &Constraint::ALL[1..] {
            results.push(ConstraintResult {
                constraint: *c,
                status: CheckStatus::Skipped("moments do not form a rooted tree".into()),
            });
        }
        Self { results }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            match &r.status {
                CheckStatus::Pass => writeln!(f, "{:<9} pass", r.constraint.label())?,
                CheckStatus::Skipped(why) => {
                    writeln!(f, "{:<9} skipped ({why})", r.constraint.label())?
                }
                CheckStatus::Fail(vs) => {
                    writeln!(f, "{:<9} FAIL ({} violations)", r.constraint.label(), vs.len())?;
                    for v in vs {
                        writeln!(f, "          {v}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Checks that parent links form a single rooted tree. Parents must already
/// be known names.
pub fn check_tree(nodes: &[(String, Option<String>)]) -> Vec<Violation> {
    let parent: HashMap<&str, Option<&str>> = nodes
        .iter()
        .map(|(n, p)| (n.as_str(), p.as_deref()))
        .collect();
    let mut violations = Vec::new();
    let roots: Vec<String> = nodes
        .iter()
        .filter(|(_, p)| p.is_none())
        .map(|(n, _)| n.clone())
        .sorted()
        .collect();
    match roots.len() {
        0 => violations.push(Violation::NoRoot),
        1 => {}
        _ => violations.push(Violation::MultipleRoots { roots }),
    }
    let mut in_cycle: BTreeSet<String> = BTreeSet::new();
    let limit = nodes.len();
    for (name, _) in nodes {
        let mut cur = name.as_str();
        let mut steps = 0;
        while let Some(Some(p)) = parent.get(cur) {
            cur = p;
            steps += 1;
            if steps > limit {
                break;
            }
        }
        if steps > limit {
            // `cur` is on the cycle; collect it and report its least member.
            let mut members = vec![cur.to_string()];
            let mut walk = parent[cur].unwrap_or(cur);
            while walk != cur {
                members.push(walk.to_string());
                walk = parent[walk].unwrap_or(cur);
            }
            in_cycle.insert(members.into_iter().min().unwrap());
        }
    }
    violations.extend(in_cycle.into_iter().map(|moment| Violation::Cycle { moment }));
    violations
}

#[derive(Debug, Clone)]
struct MomentNode {
    name: String,
    parent: Option<MomentId>,
}

#[derive(Debug, Clone)]
struct HistoryNode {
    name: String,
    /// Moments from the root down to the last moment before the tip.
    chain: Vec<MomentId>,
}

/// A finite frame with agents, choices, epistemic relations and values.
#[derive(Debug, Clone)]
pub struct BranchingFrame {
    agents: Vec<String>,
    moments: Vec<MomentNode>,
    histories: Vec<HistoryNode>,
    indices: Vec<Index>,
    index_lookup: HashMap<Index, IndexId>,
    through: Vec<HistorySet>,
    moment_indices: Vec<IndexSet>,
    /// `choices[agent][moment]`
    choices: Vec<Vec<Vec<HistorySet>>>,
    /// `classes[agent]` partitions all indices.
    classes: Vec<Vec<IndexSet>>,
    class_of: Vec<Vec<usize>>,
    values: Vec<Rational>,
}

impl BranchingFrame {
    /// Builds the tree skeleton. Every agent starts with vacuous choices, the
    /// identity epistemic relation, and value zero on every history.
    pub fn new(agents: Vec<String>, nodes: &[(String, Option<String>)]) -> Result<Self, FrameError> {
        if agents.is_empty() {
            return Err(FrameError::NoAgents);
        }
        let mut seen = BTreeSet::new();
        for a in &agents {
            if !is_valid_name(a) {
                return Err(FrameError::InvalidName {
                    section: "agents",
                    name: a.clone(),
                });
            }
            if !seen.insert(a.as_str()) {
                return Err(FrameError::DuplicateAgent(a.clone()));
            }
        }
        let mut names = BTreeSet::new();
        for (n, _) in nodes {
            if !is_valid_name(n) {
                return Err(FrameError::InvalidName {
                    section: "moments",
                    name: n.clone(),
                });
            }
            if !names.insert(n.as_str()) {
                return Err(FrameError::DuplicateMoment(n.clone()));
            }
        }
        for (n, p) in nodes {
            if let Some(p) = p {
                if !names.contains(p.as_str()) {
                    return Err(FrameError::UnknownParent {
                        moment: n.clone(),
                        parent: p.clone(),
                    });
                }
            }
        }
        let tree = check_tree(nodes);
        if !tree.is_empty() {
            return Err(FrameError::Tree(tree));
        }

        let parent_of: BTreeMap<&str, Option<&str>> = nodes
            .iter()
            .map(|(n, p)| (n.as_str(), p.as_deref()))
            .collect();
        let has_child: BTreeSet<&str> = nodes.iter().filter_map(|(_, p)| p.as_deref()).collect();
        let root = nodes.iter().find(|(_, p)| p.is_none()).unwrap().0.clone();
        if !has_child.contains(root.as_str()) {
            return Err(FrameError::NoHistories(root));
        }

        // BTreeMap iteration gives name order for both moments and tips.
        let moment_names: Vec<&str> = parent_of
            .keys()
            .copied()
            .filter(|n| has_child.contains(n))
            .collect();
        let moment_id: HashMap<&str, MomentId> = moment_names
            .iter()
            .enumerate()
            .map(|(i, n)| (*n, MomentId(i)))
            .collect();
        let moments: Vec<MomentNode> = moment_names
            .iter()
            .map(|n| MomentNode {
                name: n.to_string(),
                parent: parent_of[n].map(|p| moment_id[p]),
            })
            .collect();
        let histories: Vec<HistoryNode> = parent_of
            .keys()
            .copied()
            .filter(|n| !has_child.contains(n))
            .map(|tip| {
                let mut chain = Vec::new();
                let mut cur = parent_of[tip];
                while let Some(m) = cur {
                    chain.push(moment_id[m]);
                    cur = parent_of[m];
                }
                chain.reverse();
                HistoryNode {
                    name: tip.to_string(),
                    chain,
                }
            })
            .collect();

        let nh = histories.len();
        let mut through = vec![HistorySet::empty(nh); moments.len()];
        for (h, node) in histories.iter().enumerate() {
            for m in &node.chain {
                through[m.0].insert(HistoryId(h));
            }
        }
        let mut indices = Vec::new();
        for (m, hs) in through.iter().enumerate() {
            for h in hs.iter() {
                indices.push(Index {
                    moment: MomentId(m),
                    history: h,
                });
            }
        }
        let ni = indices.len();
        let index_lookup: HashMap<Index, IndexId> = indices
            .iter()
            .enumerate()
            .map(|(i, idx)| (*idx, IndexId(i)))
            .collect();
        let mut moment_indices = vec![IndexSet::empty(ni); moments.len()];
        for (i, idx) in indices.iter().enumerate() {
            moment_indices[idx.moment.0].insert(IndexId(i));
        }
        let choices = agents
            .iter()
            .map(|_| through.iter().map(|hs| vec![hs.clone()]).collect())
            .collect();
        let classes: Vec<Vec<IndexSet>> = agents
            .iter()
            .map(|_| (0..ni).map(|i| IndexSet::from_ids(ni, [IndexId(i)])).collect())
            .collect();
        let class_of = agents.iter().map(|_| (0..ni).collect()).collect();
        Ok(Self {
            agents,
            moments,
            histories,
            indices,
            index_lookup,
            through,
            moment_indices,
            choices,
            classes,
            class_of,
            values: vec![Rational::zero(); nh],
        })
    }

    // ----- sizes and names -----

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }
    pub fn moment_count(&self) -> usize {
        self.moments.len()
    }
    pub fn history_count(&self) -> usize {
        self.histories.len()
    }
    pub fn index_count(&self) -> usize {
        self.indices.len()
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> {
        (0..self.agents.len()).map(AgentId)
    }
    pub fn moment_ids(&self) -> impl Iterator<Item = MomentId> {
        (0..self.moments.len()).map(MomentId)
    }
    pub fn history_ids(&self) -> impl Iterator<Item = HistoryId> {
        (0..self.histories.len()).map(HistoryId)
    }
    pub fn index_ids(&self) -> impl Iterator<Item = IndexId> {
        (0..self.indices.len()).map(IndexId)
    }

    pub fn agent_name(&self, a: AgentId) -> &str {
        &self.agents[a.0]
    }
    pub fn moment_name(&self, m: MomentId) -> &str {
        &self.moments[m.0].name
    }
    pub fn history_name(&self, h: HistoryId) -> &str {
        &self.histories[h.0].name
    }
    pub fn agent_names(&self) -> &[String] {
        &self.agents
    }

    pub fn parent(&self, m: MomentId) -> Option<MomentId> {
        self.moments[m.0].parent
    }

    pub fn root(&self) -> MomentId {
        self.moment_ids()
            .find(|m| self.parent(*m).is_none())
            .expect("a frame has a root")
    }

    /// Moments of `h` from the root, excluding the history's tip.
    pub fn chain(&self, h: HistoryId) -> &[MomentId] {
        &self.histories[h.0].chain
    }

    pub fn agent_id(&self, name: &str) -> Result<AgentId, FrameError> {
        self.agents
            .iter()
            .position(|a| a == name)
            .map(AgentId)
            .ok_or_else(|| FrameError::UnknownAgent(name.to_string()))
    }

    pub fn moment_id(&self, name: &str) -> Result<MomentId, FrameError> {
        self.moments
            .binary_search_by(|m| m.name.as_str().cmp(name))
            .map(MomentId)
            .map_err(|_| FrameError::UnknownMoment(name.to_string()))
    }

    pub fn history_id(&self, name: &str) -> Result<HistoryId, FrameError> {
        self.histories
            .binary_search_by(|h| h.name.as_str().cmp(name))
            .map(HistoryId)
            .map_err(|_| FrameError::UnknownHistory(name.to_string()))
    }

    pub fn index(&self, i: IndexId) -> Index {
        self.indices[i.0]
    }

    pub fn index_id(&self, moment: MomentId, history: HistoryId) -> Option<IndexId> {
        self.index_lookup.get(&Index { moment, history }).copied()
    }

    /// Resolves `moment/history`.
    pub fn parse_index(&self, text: &str) -> Result<IndexId, FrameError> {
        let invalid = || FrameError::InvalidIndex(text.to_string());
        let (m, h) = text.split_once('/').ok_or_else(invalid)?;
        let m = self.moment_id(m.trim()).map_err(|_| invalid())?;
        let h = self.history_id(h.trim()).map_err(|_| invalid())?;
        self.index_id(m, h).ok_or_else(invalid)
    }

    pub fn index_label(&self, i: IndexId) -> String {
        let idx = self.indices[i.0];
        format!(
            "{}/{}",
            self.moment_name(idx.moment),
            self.history_name(idx.history)
        )
    }

    pub fn history_labels(&self, set: &HistorySet) -> Vec<String> {
        set.iter().map(|h| self.history_name(h).to_string()).collect()
    }

    pub fn index_labels(&self, set: &IndexSet) -> Vec<String> {
        set.iter().map(|i| self.index_label(i)).collect()
    }

    pub fn empty_histories(&self) -> HistorySet {
        HistorySet::empty(self.history_count())
    }

    pub fn empty_indices(&self) -> IndexSet {
        IndexSet::empty(self.index_count())
    }

    pub fn all_indices(&self) -> IndexSet {
        IndexSet::full(self.index_count())
    }

    /// All indices at moment `m`.
    pub fn indices_at(&self, m: MomentId) -> &IndexSet {
        &self.moment_indices[m.0]
    }

    /// Indices `⟨m,h⟩` for `h` in `hs` (histories not through `m` are skipped).
    pub fn lift(&self, m: MomentId, hs: &HistorySet) -> IndexSet {
        let mut out = self.empty_indices();
        for h in hs.iter() {
            if let Some(i) = self.index_id(m, h) {
                out.insert(i);
            }
        }
        out
    }

    /// Histories `h` with `⟨m,h⟩` in `set`.
    pub fn project(&self, m: MomentId, set: &IndexSet) -> HistorySet {
        let mut out = self.empty_histories();
        for i in set.intersection(self.indices_at(m)).iter() {
            out.insert(self.indices[i.0].history);
        }
        out
    }

    // ----- mutation (construction phase) -----

    /// Replaces `agent`'s partition at `moment`. Cells are stored as given;
    /// [`validate`](Self::validate) reports any partition failure.
    pub fn set_choice(
        &mut self,
        agent: AgentId,
        moment: MomentId,
        cells: Vec<HistorySet>,
    ) -> Result<(), FrameError> {
        if cells.iter().any(|c| c.capacity() != self.history_count()) {
            return Err(FrameError::CellCapacity {
                agent: self.agent_name(agent).to_string(),
                moment: self.moment_name(moment).to_string(),
                expected: self.history_count(),
            });
        }
        self.choices[agent.0][moment.0] = cells;
        Ok(())
    }

    /// Sets `agent`'s epistemic relation to the equivalence closure of `pairs`.
    pub fn set_epistemic(&mut self, agent: AgentId, pairs: &[(IndexId, IndexId)]) {
        let n = self.index_count();
        let mut uf = UnionFind::new(n);
        for (a, b) in pairs {
            uf.union(a.0, b.0);
        }
        let mut by_root: BTreeMap<usize, IndexSet> = BTreeMap::new();
        for i in 0..n {
            by_root
                .entry(uf.find(i))
                .or_insert_with(|| IndexSet::empty(n))
                .insert(IndexId(i));
        }
        let mut classes: Vec<IndexSet> = by_root.into_values().collect();
        classes.sort_by_key(|c| c.first());
        let mut class_of = vec![0; n];
        for (k, c) in classes.iter().enumerate() {
            for i in c.iter() {
                class_of[i.0] = k;
            }
        }
        self.classes[agent.0] = classes;
        self.class_of[agent.0] = class_of;
    }

    pub fn set_value(&mut self, h: HistoryId, value: Rational) {
        self.values[h.0] = value;
    }

    // ----- queries -----

    /// `H_m`: the histories passing through `m`.
    pub fn histories_through(&self, m: MomentId) -> &HistorySet {
        &self.through[m.0]
    }

    pub fn choice_cells(&self, agent: AgentId, m: MomentId) -> &[HistorySet] {
        &self.choices[agent.0][m.0]
    }

    /// Position of the cell of `agent` at `m` containing `h`.
    pub fn cell_position(&self, agent: AgentId, m: MomentId, h: HistoryId) -> Result<usize, FrameError> {
        if !self.through[m.0].contains(h) {
            return Err(FrameError::NotThrough {
                moment: self.moment_name(m).to_string(),
                history: self.history_name(h).to_string(),
            });
        }
        self.choices[agent.0][m.0]
            .iter()
            .position(|c| c.contains(h))
            .ok_or_else(|| FrameError::NoCell {
                agent: self.agent_name(agent).to_string(),
                moment: self.moment_name(m).to_string(),
                history: self.history_name(h).to_string(),
            })
    }

    /// `Choice^m_α(h)`.
    pub fn choice_cell(&self, agent: AgentId, m: MomentId, h: HistoryId) -> Result<&HistorySet, FrameError> {
        let k = self.cell_position(agent, m, h)?;
        Ok(&self.choices[agent.0][m.0][k])
    }

    /// `π_α[i]`.
    pub fn information_set(&self, agent: AgentId, i: IndexId) -> &IndexSet {
        &self.classes[agent.0][self.class_of[agent.0][i.0]]
    }

    pub fn epistemic_classes(&self, agent: AgentId) -> &[IndexSet] {
        &self.classes[agent.0]
    }

    pub fn class_id(&self, agent: AgentId, i: IndexId) -> usize {
        self.class_of[agent.0][i.0]
    }

    pub fn indistinguishable(&self, agent: AgentId, i: IndexId, j: IndexId) -> bool {
        self.class_of[agent.0][i.0] == self.class_of[agent.0][j.0]
    }

    /// `[L]^m_α` for `cell ⊆ H_from`: histories at `at` indistinguishable
    /// from some `⟨from, h⟩` with `h ∈ cell`.
    pub fn epistemic_cluster(
        &self,
        agent: AgentId,
        cell: &HistorySet,
        from: MomentId,
        at: MomentId,
    ) -> HistorySet {
        let mut reach = self.empty_indices();
        for h in cell.iter() {
            if let Some(i) = self.index_id(from, h) {
                reach.union_with(self.information_set(agent, i));
            }
        }
        self.project(at, &reach)
    }

    /// `m ~_α m'`.
    pub fn moment_related(&self, agent: AgentId, m: MomentId, other: MomentId) -> bool {
        let targets = self.indices_at(other);
        self.indices_at(m)
            .iter()
            .any(|i| !self.information_set(agent, i).is_disjoint(targets))
    }

    /// Moments related to `m` for `agent`, in id order.
    pub fn related_moments(&self, agent: AgentId, m: MomentId) -> Vec<MomentId> {
        self.moment_ids()
            .filter(|o| self.moment_related(agent, m, *o))
            .collect()
    }

    /// `State^m_β`: distinct intersections of one cell per agent other than
    /// `β`. With no other agent this is `{H_m}`.
    pub fn states_for(&self, agent: AgentId, m: MomentId) -> Vec<HistorySet> {
        let others: Vec<AgentId> = self.agent_ids().filter(|a| *a != agent).collect();
        if others.is_empty() {
            return vec![self.through[m.0].clone()];
        }
        let mut out: Vec<HistorySet> = Vec::new();
        for selection in others
            .iter()
            .map(|a| self.choices[a.0][m.0].iter())
            .multi_cartesian_product()
        {
            let mut s = self.through[m.0].clone();
            for cell in selection {
                s.intersect_with(cell);
            }
            if !out.contains(&s) {
                out.push(s);
            }
        }
        out
    }

    pub fn value(&self, h: HistoryId) -> &Rational {
        &self.values[h.0]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// The next moment on `h` after `m`, or `None` if `h`'s tip follows.
    fn successor_on(&self, h: HistoryId, m: MomentId) -> Option<MomentId> {
        let chain = self.chain(h);
        let pos = chain.iter().position(|x| *x == m)?;
        chain.get(pos + 1).copied()
    }

    // ----- validation -----

    /// Runs every frame constraint and collects all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut results = vec![ConstraintResult {
            constraint: Constraint::Tree,
            status: CheckStatus::Pass,
        }];
        let checks: [(Constraint, Vec<Violation>); 5] = [
            (Constraint::Partition, self.check_partitions()),
            (Constraint::NoChoiceBetweenUndivided, self.check_nc()),
            (Constraint::IndependenceOfAgency, self.check_ia()),
            (Constraint::OwnAction, self.check_oac()),
            (Constraint::UniformHistoricalPossibility, self.check_unif_h()),
        ];
        for (constraint, violations) in checks {
            results.push(ConstraintResult {
                constraint,
                status: if violations.is_empty() {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail(violations)
                },
            });
        }
        ValidationReport { results }
    }

    fn check_partitions(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for a in self.agent_ids() {
            for m in self.moment_ids() {
                let agent = self.agent_name(a).to_string();
                let moment = self.moment_name(m).to_string();
                let hm = &self.through[m.0];
                let mut covered = self.empty_histories();
                let mut overlapping = self.empty_histories();
                for cell in &self.choices[a.0][m.0] {
                    if cell.is_empty() {
                        out.push(Violation::EmptyCell {
                            agent: agent.clone(),
                            moment: moment.clone(),
                        });
                    }
                    for h in cell.difference(hm).iter() {
                        out.push(Violation::ForeignHistory {
                            agent: agent.clone(),
                            moment: moment.clone(),
                            history: self.history_name(h).to_string(),
                        });
                    }
                    overlapping.union_with(&covered.intersection(cell));
                    covered.union_with(cell);
                }
                for h in overlapping.iter() {
                    out.push(Violation::OverlappingCells {
                        agent: agent.clone(),
                        moment: moment.clone(),
                        history: self.history_name(h).to_string(),
                    });
                }
                for h in hm.difference(&covered).iter() {
                    out.push(Violation::UncoveredHistory {
                        agent: agent.clone(),
                        moment: moment.clone(),
                        history: self.history_name(h).to_string(),
                    });
                }
            }
        }
        out
    }

    fn check_nc(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for m in self.moment_ids() {
            let hs: Vec<HistoryId> = self.through[m.0].iter().collect();
            for (x, &h) in hs.iter().enumerate() {
                for &h2 in &hs[x + 1..] {
                    let shared = match (self.successor_on(h, m), self.successor_on(h2, m)) {
                        (Some(a), Some(b)) if a == b => a,
                        _ => continue,
                    };
                    for a in self.agent_ids() {
                        let same = self.choices[a.0][m.0]
                            .iter()
                            .all(|c| c.contains(h) == c.contains(h2));
                        if !same {
                            out.push(Violation::UndividedSplit {
                                agent: self.agent_name(a).to_string(),
                                moment: self.moment_name(m).to_string(),
                                first: self.history_name(h).to_string(),
                                second: self.history_name(h2).to_string(),
                                shared: self.moment_name(shared).to_string(),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    fn check_ia(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for m in self.moment_ids() {
            for selection in self
                .agent_ids()
                .map(|a| self.choices[a.0][m.0].iter().map(move |c| (a, c)))
                .multi_cartesian_product()
            {
                let mut joint = self.through[m.0].clone();
                for (_, cell) in &selection {
                    joint.intersect_with(cell);
                }
                if joint.is_empty() {
                    out.push(Violation::EmptyJointAction {
                        moment: self.moment_name(m).to_string(),
                        selection: selection
                            .iter()
                            .map(|(a, c)| (self.agent_name(*a).to_string(), self.history_labels(c)))
                            .collect(),
                    });
                }
            }
        }
        out
    }

    fn check_oac(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for a in self.agent_ids() {
            for class in &self.classes[a.0] {
                let to = class.first().expect("classes are nonempty");
                let mut reported = self.empty_indices();
                for i in class.iter() {
                    let Index { moment, history } = self.indices[i.0];
                    let Ok(cell) = self.choice_cell(a, moment, history) else {
                        continue;
                    };
                    for h in cell.iter() {
                        let Some(j) = self.index_id(moment, h) else {
                            continue;
                        };
                        if !class.contains(j) && !reported.contains(j) {
                            reported.insert(j);
                            out.push(Violation::OwnAction {
                                agent: self.agent_name(a).to_string(),
                                from: self.index_label(i),
                                to: self.index_label(to),
                                missing: self.index_label(j),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    fn check_unif_h(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for a in self.agent_ids() {
            for class in &self.classes[a.0] {
                let touched: Vec<MomentId> = self
                    .moment_ids()
                    .filter(|m| !class.is_disjoint(self.indices_at(*m)))
                    .collect();
                for &from_m in &touched {
                    for &to_m in &touched {
                        if from_m == to_m {
                            continue;
                        }
                        let from = class.intersection(self.indices_at(from_m)).first().unwrap();
                        let to = class.intersection(self.indices_at(to_m)).first().unwrap();
                        for j in self.indices_at(from_m).iter() {
                            if self.information_set(a, j).is_disjoint(self.indices_at(to_m)) {
                                out.push(Violation::UniformHistory {
                                    agent: self.agent_name(a).to_string(),
                                    from: self.index_label(from),
                                    to: self.index_label(to),
                                    unmatched: self.index_label(j),
                                    target: self.moment_name(to_m).to_string(),
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
