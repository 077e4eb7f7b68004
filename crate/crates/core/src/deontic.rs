//! Objective dominance, subjective (cluster-based) dominance and expected
//! deontic utility, and the optimal action sets they induce.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::frame::{AgentId, BranchingFrame, MomentId};
use crate::prob::{ConditionalProbability, LexMeasure};
use crate::rational::{format_rational, Exact, Rational};
use crate::sets::{HistorySet, IndexSet};

/// A choice cell: `agent`'s `cell`-th action at `moment`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub agent: AgentId,
    pub moment: MomentId,
    pub cell: usize,
}

impl Action {
    pub fn histories<'f>(&self, frame: &'f BranchingFrame) -> &'f HistorySet {
        &frame.choice_cells(self.agent, self.moment)[self.cell]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeonticError {
    #[error("actions belong to different agents or moments")]
    Mismatched,
    #[error("agent `{agent}` has no cell #{cell} at `{moment}`")]
    NotACell {
        agent: String,
        moment: String,
        cell: usize,
    },
}

fn check(frame: &BranchingFrame, a: Action) -> Result<(), DeonticError> {
    if a.cell < frame.choice_cells(a.agent, a.moment).len() {
        Ok(())
    } else {
        Err(DeonticError::NotACell {
            agent: frame.agent_name(a.agent).to_string(),
            moment: frame.moment_name(a.moment).to_string(),
            cell: a.cell,
        })
    }
}

fn check_pair(frame: &BranchingFrame, l: Action, other: Action) -> Result<(), DeonticError> {
    check(frame, l)?;
    check(frame, other)?;
    if l.agent != other.agent || l.moment != other.moment {
        return Err(DeonticError::Mismatched);
    }
    Ok(())
}

/// `X ≤ Y`: every history in `x` is worth at most every history in `y`.
/// Vacuously true when either side is empty.
pub fn set_leq(x: &HistorySet, y: &HistorySet, values: &[Rational]) -> bool {
    let max_x = x.iter().map(|h| &values[h.0]).max();
    let min_y = y.iter().map(|h| &values[h.0]).min();
    match (max_x, min_y) {
        (Some(a), Some(b)) => a <= b,
        _ => true,
    }
}

fn dominates_on(
    frame: &BranchingFrame,
    states: &[HistorySet],
    l: &HistorySet,
    other: &HistorySet,
) -> bool {
    states
        .iter()
        .all(|s| set_leq(&l.intersection(s), &other.intersection(s), frame.values()))
}

/// `L ⪯ L'`.
pub fn obj_dominates(frame: &BranchingFrame, l: Action, other: Action) -> Result<bool, DeonticError> {
    check_pair(frame, l, other)?;
    let states = frame.states_for(l.agent, l.moment);
    Ok(dominates_on(frame, &states, l.histories(frame), other.histories(frame)))
}

/// Cells not strictly dominated under the preorder `leq[i][j]`.
fn undominated(leq: &[Vec<bool>]) -> Vec<usize> {
    (0..leq.len())
        .filter(|&i| !(0..leq.len()).any(|j| leq[i][j] && !leq[j][i]))
        .collect()
}

fn objective_matrix(frame: &BranchingFrame, agent: AgentId, m: MomentId) -> Vec<Vec<bool>> {
    let states = frame.states_for(agent, m);
    let cells = frame.choice_cells(agent, m);
    cells
        .iter()
        .map(|l| {
            cells
                .iter()
                .map(|o| dominates_on(frame, &states, l, o))
                .collect()
        })
        .collect()
}

/// `Optimal^m_α`, as cell positions.
pub fn optimal_set(frame: &BranchingFrame, agent: AgentId, m: MomentId) -> Vec<usize> {
    undominated(&objective_matrix(frame, agent, m))
}

/// Per related moment: its states and each cell's epistemic cluster there.
struct ClusterTable {
    rows: Vec<(Vec<HistorySet>, Vec<HistorySet>)>,
}

impl ClusterTable {
    fn new(frame: &BranchingFrame, agent: AgentId, m: MomentId) -> Self {
        let cells = frame.choice_cells(agent, m);
        let rows = frame
            .related_moments(agent, m)
            .into_iter()
            .map(|at| {
                let clusters = cells
                    .iter()
                    .map(|c| frame.epistemic_cluster(agent, c, m, at))
                    .collect();
                (frame.states_for(agent, at), clusters)
            })
            .collect();
        Self { rows }
    }

    fn leq(&self, frame: &BranchingFrame, l: usize, other: usize) -> bool {
        self.rows
            .iter()
            .all(|(states, clusters)| dominates_on(frame, states, &clusters[l], &clusters[other]))
    }
}

/// `L ⪯_s L'`.
pub fn subj_dominates(frame: &BranchingFrame, l: Action, other: Action) -> Result<bool, DeonticError> {
    check_pair(frame, l, other)?;
    let table = ClusterTable::new(frame, l.agent, l.moment);
    Ok(table.leq(frame, l.cell, other.cell))
}

fn subjective_matrix(frame: &BranchingFrame, agent: AgentId, m: MomentId) -> Vec<Vec<bool>> {
    let table = ClusterTable::new(frame, agent, m);
    let n = frame.choice_cells(agent, m).len();
    (0..n)
        .map(|i| (0..n).map(|j| table.leq(frame, i, j)).collect())
        .collect()
}

/// `S-optimal^m_α`, as cell positions.
pub fn s_optimal_set(frame: &BranchingFrame, agent: AgentId, m: MomentId) -> Vec<usize> {
    undominated(&subjective_matrix(frame, agent, m))
}

/// One summand of an expected-utility sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EuTerm {
    pub moment: MomentId,
    pub history: crate::frame::HistoryId,
    pub weight: Rational,
    pub value: Rational,
}

/// The summands of `EU^m_α(L)`: for every moment related to `m` and every
/// history in `L`'s cluster there, `mu({⟨m',h'⟩} | π_α[⟨m',h'⟩]) · Value(h')`.
pub fn expected_utility_terms(
    frame: &BranchingFrame,
    measure: &LexMeasure,
    l: Action,
) -> Result<Vec<EuTerm>, DeonticError> {
    check(frame, l)?;
    let cell = l.histories(frame);
    let mut terms = Vec::new();
    for at in frame.related_moments(l.agent, l.moment) {
        for h in frame.epistemic_cluster(l.agent, cell, l.moment, at).iter() {
            let i = frame.index_id(at, h).expect("cluster histories pass through their moment");
            let single = IndexSet::from_ids(frame.index_count(), [i]);
            let weight = measure.mu(&single, frame.information_set(l.agent, i));
            terms.push(EuTerm {
                moment: at,
                history: h,
                weight,
                value: frame.value(h).clone(),
            });
        }
    }
    Ok(terms)
}

/// `EU^m_α(L)`; the same for every history through `m`.
pub fn expected_utility(frame: &BranchingFrame, measure: &LexMeasure, l: Action) -> Result<Rational, DeonticError> {
    Ok(expected_utility_terms(frame, measure, l)?
        .into_iter()
        .map(|t| t.weight * t.value)
        .fold(Rational::zero(), |acc, x| acc + x))
}

fn argmax(values: &[Rational]) -> Vec<usize> {
    let Some(best) = values.iter().max() else {
        return Vec::new();
    };
    (0..values.len()).filter(|&k| &values[k] == best).collect()
}

/// `EU^m_α`: the cells maximizing expected deontic utility.
pub fn eu_max_set(frame: &BranchingFrame, measure: &LexMeasure, agent: AgentId, m: MomentId) -> Vec<usize> {
    argmax(&eu_table(frame, measure, agent, m))
}

fn eu_table(frame: &BranchingFrame, measure: &LexMeasure, agent: AgentId, m: MomentId) -> Vec<Rational> {
    (0..frame.choice_cells(agent, m).len())
        .map(|cell| {
            expected_utility(frame, measure, Action { agent, moment: m, cell })
                .expect("cell positions come from the frame")
        })
        .collect()
}

/// All three optimality notions for one agent at one moment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeonticReport {
    pub agent: AgentId,
    pub moment: MomentId,
    pub cells: Vec<HistorySet>,
    pub optimal: Vec<usize>,
    pub s_optimal: Vec<usize>,
    pub eu: Vec<Rational>,
    pub eu_max: Vec<usize>,
}

impl DeonticReport {
    pub fn compute(frame: &BranchingFrame, measure: &LexMeasure, agent: AgentId, moment: MomentId) -> Self {
        let eu = eu_table(frame, measure, agent, moment);
        Self {
            agent,
            moment,
            cells: frame.choice_cells(agent, moment).to_vec(),
            optimal: optimal_set(frame, agent, moment),
            s_optimal: s_optimal_set(frame, agent, moment),
            eu_max: argmax(&eu),
            eu,
        }
    }

    pub fn cell_sets(&self, which: &[usize]) -> Vec<HistorySet> {
        which.iter().map(|k| self.cells[*k].clone()).collect()
    }

    pub fn summary(&self, frame: &BranchingFrame) -> DeonticSummary {
        let names = |ks: &[usize]| -> Vec<Vec<String>> {
            ks.iter().map(|k| frame.history_labels(&self.cells[*k])).collect()
        };
        DeonticSummary {
            agent: frame.agent_name(self.agent).to_string(),
            moment: frame.moment_name(self.moment).to_string(),
            cells: names(&(0..self.cells.len()).collect::<Vec<_>>()),
            optimal: names(&self.optimal),
            s_optimal: names(&self.s_optimal),
            eu: self
                .cells
                .iter()
                .zip(&self.eu)
                .map(|(c, v)| EuEntry {
                    cell: frame.history_labels(c),
                    eu: format_rational(v),
                })
                .collect(),
            eu_max: names(&self.eu_max),
        }
    }
}

/// Name-based, serializable form of a [`DeonticReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeonticSummary {
    pub agent: String,
    pub moment: String,
    pub cells: Vec<Vec<String>>,
    pub optimal: Vec<Vec<String>>,
    pub s_optimal: Vec<Vec<String>>,
    pub eu: Vec<EuEntry>,
    pub eu_max: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EuEntry {
    pub cell: Vec<String>,
    pub eu: String,
}

fn show_cells(cells: &[Vec<String>]) -> String {
    let inner: Vec<String> = cells.iter().map(|c| format!("{{{}}}", c.join(","))).collect();
    format!("{{{}}}", inner.join(", "))
}

impl fmt::Display for DeonticSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "agent {} at {}", self.agent, self.moment)?;
        writeln!(f, "  choices   = {}", show_cells(&self.cells))?;
        writeln!(f, "  optimal   = {}", show_cells(&self.optimal))?;
        writeln!(f, "  s-optimal = {}", show_cells(&self.s_optimal))?;
        let eu: Vec<String> = self
            .eu
            .iter()
            .map(|e| format!("{{{}}}: {}", e.cell.join(","), e.eu))
            .collect();
        writeln!(f, "  eu        = {{{}}}", eu.join(", "))?;
        writeln!(f, "  eu-max    = {}", show_cells(&self.eu_max))
    }
}

impl fmt::Display for EuTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * {}", Exact(&self.weight), Exact(&self.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::tests::verdict_frame;
    use crate::frame::IndexId;
    use crate::prob::ClassicalDistribution;
    use crate::rational::{from_int, ratio};

    fn doctor_measure(f: &BranchingFrame) -> LexMeasure {
        let doctor = f.agent_id("doctor").unwrap();
        let mass = f
            .index_ids()
            .map(|i| {
                let h = f.history_name(f.index(i).history);
                if h == "h1" || h == "h2" {
                    ratio(9, 40)
                } else {
                    ratio(1, 40)
                }
            })
            .collect();
        LexMeasure::from_classical(doctor, ClassicalDistribution::new(mass).unwrap())
    }

    fn labels(f: &BranchingFrame, r: &DeonticReport, ks: &[usize]) -> Vec<Vec<String>> {
        r.cell_sets(ks).iter().map(|c| f.history_labels(c)).collect()
    }

    /// Straight from the definition: sum over every index reachable from
    /// `L` at `m`, weighted by its share of its own information set.
    fn brute_eu(f: &BranchingFrame, p: &ClassicalDistribution, a: Action) -> Rational {
        let cell = a.histories(f);
        let mut reached = Vec::new();
        for j in f.index_ids() {
            let hit = cell.iter().any(|h| {
                let i = f.index_id(a.moment, h).unwrap();
                f.indistinguishable(a.agent, i, j)
            });
            if hit {
                reached.push(j);
            }
        }
        let mut total = Rational::zero();
        for j in reached {
            let info: Vec<IndexId> = f
                .index_ids()
                .filter(|k| f.indistinguishable(a.agent, j, *k))
                .collect();
            let denom: Rational = info.iter().map(|k| p.mass_of(*k).clone()).sum();
            let w = if denom.is_zero() {
                Rational::from_integer(1.into())
            } else {
                p.mass_of(j).clone() / denom
            };
            total += w * f.value(f.index(j).history).clone();
        }
        total
    }

    #[test]
    fn verdict_doctor_at_m2_and_m3() {
        let f = verdict_frame();
        let mu = doctor_measure(&f);
        let doctor = f.agent_id("doctor").unwrap();
        let m2 = f.moment_id("m2").unwrap();
        let m3 = f.moment_id("m3").unwrap();

        let r2 = DeonticReport::compute(&f, &mu, doctor, m2);
        assert_eq!(labels(&f, &r2, &r2.optimal), [["h1"]]);
        assert_eq!(labels(&f, &r2, &r2.s_optimal), [["h1"], ["h2"]]);
        assert_eq!(r2.eu, [ratio(4, 5), Rational::zero()]);
        assert_eq!(labels(&f, &r2, &r2.eu_max), [["h1"]]);

        let r3 = DeonticReport::compute(&f, &mu, doctor, m3);
        assert_eq!(labels(&f, &r3, &r3.optimal), [["h4"]]);
        assert_eq!(labels(&f, &r3, &r3.s_optimal), [["h3"], ["h4"]]);
        assert_eq!(r3.eu, [ratio(4, 5), Rational::zero()]);
        assert_eq!(labels(&f, &r3, &r3.eu_max), [["h3"]]);
    }

    #[test]
    fn eu_matches_brute_force() {
        let f = verdict_frame();
        let mu = doctor_measure(&f);
        let p = mu.layers()[0].clone();
        for agent in f.agent_ids() {
            for m in f.moment_ids() {
                for cell in 0..f.choice_cells(agent, m).len() {
                    let a = Action { agent, moment: m, cell };
                    let mu = LexMeasure::from_classical(agent, p.clone());
                    assert_eq!(expected_utility(&f, &mu, a).unwrap(), brute_eu(&f, &p, a));
                }
            }
        }
    }

    #[test]
    fn pairwise_dominance() {
        let f = verdict_frame();
        let doctor = f.agent_id("doctor").unwrap();
        let m2 = f.moment_id("m2").unwrap();
        let l1 = Action { agent: doctor, moment: m2, cell: 0 };
        let l2 = Action { agent: doctor, moment: m2, cell: 1 };
        assert!(obj_dominates(&f, l2, l1).unwrap());
        assert!(!obj_dominates(&f, l1, l2).unwrap());
        // h3 (value -1) sits in L1's cluster, h4 (0) in L2's
        assert!(!subj_dominates(&f, l2, l1).unwrap());
        assert!(!subj_dominates(&f, l1, l2).unwrap());
        let elsewhere = Action { moment: f.moment_id("m3").unwrap(), ..l1 };
        assert_eq!(obj_dominates(&f, l1, elsewhere), Err(DeonticError::Mismatched));
        let bogus = Action { cell: 5, ..l1 };
        assert!(matches!(subj_dominates(&f, l1, bogus), Err(DeonticError::NotACell { .. })));
    }

    #[test]
    fn set_order_is_vacuous_on_empty_sides() {
        let values = vec![from_int(3), from_int(1)];
        let empty = HistorySet::empty(2);
        let both = HistorySet::full(2);
        assert!(set_leq(&empty, &both, &values));
        assert!(set_leq(&both, &empty, &values));
        assert!(!set_leq(&both, &both, &values));
    }

    #[test]
    fn eu_terms_render_exactly() {
        let f = verdict_frame();
        let mu = doctor_measure(&f);
        let doctor = f.agent_id("doctor").unwrap();
        let a = Action { agent: doctor, moment: f.moment_id("m2").unwrap(), cell: 0 };
        let shown: Vec<String> = expected_utility_terms(&f, &mu, a)
            .unwrap()
            .iter()
            .map(|t| t.to_string())
            .collect();
        assert_eq!(shown, ["9/10 * 1", "1/10 * -1"]);
    }

    #[test]
    fn summary_text() {
        let f = verdict_frame();
        let mu = doctor_measure(&f);
        let doctor = f.agent_id("doctor").unwrap();
        let r = DeonticReport::compute(&f, &mu, doctor, f.moment_id("m2").unwrap());
        let text = r.summary(&f).to_string();
        assert!(text.contains("optimal   = {{h1}}"), "{text}");
        assert!(text.contains("eu        = {{h1}: 4/5, {h2}: 0}"), "{text}");
    }
}
