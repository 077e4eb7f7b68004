//! Two-place conditional probability over the index set, realized as
//! lexicographic stacks of classical distributions, and a checker for the
//! Popper–Rényi axioms.
//!
//! `mu(A | B)` conditions on the first layer that gives `B` positive mass; if
//! no layer does, `mu(· | B)` is the constant function 1.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frame::{AgentId, BranchingFrame, IndexId};
use crate::rational::{Exact, Rational};
use crate::sets::IndexSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProbabilityError {
    #[error("probability mass on index {index} is negative")]
    Negative { index: usize },
    #[error("masses sum to {sum}, not 1")]
    NotNormalized { sum: String },
    #[error("a measure needs at least one layer")]
    NoLayers,
    #[error("layer {layer} is over {found} indices, expected {expected}")]
    Domain {
        layer: usize,
        expected: usize,
        found: usize,
    },
}

/// A probability distribution over all indices; masses sum to exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalDistribution {
    mass: Vec<Rational>,
    // the masses as integers over one common denominator, so set measures
    // are plain integer sums
    numer: Vec<BigInt>,
    denom: BigInt,
}

impl ClassicalDistribution {
    pub fn new(mass: Vec<Rational>) -> Result<Self, ProbabilityError> {
        if let Some(index) = mass.iter().position(|m| *m < Rational::zero()) {
            return Err(ProbabilityError::Negative { index });
        }
        let sum: Rational = mass.iter().sum();
        if !sum.is_one() {
            return Err(ProbabilityError::NotNormalized {
                sum: Exact(&sum).to_string(),
            });
        }
        Ok(Self::scaled(mass))
    }

    fn scaled(mass: Vec<Rational>) -> Self {
        let denom = mass.iter().fold(BigInt::one(), |d, m| d.lcm(m.denom()));
        let numer = mass.iter().map(|m| m.numer() * (&denom / m.denom())).collect();
        Self { mass, numer, denom }
    }

    pub fn uniform(n: usize) -> Self {
        let each = Rational::new(1.into(), (n as i64).into());
        Self::scaled(vec![each; n])
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass_of(&self, i: IndexId) -> &Rational {
        &self.mass[i.0]
    }

    pub fn masses(&self) -> &[Rational] {
        &self.mass
    }

    pub fn measure(&self, set: &IndexSet) -> Rational {
        Rational::new(self.weight(set), self.denom.clone())
    }

    fn weight(&self, set: &IndexSet) -> BigInt {
        set.iter().map(|i| &self.numer[i.0]).sum()
    }
}

/// A two-place function `mu(A | B)` on sets of indices.
pub trait ConditionalProbability {
    /// Number of indices the sets range over.
    fn domain(&self) -> usize;
    fn mu(&self, a: &IndexSet, b: &IndexSet) -> Rational;
}

/// An agent's conditional-probability measure as an ordered stack of
/// classical distributions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexMeasure {
    agent: AgentId,
    layers: Vec<ClassicalDistribution>,
}

impl LexMeasure {
    pub fn new(agent: AgentId, layers: Vec<ClassicalDistribution>) -> Result<Self, ProbabilityError> {
        let Some(first) = layers.first() else {
            return Err(ProbabilityError::NoLayers);
        };
        let expected = first.len();
        for (layer, l) in layers.iter().enumerate() {
            if l.len() != expected {
                return Err(ProbabilityError::Domain {
                    layer,
                    expected,
                    found: l.len(),
                });
            }
        }
        Ok(Self { agent, layers })
    }

    /// The one-layer measure: ratio conditioning when `p(B) > 0`, constant 1
    /// otherwise.
    pub fn from_classical(agent: AgentId, p: ClassicalDistribution) -> Self {
        Self {
            agent,
            layers: vec![p],
        }
    }

    pub fn agent(&self) -> AgentId {
        self.agent
    }

    pub fn layers(&self) -> &[ClassicalDistribution] {
        &self.layers
    }

    /// The first layer giving `b` positive mass, if any.
    pub fn active_layer(&self, b: &IndexSet) -> Option<usize> {
        self.layers
            .iter()
            .position(|l| l.weight(b).is_positive())
    }
}

impl ConditionalProbability for LexMeasure {
    fn domain(&self) -> usize {
        self.layers[0].len()
    }

    fn mu(&self, a: &IndexSet, b: &IndexSet) -> Rational {
        for layer in &self.layers {
            let mass_b = layer.weight(b);
            if mass_b.is_positive() {
                return Rational::new(layer.weight(&a.intersection(b)), mass_b);
            }
        }
        Rational::one()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    /// Exhaustive up to [`EXHAUSTIVE_LIMIT`] indices, sampled beyond.
    Auto { seed: u64, samples: usize },
    Exhaustive,
    Sampled { seed: u64, samples: usize },
}

impl Default for CheckMode {
    fn default() -> Self {
        CheckMode::Auto {
            seed: 0,
            samples: 2000,
        }
    }
}

pub const EXHAUSTIVE_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    /// `mu(· | C)` is constant 1 or a classical distribution.
    Shape,
    /// `mu(A | A) = 1`.
    Normalization,
    /// Finite additivity for disjoint `A, B` given nonempty, non-constant `C`.
    Additivity,
    /// `mu(A ∩ B | C) = mu(A | B ∩ C) · mu(B | C)`.
    Multiplication,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Shape => "shape",
            Axiom::Normalization => "(1) mu(A|A)=1",
            Axiom::Additivity => "(2) additivity",
            Axiom::Multiplication => "(3) multiplication",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub a: IndexSet,
    pub b: IndexSet,
    pub c: IndexSet,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl AxiomViolation {
    pub fn describe(&self, frame: &BranchingFrame) -> String {
        let show = |s: &IndexSet| format!("{{{}}}", frame.index_labels(s).join(","));
        format!(
            "{}: A={} B={} C={}: {} != {}",
            self.axiom,
            show(&self.a),
            show(&self.b),
            show(&self.c),
            Exact(&self.lhs),
            Exact(&self.rhs)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityReport {
    pub exhaustive: bool,
    pub checks: u64,
    pub violation_count: u64,
    /// The first violations found, capped at [`MAX_WITNESSES`].
    pub violations: Vec<AxiomViolation>,
}

pub const MAX_WITNESSES: usize = 16;

impl ProbabilityReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// All submasks of `mask`, including `mask` and 0.
fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

/// Packs the bits of `y` selected by `mask` into the low bits.
fn compress(y: u64, mask: u64) -> usize {
    let (mut out, mut k, mut m) = (0usize, 0, mask);
    while m != 0 {
        let bit = m & m.wrapping_neg();
        if y & bit != 0 {
            out |= 1 << k;
        }
        k += 1;
        m &= m - 1;
    }
    out
}

struct Checker<'a> {
    mu: &'a dyn ConditionalProbability,
    n: usize,
    report: ProbabilityReport,
}

impl Checker<'_> {
    fn set(&self, mask: u64) -> IndexSet {
        IndexSet::from_mask(self.n, mask)
    }

    fn record(&mut self, axiom: Axiom, sets: [&IndexSet; 3], lhs: Rational, rhs: Rational) {
        self.report.checks += 1;
        if lhs == rhs {
            return;
        }
        self.report.violation_count += 1;
        if self.report.violations.len() < MAX_WITNESSES {
            self.report.violations.push(AxiomViolation {
                axiom,
                a: sets[0].clone(),
                b: sets[1].clone(),
                c: sets[2].clone(),
                lhs,
                rhs,
            });
        }
    }

    /// Shape of `mu(· | C)` judged from the empty set, the whole space and
    /// the range of values.
    fn shape(&mut self, c: &IndexSet, probes: &[IndexSet]) {
        let empty = IndexSet::empty(self.n);
        let full = IndexSet::full(self.n);
        let at_empty = self.mu.mu(&empty, c);
        if at_empty.is_one() {
            for a in probes {
                let v = self.mu.mu(a, c);
                self.record(Axiom::Shape, [a, &empty, c], v, Rational::one());
            }
        } else {
            self.record(Axiom::Shape, [&empty, &empty, c], at_empty, Rational::zero());
            let at_full = self.mu.mu(&full, c);
            self.record(Axiom::Shape, [&full, &empty, c], at_full, Rational::one());
            for a in probes {
                let v = self.mu.mu(a, c);
                let clamped = v.clone().max(Rational::zero()).min(Rational::one());
                self.record(Axiom::Shape, [a, &empty, c], v, clamped);
            }
        }
    }

    fn additivity(&mut self, a: &IndexSet, b: &IndexSet, c: &IndexSet) {
        let empty = IndexSet::empty(self.n);
        if c.is_empty() || !a.is_disjoint(b) || self.mu.mu(&empty, c).is_one() {
            return;
        }
        let lhs = self.mu.mu(&a.union(b), c);
        let rhs = self.mu.mu(a, c) + self.mu.mu(b, c);
        self.record(Axiom::Additivity, [a, b, c], lhs, rhs);
    }

    fn multiplication(&mut self, a: &IndexSet, b: &IndexSet, c: &IndexSet) {
        let lhs = self.mu.mu(&a.intersection(b), c);
        let rhs = self.mu.mu(a, &b.intersection(c)) * self.mu.mu(b, c);
        self.record(Axiom::Multiplication, [a, b, c], lhs, rhs);
    }

    fn exhaustive(&mut self) {
        let n = self.n;
        let all: u64 = (1u64 << n) - 1;
        // rows[C][compress(Y, C)] = mu(Y | C) for Y ⊆ C
        let rows: Vec<Vec<Rational>> = (0..=all)
            .map(|cm| {
                let c = self.set(cm);
                let mut row = vec![Rational::zero(); 1 << cm.count_ones()];
                for ym in submasks(cm) {
                    row[compress(ym, cm)] = self.mu.mu(&self.set(ym), &c);
                }
                row
            })
            .collect();
        let at = |y: u64, c: u64| &rows[c as usize][compress(y, c)];

        for cm in 0..=all {
            let c = self.set(cm);
            let v = at(cm, cm).clone();
            self.record(Axiom::Normalization, [&c, &c, &c], v, Rational::one());
            // mu(A | C) = mu(A ∩ C | C) is the multiplication axiom with
            // B = C; it reduces every query to a subset of the condition.
            for am in 0..=all {
                let a = self.set(am);
                let lhs = self.mu.mu(&a, &c);
                let rhs = at(am & cm, cm).clone();
                self.record(Axiom::Multiplication, [&a, &c, &c], lhs, rhs);
            }
            let constant = at(0, cm).is_one();
            if constant {
                for ym in submasks(cm) {
                    let v = at(ym, cm).clone();
                    self.record(Axiom::Shape, [&self.set(ym), &self.set(0), &c], v, Rational::one());
                }
            } else {
                let v = at(0, cm).clone();
                self.record(Axiom::Shape, [&self.set(0), &self.set(0), &c], v, Rational::zero());
                for i in 0..n {
                    let single = 1u64 << i;
                    if cm & single != 0 {
                        let v = at(single, cm).clone();
                        let clamped = v.clone().max(Rational::zero()).min(Rational::one());
                        self.record(Axiom::Shape, [&self.set(single), &self.set(0), &c], v, clamped);
                    }
                }
            }
            // After the reduction, chains Y ⊆ X ⊆ C cover every remaining
            // multiplication triple, and (Y, X \ Y) every disjoint pair.
            for xm in submasks(cm) {
                for ym in submasks(xm) {
                    let lhs = at(ym, cm);
                    let rhs = at(ym, xm) * at(xm, cm);
                    if *lhs != rhs {
                        let lhs = lhs.clone();
                        self.record(Axiom::Multiplication, [&self.set(ym), &self.set(xm), &c], lhs, rhs);
                    } else {
                        self.report.checks += 1;
                    }
                    if cm != 0 && !constant {
                        let lhs = at(xm, cm);
                        let rhs = at(ym, cm) + at(xm & !ym, cm);
                        if *lhs != rhs {
                            let lhs = lhs.clone();
                            let sets = [&self.set(ym), &self.set(xm & !ym), &c];
                            self.record(Axiom::Additivity, sets, lhs, rhs);
                        } else {
                            self.report.checks += 1;
                        }
                    }
                }
            }
        }
    }

    fn sampled(&mut self, seed: u64, samples: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.n;
        let random_set = |rng: &mut ChaCha8Rng| {
            let mut s = IndexSet::empty(n);
            let density: f64 = rng.random_range(0.1..0.9);
            for i in 0..n {
                if rng.random_bool(density) {
                    s.insert(IndexId(i));
                }
            }
            s
        };
        let singles: Vec<IndexSet> = (0..n).map(|i| IndexSet::from_ids(n, [IndexId(i)])).collect();
        for _ in 0..samples {
            let a = random_set(&mut rng);
            let b = random_set(&mut rng);
            let c = random_set(&mut rng);
            let v = self.mu.mu(&a, &a);
            self.record(Axiom::Normalization, [&a, &a, &a], v, Rational::one());
            self.shape(&c, &singles);
            self.multiplication(&a, &b, &c);
            let b_disjoint = b.difference(&a);
            self.additivity(&a, &b_disjoint, &c);
        }
    }
}

/// Checks the Popper–Rényi axioms on `measure`, collecting witnesses.
pub fn check_popper_renyi(measure: &dyn ConditionalProbability, mode: CheckMode) -> ProbabilityReport {
    let n = measure.domain();
    let mut checker = Checker {
        mu: measure,
        n,
        report: ProbabilityReport {
            exhaustive: false,
            checks: 0,
            violation_count: 0,
            violations: Vec::new(),
        },
    };
    let (exhaustive, seed, samples) = match mode {
        CheckMode::Exhaustive => (true, 0, 0),
        CheckMode::Auto { seed, samples } => (n <= EXHAUSTIVE_LIMIT, seed, samples),
        CheckMode::Sampled { seed, samples } => (false, seed, samples),
    };
    assert!(!exhaustive || n <= 20, "exhaustive check over {n} indices is infeasible");
    checker.report.exhaustive = exhaustive;
    if exhaustive {
        checker.exhaustive();
    } else {
        checker.sampled(seed, samples);
    }
    checker.report
}
