//! Breadth-first closure of a finite generator set into a matrix semigroup.
//!
//! Elements are discovered word length by word length. Within one length, words are
//! visited in lexicographic order of generator indices, so each stored word is the
//! lexicographically least among the shortest words reaching that element.
//!
//! Deduplication never hashes floats. Each representative is indexed by a fixed linear
//! functional `f` with `|f(A) - f(B)| <= ||A - B||_F`; a candidate is compared against
//! every representative whose key falls inside the tolerance window, which is exactly
//! the set that could match.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{clean_projection, is_partial_isometry, is_projection, projection_defect, CMatrix, Tol, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureStatus {
    Closed,
    BudgetExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureBudget {
    pub max_elements: usize,
    pub max_word_length: usize,
}

impl ClosureBudget {
    pub fn new(max_elements: usize, max_word_length: usize) -> Result<Self> {
        if max_elements == 0 || max_word_length == 0 {
            return Err(Error::Precondition("closure budget entries must be at least 1".into()));
        }
        Ok(ClosureBudget {
            max_elements,
            max_word_length,
        })
    }

    /// `eps · (1 + max_word_length)`.
    pub fn working_tolerance(&self, tol: Tol) -> Tol {
        tol.scaled(1.0 + self.max_word_length as f64)
    }
}

impl Default for ClosureBudget {
    fn default() -> Self {
        ClosureBudget {
            max_elements: 5000,
            max_word_length: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Window index over representatives keyed by a unit-norm linear functional.
#[derive(Clone, Debug)]
struct FeatureIndex {
    weights: Vec<C64>,
    buckets: BTreeMap<Key, Vec<usize>>,
}

impl FeatureIndex {
    fn new(dim: usize) -> Self {
        // Deterministic quasi-random weights, normalized to unit Frobenius norm.
        let mut weights: Vec<C64> = (0..dim * dim)
            .map(|t| {
                let x = (t as f64 + 1.0) * 0.618_033_988_749_895;
                let y = (t as f64 + 1.0) * 0.414_213_562_373_095;
                C64::new((x.fract() - 0.5) + 0.01, (y.fract() - 0.5) - 0.01)
            })
            .collect();
        let norm = weights.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
        for w in &mut weights {
            *w /= norm;
        }
        FeatureIndex {
            weights,
            buckets: BTreeMap::new(),
        }
    }

    fn feature(&self, m: &CMatrix) -> f64 {
        let data = m.as_dmatrix();
        let n = data.nrows();
        let mut acc = 0.0;
        for j in 0..data.ncols() {
            for i in 0..n {
                let z = data[(i, j)];
                let w = self.weights[i * n + j];
                acc += w.re * z.re - w.im * z.im;
            }
        }
        acc
    }

    fn insert(&mut self, m: &CMatrix, idx: usize) {
        self.buckets.entry(Key(self.feature(m))).or_default().push(idx);
    }

    fn candidates(&self, m: &CMatrix, radius: f64) -> impl Iterator<Item = usize> + '_ {
        let f = self.feature(m);
        self.buckets
            .range(Key(f - radius)..=Key(f + radius))
            .flat_map(|(_, v)| v.iter().copied())
    }
}

/// A finite semigroup found by closure, with a shortest word for every element.
#[derive(Clone, Debug)]
pub struct ClosedSemigroup {
    dim: usize,
    elements: Vec<CMatrix>,
    words: Vec<Vec<usize>>,
    generators: Vec<CMatrix>,
    status: ClosureStatus,
    work_tol: Tol,
    index: FeatureIndex,
}

impl ClosedSemigroup {
    /// Assembles a semigroup from explicit parts, deduplicating `elements` at `work_tol`.
    ///
    /// Nothing here checks closure under products; this is how tests build deliberately
    /// broken inputs.
    pub fn from_parts(
        generators: Vec<CMatrix>,
        elements: Vec<(CMatrix, Vec<usize>)>,
        status: ClosureStatus,
        work_tol: Tol,
    ) -> Result<Self> {
        let dim = generators
            .first()
            .or_else(|| elements.first().map(|(m, _)| m))
            .map(CMatrix::rows)
            .ok_or_else(|| Error::Dimension("semigroup needs at least one matrix".into()))?;
        for m in generators.iter().chain(elements.iter().map(|(m, _)| m)) {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::Dimension(format!(
                    "expected {dim}x{dim}, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        let mut s = ClosedSemigroup {
            dim,
            elements: Vec::new(),
            words: Vec::new(),
            generators,
            status,
            work_tol,
            index: FeatureIndex::new(dim),
        };
        for (m, w) in elements {
            s.insert_if_new(m, w);
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn status(&self) -> ClosureStatus {
        self.status
    }

    pub fn is_closed(&self) -> bool {
        self.status == ClosureStatus::Closed
    }

    pub fn work_tol(&self) -> Tol {
        self.work_tol
    }

    pub fn max_word_length(&self) -> usize {
        self.words.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Index of the nearest element within `work_tol`.
    pub fn find(&self, m: &CMatrix) -> Option<usize> {
        self.find_within(m, self.work_tol)
    }

    pub fn find_within(&self, m: &CMatrix, tol: Tol) -> Option<usize> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return None;
        }
        let mut best: Option<(f64, usize)> = None;
        for idx in self.index.candidates(m, tol.eps()) {
            let d = self.elements[idx].distance(m);
            if d <= tol.eps() && best.is_none_or(|(bd, bi)| d < bd || (d == bd && idx < bi)) {
                best = Some((d, idx));
            }
        }
        best.map(|(_, i)| i)
    }

    pub fn contains(&self, m: &CMatrix) -> bool {
        self.find(m).is_some()
    }

    /// Evaluates a generator word.
    pub fn evaluate(&self, word: &[usize]) -> CMatrix {
        word.iter()
            .map(|&g| &self.generators[g])
            .fold(CMatrix::identity(self.dim), |acc, g| &acc * g)
    }

    /// Whether the adjoint of every element is again an element.
    pub fn is_selfadjoint(&self) -> bool {
        self.elements.iter().all(|m| self.contains(&m.adjoint()))
    }

    /// First pair `(i, j)` whose product matches no element, if any.
    pub fn first_missing_product(&self) -> Option<(usize, usize)> {
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                if !self.contains(&(a * b)) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    fn insert_if_new(&mut self, m: CMatrix, word: Vec<usize>) -> bool {
        if self.find(&m).is_some() {
            return false;
        }
        let idx = self.elements.len();
        self.index.insert(&m, idx);
        self.elements.push(m);
        self.words.push(word);
        true
    }
}

/// Level-by-level closure. Callers that want to inspect elements as they appear (and
/// stop early) drive [`ClosureEngine::step`] themselves; everyone else calls [`close`].
pub struct ClosureEngine {
    semigroup: ClosedSemigroup,
    budget: ClosureBudget,
    frontier: Range<usize>,
    level: usize,
    finished: bool,
}

impl ClosureEngine {
    pub fn new(generators: &[CMatrix], tol: Tol, budget: ClosureBudget) -> Result<Self> {
        ClosureBudget::new(budget.max_elements, budget.max_word_length)?;
        let first = generators
            .first()
            .ok_or_else(|| Error::Precondition("at least one generator is required".into()))?;
        let dim = first.rows();
        for (i, g) in generators.iter().enumerate() {
            if !g.is_square() || g.rows() != dim {
                return Err(Error::Dimension(format!(
                    "generator {i} is {}x{}, expected {dim}x{dim}",
                    g.rows(),
                    g.cols()
                )));
            }
        }
        let semigroup = ClosedSemigroup {
            dim,
            elements: Vec::new(),
            words: Vec::new(),
            generators: generators.to_vec(),
            status: ClosureStatus::BudgetExhausted,
            work_tol: budget.working_tolerance(tol),
            index: FeatureIndex::new(dim),
        };
        Ok(ClosureEngine {
            semigroup,
            budget,
            frontier: 0..0,
            level: 0,
            finished: false,
        })
    }

    pub fn semigroup(&self) -> &ClosedSemigroup {
        &self.semigroup
    }

    /// Adds every element whose shortest word has the next length. Returns the index
    /// range of the new elements, or `None` once the closure has finished either way.
    pub fn step(&mut self) -> Option<Range<usize>> {
        if self.finished {
            return None;
        }
        let start = self.semigroup.len();
        if self.level == 0 {
            for (g, m) in self.semigroup.generators.clone().into_iter().enumerate() {
                if self.semigroup.len() >= self.budget.max_elements {
                    return self.exhaust();
                }
                self.semigroup.insert_if_new(m, vec![g]);
            }
        } else {
            let over_length = self.level >= self.budget.max_word_length;
            let gens = self.semigroup.generators.clone();
            for e in self.frontier.clone() {
                for (g, gm) in gens.iter().enumerate() {
                    let product = &self.semigroup.elements[e] * gm;
                    if self.semigroup.find(&product).is_some() {
                        continue;
                    }
                    if over_length || self.semigroup.len() >= self.budget.max_elements {
                        return self.exhaust();
                    }
                    let mut word = self.semigroup.words[e].clone();
                    word.push(g);
                    self.semigroup.insert_if_new(product, word);
                }
            }
        }
        self.level += 1;
        let added = start..self.semigroup.len();
        if added.is_empty() {
            self.finished = true;
            self.semigroup.status = ClosureStatus::Closed;
            return None;
        }
        self.frontier = added.clone();
        Some(added)
    }

    fn exhaust(&mut self) -> Option<Range<usize>> {
        self.finished = true;
        self.semigroup.status = ClosureStatus::BudgetExhausted;
        None
    }

    pub fn run(mut self) -> ClosedSemigroup {
        while self.step().is_some() {}
        self.semigroup
    }

    /// Stops wherever the engine is; an unfinished closure is reported as exhausted.
    pub fn into_semigroup(self) -> ClosedSemigroup {
        self.semigroup
    }
}

/// Closes `generators` under multiplication. Budget exhaustion is reported through the
/// status, not as an error.
pub fn close(generators: &[CMatrix], tol: Tol, budget: ClosureBudget) -> Result<ClosedSemigroup> {
    Ok(ClosureEngine::new(generators, tol, budget)?.run())
}

/// Generators followed by their adjoints.
pub fn with_adjoints(generators: &[CMatrix]) -> Vec<CMatrix> {
    generators
        .iter()
        .cloned()
        .chain(generators.iter().map(CMatrix::adjoint))
        .collect()
}

/// Closure of the generators together with their adjoints.
pub fn close_selfadjoint(generators: &[CMatrix], tol: Tol, budget: ClosureBudget) -> Result<ClosedSemigroup> {
    close(&with_adjoints(generators), tol, budget)
}

pub fn all_partial_isometries(s: &ClosedSemigroup, tol: Tol) -> bool {
    first_non_partial_isometry(s, tol).is_none()
}

pub fn first_non_partial_isometry(s: &ClosedSemigroup, tol: Tol) -> Option<usize> {
    s.elements()
        .iter()
        .position(|m| !is_partial_isometry(m, tol).unwrap_or(false))
}

/// The elements that are projections, cleaned to exact Hermitian idempotents.
pub fn projections_of(s: &ClosedSemigroup, tol: Tol) -> Vec<CMatrix> {
    s.elements()
        .iter()
        .filter(|m| is_projection(m, tol).unwrap_or(false))
        .map(clean_projection)
        .collect()
}

/// Idempotents must be self-adjoint and projections must commute in a self-adjoint
/// semigroup of partial isometries. Returns the worst defects seen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProjectionLaws {
    pub idempotents: usize,
    pub max_selfadjoint_defect: f64,
    pub max_commutator: f64,
}

pub fn projection_laws(s: &ClosedSemigroup, tol: Tol) -> ProjectionLaws {
    let mut laws = ProjectionLaws::default();
    let mut projections = Vec::new();
    for m in s.elements() {
        let idem = (&(m * m) - m).frobenius_norm();
        if idem <= tol.eps() {
            laws.idempotents += 1;
            laws.max_selfadjoint_defect = laws.max_selfadjoint_defect.max(m.distance(&m.adjoint()));
            projections.push(m);
        }
    }
    for (i, p) in projections.iter().enumerate() {
        for q in &projections[i + 1..] {
            laws.max_commutator = laws.max_commutator.max(p.commutator_norm(q));
        }
    }
    laws
}

/// Checks the product law on all ordered pairs: `UV` is a partial isometry exactly when
/// `U*U` and `VV*` commute. Returns the offending pairs.
pub fn product_law_violations(s: &ClosedSemigroup, tol: Tol) -> Vec<(usize, usize)> {
    let elements = s.elements();
    let initial: Vec<CMatrix> = elements.iter().map(|u| &u.adjoint() * u).collect();
    let fin: Vec<CMatrix> = elements.iter().map(|v| v * &v.adjoint()).collect();
    let mut bad = Vec::new();
    for (i, u) in elements.iter().enumerate() {
        for (j, v) in elements.iter().enumerate() {
            let uv = u * v;
            let is_pi = is_partial_isometry(&uv, tol).unwrap_or(false);
            let commute = initial[i].commutator_norm(&fin[j]) <= tol.eps();
            if is_pi != commute {
                bad.push((i, j));
            }
        }
    }
    bad
}

/// Largest projection defect among the reported projections (zero when clean).
pub fn max_projection_defect(projections: &[CMatrix]) -> f64 {
    projections.iter().map(projection_defect).fold(0.0, f64::max)
}
