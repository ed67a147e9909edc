use serde::{Deserialize, Serialize};

use super::powers::{approximate_identity_power, DEFAULT_EPS_TARGET, DEFAULT_N_MAX, FALLBACK_EPS_TARGET};
use super::{
    require_closed, require_irreducible, require_nonzero, require_partial_isometries, working_tol, PartialPermutation,
};
use crate::closure::ClosedSemigroup;
use crate::error::{Error, Result};
use crate::linalg::{
    clean_projection, is_unitary, polar_unitary, projection_defect, rank, spectral_basis, CMatrix, Tol,
};

const THEOREM: &str = "zero-unitary";

/// Where an element sends each block, and which group element it carries there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementPattern {
    pub permutation: PartialPermutation,
    /// Index into `unitary_group`, one per domain entry.
    pub labels: Vec<usize>,
}

/// Block-monomial form: in `basis`, every element is a `k × k` array of `r0 × r0` blocks
/// with at most one nonzero block per block-row and block-column, each from the group.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroUnitaryStructure {
    pub k: usize,
    pub r0: usize,
    pub basis: CMatrix,
    /// Identity first.
    pub unitary_group: Vec<CMatrix>,
    /// One per semigroup element, in element order.
    pub patterns: Vec<ElementPattern>,
    /// Tolerance used to classify blocks.
    pub match_tol: f64,
}

impl ZeroUnitaryStructure {
    pub fn dim(&self) -> usize {
        self.k * self.r0
    }

    pub fn group_index(&self, g: &CMatrix, tol: Tol) -> Option<usize> {
        self.unitary_group.iter().position(|h| h.distance(g) <= tol.eps())
    }

    /// The matrix with the given pattern, in the original coordinates.
    pub fn assemble(&self, pattern: &ElementPattern) -> CMatrix {
        let r = self.r0;
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for ((&j, &i), &g) in pattern
            .permutation
            .domain
            .iter()
            .zip(&pattern.permutation.map)
            .zip(&pattern.labels)
        {
            let block = &self.unitary_group[g];
            for a in 0..r {
                for b in 0..r {
                    m.set(i * r + a, j * r + b, block.get(a, b));
                }
            }
        }
        &(&self.basis * &m) * &self.basis.adjoint()
    }

    /// `E_ij ⊗ G` in the original coordinates (zero-based blocks).
    pub fn unit(&self, i: usize, j: usize, g: usize) -> CMatrix {
        let pattern = ElementPattern {
            permutation: PartialPermutation {
                domain: vec![j],
                map: vec![i],
            },
            labels: vec![g],
        };
        self.assemble(&pattern)
    }
}

pub fn minimal_nonzero_rank(s: &ClosedSemigroup, tol: Tol) -> Result<usize> {
    s.elements()
        .iter()
        .map(|m| rank(m, tol))
        .filter(|&r| r > 0)
        .min()
        .ok_or(Error::Degenerate)
}

/// Reads off the pattern of `a` against an extracted structure.
pub fn classify_element(z: &ZeroUnitaryStructure, a: &CMatrix, tol: Tol) -> Result<ElementPattern> {
    if a.rows() != z.dim() || a.cols() != z.dim() {
        return Err(Error::Dimension(format!("expected {0}x{0}", z.dim())));
    }
    let r = z.r0;
    let m = a.compress(&z.basis);
    let mut pairs = Vec::new();
    let mut labels = Vec::new();
    for j in 0..z.k {
        for i in 0..z.k {
            let block = m.block(i * r, j * r, r, r);
            if block.frobenius_norm() <= tol.eps() {
                continue;
            }
            let snapped = polar_unitary(&block);
            let defect = block.distance(&snapped);
            if defect > tol.eps() {
                return Err(Error::violation_with(
                    THEOREM,
                    format!("block ({i}, {j}) is not unitary (defect {defect:.3e})"),
                    a,
                ));
            }
            let g = z.group_index(&snapped, tol).ok_or_else(|| {
                Error::violation_with(THEOREM, format!("block ({i}, {j}) is not in the unitary group"), a)
            })?;
            pairs.push((j, i, g));
        }
    }
    pairs.sort_unstable();
    let permutation = PartialPermutation::from_pairs(pairs.iter().map(|&(j, i, _)| (j, i)).collect())
        .map_err(|e| Error::violation_with(THEOREM, format!("not block-monomial: {e}"), a))?;
    labels.extend(pairs.iter().map(|p| p.2));
    Ok(ElementPattern { permutation, labels })
}

/// Finds `k`, `r0`, the block basis and the unitary group of an irreducible closed
/// semigroup of partial isometries, and classifies every element.
pub fn extract_zero_unitary(s: &ClosedSemigroup, tol: Tol) -> Result<ZeroUnitaryStructure> {
    require_closed(s)?;
    let t = working_tol(s, tol);
    require_nonzero(s, t)?;
    require_partial_isometries(s, t)?;
    require_irreducible(s, tol)?;
    let n = s.dim();
    let r0 = minimal_nonzero_rank(s, t)?;

    // A minimal-rank element acting unitarily on its initial space = final space.
    let base = s
        .elements()
        .iter()
        .find(|a| rank(a, t) == r0 && (&(*a * &a.adjoint()) - &(&a.adjoint() * *a)).frobenius_norm() <= t.eps())
        .ok_or_else(|| {
            Error::violation(
                THEOREM,
                format!("no rank-{r0} element with equal initial and final spaces"),
            )
        })?;
    let frame = spectral_basis(&clean_projection(&(&base.adjoint() * base)), 0.5);
    let on_frame = base.compress(&frame);
    let (m, loose) = match approximate_identity_power(&on_frame, DEFAULT_EPS_TARGET, DEFAULT_N_MAX) {
        Ok(m) => (m, false),
        Err(Error::SearchExhausted { .. }) => (
            approximate_identity_power(&on_frame, FALLBACK_EPS_TARGET, DEFAULT_N_MAX)?,
            true,
        ),
        Err(e) => return Err(e),
    };
    let candidate = base.pow(m as u32);
    let found = if loose {
        s.find_within(&candidate, Tol::new(FALLBACK_EPS_TARGET * 2.0).expect("valid"))
    } else {
        s.find(&candidate)
    };
    let p_idx =
        found.ok_or_else(|| Error::violation_with(THEOREM, "the unit power of the base element is not in S", base))?;
    let p_raw = &s.elements()[p_idx];
    if projection_defect(p_raw) > if loose { FALLBACK_EPS_TARGET } else { t.eps() } {
        return Err(Error::violation_with(THEOREM, "unit power is not a projection", p_raw));
    }
    let p = clean_projection(p_raw);
    let b1 = spectral_basis(&p, 0.5);
    if b1.cols() != r0 {
        return Err(Error::violation_with(
            THEOREM,
            "unit projection has the wrong rank",
            p_raw,
        ));
    }

    let group = corner_group(s, &b1, t)?;
    let blocks = block_frames(s, &b1, n, t)?;
    let k = blocks.len();
    let basis = CMatrix::hstack(&blocks);
    if !is_unitary(&basis, t.scaled(n as f64)) {
        return Err(Error::violation(THEOREM, "block frames are not orthonormal"));
    }

    let mut z = ZeroUnitaryStructure {
        k,
        r0,
        basis,
        unitary_group: group,
        patterns: Vec::with_capacity(s.len()),
        match_tol: t.eps(),
    };
    let patterns = s
        .elements()
        .iter()
        .map(|a| classify_element(&z, a, t))
        .collect::<Result<Vec<_>>>()?;
    z.patterns = patterns;
    Ok(z)
}

/// The nonzero compressions `B1* A B1`, snapped to unitaries and deduplicated, identity first.
fn corner_group(s: &ClosedSemigroup, b1: &CMatrix, t: Tol) -> Result<Vec<CMatrix>> {
    let r0 = b1.cols();
    let mut group = vec![CMatrix::identity(r0)];
    for a in s.elements() {
        let c = a.compress(b1);
        if c.frobenius_norm() <= t.eps() {
            continue;
        }
        let u = polar_unitary(&c);
        if c.distance(&u) > t.eps() {
            return Err(Error::violation_with(THEOREM, "a corner compression is not unitary", a));
        }
        if !group.iter().any(|g| g.distance(&u) <= t.eps()) {
            group.push(u);
        }
    }
    let inside = |m: &CMatrix| group.iter().any(|g| g.distance(m) <= t.eps());
    for g in &group {
        if !inside(&g.adjoint()) {
            return Err(Error::violation_with(
                THEOREM,
                "corner group is not closed under adjoints",
                g,
            ));
        }
        for h in &group {
            let gh = g * h;
            if !inside(&gh) {
                return Err(Error::violation_with(
                    THEOREM,
                    "corner group is not closed under products",
                    &gh,
                ));
            }
        }
    }
    Ok(group)
}

/// Block frames in discovery order: `B_1`, then `A·B_1` for the first element `A` (in
/// shortest-word order) reaching each new block.
fn block_frames(s: &ClosedSemigroup, b1: &CMatrix, n: usize, t: Tol) -> Result<Vec<CMatrix>> {
    let r0 = b1.cols();
    let mut frames = vec![b1.clone()];
    let mut projections = vec![b1 * &b1.adjoint()];
    for a in s.elements() {
        if frames.len() * r0 >= n {
            break;
        }
        let v = a * b1;
        if v.frobenius_norm() <= t.eps() {
            continue;
        }
        let q = &v * &v.adjoint();
        if projections.iter().any(|p| p.distance(&q) <= t.eps()) {
            continue;
        }
        if projections.iter().any(|p| (p * &q).frobenius_norm() > t.eps()) {
            return Err(Error::violation_with(
                THEOREM,
                "image of the corner block overlaps a known block",
                a,
            ));
        }
        let gram_defect = (&(&v.adjoint() * &v) - &CMatrix::identity(r0)).frobenius_norm();
        if gram_defect > t.eps() {
            return Err(Error::violation_with(
                THEOREM,
                "element is not isometric on the corner block",
                a,
            ));
        }
        frames.push(polar_unitary(&v));
        projections.push(q);
    }
    if frames.len() * r0 != n {
        return Err(Error::violation(
            THEOREM,
            format!("{} blocks of size {r0} do not fill dimension {n}", frames.len()),
        ));
    }
    Ok(frames)
}

/// Outcome of checking `S_0^k(U) ⊆ S ⊆ S_1^k(U)`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SandwichReport {
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// `(i, j, g)` for each `E_ij ⊗ G_g` not found in `S`.
    pub missing_units: Vec<(usize, usize, usize)>,
    /// Elements whose blocks are not monomial over the group.
    pub bad_elements: Vec<usize>,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds
    }
}

pub fn verify_sandwich(s: &ClosedSemigroup, z: &ZeroUnitaryStructure, tol: Tol) -> SandwichReport {
    let t = working_tol(s, tol);
    let mut report = SandwichReport::default();
    if s.dim() != z.dim() {
        report.bad_elements = (0..s.len()).collect();
        return report;
    }
    for i in 0..z.k {
        for j in 0..z.k {
            for g in 0..z.unitary_group.len() {
                if s.find_within(&z.unit(i, j, g), t).is_none() {
                    report.missing_units.push((i, j, g));
                }
            }
        }
    }
    for (idx, a) in s.elements().iter().enumerate() {
        if classify_element(z, a, t).is_err() {
            report.bad_elements.push(idx);
        }
    }
    report.lower_holds = report.missing_units.is_empty();
    report.upper_holds = report.bad_elements.is_empty();
    report
}
