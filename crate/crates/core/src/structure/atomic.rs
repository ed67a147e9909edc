use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    require_closed, require_irreducible, require_nonzero, require_partial_isometries, working_tol, PartialPermutation,
};
use crate::band::ProjectionBand;
use crate::closure::ClosedSemigroup;
use crate::error::{Error, Result};
use crate::linalg::{is_unitary, CMatrix, Tol};

const THEOREM: &str = "atomic-representation";

/// One element as a composition operator on atoms: `φ` plus a unitary per moved atom.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomicElement {
    pub permutation: PartialPermutation,
    /// `T_t = B_{φ(a)}* A B_a` for each `a` in the domain, in domain order.
    pub unitaries: Vec<CMatrix>,
}

#[derive(Clone, Debug)]
pub struct AtomicRepresentation {
    pub band: ProjectionBand,
    pub block_dim: usize,
    pub per_element: Vec<AtomicElement>,
    /// Per element, one weight per domain atom; identically 1 under the uniform atom measure.
    pub weights: Vec<Vec<f64>>,
}

impl AtomicRepresentation {
    /// `Σ_a w_a · B_{φ(a)} T_a B_a*`.
    pub fn reconstruct(&self, element: usize) -> CMatrix {
        let n = self.band.dim();
        let e = &self.per_element[element];
        let bases = self.band.atom_bases();
        let mut out = CMatrix::zeros(n, n);
        for (((&a, &b), t), &w) in e
            .permutation
            .domain
            .iter()
            .zip(&e.permutation.map)
            .zip(&e.unitaries)
            .zip(&self.weights[element])
        {
            let piece = &(&bases[b] * t) * &bases[a].adjoint();
            out = &out + &piece.scale(crate::linalg::C64::new(w, 0.0));
        }
        out
    }

    /// Largest reconstruction error over all elements of `s`.
    pub fn max_reconstruction_error(&self, s: &ClosedSemigroup) -> f64 {
        s.elements()
            .iter()
            .enumerate()
            .map(|(i, a)| self.reconstruct(i).distance(a))
            .fold(0.0, f64::max)
    }
}

/// Represents each element of an irreducible enriched semigroup as a partial bijection
/// of band atoms carrying a unitary between the atom spaces.
pub fn atomic_representation(s1: &ClosedSemigroup, band: &ProjectionBand, tol: Tol) -> Result<AtomicRepresentation> {
    require_closed(s1)?;
    let t = working_tol(s1, tol);
    require_nonzero(s1, t)?;
    require_partial_isometries(s1, t)?;
    if band.dim() != s1.dim() {
        return Err(Error::Dimension(
            "band and semigroup live in different dimensions".into(),
        ));
    }
    if let Some(a) = band.atoms().iter().position(|atom| !s1.contains(atom)) {
        return Err(Error::Precondition(format!(
            "atom {a} is not an element; enrich the semigroup first"
        )));
    }
    require_irreducible(s1, tol)?;
    let block_dim = band.atom_ranks()[0];
    if band.atom_ranks().iter().any(|&r| r != block_dim) {
        return Err(Error::violation(
            THEOREM,
            format!(
                "atoms of an irreducible semigroup have unequal ranks {:?}",
                band.atom_ranks()
            ),
        ));
    }

    let bases = band.atom_bases();
    let mut per_element = Vec::with_capacity(s1.len());
    let mut weights = Vec::with_capacity(s1.len());
    for a in s1.elements() {
        let mut pairs = Vec::new();
        let mut unitaries = BTreeMap::new();
        for (src, atom) in band.atoms().iter().enumerate() {
            if (a * atom).frobenius_norm() <= t.eps() {
                continue;
            }
            let image = &(&(a * atom) * &a.adjoint()).hermitian_part();
            let dst = band.atom_index(image, t).ok_or_else(|| {
                Error::violation_with(THEOREM, format!("element moves atom {src} onto a non-atom"), a)
            })?;
            let block = a.compress_between(&bases[dst], &bases[src]);
            if !is_unitary(&block, t) {
                return Err(Error::violation_with(
                    THEOREM,
                    format!("block on atom {src} is not unitary"),
                    a,
                ));
            }
            pairs.push((src, dst));
            unitaries.insert(src, block);
        }
        let permutation = PartialPermutation::from_pairs(pairs)
            .map_err(|e| Error::violation_with(THEOREM, format!("atom map is not a partial bijection: {e}"), a))?;
        weights.push(vec![1.0; permutation.len()]);
        per_element.push(AtomicElement {
            permutation,
            unitaries: unitaries.into_values().collect(),
        });
    }
    Ok(AtomicRepresentation {
        band: band.clone(),
        block_dim,
        per_element,
        weights,
    })
}

/// Splits a semigroup along the rank classes of its band atoms. Each class projection
/// must reduce every element; the compressed semigroup of each class is returned.
pub fn reducible_split(
    s: &ClosedSemigroup,
    band: &ProjectionBand,
    tol: Tol,
) -> Result<Vec<(CMatrix, ClosedSemigroup)>> {
    let t = working_tol(s, tol);
    if band.dim() != s.dim() {
        return Err(Error::Dimension(
            "band and semigroup live in different dimensions".into(),
        ));
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &r) in band.atom_ranks().iter().enumerate() {
        classes.entry(r).or_default().push(i);
    }
    let mut out = Vec::with_capacity(classes.len());
    for atoms in classes.values() {
        let q = atoms
            .iter()
            .fold(CMatrix::zeros(s.dim(), s.dim()), |acc, &a| &acc + &band.atoms()[a]);
        for a in s.elements() {
            let defect = q.commutator_norm(a);
            if defect > t.eps() {
                return Err(Error::violation_with(
                    "reducing-summands",
                    format!("rank-class projection fails to reduce an element (defect {defect:.3e})"),
                    a,
                ));
            }
        }
        let basis = CMatrix::hstack(&atoms.iter().map(|&a| band.atom_bases()[a].clone()).collect::<Vec<_>>());
        let gens = s.generators().iter().map(|g| g.compress(&basis)).collect();
        let parts = s
            .elements()
            .iter()
            .zip(s.words())
            .map(|(m, w)| (m.compress(&basis), w.clone()))
            .collect();
        out.push((q, ClosedSemigroup::from_parts(gens, parts, s.status(), s.work_tol())?));
    }
    Ok(out)
}
