//! Enveloping band of projections: the finite Boolean algebra generated by a commuting
//! family of projections, its atoms, and enrichment of a semigroup by that algebra.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::closure::{
    all_partial_isometries, close, first_non_partial_isometry, projections_of, ClosedSemigroup, ClosureBudget,
};
use crate::error::{Error, Result};
use crate::linalg::{clean_projection, hermitian_eigen, is_partial_isometry, projection_defect, CMatrix, Tol};

/// Largest atom count for which [`boolean_members`] will enumerate.
pub const ENUMERATION_CAP: usize = 20;

/// Atoms of a finite Boolean algebra of commuting projections.
#[derive(Clone, Debug)]
pub struct ProjectionBand {
    dim: usize,
    atoms: Vec<CMatrix>,
    atom_ranks: Vec<usize>,
    atom_bases: Vec<CMatrix>,
}

/// A member of the algebra, named by the atoms it contains (sorted, zero-based).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BooleanElement {
    pub atoms: Vec<usize>,
}

impl BooleanElement {
    pub fn new(mut atoms: Vec<usize>) -> Self {
        atoms.sort_unstable();
        atoms.dedup();
        BooleanElement { atoms }
    }

    pub fn from_mask(mask: u64) -> Self {
        BooleanElement {
            atoms: (0..64).filter(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.atoms.binary_search(&atom).is_ok()
    }

    pub fn meet(&self, other: &Self) -> Self {
        BooleanElement {
            atoms: self.atoms.iter().copied().filter(|a| other.contains(*a)).collect(),
        }
    }

    pub fn join(&self, other: &Self) -> Self {
        BooleanElement::new(self.atoms.iter().chain(&other.atoms).copied().collect())
    }

    pub fn complement(&self, atom_count: usize) -> Self {
        BooleanElement {
            atoms: (0..atom_count).filter(|a| !self.contains(*a)).collect(),
        }
    }
}

impl ProjectionBand {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[CMatrix] {
        &self.atoms
    }

    pub fn atom_ranks(&self) -> &[usize] {
        &self.atom_ranks
    }

    /// Orthonormal basis (columns) of each atom's range.
    pub fn atom_bases(&self) -> &[CMatrix] {
        &self.atom_bases
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn member(&self, element: &BooleanElement) -> CMatrix {
        element
            .atoms
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, &a| &acc + &self.atoms[a])
    }

    /// Index of the atom equal to `p` within `tol`.
    pub fn atom_index(&self, p: &CMatrix, tol: Tol) -> Option<usize> {
        self.atoms.iter().position(|a| a.distance(p) <= tol.eps())
    }

    /// Writes a projection as a sum of atoms, if it is one (within `#atoms · tol`).
    pub fn decompose(&self, p: &CMatrix, tol: Tol) -> Option<BooleanElement> {
        if p.rows() != self.dim || p.cols() != self.dim {
            return None;
        }
        let mut chosen = Vec::new();
        for (i, atom) in self.atoms.iter().enumerate() {
            let weight = (p * atom).trace().re / self.atom_ranks[i] as f64;
            if weight > 0.5 {
                chosen.push(i);
            }
        }
        let element = BooleanElement { atoms: chosen };
        let slack = self.atoms.len().max(1) as f64 * tol.eps();
        (self.member(&element).distance(p) <= slack).then_some(element)
    }

    /// Atoms below the projection `p` (those with `atom · p = atom`).
    pub fn atoms_below(&self, p: &CMatrix, tol: Tol) -> Vec<usize> {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| (&(*a * p) - *a).frobenius_norm() <= tol.eps())
            .map(|(i, _)| i)
            .collect()
    }
}

/// Builds the atoms by refining the whole space by each projection in turn: every
/// current subspace is split into its parts inside `ran P` and inside `ran (I − P)`.
pub fn enveloping_band(projections: &[CMatrix], dim: usize, tol: Tol) -> Result<ProjectionBand> {
    for (i, p) in projections.iter().enumerate() {
        if p.rows() != dim || p.cols() != dim {
            return Err(Error::Dimension(format!(
                "projection {i} is {}x{}, expected {dim}x{dim}",
                p.rows(),
                p.cols()
            )));
        }
    }
    let commute_tol = 10.0 * tol.eps();
    for (i, p) in projections.iter().enumerate() {
        for (j, q) in projections.iter().enumerate().skip(i + 1) {
            let defect = p.commutator_norm(q);
            if defect > commute_tol {
                return Err(Error::Commutativity {
                    first: i,
                    second: j,
                    defect,
                });
            }
        }
    }

    let mut subspaces = vec![CMatrix::identity(dim)];
    for p in projections {
        let p = clean_projection(p);
        let mut next = Vec::with_capacity(subspaces.len() + 1);
        for basis in subspaces {
            let (values, vectors) = hermitian_eigen(&p.compress(&basis));
            let inside = values.iter().filter(|&&v| v > 0.5).count();
            if inside == 0 || inside == values.len() {
                next.push(basis);
                continue;
            }
            let rotated = &basis * &vectors;
            next.push(rotated.columns(0, inside));
            next.push(rotated.columns(inside, values.len() - inside));
        }
        subspaces = next;
    }

    let mut atoms: Vec<(Vec<i64>, CMatrix, CMatrix)> = subspaces
        .into_iter()
        .map(|basis| {
            let atom = &basis * &basis.adjoint();
            let key = (0..dim).map(|i| (atom.get(i, i).re * 1e6).round() as i64).collect();
            (key, atom, basis)
        })
        .collect();
    // Canonical order: lexicographically larger diagonal first (E11 before E22).
    atoms.sort_by(|a, b| b.0.cmp(&a.0));

    Ok(ProjectionBand {
        dim,
        atom_ranks: atoms.iter().map(|(_, _, b)| b.cols()).collect(),
        atom_bases: atoms.iter().map(|(_, _, b)| b.clone()).collect(),
        atoms: atoms.into_iter().map(|(_, a, _)| a).collect(),
    })
}

/// Every member of the algebra as an atom-subset sum, in mask order.
pub fn boolean_members(band: &ProjectionBand) -> Result<impl Iterator<Item = (BooleanElement, CMatrix)> + '_> {
    let count = band.atom_count();
    if count > ENUMERATION_CAP {
        return Err(Error::TooManyAtoms {
            atoms: count,
            cap: ENUMERATION_CAP,
        });
    }
    Ok((0..1u64 << count).map(move |mask| {
        let e = BooleanElement::from_mask(mask);
        let m = band.member(&e);
        (e, m)
    }))
}

/// `F = A*EA`, checked to be a projection with `EA = AF`.
pub fn conjugate_projection(a: &CMatrix, e: &CMatrix, tol: Tol) -> Result<CMatrix> {
    if !is_partial_isometry(a, tol)? {
        return Err(Error::Precondition("A is not a partial isometry".into()));
    }
    if projection_defect(e) > tol.eps() {
        return Err(Error::Precondition("E is not a projection".into()));
    }
    let fin = a * &a.adjoint();
    if e.commutator_norm(&fin) > 10.0 * tol.eps() {
        return Err(Error::Precondition("E does not commute with AA*".into()));
    }
    let f = &(&a.adjoint() * e) * a;
    let defect = projection_defect(&f);
    if defect > tol.eps() {
        return Err(Error::ClaimViolation(format!(
            "A*EA is not a projection (defect {defect:.3e})"
        )));
    }
    let intertwine = (&(e * a) - &(a * &f)).frobenius_norm();
    if intertwine > tol.eps() {
        return Err(Error::ClaimViolation(format!("EA != AF (defect {intertwine:.3e})")));
    }
    Ok(clean_projection(&f))
}

/// Tallies from [`check_conjugation_claims`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugationTally {
    pub projection_pairs: usize,
    pub boolean_pairs: usize,
    pub order_pairs: usize,
}

/// Checks, for every element `A`, that conjugation `E ↦ A*EA` intertwines (`EA = AF`)
/// for every projection of the semigroup and, when the band has at most `member_cap`
/// atoms, for every Boolean member; and that it preserves order on covering pairs
/// `E ≤ E + atom`.
pub fn check_conjugation_claims(
    s: &ClosedSemigroup,
    band: &ProjectionBand,
    tol: Tol,
    member_cap: usize,
) -> Result<ConjugationTally> {
    let mut tally = ConjugationTally::default();
    let projections = projections_of(s, tol);
    for a in s.elements() {
        for e in &projections {
            conjugate_projection(a, e, tol)?;
            tally.projection_pairs += 1;
        }
    }
    if band.atom_count() > member_cap {
        return Ok(tally);
    }
    let members: Vec<(BooleanElement, CMatrix)> = boolean_members(band)?.collect();
    for a in s.elements() {
        let images: Vec<CMatrix> = members
            .iter()
            .map(|(_, e)| conjugate_projection(a, e, tol))
            .collect::<Result<_>>()?;
        tally.boolean_pairs += members.len();
        for (mask, _) in members.iter().enumerate() {
            for atom in 0..band.atom_count() {
                if mask >> atom & 1 == 1 {
                    continue;
                }
                let upper = mask | 1 << atom;
                let (f1, f2) = (&images[mask], &images[upper]);
                let defect = (&(f1 * f2) - f1).frobenius_norm();
                if defect > tol.eps() {
                    return Err(Error::ClaimViolation(format!(
                        "conjugation does not preserve order (defect {defect:.3e})"
                    )));
                }
                tally.order_pairs += 1;
            }
        }
    }
    Ok(tally)
}

/// A semigroup enlarged by its enveloping band, with the band it was enlarged by.
#[derive(Clone, Debug)]
pub struct Enrichment {
    pub semigroup: ClosedSemigroup,
    pub band: ProjectionBand,
}

/// Closes `S0` together with its enveloping band and verifies that the result consists
/// of partial isometries whose projections are exactly the band's members, and that the
/// band does not grow.
///
/// The band enters the closure through its co-atoms `I − atom`, the atoms and `I`: the
/// co-atoms generate every member except `I` multiplicatively, so the closed semigroup
/// is the one generated by `S0` and the full algebra.
pub fn enrich(s0: &ClosedSemigroup, tol: Tol, budget: ClosureBudget) -> Result<Enrichment> {
    if !s0.is_closed() {
        return Err(Error::Precondition("S0 must be closed".into()));
    }
    let t0 = s0.work_tol();
    if let Some(bad) = first_non_partial_isometry(s0, t0) {
        return Err(Error::Precondition(format!(
            "element {bad} of S0 is not a partial isometry"
        )));
    }
    if !s0.is_selfadjoint() {
        return Err(Error::Precondition("S0 must be self-adjoint".into()));
    }
    let dim = s0.dim();
    let band = enveloping_band(&projections_of(s0, t0), dim, t0)?;

    let id = CMatrix::identity(dim);
    let mut generators = s0.generators().to_vec();
    generators.push(id.clone());
    generators.extend(band.atoms().iter().cloned());
    generators.extend(band.atoms().iter().map(|a| &id - a));
    let s1 = close(&generators, tol, budget)?;
    if !s1.is_closed() {
        return Err(Error::BudgetExhausted { partial: Box::new(s1) });
    }
    let t1 = s1.work_tol();

    if !all_partial_isometries(&s1, t1) {
        let bad = first_non_partial_isometry(&s1, t1).unwrap_or(0);
        return Err(Error::violation_with(
            "enrichment",
            format!("element {bad} of the enriched semigroup is not a partial isometry"),
            &s1.elements()[bad],
        ));
    }

    let projections = projections_of(&s1, t1);
    let mut masks = BTreeSet::new();
    for p in &projections {
        match band.decompose(p, t1) {
            Some(e) => {
                masks.insert(e);
            }
            None => {
                return Err(Error::violation_with(
                    "enrichment",
                    "a projection of the enriched semigroup lies outside the enveloping band",
                    p,
                ))
            }
        }
    }
    let expected = 1u128 << band.atom_count().min(127);
    if masks.len() as u128 != expected {
        return Err(Error::violation(
            "enrichment",
            format!(
                "enriched semigroup has {} distinct projections, the band has {expected} members",
                masks.len()
            ),
        ));
    }

    let band1 = enveloping_band(&projections, dim, t1)?;
    let same =
        band1.atom_count() == band.atom_count() && band1.atoms().iter().all(|a| band.atom_index(a, t1).is_some());
    if !same {
        return Err(Error::violation(
            "enrichment",
            format!(
                "enveloping band changed under enrichment: {} atoms became {}",
                band.atom_count(),
                band1.atom_count()
            ),
        ));
    }
    Ok(Enrichment { semigroup: s1, band })
}
