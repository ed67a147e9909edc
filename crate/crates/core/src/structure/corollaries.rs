use serde::{Deserialize, Serialize};

use super::zero_unitary::minimal_nonzero_rank;
use super::{require_closed, require_irreducible, require_nonzero, require_partial_isometries, working_tol};
use crate::band::{enveloping_band, ProjectionBand};
use crate::closure::{
    all_partial_isometries, close, close_selfadjoint, projections_of, with_adjoints, ClosedSemigroup, ClosureBudget,
};
use crate::error::{Error, Result};
use crate::linalg::{is_partial_isometry, is_unitary, partial_isometry_defects, range_projection, CMatrix, Tol};

/// All atoms of the band have one rank.
pub fn atom_ranks_equal(band: &ProjectionBand) -> bool {
    band.atom_ranks().windows(2).all(|w| w[0] == w[1])
}

/// Finite-dimensional masa test: every atom has rank one.
pub fn masa_criterion(band: &ProjectionBand) -> bool {
    band.atom_ranks().iter().all(|&r| r == 1)
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// In prime dimension, an irreducible semigroup of partial isometries without rank-one
/// members is a unitary group. Returns `Ok(true)` when it is; a failure on valid
/// preconditions is a theorem violation.
pub fn check_prime_size(s: &ClosedSemigroup, tol: Tol) -> Result<bool> {
    let n = s.dim();
    if !is_prime(n) {
        return Err(Error::Precondition(format!("dimension {n} is not prime")));
    }
    require_closed(s)?;
    let t = working_tol(s, tol);
    require_nonzero(s, t)?;
    require_partial_isometries(s, t)?;
    require_irreducible(s, tol)?;
    if minimal_nonzero_rank(s, t)? == 1 {
        return Err(Error::Precondition("semigroup has rank-one members".into()));
    }
    if let Some(a) = s.elements().iter().find(|a| !is_unitary(a, t)) {
        return Err(Error::violation_with("prime-size", "element is not unitary", a));
    }
    if !s.is_selfadjoint() {
        return Err(Error::violation("prime-size", "semigroup is not closed under adjoints"));
    }
    if !s.contains(&CMatrix::identity(n)) {
        return Err(Error::violation(
            "prime-size",
            "semigroup does not contain the identity",
        ));
    }
    Ok(true)
}

/// Closes `S ∪ S*` and checks that it still consists of partial isometries.
pub fn check_automatic_selfadjoint(s: &ClosedSemigroup, tol: Tol, budget: ClosureBudget) -> Result<bool> {
    require_closed(s)?;
    let t = working_tol(s, tol);
    require_nonzero(s, t)?;
    require_partial_isometries(s, t)?;
    require_irreducible(s, tol)?;
    let closed = close(&with_adjoints(s.generators()), tol, budget)?;
    require_closed(&closed)?;
    Ok(all_partial_isometries(&closed, closed.work_tol()))
}

/// Hypotheses and conclusions for commuting generators with common range and kernel.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FgAtomicityReport {
    pub ranges_equal: bool,
    pub kernels_equal: bool,
    pub commute: bool,
    /// Powers of all generators share ranges and kernels up to the ambient dimension;
    /// `None` when the hypotheses fail.
    pub power_lattices_agree: Option<bool>,
    /// The singly generated self-adjoint semigroups have the same band atoms.
    pub atoms_agree: Option<bool>,
    /// Atom ranks of the first generator's band, when computed.
    pub atom_ranks: Vec<usize>,
}

impl FgAtomicityReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.ranges_equal && self.kernels_equal && self.commute
    }

    pub fn confirmed(&self) -> bool {
        self.hypotheses_hold() && self.power_lattices_agree == Some(true) && self.atoms_agree == Some(true)
    }
}

pub fn check_finitely_generated_atomicity(
    generators: &[CMatrix],
    tol: Tol,
    budget: ClosureBudget,
) -> Result<FgAtomicityReport> {
    let first = generators
        .first()
        .ok_or_else(|| Error::Precondition("at least one generator is required".into()))?;
    let n = first.rows();
    for g in generators {
        if g.rows() != n || !g.is_square() {
            return Err(Error::Dimension(format!("generators must all be {n}x{n}")));
        }
        if !is_partial_isometry(g, tol)? {
            let (a, b) = partial_isometry_defects(g);
            return Err(Error::NotPartialIsometry { defect: a.max(b) });
        }
    }
    let ranges: Vec<CMatrix> = generators
        .iter()
        .map(|g| range_projection(g, tol))
        .collect::<Result<_>>()?;
    let corange: Vec<CMatrix> = generators
        .iter()
        .map(|g| range_projection(&g.adjoint(), tol))
        .collect::<Result<_>>()?;
    let all_equal = |ps: &[CMatrix]| ps.iter().all(|p| p.distance(&ps[0]) <= tol.eps());
    let mut report = FgAtomicityReport {
        ranges_equal: all_equal(&ranges),
        kernels_equal: all_equal(&corange),
        commute: generators
            .iter()
            .enumerate()
            .all(|(i, a)| generators[i + 1..].iter().all(|b| a.commutator_norm(b) <= tol.eps())),
        ..FgAtomicityReport::default()
    };
    if !report.hypotheses_hold() {
        return Ok(report);
    }

    let mut lattices = true;
    let mut powers: Vec<CMatrix> = generators.to_vec();
    for _ in 1..=n {
        let r: Vec<CMatrix> = powers.iter().map(|p| range_projection(p, tol)).collect::<Result<_>>()?;
        let k: Vec<CMatrix> = powers
            .iter()
            .map(|p| range_projection(&p.adjoint(), tol))
            .collect::<Result<_>>()?;
        lattices &= all_equal(&r) && all_equal(&k);
        powers = powers.iter().zip(generators).map(|(p, g)| p * g).collect();
    }
    report.power_lattices_agree = Some(lattices);

    let mut bands = Vec::with_capacity(generators.len());
    for g in generators {
        let s = close_selfadjoint(std::slice::from_ref(g), tol, budget)?;
        require_closed(&s)?;
        bands.push(enveloping_band(&projections_of(&s, s.work_tol()), n, s.work_tol())?);
    }
    let reference = &bands[0];
    let band_tol = tol.scaled(10.0);
    report.atoms_agree = Some(bands.iter().all(|b| {
        b.atom_count() == reference.atom_count()
            && b.atoms().iter().all(|a| reference.atom_index(a, band_tol).is_some())
    }));
    report.atom_ranks = reference.atom_ranks().to_vec();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{pauli_x, pauli_z, root_of_unity, truncated_shift, weyl_heisenberg};

    fn e(n: usize, i: usize, j: usize) -> CMatrix {
        CMatrix::basic(n, i, j)
    }

    fn closed(gens: &[CMatrix]) -> ClosedSemigroup {
        close(gens, Tol::default(), ClosureBudget::default()).unwrap()
    }

    #[test]
    fn primes() {
        let p: Vec<usize> = (0..20).filter(|&n| is_prime(n)).collect();
        assert_eq!(p, vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn prime_size_examples() {
        let s = closed(&[pauli_x(), pauli_z()]);
        assert_eq!(s.len(), 8);
        assert!(check_prime_size(&s, Tol::default()).unwrap());
        let (x, z) = weyl_heisenberg(3);
        assert!(check_prime_size(&closed(&[x, z]), Tol::default()).unwrap());
        let rank_one = closed(&[e(2, 0, 1), e(2, 1, 0)]);
        assert!(matches!(
            check_prime_size(&rank_one, Tol::default()),
            Err(Error::Precondition(_))
        ));
        let (x, z) = weyl_heisenberg(4);
        assert!(matches!(
            check_prime_size(&closed(&[x, z]), Tol::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn automatic_selfadjoint_examples() {
        let s = closed(&[e(2, 0, 1), e(2, 1, 0)]);
        assert!(check_automatic_selfadjoint(&s, Tol::default(), ClosureBudget::default()).unwrap());
        let s = closed(&[pauli_x(), pauli_z()]);
        assert!(check_automatic_selfadjoint(&s, Tol::default(), ClosureBudget::default()).unwrap());
    }

    #[test]
    fn commuting_shift_multiples() {
        let j = truncated_shift(3);
        let w = j.scale(root_of_unity(3, 1));
        let r = check_finitely_generated_atomicity(&[j, w], Tol::default(), ClosureBudget::default()).unwrap();
        assert!(r.hypotheses_hold());
        assert!(r.confirmed());
        assert_eq!(r.atom_ranks, vec![1, 1, 1]);
    }

    #[test]
    fn basic_matrices_fail_the_range_hypothesis() {
        let r = check_finitely_generated_atomicity(&[e(2, 0, 1), e(2, 1, 0)], Tol::default(), ClosureBudget::default())
            .unwrap();
        assert!(!r.ranges_equal);
        assert_eq!(r.power_lattices_agree, None);
    }

    #[test]
    fn single_generator_is_vacuous() {
        let r = check_finitely_generated_atomicity(&[truncated_shift(2)], Tol::default(), ClosureBudget::default())
            .unwrap();
        assert!(r.confirmed());
    }

    #[test]
    fn masa_examples() {
        let band = enveloping_band(&[e(2, 0, 0)], 2, Tol::default()).unwrap();
        assert!(masa_criterion(&band));
        let single = enveloping_band(&[CMatrix::identity(2)], 2, Tol::default()).unwrap();
        assert!(!masa_criterion(&single));
        assert!(atom_ranks_equal(&single));
    }
}
