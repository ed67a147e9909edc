//! Structure of irreducible semigroups of partial isometries: irreducibility, the
//! zero-unitary block form, the atomic representation and the corollaries that follow.

mod atomic;
mod corollaries;
mod irreducible;
mod powers;
mod zero_unitary;

use serde::{Deserialize, Serialize};

pub use atomic::{atomic_representation, reducible_split, AtomicElement, AtomicRepresentation};
pub use corollaries::{
    atom_ranks_equal, check_automatic_selfadjoint, check_finitely_generated_atomicity, check_prime_size, is_prime,
    masa_criterion, FgAtomicityReport,
};
pub use irreducible::{irreducibility, orbit_dimension, IrreducibilityReport};
pub use powers::{approximate_identity_power, DEFAULT_EPS_TARGET, DEFAULT_N_MAX, FALLBACK_EPS_TARGET};
pub use zero_unitary::{
    classify_element, extract_zero_unitary, minimal_nonzero_rank, verify_sandwich, ElementPattern, SandwichReport,
    ZeroUnitaryStructure,
};

use crate::closure::{first_non_partial_isometry, ClosedSemigroup};
use crate::error::{Error, Result};
use crate::linalg::Tol;

/// Injective partial map on `{0, …, k−1}`, stored as parallel `domain` (ascending) and
/// `map` vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialPermutation {
    pub domain: Vec<usize>,
    pub map: Vec<usize>,
}

impl PartialPermutation {
    /// From `(source, target)` pairs; fails on repeated sources or targets.
    pub fn from_pairs(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Precondition(format!("point {} has two images", w[0].0)));
            }
        }
        let mut targets: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        targets.sort_unstable();
        if targets.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Precondition("partial map is not injective".into()));
        }
        Ok(PartialPermutation {
            domain: pairs.iter().map(|p| p.0).collect(),
            map: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn identity(k: usize) -> Self {
        PartialPermutation {
            domain: (0..k).collect(),
            map: (0..k).collect(),
        }
    }

    pub fn empty() -> Self {
        PartialPermutation {
            domain: Vec::new(),
            map: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.domain.binary_search(&x).ok().map(|i| self.map[i])
    }

    /// Image set, ascending.
    pub fn image(&self) -> Vec<usize> {
        let mut out = self.map.clone();
        out.sort_unstable();
        out
    }

    pub fn is_injective(&self) -> bool {
        let image = self.image();
        image.windows(2).all(|w| w[0] != w[1])
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &PartialPermutation) -> PartialPermutation {
        let mut domain = Vec::new();
        let mut map = Vec::new();
        for (&x, &y) in other.domain.iter().zip(&other.map) {
            if let Some(z) = self.apply(y) {
                domain.push(x);
                map.push(z);
            }
        }
        PartialPermutation { domain, map }
    }

    pub fn inverse(&self) -> PartialPermutation {
        let mut pairs: Vec<(usize, usize)> = self.map.iter().copied().zip(self.domain.iter().copied()).collect();
        pairs.sort_unstable();
        PartialPermutation {
            domain: pairs.iter().map(|p| p.0).collect(),
            map: pairs.iter().map(|p| p.1).collect(),
        }
    }
}

/// The larger of the caller's tolerance and the semigroup's working tolerance.
pub(crate) fn working_tol(s: &ClosedSemigroup, tol: Tol) -> Tol {
    if s.work_tol().eps() > tol.eps() {
        s.work_tol()
    } else {
        tol
    }
}

pub(crate) fn require_closed(s: &ClosedSemigroup) -> Result<()> {
    if s.is_closed() {
        Ok(())
    } else {
        Err(Error::BudgetExhausted {
            partial: Box::new(s.clone()),
        })
    }
}

pub(crate) fn require_nonzero(s: &ClosedSemigroup, tol: Tol) -> Result<()> {
    if s.elements().iter().all(|m| m.is_zero(tol)) {
        Err(Error::Degenerate)
    } else {
        Ok(())
    }
}

pub(crate) fn require_partial_isometries(s: &ClosedSemigroup, tol: Tol) -> Result<()> {
    match first_non_partial_isometry(s, tol) {
        Some(i) => Err(Error::Precondition(format!("element {i} is not a partial isometry"))),
        None => Ok(()),
    }
}

pub(crate) fn require_irreducible(s: &ClosedSemigroup, tol: Tol) -> Result<()> {
    if irreducibility(s, tol).irreducible {
        Ok(())
    } else {
        Err(Error::Precondition("semigroup is reducible".into()))
    }
}
