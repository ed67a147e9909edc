//! Power partial isometries and their finite-dimensional Halmos–Wallen decomposition:
//! a unitary summand plus an orthogonal sum of truncated shifts.

use serde::{Deserialize, Serialize};

use crate::closure::{with_adjoints, ClosedSemigroup, ClosureBudget, ClosureEngine};
use crate::error::{Error, Result};
use crate::families::truncated_shift;
use crate::linalg::{
    clean_projection, is_partial_isometry, projection_meet, range_projection, rank, spectral_basis, CMatrix, Tol,
};

/// `T = basis · (U ⊕ J_{s_1} ⊕ … ⊕ J_{s_m}) · basis*` with `s_1 >= s_2 >= …`.
#[derive(Clone, Debug)]
pub struct HwDecomposition {
    pub unitary_dim: usize,
    pub shift_sizes: Vec<usize>,
    /// Unitary change of basis: unitary part first, then one Jordan chain per shift,
    /// longest first, each chain ordered `v, Tv, T²v, …`.
    pub basis: CMatrix,
    /// The unitary summand in the leading `unitary_dim` basis vectors.
    pub unitary_block: CMatrix,
}

/// Serializable summary of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summands {
    pub unitary_dim: usize,
    pub shift_sizes: Vec<usize>,
}

impl HwDecomposition {
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn summands(&self) -> Summands {
        Summands {
            unitary_dim: self.unitary_dim,
            shift_sizes: self.shift_sizes.clone(),
        }
    }

    /// The canonical block-diagonal form.
    pub fn block_diagonal(&self) -> CMatrix {
        let mut m = self.unitary_block.clone();
        for &s in &self.shift_sizes {
            m = if m.rows() == 0 {
                truncated_shift(s)
            } else {
                m.direct_sum(&truncated_shift(s))
            };
        }
        m
    }

    pub fn reconstruct(&self) -> CMatrix {
        &(&self.basis * &self.block_diagonal()) * &self.basis.adjoint()
    }
}

fn require_square(t: &CMatrix) -> Result<()> {
    if t.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            t.rows(),
            t.cols()
        )))
    }
}

/// Smallest `k` in `1..=n` for which `T^k` is not a partial isometry.
pub fn first_failing_power(t: &CMatrix, tol: Tol) -> Result<Option<usize>> {
    require_square(t)?;
    let mut power = t.clone();
    for k in 1..=t.rows() {
        if !is_partial_isometry(&power, tol)? {
            return Ok(Some(k));
        }
        power = &power * t;
    }
    Ok(None)
}

/// Checks `T^k` for `k = 1..=n`; nilpotent summands die by power `n`, so that suffices.
pub fn is_power_partial_isometry(t: &CMatrix, tol: Tol) -> Result<bool> {
    Ok(first_failing_power(t, tol)?.is_none())
}

pub fn halmos_wallen(t: &CMatrix, tol: Tol) -> Result<HwDecomposition> {
    if let Some(power) = first_failing_power(t, tol)? {
        return Err(Error::NotPowerPartialIsometry { power });
    }
    let n = t.rows();
    let id = CMatrix::identity(n);
    let top = t.pow(n as u32);

    // Unitary part: ran T^n ∧ ran (T*)^n.
    let unitary_proj = projection_meet(
        &range_projection(&top, tol)?,
        &range_projection(&top.adjoint(), tol)?,
        tol,
    );
    let unitary_basis = spectral_basis(&unitary_proj, 0.5);
    let unitary_dim = unitary_basis.cols();

    // Chain heads live in ker T*, graded by the kernel filtration ker T ⊆ ker T² ⊆ ….
    let heads = &id - &range_projection(t, tol)?;
    let mut previous = CMatrix::zeros(n, n);
    let mut graded = Vec::with_capacity(n);
    let mut power = t.clone();
    for _ in 1..=n {
        let kernel = &id - &range_projection(&power.adjoint(), tol)?;
        let level = clean_projection(&projection_meet(&heads, &kernel, tol));
        let fresh = clean_projection(&(&level - &previous));
        graded.push(spectral_basis(&fresh, 0.5));
        previous = level;
        power = &power * t;
    }

    let mut columns = vec![unitary_basis.clone()];
    let mut shift_sizes = Vec::new();
    for s in (1..=n).rev() {
        let seeds = &graded[s - 1];
        for c in 0..seeds.cols() {
            let mut v = seeds.columns(c, 1);
            for _ in 0..s {
                columns.push(v.clone());
                v = t * &v;
            }
            shift_sizes.push(s);
        }
    }
    let basis = CMatrix::hstack(&columns);
    if basis.cols() != n {
        return Err(Error::violation_with(
            "halmos-wallen",
            format!("unitary part ({unitary_dim}) and shifts {shift_sizes:?} do not fill dimension {n}"),
            t,
        ));
    }
    let unitary_block = t.compress(&unitary_basis);
    let hw = HwDecomposition {
        unitary_dim,
        shift_sizes,
        basis,
        unitary_block,
    };
    let slack = n as f64 * tol.eps().max(1e-12);
    let orth = (&(&hw.basis.adjoint() * &hw.basis) - &id).frobenius_norm();
    let recon = hw.reconstruct().distance(t);
    if orth > slack || recon > slack {
        return Err(Error::violation_with(
            "halmos-wallen",
            format!("basis defect {orth:.3e}, reconstruction error {recon:.3e}"),
            t,
        ));
    }
    Ok(hw)
}

/// Closes `S(T, T*)` and reports whether every element is a partial isometry.
///
/// A non-partial-isometry element settles the answer as soon as it appears. Otherwise
/// the answer is `true` once the closure completes, and a budget error carrying the
/// partial closure if it does not.
pub fn ppi_semigroup_check(t: &CMatrix, tol: Tol, budget: ClosureBudget) -> Result<bool> {
    require_square(t)?;
    let mut engine = ClosureEngine::new(&with_adjoints(std::slice::from_ref(t)), tol, budget)?;
    let work_tol = engine.semigroup().work_tol();
    while let Some(added) = engine.step() {
        let s = engine.semigroup();
        for idx in added {
            if !is_partial_isometry(&s.elements()[idx], work_tol)? {
                return Ok(false);
            }
        }
    }
    let s: ClosedSemigroup = engine.into_semigroup();
    if s.is_closed() {
        Ok(true)
    } else {
        Err(Error::BudgetExhausted { partial: Box::new(s) })
    }
}

/// Rank sequence `rank T^k`, `k = 1..=n`; a quick fingerprint of the nilpotent structure.
pub fn power_ranks(t: &CMatrix, tol: Tol) -> Vec<usize> {
    let mut out = Vec::with_capacity(t.rows());
    let mut power = t.clone();
    for _ in 0..t.rows() {
        out.push(rank(&power, tol));
        power = &power * t;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{haar_unitary, truncated_shift};
    use crate::linalg::C64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ppi_examples() {
        let tol = Tol::default();
        assert!(is_power_partial_isometry(&truncated_shift(3), tol).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(is_power_partial_isometry(&haar_unitary(4, &mut rng), tol).unwrap());
        let bad = CMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!(!is_power_partial_isometry(&bad, tol).unwrap());
        assert!(is_power_partial_isometry(&CMatrix::zeros(2, 3), tol).is_err());
    }

    #[test]
    fn shift_is_already_canonical() {
        let hw = halmos_wallen(&truncated_shift(3), Tol::default()).unwrap();
        assert_eq!(hw.unitary_dim, 0);
        assert_eq!(hw.shift_sizes, vec![3]);
        assert!(hw.reconstruct().distance(&truncated_shift(3)) < 1e-12);
    }

    #[test]
    fn diagonal_unitary_is_all_unitary() {
        let t = CMatrix::diag(&[C64::new(0.0, 1.0), C64::new(-1.0, 0.0)]);
        let hw = halmos_wallen(&t, Tol::default()).unwrap();
        assert_eq!(hw.unitary_dim, 2);
        assert!(hw.shift_sizes.is_empty());
    }

    #[test]
    fn conjugated_direct_sum_is_recovered() {
        let tol = Tol::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u2 = haar_unitary(2, &mut rng);
        let block = u2.direct_sum(&truncated_shift(2)).direct_sum(&truncated_shift(3));
        let w = haar_unitary(7, &mut rng);
        let t = &(&w * &block) * &w.adjoint();
        let hw = halmos_wallen(&t, tol).unwrap();
        assert_eq!(hw.unitary_dim, 2);
        assert_eq!(hw.shift_sizes, vec![3, 2]);
        assert!(hw.reconstruct().distance(&t) <= 7.0 * tol.eps());
        assert!((&(&hw.basis.adjoint() * &hw.basis) - &CMatrix::identity(7)).frobenius_norm() <= 7.0 * tol.eps());
    }

    #[test]
    fn non_ppi_is_rejected() {
        let bad = CMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!(matches!(
            halmos_wallen(&bad, Tol::default()),
            Err(Error::NotPowerPartialIsometry { power: 1 })
        ));
    }

    #[test]
    fn zero_matrix_is_shifts_of_size_one() {
        let hw = halmos_wallen(&CMatrix::zeros(3, 3), Tol::default()).unwrap();
        assert_eq!(hw.unitary_dim, 0);
        assert_eq!(hw.shift_sizes, vec![1, 1, 1]);
    }

    #[test]
    fn semigroup_check_examples() {
        let tol = Tol::default();
        let budget = ClosureBudget::default();
        assert!(ppi_semigroup_check(&CMatrix::basic(2, 0, 1), tol, budget).unwrap());
        assert!(ppi_semigroup_check(&truncated_shift(3), tol, budget).unwrap());
        let bad = CMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!(!ppi_semigroup_check(&bad, tol, budget).unwrap());
    }

    #[test]
    fn semigroup_check_reports_budget() {
        // An irrational rotation generates an infinite group of partial isometries.
        let t = CMatrix::diag(&[C64::from_polar(1.0, 1.0)]);
        let budget = ClosureBudget::new(50, 1000).unwrap();
        match ppi_semigroup_check(&t, Tol::default(), budget) {
            Err(Error::BudgetExhausted { partial }) => assert_eq!(partial.len(), 50),
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn power_rank_fingerprint() {
        let t = truncated_shift(3).direct_sum(&CMatrix::identity(1));
        assert_eq!(power_ranks(&t, Tol::default()), vec![3, 2, 1, 1]);
    }
}
