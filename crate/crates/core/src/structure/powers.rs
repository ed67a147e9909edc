use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{is_unitary, schur, CMatrix, Tol};

pub const DEFAULT_EPS_TARGET: f64 = 1e-6;
pub const DEFAULT_N_MAX: u64 = 100_000;
/// Looser target tried when the default search exhausts.
pub const FALLBACK_EPS_TARGET: f64 = 1e-3;

/// Least `n` in `1..=n_max` with `‖Uⁿ − I‖ ≤ eps_target`.
///
/// The scan runs on the eigenphases, where `‖Uⁿ − I‖² = Σ |2 sin(nθ/2)|²`; each hit is
/// confirmed on the matrix power itself before it is returned.
pub fn approximate_identity_power(u: &CMatrix, eps_target: f64, n_max: u64) -> Result<u64> {
    if !(eps_target.is_finite() && eps_target > 0.0) || n_max == 0 {
        return Err(Error::Precondition("eps_target and n_max must be positive".into()));
    }
    let n = u.rows();
    let unit_tol = Tol::new(1e-8 * n.max(1) as f64).map_err(|_| Error::Precondition("dimension too large".into()))?;
    if !is_unitary(u, unit_tol) {
        return Err(Error::Precondition("U is not unitary".into()));
    }
    let (_, t) = schur(u)?;
    let phases: Vec<f64> = (0..n).map(|i| t.get(i, i).arg()).collect();
    let id = CMatrix::identity(n);
    // Slack lets borderline candidates through to the exact check.
    let screen = (eps_target * (1.0 + 1e-6) + 1e-13).powi(2);
    for k in 1..=n_max {
        let est: f64 = phases
            .iter()
            .map(|&theta| {
                let half = ((k as f64) * theta / 2.0) % PI;
                (2.0 * half.sin()).powi(2)
            })
            .sum();
        if est <= screen && (&u.pow(k as u32) - &id).frobenius_norm() <= eps_target {
            return Ok(k);
        }
    }
    Err(Error::SearchExhausted { n_max, eps_target })
}
