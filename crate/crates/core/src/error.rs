use thiserror::Error;

use crate::closure::ClosedSemigroup;
use crate::linalg::CMatrix;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("invalid tolerance {0}: expected 0 <= eps < 1")]
    InvalidTolerance(f64),

    #[error("not a partial isometry (defect {defect:.3e})")]
    NotPartialIsometry { defect: f64 },

    #[error("not a power partial isometry: power {power} is not a partial isometry")]
    NotPowerPartialIsometry { power: usize },

    #[error("projections #{first} and #{second} do not commute (defect {defect:.3e})")]
    Commutativity { first: usize, second: usize, defect: f64 },

    #[error("claim violated: {0}")]
    ClaimViolation(String),

    /// A structural theorem failed on an input satisfying its hypotheses.
    /// Either numerical breakdown or a bug; the witness is kept for reproduction.
    #[error("theorem violated [{theorem}]: {detail}")]
    TheoremViolation {
        theorem: &'static str,
        detail: String,
        witness: Option<Box<CMatrix>>,
    },

    #[error("closure budget exhausted with {} elements found", partial.len())]
    BudgetExhausted { partial: Box<ClosedSemigroup> },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("degenerate semigroup: every element is zero")]
    Degenerate,

    #[error("no n <= {n_max} with ||U^n - I|| <= {eps_target:e}")]
    SearchExhausted { n_max: u64, eps_target: f64 },

    #[error("{atoms} atoms exceed the enumeration cap of {cap}")]
    TooManyAtoms { atoms: usize, cap: usize },

    #[error("numerical routine failed: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn violation(theorem: &'static str, detail: impl Into<String>) -> Self {
        Error::TheoremViolation {
            theorem,
            detail: detail.into(),
            witness: None,
        }
    }

    pub(crate) fn violation_with(theorem: &'static str, detail: impl Into<String>, witness: &CMatrix) -> Self {
        Error::TheoremViolation {
            theorem,
            detail: detail.into(),
            witness: Some(Box::new(witness.clone())),
        }
    }

    /// True for the outcomes a caller should treat as "not decided" rather than failed.
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Error::BudgetExhausted { .. } | Error::SearchExhausted { .. })
    }
}
