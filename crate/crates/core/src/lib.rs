//! Finite-dimensional semigroups of partial isometries.
//!
//! Close matrix generators into semigroups, check the structural laws such semigroups
//! obey, and extract their canonical structure: Halmos–Wallen summands of power partial
//! isometries, the enveloping band of projections, the atomic (weighted composition)
//! representation, and the zero-unitary block form `S_0^k(U) ⊆ S ⊆ S_1^k(U)`.

pub mod band;
pub mod cli;
pub mod closure;
pub mod error;
pub mod families;
pub mod linalg;
pub mod powerpi;
pub mod structure;

pub use closure::{close, close_selfadjoint, ClosedSemigroup, ClosureBudget, ClosureStatus};
pub use error::{Error, Result};
pub use linalg::{CMatrix, Tol, C64};
