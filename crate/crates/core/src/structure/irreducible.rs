use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closure::ClosedSemigroup;
use crate::families::complex_gaussian;
use crate::linalg::{kernel_basis, schur, CMatrix, Tol, C64};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IrreducibilityReport {
    pub irreducible: bool,
    /// Dimension of the linear span of the semigroup with `I` adjoined.
    pub algebra_dim: usize,
    /// Projection onto a common invariant subspace, when one was found.
    pub witness_subspace: Option<CMatrix>,
}

/// Incremental modified Gram–Schmidt over complex vectors.
struct Span {
    basis: Vec<Vec<C64>>,
    cutoff: f64,
}

impl Span {
    fn new(cutoff: f64) -> Self {
        Span {
            basis: Vec::new(),
            cutoff,
        }
    }

    fn len(&self) -> usize {
        self.basis.len()
    }

    fn push(&mut self, mut v: Vec<C64>) -> bool {
        let norm0 = norm(&v);
        if norm0 == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for b in &self.basis {
                let c: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let rest = norm(&v);
        if rest <= self.cutoff * norm0.max(1.0) {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= rest);
        self.basis.push(v);
        true
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn span_cutoff(tol: Tol) -> f64 {
    tol.eps().sqrt().max(1e-8)
}

/// Burnside test: the span of `S ∪ {I}` is an algebra, and it is irreducible exactly
/// when it is all of `M_n`.
pub fn irreducibility(s: &ClosedSemigroup, tol: Tol) -> IrreducibilityReport {
    let n = s.dim();
    let full = n * n;
    let mut span = Span::new(span_cutoff(tol));
    span.push(CMatrix::identity(n).row_major());
    for m in s.elements() {
        if span.len() == full {
            break;
        }
        span.push(m.row_major());
    }
    let algebra_dim = span.len();
    let irreducible = algebra_dim == full;
    let witness_subspace = if irreducible {
        None
    } else {
        find_invariant_subspace(s, tol)
    };
    IrreducibilityReport {
        irreducible,
        algebra_dim,
        witness_subspace,
    }
}

/// Dimension of `span{x, Ax : A ∈ S}`, the smallest invariant subspace containing `x`.
pub fn orbit_dimension(s: &ClosedSemigroup, x: &CMatrix, tol: Tol) -> usize {
    let n = s.dim();
    let mut span = Span::new(span_cutoff(tol));
    span.push(x.row_major());
    for m in s.elements() {
        if span.len() == n {
            break;
        }
        span.push((m * x).row_major());
    }
    span.len()
}

/// Projection onto `span{x, Ax : A ∈ S}`, or `None` if that is everything.
fn orbit_projection(s: &ClosedSemigroup, x: &CMatrix, tol: Tol) -> Option<CMatrix> {
    let n = s.dim();
    let mut span = Span::new(span_cutoff(tol));
    span.push(x.row_major());
    for m in s.elements() {
        if span.len() == n {
            return None;
        }
        span.push((m * x).row_major());
    }
    if span.len() == n || span.len() == 0 {
        return None;
    }
    let cols: Vec<CMatrix> = span.basis.iter().map(|v| CMatrix::from_fn(n, 1, |i, _| v[i])).collect();
    let b = CMatrix::hstack(&cols);
    Some(&b * &b.adjoint())
}

fn is_invariant(s: &ClosedSemigroup, p: &CMatrix, tol: Tol) -> bool {
    let q = &CMatrix::identity(s.dim()) - p;
    s.elements()
        .iter()
        .all(|m| (&(&q * m) * p).frobenius_norm() <= tol.eps())
}

/// Candidate vectors: standard basis vectors, then eigenvectors of a seeded random
/// element of the algebra. An invariant subspace of the adjoint algebra is turned
/// around by taking its orthogonal complement.
fn find_invariant_subspace(s: &ClosedSemigroup, tol: Tol) -> Option<CMatrix> {
    let n = s.dim();
    let check_tol = Tol::new(tol.eps().max(s.work_tol().eps()).max(1e-9) * n as f64).ok()?;
    let id = CMatrix::identity(n);
    let adjoint = adjoint_semigroup(s);

    for i in 0..n {
        let x = id.columns(i, 1);
        if let Some(p) = orbit_projection(s, &x, tol) {
            if is_invariant(s, &p, check_tol) {
                return Some(p);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let coeffs = complex_gaussian(s.len(), 1, &mut rng);
    let a = s
        .elements()
        .iter()
        .enumerate()
        .fold(CMatrix::zeros(n, n), |acc, (i, m)| &acc + &m.scale(coeffs.get(i, 0)));
    for (target, sg) in [(false, s), (true, &adjoint)] {
        let a = if target { a.adjoint() } else { a.clone() };
        for x in eigenvectors(&a) {
            if let Some(p) = orbit_projection(sg, &x, tol) {
                let p = if target { &id - &p } else { p };
                if is_invariant(s, &p, check_tol) {
                    return Some(p);
                }
            }
        }
    }
    None
}

fn adjoint_semigroup(s: &ClosedSemigroup) -> ClosedSemigroup {
    let elements = s
        .elements()
        .iter()
        .zip(s.words())
        .map(|(m, w)| (m.adjoint(), w.clone()))
        .collect();
    let gens = s.generators().iter().map(CMatrix::adjoint).collect();
    ClosedSemigroup::from_parts(gens, elements, s.status(), s.work_tol()).expect("same shapes as input")
}

/// One eigenvector per eigenvalue (eigenvalues from the Schur form).
fn eigenvectors(a: &CMatrix) -> Vec<CMatrix> {
    let n = a.rows();
    let Ok((_, t)) = schur(a) else {
        return Vec::new();
    };
    let loose = Tol::new(1e-7).expect("valid");
    let mut seen: Vec<C64> = Vec::new();
    let mut out = Vec::new();
    for i in 0..n {
        let lambda = t.get(i, i);
        if seen.iter().any(|mu| (mu - lambda).norm() < 1e-6) {
            continue;
        }
        seen.push(lambda);
        let shifted = a - &CMatrix::identity(n).scale(lambda);
        let k = kernel_basis(&shifted, loose);
        if k.cols() > 0 {
            out.push(k.columns(0, 1));
        }
    }
    out
}
