//! Dense complex matrices and the operator predicates the rest of the crate is built on.
//!
//! All approximate equalities are measured in the Frobenius norm. Projections handed
//! out by this module are cleaned to exact Hermitian idempotents (spectral projection
//! onto the eigenvalues above 1/2) so that Boolean arithmetic on them stays at machine
//! precision.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default tolerance for inputs assumed exact.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Frobenius-norm threshold used for every approximate equality.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Tol(f64);

impl Tol {
    pub fn new(eps: f64) -> Result<Self> {
        if eps.is_finite() && (0.0..1.0).contains(&eps) {
            Ok(Tol(eps))
        } else {
            Err(Error::InvalidTolerance(eps))
        }
    }

    pub fn eps(self) -> f64 {
        self.0
    }

    /// Multiplies the threshold, saturating just below 1.
    pub fn scaled(self, factor: f64) -> Tol {
        Tol((self.0 * factor).min(0.999_999))
    }
}

impl Default for Tol {
    fn default() -> Self {
        Tol(DEFAULT_EPS)
    }
}

/// Dense complex matrix, row-major in its public constructors.
#[derive(Clone, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Serialized as an array of rows, each an array of `[re, im]` pairs.
impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows())
            .map(|i| {
                (0..self.cols())
                    .map(|j| [self.get(i, j).re, self.get(i, j).im])
                    .collect()
            })
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(D::Error::custom("matrix rows have different lengths"));
        }
        if rows.is_empty() || cols == 0 {
            return Ok(CMatrix::zeros(rows.len(), 0));
        }
        let entries: Vec<C64> = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
        CMatrix::from_row_major(rows.len(), cols, &entries).map_err(D::Error::custom)
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(DMatrix::identity(n, n))
    }

    /// Basic matrix `E_ij` of size `n` (indices are zero-based).
    pub fn basic(n: usize, i: usize, j: usize) -> Self {
        assert!(i < n && j < n, "basic matrix index out of range");
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = C64::new(1.0, 0.0);
        CMatrix(m)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        CMatrix(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix must have positive size".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMatrix(DMatrix::from_row_slice(rows, cols, entries)))
    }

    /// Convenience constructor for real matrices given as rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        CMatrix::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        CMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Self {
        CMatrix(m)
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    pub fn row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        CMatrix(self.0.adjoint())
    }

    /// `self · diag(d)`.
    pub fn mul_diag(&self, d: &[C64]) -> Self {
        CMatrix::from_fn(self.rows(), self.cols(), |i, j| self.get(i, j) * d[j])
    }

    pub fn scale(&self, z: C64) -> Self {
        CMatrix(&self.0 * z)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn kron(&self, other: &CMatrix) -> Self {
        CMatrix(self.0.kronecker(&other.0))
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &CMatrix) -> Self {
        let (r1, c1) = (self.rows(), self.cols());
        let mut m = DMatrix::zeros(r1 + other.rows(), c1 + other.cols());
        m.view_mut((0, 0), (r1, c1)).copy_from(&self.0);
        m.view_mut((r1, c1), (other.rows(), other.cols())).copy_from(&other.0);
        CMatrix(m)
    }

    /// Horizontal concatenation of matrices with equal row counts.
    pub fn hstack(parts: &[CMatrix]) -> Self {
        let rows = parts.first().map_or(0, CMatrix::rows);
        let cols = parts.iter().map(CMatrix::cols).sum();
        let mut m = DMatrix::zeros(rows, cols);
        let mut at = 0;
        for p in parts {
            assert_eq!(p.rows(), rows, "hstack row mismatch");
            m.view_mut((0, at), (rows, p.cols())).copy_from(&p.0);
            at += p.cols();
        }
        CMatrix(m)
    }

    pub fn columns(&self, start: usize, count: usize) -> Self {
        CMatrix(self.0.columns(start, count).into_owned())
    }

    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Self {
        CMatrix(self.0.view((row, col), (rows, cols)).into_owned())
    }

    /// `basis* · self · basis`.
    pub fn compress(&self, basis: &CMatrix) -> Self {
        CMatrix(basis.0.adjoint() * &self.0 * &basis.0)
    }

    /// `L* A R`.
    pub fn compress_between(&self, left: &CMatrix, right: &CMatrix) -> Self {
        &(&left.adjoint() * self) * right
    }

    pub fn hermitian_part(&self) -> Self {
        CMatrix((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn pow(&self, k: u32) -> Self {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut result = DMatrix::identity(self.rows(), self.rows());
        let mut base = self.0.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        CMatrix(result)
    }

    pub fn commutator_norm(&self, other: &CMatrix) -> f64 {
        (&(self * other) - &(other * self)).frobenius_norm()
    }

    pub fn distance(&self, other: &CMatrix) -> f64 {
        (self - other).frobenius_norm()
    }

    pub fn is_zero(&self, tol: Tol) -> bool {
        self.frobenius_norm() <= tol.eps()
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix(-&self.0)
    }
}

fn require_square(a: &CMatrix) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )))
    }
}

fn require_same_shape(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.rows() == b.rows() && a.cols() == b.cols() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "shape {}x{} differs from {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )))
    }
}

pub fn matrices_equal(a: &CMatrix, b: &CMatrix, tol: Tol) -> Result<bool> {
    require_same_shape(a, b)?;
    Ok(a.distance(b) <= tol.eps())
}

/// `max(‖A − A*‖, ‖A² − A‖)`.
pub fn projection_defect(a: &CMatrix) -> f64 {
    let sa = a.distance(&a.adjoint());
    let idem = (&(a * a) - a).frobenius_norm();
    sa.max(idem)
}

pub fn is_projection(a: &CMatrix, tol: Tol) -> Result<bool> {
    require_square(a)?;
    Ok(projection_defect(a) <= tol.eps())
}

/// The two partial-isometry defects: `A*A` as a projection, and `‖AA*A − A‖`.
///
/// They vanish together, but not at the same rate: for a singular value `s` the first
/// scales like `s²|s² − 1|` and the second like `s|s² − 1|`.
pub fn partial_isometry_defects(a: &CMatrix) -> (f64, f64) {
    let gram = &a.adjoint() * a;
    let first = projection_defect(&gram);
    let second = (&(&(a * &a.adjoint()) * a) - a).frobenius_norm();
    (first, second)
}

/// A partial isometry must pass both the `A*A`-projection test and the `AA*A = A` test.
pub fn is_partial_isometry(a: &CMatrix, tol: Tol) -> Result<bool> {
    require_square(a)?;
    let (first, second) = partial_isometry_defects(a);
    Ok(first <= tol.eps() && second <= tol.eps())
}

pub fn is_unitary(a: &CMatrix, tol: Tol) -> bool {
    a.is_square() && (&(&a.adjoint() * a) - &CMatrix::identity(a.rows())).frobenius_norm() <= tol.eps()
}

/// `(A*A, AA*)`, each cleaned to an exact projection.
pub fn initial_and_final_projections(a: &CMatrix, tol: Tol) -> Result<(CMatrix, CMatrix)> {
    require_square(a)?;
    if !is_partial_isometry(a, tol)? {
        let (first, second) = partial_isometry_defects(a);
        return Err(Error::NotPartialIsometry {
            defect: first.max(second),
        });
    }
    let initial = clean_projection(&(&a.adjoint() * a));
    let fin = clean_projection(&(a * &a.adjoint()));
    Ok((initial, fin))
}

/// Hermitian eigen-decomposition with eigenvalues in descending order.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = a.hermitian_part();
    let n = h.rows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(h.0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, CMatrix(vectors))
}

/// Spectral projection of the Hermitian part onto eigenvalues above `threshold`.
pub fn spectral_projection(a: &CMatrix, threshold: f64) -> CMatrix {
    let basis = spectral_basis(a, threshold);
    &basis * &basis.adjoint()
}

/// Orthonormal columns spanning the eigenvectors of the Hermitian part above `threshold`.
pub fn spectral_basis(a: &CMatrix, threshold: f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(a);
    let count = values.iter().take_while(|&&v| v > threshold).count();
    vectors.columns(0, count)
}

/// Re-symmetrizes and re-idempotizes a near-projection.
pub fn clean_projection(p: &CMatrix) -> CMatrix {
    spectral_projection(p, 0.5)
}

/// Singular values (descending) with the matching left and right singular vectors.
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(a: &CMatrix) -> Svd {
    let k = a.rows().min(a.cols());
    if k == 0 {
        return Svd {
            u: CMatrix::zeros(a.rows(), 0),
            singular_values: Vec::new(),
            v: CMatrix::zeros(a.cols(), 0),
        };
    }
    let dec = a.0.clone().svd(true, true);
    let u = dec.u.expect("svd requested u");
    let v_t = dec.v_t.expect("svd requested v_t");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| dec.singular_values[j].total_cmp(&dec.singular_values[i]));
    let singular_values = order.iter().map(|&i| dec.singular_values[i]).collect();
    let u = DMatrix::from_fn(a.rows(), k, |r, c| u[(r, order[c])]);
    let v = DMatrix::from_fn(a.cols(), k, |r, c| v_t[(order[c], r)].conj());
    let out = Svd {
        u: CMatrix(u),
        singular_values,
        v: CMatrix(v),
    };
    // The bidiagonal QR iteration occasionally returns inaccurate complex factors for
    // rank-deficient input; those are recomputed by one-sided Jacobi.
    if svd_defect(a, &out) <= 1e-12 * a.frobenius_norm().max(1.0) {
        out
    } else {
        jacobi_svd(a)
    }
}

fn svd_defect(a: &CMatrix, s: &Svd) -> f64 {
    let k = s.singular_values.len();
    let sigma = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            C64::new(s.singular_values[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let recon = (&s.u.0 * sigma * s.v.0.adjoint() - &a.0).norm();
    let id = DMatrix::<C64>::identity(k, k);
    let u_orth = (s.u.0.adjoint() * &s.u.0 - &id).norm();
    let v_orth = (s.v.0.adjoint() * &s.v.0 - &id).norm();
    recon.max(u_orth).max(v_orth)
}

/// One-sided (Hestenes) Jacobi SVD: rotates column pairs of `A V` until they are orthogonal.
fn jacobi_svd(a: &CMatrix) -> Svd {
    if a.rows() < a.cols() {
        let t = jacobi_svd(&a.adjoint());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.0.clone();
    let mut v = DMatrix::<C64>::identity(n, n);
    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut w, &mut v] {
                    for i in 0..mat.nrows() {
                        let x = mat[(i, p)];
                        let y = mat[(i, q)] * phase;
                        mat[(i, p)] = x * c - y * s;
                        mat[(i, q)] = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    // Normalize the columns; exact zero columns are completed from the standard basis.
    let mut cols: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            let mut x = w.column(j) / C64::new(norms[j], 0.0);
            for c in &cols {
                x -= c * c.dotc(&x);
            }
            let r = x.norm();
            if r > 0.5 {
                cols.push(x / C64::new(r, 0.0));
                continue;
            }
        }
        missing.push(slot);
        cols.push(nalgebra::DVector::zeros(m));
    }
    for &slot in &missing {
        for e in 0..m {
            let mut x = nalgebra::DVector::<C64>::zeros(m);
            x[e] = C64::new(1.0, 0.0);
            for (i, c) in cols.iter().enumerate() {
                if i != slot {
                    x -= c * c.dotc(&x);
                }
            }
            let r = x.norm();
            if r > 0.5 {
                cols[slot] = x / C64::new(r, 0.0);
                break;
            }
        }
    }
    Svd {
        u: CMatrix(DMatrix::from_columns(&cols)),
        singular_values: order.iter().map(|&j| norms[j]).collect(),
        v: CMatrix(DMatrix::from_fn(n, n, |r, c| v[(r, order[c])])),
    }
}

/// Cutoff below which a singular value counts as zero: `eps · max(rows, cols) · max(σ_max, 1)`.
pub fn rank_cutoff(a: &CMatrix, sigma_max: f64, tol: Tol) -> f64 {
    tol.eps() * a.rows().max(a.cols()) as f64 * sigma_max.max(1.0)
}

pub fn rank(a: &CMatrix, tol: Tol) -> usize {
    let dec = svd(a);
    let top = dec.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = rank_cutoff(a, top, tol);
    dec.singular_values.iter().filter(|&&s| s > cutoff).count()
}

/// Orthonormal basis (as columns) of the column space of `a`.
pub fn range_basis(a: &CMatrix, tol: Tol) -> CMatrix {
    let dec = svd(a);
    let top = dec.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = rank_cutoff(a, top, tol);
    let r = dec.singular_values.iter().filter(|&&s| s > cutoff).count();
    dec.u.columns(0, r)
}

/// Orthogonal projection onto the column space of a square matrix.
pub fn range_projection(a: &CMatrix, tol: Tol) -> Result<CMatrix> {
    require_square(a)?;
    let basis = range_basis(a, tol);
    Ok(&basis * &basis.adjoint())
}

/// Orthonormal basis of the kernel of a square matrix.
pub fn kernel_basis(a: &CMatrix, tol: Tol) -> CMatrix {
    let complement = &CMatrix::identity(a.cols()) - &range_projection_unchecked(&a.adjoint(), tol);
    spectral_basis(&complement, 0.5)
}

fn range_projection_unchecked(a: &CMatrix, tol: Tol) -> CMatrix {
    let basis = range_basis(a, tol);
    &basis * &basis.adjoint()
}

/// Projection onto `ran P ∩ ran Q`: eigenvalue-one spectral projection of `PQP`.
pub fn projection_meet(p: &CMatrix, q: &CMatrix, tol: Tol) -> CMatrix {
    let n = p.rows();
    let pqp = &(p * q) * p;
    let slack = (10.0 * n as f64 * tol.eps()).max(1e-12);
    spectral_projection(&pqp, 1.0 - slack)
}

/// Unitary factor of the polar decomposition `A = W |A|` of a square matrix.
pub fn polar_unitary(a: &CMatrix) -> CMatrix {
    let dec = svd(a);
    &dec.u * &dec.v.adjoint()
}

/// Complex Schur form `A = Q T Q*`; for a normal matrix `T` is diagonal.
pub fn schur(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    require_square(a)?;
    let s = Schur::try_new(a.0.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (q, t) = s.unpack();
    Ok((CMatrix(q), CMatrix(t)))
}
