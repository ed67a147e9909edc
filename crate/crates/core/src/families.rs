//! Canonical generator families and random constructions.
//!
//! These are the running examples: basic matrices, truncated shifts, tensor products of
//! the basic-matrix semigroup with a unitary group, Pauli and Weyl–Heisenberg groups,
//! and block-monomial (zero-unitary) semigroups.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, C64};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Lower truncated shift `J_s`: ones on the first subdiagonal, so `J e_i = e_{i+1}`.
pub fn truncated_shift(s: usize) -> CMatrix {
    CMatrix::from_fn(s, s, |i, j| if i == j + 1 { re(1.0) } else { re(0.0) })
}

pub fn root_of_unity(order: usize, power: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (power % order.max(1)) as f64 / order.max(1) as f64)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> CMatrix {
    let z = re(0.0);
    CMatrix::from_row_major(2, 2, &[z, C64::new(0.0, -1.0), C64::new(0.0, 1.0), z]).unwrap()
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

/// Cyclic shift `X e_j = e_{j+1 mod n}` and clock `Z = diag(ω^j)`.
pub fn weyl_heisenberg(n: usize) -> (CMatrix, CMatrix) {
    let shift = CMatrix::from_fn(n, n, |i, j| if i == (j + 1) % n { re(1.0) } else { re(0.0) });
    let clock = CMatrix::diag(&(0..n).map(|j| root_of_unity(n, j)).collect::<Vec<_>>());
    (shift, clock)
}

/// Generators `E_ij ⊗ g` of the tensor product of the `r×r` basic-matrix semigroup
/// with the group generated by `group_generators`.
pub fn tensor_example(r: usize, group_generators: &[CMatrix]) -> Vec<CMatrix> {
    let mut out = Vec::new();
    for i in 0..r {
        for j in 0..r {
            for g in group_generators {
                out.push(CMatrix::basic(r, i, j).kron(g));
            }
        }
    }
    out
}

/// Generating sets for small irreducible unitary groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmallGroup {
    /// Scalars of order `m` (degree 1).
    Cyclic(usize),
    /// Symmetric group on three letters in its 2-dimensional representation (order 6).
    S3,
    /// Dihedral group of the square, generated by Pauli X and Z (order 8).
    D4,
    /// Quaternion group, generated by iX and iZ (order 8).
    Q8,
    /// Alternating group on four letters in its 3-dimensional representation (order 12).
    A4,
}

impl SmallGroup {
    pub fn degree(self) -> usize {
        match self {
            SmallGroup::Cyclic(_) => 1,
            SmallGroup::S3 | SmallGroup::D4 | SmallGroup::Q8 => 2,
            SmallGroup::A4 => 3,
        }
    }

    pub fn order(self) -> usize {
        match self {
            SmallGroup::Cyclic(m) => m,
            SmallGroup::S3 => 6,
            SmallGroup::D4 | SmallGroup::Q8 => 8,
            SmallGroup::A4 => 12,
        }
    }

    pub fn generators(self) -> Vec<CMatrix> {
        match self {
            SmallGroup::Cyclic(m) => vec![CMatrix::diag(&[root_of_unity(m, 1)])],
            SmallGroup::S3 => {
                let (c, s) = ((2.0 * PI / 3.0).cos(), (2.0 * PI / 3.0).sin());
                vec![
                    CMatrix::from_real_rows(&[&[c, -s], &[s, c]]),
                    CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
                ]
            }
            SmallGroup::D4 => vec![pauli_x(), pauli_z()],
            SmallGroup::Q8 => {
                let i = C64::new(0.0, 1.0);
                vec![pauli_x().scale(i), pauli_z().scale(i)]
            }
            SmallGroup::A4 => vec![
                CMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, -1.0]]),
                CMatrix::from_real_rows(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]),
            ],
        }
    }

    /// Irreducible groups of order at most 12 for the given degree.
    pub fn of_degree(degree: usize) -> Vec<SmallGroup> {
        match degree {
            1 => (1..=8).map(SmallGroup::Cyclic).collect(),
            2 => vec![SmallGroup::S3, SmallGroup::D4, SmallGroup::Q8],
            3 => vec![SmallGroup::A4],
            _ => Vec::new(),
        }
    }
}

/// `E_ij ⊗ block` inside a `k`-block matrix (zero-based block indices).
pub fn block_unit(k: usize, i: usize, j: usize, block: &CMatrix) -> CMatrix {
    CMatrix::basic(k, i, j).kron(block)
}

/// Generators of `S_0^k(U)`: nearest-neighbour block transfers plus `E_11 ⊗ g`.
pub fn zero_unitary_generators(k: usize, group_generators: &[CMatrix]) -> Vec<CMatrix> {
    let r = group_generators[0].rows();
    let id = CMatrix::identity(r);
    let mut gens = Vec::new();
    for i in 0..k.saturating_sub(1) {
        gens.push(block_unit(k, i + 1, i, &id));
        gens.push(block_unit(k, i, i + 1, &id));
    }
    for g in group_generators {
        gens.push(block_unit(k, 0, 0, g));
    }
    if k == 1 && gens.is_empty() {
        gens.push(id);
    }
    gens
}

/// Block-monomial matrix: block `(targets[j], j)` carries `labels[j]` for every
/// `j` with `targets[j] = Some(_)`.
pub fn block_monomial(targets: &[Option<usize>], labels: &[CMatrix]) -> CMatrix {
    let k = targets.len();
    let r = labels[0].rows();
    let mut m = CMatrix::zeros(k * r, k * r);
    for (j, t) in targets.iter().enumerate() {
        if let Some(i) = *t {
            for a in 0..r {
                for b in 0..r {
                    m.set(i * r + a, j * r + b, labels[j].get(a, b));
                }
            }
        }
    }
    m
}

pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        C64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix with phase correction.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let z = complex_gaussian(n, n, rng).into_dmatrix();
    let qr = z.qr();
    let q = qr.q();
    let r = qr.r();
    let phases: Vec<C64> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                re(1.0)
            }
        })
        .collect();
    CMatrix::from_dmatrix(q).mul_diag(&phases)
}

/// Unitary of finite order: random eigenbasis, eigenvalues drawn from the `order`-th roots of unity.
pub fn finite_order_unitary<R: Rng + ?Sized>(n: usize, order: usize, rng: &mut R) -> CMatrix {
    let v = haar_unitary(n, rng);
    let d = CMatrix::diag(
        &(0..n)
            .map(|_| root_of_unity(order, rng.random_range(0..order)))
            .collect::<Vec<_>>(),
    );
    &(&v * &d) * &v.adjoint()
}

/// A power partial isometry with known summands, randomly conjugated.
#[derive(Clone, Debug)]
pub struct PlantedPpi {
    pub matrix: CMatrix,
    pub unitary_dim: usize,
    /// Descending.
    pub shift_sizes: Vec<usize>,
}

/// `U ⊕ J_{s_1} ⊕ … ⊕ J_{s_m}` conjugated by a Haar unitary. The unitary part has
/// finite order (at most 8) so that the generated semigroup is finite.
pub fn planted_ppi<R: Rng + ?Sized>(max_dim: usize, rng: &mut R) -> PlantedPpi {
    let n = rng.random_range(1..=max_dim);
    let unitary_dim = rng.random_range(0..=n);
    let mut rest = n - unitary_dim;
    let mut shift_sizes = Vec::new();
    while rest > 0 {
        let s = rng.random_range(1..=rest);
        shift_sizes.push(s);
        rest -= s;
    }
    shift_sizes.sort_unstable_by(|a, b| b.cmp(a));
    let mut m: Option<CMatrix> = None;
    let mut push = |block: CMatrix| {
        m = Some(match m.take() {
            None => block,
            Some(acc) => acc.direct_sum(&block),
        });
    };
    if unitary_dim > 0 {
        let order = rng.random_range(1..=8);
        push(finite_order_unitary(unitary_dim, order, rng));
    }
    for &s in &shift_sizes {
        push(truncated_shift(s));
    }
    let block = m.expect("n >= 1");
    let w = haar_unitary(n, rng);
    PlantedPpi {
        matrix: &(&w * &block) * &w.adjoint(),
        unitary_dim,
        shift_sizes,
    }
}

/// Random partial isometry `W P V*` of rank `r`, with Haar `W`, `V`.
pub fn random_partial_isometry<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> CMatrix {
    let w = haar_unitary(n, rng);
    let v = haar_unitary(n, rng);
    let p = CMatrix::diag(&(0..n).map(|i| re(if i < r { 1.0 } else { 0.0 })).collect::<Vec<_>>());
    &(&w * &p) * &v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_unitary, Tol};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..6 {
            assert!(is_unitary(&haar_unitary(n, &mut rng), Tol::new(1e-12).unwrap()));
        }
    }

    #[test]
    fn small_group_generators_are_unitary() {
        for deg in 1..=3 {
            for g in SmallGroup::of_degree(deg) {
                for m in g.generators() {
                    assert_eq!(m.rows(), g.degree());
                    assert!(is_unitary(&m, Tol::default()));
                }
            }
        }
    }

    #[test]
    fn shift_shape() {
        let j = truncated_shift(3);
        assert_eq!(j.get(1, 0), re(1.0));
        assert_eq!(j.get(2, 1), re(1.0));
        assert_eq!(j.get(0, 1), re(0.0));
    }
}
