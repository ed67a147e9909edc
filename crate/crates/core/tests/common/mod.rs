//! Shared test zoo and independent numerical oracles.
#![allow(dead_code)]

use nalgebra::DMatrix;
use pisemi::families::{
    haar_unitary, planted_ppi, tensor_example, truncated_shift, weyl_heisenberg, zero_unitary_generators, SmallGroup,
};
use pisemi::{close_selfadjoint, CMatrix, ClosedSemigroup, ClosureBudget, Tol, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct ZooEntry {
    pub name: String,
    pub generators: Vec<CMatrix>,
    pub semigroup: ClosedSemigroup,
}

pub fn conjugate(m: &CMatrix, w: &CMatrix) -> CMatrix {
    &(w * m) * &w.adjoint()
}

fn lift_left(g: &CMatrix, other_dim: usize) -> CMatrix {
    g.direct_sum(&CMatrix::zeros(other_dim, other_dim))
}

fn lift_right(g: &CMatrix, other_dim: usize) -> CMatrix {
    CMatrix::zeros(other_dim, other_dim).direct_sum(g)
}

/// Generating sets for the zoo of closed self-adjoint partial-isometry semigroups.
pub fn zoo_generators() -> Vec<(String, Vec<CMatrix>)> {
    let mut out: Vec<(String, Vec<CMatrix>)> = Vec::new();
    let groups = [
        SmallGroup::Cyclic(1),
        SmallGroup::Cyclic(2),
        SmallGroup::Cyclic(3),
        SmallGroup::Cyclic(4),
        SmallGroup::S3,
        SmallGroup::D4,
        SmallGroup::Q8,
    ];
    for r in 1..=3 {
        for g in groups {
            out.push((format!("tensor r={r} {g:?}"), tensor_example(r, &g.generators())));
        }
    }
    for r in 1..=2 {
        out.push((
            format!("tensor r={r} A4"),
            tensor_example(r, &SmallGroup::A4.generators()),
        ));
    }
    for k in 2..=4 {
        for g in [SmallGroup::Cyclic(3), SmallGroup::S3, SmallGroup::Q8] {
            out.push((
                format!("zero-unitary k={k} {g:?}"),
                zero_unitary_generators(k, &g.generators()),
            ));
        }
    }
    out.push((
        "multiplicity M2 x I2".into(),
        tensor_example(2, &[CMatrix::identity(2)]),
    ));
    out.push((
        "multiplicity M2 x I3".into(),
        tensor_example(2, &[CMatrix::identity(3)]),
    ));
    let pieces: [(&str, Vec<CMatrix>); 4] = [
        ("M2", tensor_example(2, &[CMatrix::identity(1)])),
        ("C3", SmallGroup::Cyclic(3).generators()),
        ("D4", SmallGroup::D4.generators()),
        ("shift3", vec![truncated_shift(3)]),
    ];
    for (i, (na, a)) in pieces.iter().enumerate() {
        for (nb, b) in pieces.iter().skip(i + 1) {
            let (da, db) = (a[0].rows(), b[0].rows());
            let mut gens: Vec<CMatrix> = a.iter().map(|g| lift_left(g, db)).collect();
            gens.extend(b.iter().map(|g| lift_right(g, da)));
            out.push((format!("direct sum {na} + {nb}"), gens));
        }
    }
    for s in 2..=4 {
        out.push((format!("shift {s}"), vec![truncated_shift(s)]));
    }
    for n in [2, 3] {
        let (x, z) = weyl_heisenberg(n);
        out.push((format!("weyl-heisenberg {n}"), vec![x, z]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x200);
    for i in 0..8 {
        let p = planted_ppi(5, &mut rng);
        out.push((format!("planted ppi #{i}"), vec![p.matrix]));
    }
    let base = out.clone();
    for (i, idx) in [3usize, 9, 12, 18, 25, 30].into_iter().enumerate() {
        let (name, gens) = &base[idx % base.len()];
        let w = haar_unitary(gens[0].rows(), &mut rng);
        out.push((
            format!("conjugated #{i} {name}"),
            gens.iter().map(|g| conjugate(g, &w)).collect(),
        ));
    }
    out
}

pub fn zoo() -> Vec<ZooEntry> {
    zoo_generators()
        .into_iter()
        .map(|(name, generators)| {
            let semigroup = close_selfadjoint(&generators, Tol::default(), ClosureBudget::default())
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(semigroup.is_closed(), "{name}: closure budget exhausted");
            ZooEntry {
                name,
                generators,
                semigroup,
            }
        })
        .collect()
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    m.as_dmatrix().clone().singular_values().iter().copied().collect()
}

/// Partial isometry oracle: every singular value is within `tol` of 0 or 1.
pub fn svd_is_partial_isometry(m: &CMatrix, tol: f64) -> bool {
    singular_values(m).iter().all(|&s| s <= tol || (s - 1.0).abs() <= tol)
}

pub fn svd_rank(m: &CMatrix, tol: f64) -> usize {
    singular_values(m).iter().filter(|&&s| s > tol).count()
}

/// Atoms of the Boolean algebra generated by commuting projections: the eigenspaces of a
/// generic real combination of them.
pub fn joint_atoms(projections: &[CMatrix], dim: usize, seed: u64) -> Vec<CMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for p in projections {
        let c: f64 = rng.random_range(1.0..2.0);
        h += p.as_dmatrix() * C64::new(c, 0.0);
    }
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut atoms = Vec::new();
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < 1e-6 {
            end += 1;
        }
        let mut p = DMatrix::<C64>::zeros(dim, dim);
        for &i in &order[start..end] {
            let v = eig.eigenvectors.column(i);
            p += v * v.adjoint();
        }
        atoms.push(CMatrix::from_dmatrix(p));
        start = end;
    }
    atoms
}

/// Raw idempotents of `s` (no cleaning), and their hermitian cleanups.
pub fn idempotents(s: &ClosedSemigroup, tol: f64) -> Vec<CMatrix> {
    s.elements()
        .iter()
        .filter(|e| (&(*e * *e) - *e).frobenius_norm() <= tol)
        .cloned()
        .collect()
}

pub fn dedup(ms: Vec<CMatrix>, tol: f64) -> Vec<CMatrix> {
    let mut out: Vec<CMatrix> = Vec::new();
    for m in ms {
        if !out.iter().any(|x| x.distance(&m) <= tol) {
            out.push(m);
        }
    }
    out
}

/// Every sum of a subset of `atoms`, including 0.
pub fn subset_sums(atoms: &[CMatrix], dim: usize) -> Vec<CMatrix> {
    (0u64..1 << atoms.len())
        .map(|mask| {
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(CMatrix::zeros(dim, dim), |acc, (_, a)| &acc + a)
        })
        .collect()
}

pub fn same_set(a: &[CMatrix], b: &[CMatrix], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|x| b.iter().any(|y| x.distance(y) <= tol))
        && b.iter().all(|y| a.iter().any(|x| x.distance(y) <= tol))
}

/// Dimension of the commutant `{X : AX = XA for all A in ms}`.
pub fn commutant_dimension(ms: &[CMatrix], dim: usize) -> usize {
    let n2 = dim * dim;
    let id = DMatrix::<C64>::identity(dim, dim);
    let mut stacked = DMatrix::<C64>::zeros(n2 * ms.len().max(1), n2);
    for (k, m) in ms.iter().enumerate() {
        let a = m.as_dmatrix();
        // vec(AX − XA) = (I ⊗ A − Aᵀ ⊗ I) vec(X), column-major vec
        let block = id.kronecker(a) - a.transpose().kronecker(&id);
        stacked.view_mut((k * n2, 0), (n2, n2)).copy_from(&block);
    }
    let sv = stacked.singular_values();
    let scale = sv.iter().copied().fold(1.0, f64::max);
    n2 - sv.iter().filter(|&&s| s > 1e-8 * scale).count()
}
