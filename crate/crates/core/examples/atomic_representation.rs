//! Writes each element of an enriched semigroup as a partial permutation of band atoms
//! carrying unitaries, then splits a reducible semigroup by atom rank.
//!
//! cargo run --example atomic_representation

use pisemi::band::enrich;
use pisemi::families::{tensor_example, SmallGroup};
use pisemi::structure::{atomic_representation, reducible_split};
use pisemi::{close_selfadjoint, CMatrix, ClosureBudget, Tol};

fn main() -> pisemi::Result<()> {
    let s0 = close_selfadjoint(
        &tensor_example(3, &SmallGroup::S3.generators()),
        Tol::default(),
        ClosureBudget::default(),
    )?;
    let e = enrich(&s0, Tol::default(), ClosureBudget::default())?;
    let rep = atomic_representation(&e.semigroup, &e.band, Tol::default())?;
    println!(
        "{} enriched elements over {} atoms of dimension {}, worst reconstruction error {:.1e}",
        e.semigroup.len(),
        e.band.atom_count(),
        rep.block_dim,
        rep.max_reconstruction_error(&e.semigroup)
    );
    for (i, el) in rep.per_element.iter().enumerate().take(4) {
        println!("  element {i}: {:?}", el.permutation);
    }

    // M2 on one block and the dihedral group on another: atoms of rank 1 and rank 2.
    let mut gens: Vec<CMatrix> = tensor_example(2, &[CMatrix::identity(1)])
        .iter()
        .map(|g| g.direct_sum(&CMatrix::zeros(2, 2)))
        .collect();
    gens.extend(
        SmallGroup::D4
            .generators()
            .iter()
            .map(|g| CMatrix::zeros(2, 2).direct_sum(g)),
    );
    let s = close_selfadjoint(&gens, Tol::default(), ClosureBudget::default())?;
    let e = enrich(&s, Tol::default(), ClosureBudget::default())?;
    for (p, piece) in reducible_split(&e.semigroup, &e.band, Tol::default())? {
        println!(
            "reducing subspace of dimension {}: {} elements",
            p.trace().re.round(),
            piece.len()
        );
    }
    Ok(())
}
