//! Prime-dimension, automatic self-adjointness, masa and finitely generated atomicity checks.
//!
//! cargo run --example corollaries

use pisemi::band::enveloping_band;
use pisemi::closure::projections_of;
use pisemi::families::{block_monomial, root_of_unity, truncated_shift, weyl_heisenberg, zero_unitary_generators};
use pisemi::structure::{
    check_automatic_selfadjoint, check_finitely_generated_atomicity, check_prime_size, masa_criterion,
};
use pisemi::{close, CMatrix, ClosureBudget, Tol};

fn main() -> pisemi::Result<()> {
    for n in [2, 3, 5, 7] {
        let (x, z) = weyl_heisenberg(n);
        let s = close(&[x, z], Tol::default(), ClosureBudget::default())?;
        println!(
            "weyl-heisenberg {n}: {} elements, unitary group {}",
            s.len(),
            check_prime_size(&s, Tol::default())?
        );
    }

    // Block units with cyclic labels plus a labelled partial shift: irreducible but not self-adjoint.
    let omega = CMatrix::diag(&[root_of_unity(3, 1)]);
    let labels: Vec<CMatrix> = (0..4).map(|j| CMatrix::diag(&[root_of_unity(3, j)])).collect();
    let mut gens = zero_unitary_generators(4, &[omega]);
    gens.push(block_monomial(&[Some(1), Some(2), Some(3), None], &labels));
    let s = close(&gens, Tol::default(), ClosureBudget::default())?;
    println!(
        "labelled shift: {} elements, self-adjoint {}, adjoints keep partial isometries {}",
        s.len(),
        s.is_selfadjoint(),
        check_automatic_selfadjoint(&s, Tol::default(), ClosureBudget::default())?
    );
    let band = enveloping_band(&projections_of(&s, s.work_tol()), s.dim(), s.work_tol())?;
    println!(
        "its band has atom ranks {:?}; masa {}",
        band.atom_ranks(),
        masa_criterion(&band)
    );

    let j = truncated_shift(4);
    let family: Vec<CMatrix> = (0..3).map(|p| j.scale(root_of_unity(3, p))).collect();
    let report = check_finitely_generated_atomicity(&family, Tol::default(), ClosureBudget::default())?;
    println!("J4, wJ4, w^2 J4: {report:?}");
    Ok(())
}
