//! Recovers the block-monomial structure of a disguised irreducible semigroup.
//!
//! cargo run --example zero_unitary

use pisemi::families::{haar_unitary, zero_unitary_generators, SmallGroup};
use pisemi::structure::{extract_zero_unitary, irreducibility, minimal_nonzero_rank, verify_sandwich};
use pisemi::{close, CMatrix, ClosureBudget, Tol};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pisemi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (k, group) = (3, SmallGroup::Q8);
    let w = haar_unitary(k * group.degree(), &mut rng);
    let gens: Vec<CMatrix> = zero_unitary_generators(k, &group.generators())
        .iter()
        .map(|g| &(&w * g) * &w.adjoint())
        .collect();
    let s = close(&gens, Tol::default(), ClosureBudget::default())?;
    println!(
        "{} elements, irreducible {}, minimal nonzero rank {}",
        s.len(),
        irreducibility(&s, Tol::default()).irreducible,
        minimal_nonzero_rank(&s, Tol::default())?
    );

    let z = extract_zero_unitary(&s, Tol::default())?;
    println!("k = {}, r0 = {}, group of order {}", z.k, z.r0, z.unitary_group.len());
    for (i, p) in z.patterns.iter().enumerate().take(6) {
        println!(
            "  element {i} (word {:?}): {:?} labels {:?}",
            s.words()[i],
            p.permutation,
            p.labels
        );
    }
    let sandwich = verify_sandwich(&s, &z, Tol::default());
    println!("sandwich holds: {}", sandwich.holds());
    Ok(())
}
