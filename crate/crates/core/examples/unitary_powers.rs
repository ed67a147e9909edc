//! Finds powers of random unitaries close to the identity, so `U^(n-1)` approximates `U*`.
//!
//! cargo run --release --example unitary_powers

use pisemi::families::haar_unitary;
use pisemi::structure::approximate_identity_power;
use pisemi::{CMatrix, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pisemi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 1..=4 {
        for _ in 0..3 {
            let u = haar_unitary(n, &mut rng);
            match approximate_identity_power(&u, 0.1, 1_000_000) {
                Ok(m) => println!(
                    "n = {n}: |U^{m} - I| = {:.3}, |U^{} - U*| = {:.3}",
                    u.pow(m as u32).distance(&CMatrix::identity(n)),
                    m - 1,
                    u.pow(m as u32 - 1).distance(&u.adjoint())
                ),
                Err(e @ Error::SearchExhausted { .. }) => println!("n = {n}: {e}"),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}
