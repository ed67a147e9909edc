//! Decomposes hidden power partial isometries into a unitary part plus truncated shifts.
//!
//! cargo run --example halmos_wallen

use pisemi::families::{planted_ppi, random_partial_isometry};
use pisemi::powerpi::{first_failing_power, halmos_wallen, power_ranks, ppi_semigroup_check};
use pisemi::{ClosureBudget, Tol};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pisemi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..5 {
        let p = planted_ppi(9, &mut rng);
        let hw = halmos_wallen(&p.matrix, Tol::default())?;
        println!(
            "n = {}: planted U{} + J{:?}, found U{} + J{:?}, reconstruction error {:.1e}, power ranks {:?}",
            hw.dim(),
            p.unitary_dim,
            p.shift_sizes,
            hw.unitary_dim,
            hw.shift_sizes,
            hw.reconstruct().distance(&p.matrix),
            power_ranks(&p.matrix, Tol::default())
        );
        assert!(ppi_semigroup_check(
            &p.matrix,
            Tol::default(),
            ClosureBudget::default()
        )?);
    }

    let t = random_partial_isometry(4, 2, &mut rng);
    println!(
        "random rank-2 partial isometry: first non-partial-isometry power {:?}, semigroup check {}",
        first_failing_power(&t, Tol::default())?,
        ppi_semigroup_check(&t, Tol::default(), ClosureBudget::default())?
    );
    match halmos_wallen(&t, Tol::default()) {
        Err(e) => println!("decomposition refused: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
