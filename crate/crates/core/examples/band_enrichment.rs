//! Computes the enveloping band of a semigroup's projections and enriches the semigroup by it.
//!
//! cargo run --example band_enrichment

use pisemi::band::{boolean_members, enrich, enveloping_band};
use pisemi::closure::projections_of;
use pisemi::families::truncated_shift;
use pisemi::{close_selfadjoint, ClosureBudget, Tol};

fn main() -> pisemi::Result<()> {
    let s0 = close_selfadjoint(&[truncated_shift(4)], Tol::default(), ClosureBudget::default())?;
    let t = s0.work_tol();
    let projections = projections_of(&s0, t);
    let band = enveloping_band(&projections, s0.dim(), t)?;
    println!(
        "S(J4, J4*): {} elements, {} projections, {} atoms of ranks {:?}",
        s0.len(),
        projections.len(),
        band.atom_count(),
        band.atom_ranks()
    );
    println!("band members: {}", boolean_members(&band)?.count());

    let e = enrich(&s0, Tol::default(), ClosureBudget::default())?;
    let enriched = projections_of(&e.semigroup, e.semigroup.work_tol());
    println!(
        "enriched: {} elements, {} projections, atoms unchanged: {}",
        e.semigroup.len(),
        enriched.len(),
        e.band.atom_count() == band.atom_count()
    );
    Ok(())
}
