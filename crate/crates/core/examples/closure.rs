//! Closes the tensor example `M_r ⊗ U` and prints what the closure found.
//!
//! cargo run --example closure

use pisemi::closure::{product_law_violations, projection_laws};
use pisemi::families::{tensor_example, SmallGroup};
use pisemi::{close, close_selfadjoint, ClosureBudget, Tol};

fn main() -> pisemi::Result<()> {
    for (r, group) in [
        (2, SmallGroup::Cyclic(1)),
        (2, SmallGroup::Cyclic(3)),
        (3, SmallGroup::D4),
    ] {
        let gens = tensor_example(r, &group.generators());
        let s = close(&gens, Tol::default(), ClosureBudget::default())?;
        let laws = projection_laws(&s, s.work_tol());
        println!(
            "r = {r}, {group:?}: {} elements (expect r^2 |U| + 1 = {}), longest word {}, self-adjoint {}",
            s.len(),
            r * r * group.order() + 1,
            s.max_word_length(),
            s.is_selfadjoint()
        );
        println!("  projection laws: {laws:?}");
        println!(
            "  product law violations: {}",
            product_law_violations(&s, s.work_tol()).len()
        );
    }

    // A tight budget stops early and says so.
    let gens = tensor_example(3, &SmallGroup::Q8.generators());
    let partial = close_selfadjoint(&gens, Tol::default(), ClosureBudget::new(20, 64)?)?;
    println!(
        "budget of 20 elements: {:?} after {} elements",
        partial.status(),
        partial.len()
    );
    Ok(())
}
