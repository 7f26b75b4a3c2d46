//! Builds a hypothesis space containing one memorizer per dataset subset
//! (correct exactly on that subset, wrong everywhere else) and shows that
//! such a space never generalizes: gen(Z) == Z for every Z.
//!
//! Run with `cargo run --example memorizer_no_generalization`.

use genbasis::finite_core::{generalization, DatasetMask, FiniteUniverse};
use genbasis::property_oracle::build_memorizer_space;

fn main() -> genbasis::Result<()> {
    let universe = FiniteUniverse::new(3, vec![0, 1, 2, 0, 1])?;
    let x = universe.x_size();
    let space = build_memorizer_space(&universe)?;
    println!(
        "universe: {x} features, {} labels; memorizer space has {} members (one per subset)",
        universe.y_size(),
        space.len()
    );

    for bits in 0..(1u64 << x) {
        let z = DatasetMask::from_bits(x, bits);
        let gen = generalization(&space, &z, &universe)?;
        assert_eq!(gen, z, "gen({z}) = {gen}");
    }
    println!("checked all {} subsets: gen(Z) == Z for every Z", 1u64 << x);
    println!("training data buys nothing beyond itself against pure memorizers");
    Ok(())
}
