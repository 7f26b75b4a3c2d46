//! Walks the exact set calculus on a tiny universe: feasible sets,
//! generalization sets, and one strict-growth step.
//!
//! Run with `cargo run --example exact_demo`.

use genbasis::finite_core::{
    accuracy, feasible_set, generalization, DatasetMask, FiniteUniverse, Hypothesis,
    HypothesisSpace,
};

fn main() -> genbasis::Result<()> {
    // Three features, two labels, oracle = [0, 1, 1].
    let universe = FiniteUniverse::new(2, vec![0, 1, 1])?;
    let x = universe.x_size();

    // The full function space: all 2^3 lookup tables.
    let members: Vec<Hypothesis> = (0..8u32)
        .map(|bits| {
            let table = (0..x).map(|i| ((bits >> i) & 1) as usize).collect();
            Hypothesis::new(table, &universe)
        })
        .collect::<genbasis::Result<_>>()?;
    let space = HypothesisSpace::new(members, &universe)?;
    println!("universe: {x} features, 2 labels, space of {} hypotheses", space.len());

    let empty = DatasetMask::empty(x);
    let t_empty = feasible_set(&space, &empty, &universe)?;
    println!("T(empty) keeps all {} hypotheses", t_empty.len());

    let z = DatasetMask::from_indices(x, &[0])?;
    let t = feasible_set(&space, &z, &universe)?;
    println!("\nafter seeing Z = {z}:");
    println!("  {} hypotheses survive:", t.len());
    for h in t.members() {
        let acc = accuracy(h, &universe)?;
        println!("    {:?}  (true accuracy {})", h.table(), acc.as_f64());
    }

    let gen = generalization(&space, &z, &universe)?;
    println!("  generalization set gen(Z) = {gen}");
    println!("  (the survivors only agree with the oracle on Z itself)");

    // Theorem: admitting any feature outside gen(Z) strictly grows it.
    let pick = gen.complement().indices().next().unwrap();
    let mut grown = z.clone();
    grown.insert(pick);
    let gen2 = generalization(&space, &grown, &universe)?;
    println!("\nadmit uncovered feature {pick}: gen({grown}) = {gen2}");
    assert!(gen.is_subset_of(&gen2) && gen2.count() > gen.count());
    println!("growth is strict: {} -> {} covered features", gen.count(), gen2.count());
    Ok(())
}
