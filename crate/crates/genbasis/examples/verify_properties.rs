//! Sweeps randomized finite structures through every algebraic law of the
//! feasible-set and generalization operators, then demonstrates that the
//! suite catches a deliberately broken engine.
//!
//! Run with `cargo run --example verify_properties`.

use genbasis::property_oracle::{
    replay, run_sweep, Mutant, MutantEngine, RealEngine, StructureLimits,
};

fn main() -> genbasis::Result<()> {
    let limits = StructureLimits::default();

    let report = run_sweep(&RealEngine, &limits, 200, true)?;
    println!("real engine over {} random structures:", report.structures);
    println!("property,checked,failures");
    for (id, checked, failed) in &report.per_property {
        println!("{id},{checked},{failed}");
    }
    assert!(report.all_hold());

    // A broken feasible set (keeps violators instead of satisfiers) must
    // trip several laws, otherwise the suite proves nothing.
    let mutant = MutantEngine(Mutant::InvertFeasible);
    let broken = run_sweep(&mutant, &limits, 50, true)?;
    let ids = broken.failing_ids();
    println!("\ninverted feasible set fails {} property ids:", ids.len());
    for id in &ids {
        println!("  {id}");
    }
    assert!(ids.len() >= 3);

    // Counterexamples replay bit-for-bit from their fixture text.
    let failure = &broken.failures[0];
    let cx = failure.verdict.counterexample.as_ref().unwrap();
    println!("\nfirst counterexample ({}):", failure.verdict.id);
    println!("{}", cx.detail);
    let again = replay(&mutant, failure.verdict.id, cx)?;
    assert!(!again.holds);
    assert_eq!(again.counterexample.as_ref().unwrap().detail, cx.detail);
    println!("replay reproduced the failure exactly");
    Ok(())
}
