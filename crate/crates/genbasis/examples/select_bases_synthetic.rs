//! Runs the full basis-selection loop on a synthetic pool, then compares
//! retraining on the selected basis against a same-size prefix baseline.
//!
//! Run with `cargo run --example select_bases_synthetic`.

use genbasis::data::{generate_synthetic, SyntheticKind, SyntheticSpec};
use genbasis::nn::{Architecture, ModelConfig};
use genbasis::surrogate::{retrain_eval, run, LoopConfig, SelectionRule};

fn main() -> genbasis::Result<()> {
    let pool = generate_synthetic(&SyntheticSpec {
        kind: SyntheticKind::Rings,
        n_samples: 300,
        noise: 0.02,
        seed: 4,
    })?;
    let mut model = ModelConfig::new(
        Architecture::Mlp(vec![24]),
        pool.num_classes(),
        pool.shape().to_vec(),
    );
    model.seed = 1;
    let mut config = LoopConfig::new(model.clone());
    config.n_models = 3;
    config.batch_add = 6;
    config.initial_per_class = 5;
    config.selection_rule = SelectionRule::MostDisagreed;

    println!("pool: {} ring samples, digest {:016x}", pool.len(), pool.digest());
    let (manifest, records) = run(&pool, &config)?;
    for r in &records {
        println!(
            "round {:3}: basis {:4}, unanimous correct {:4}, wrong {:3}, disagreement {:3}",
            r.round, r.basis_size, r.unanimous_correct_count, r.unanimous_wrong_count,
            r.disagreement_count
        );
    }
    assert!(manifest.complete);
    println!(
        "\nloop finished: {} of {} samples selected ({:.1}%)",
        manifest.ids.len(),
        pool.len(),
        100.0 * manifest.ids.len() as f64 / pool.len() as f64
    );

    let trials = 3;
    let selected = retrain_eval(&pool, &manifest.ids, &model, trials)?;
    let prefix_ids: Vec<u32> = (0..manifest.ids.len()).map(|i| pool.id(i)).collect();
    let prefix = retrain_eval(&pool, &prefix_ids, &model, trials)?;
    println!(
        "retrain on selected basis: {:.3} +/- {:.3} %",
        selected.mean_accuracy * 100.0,
        selected.stdev_accuracy * 100.0
    );
    println!(
        "retrain on same-size prefix: {:.3} +/- {:.3} %",
        prefix.mean_accuracy * 100.0,
        prefix.stdev_accuracy * 100.0
    );
    Ok(())
}
