//! Compares backprop gradients against central finite differences, in
//! f64, for both the MLP and the conv architecture.
//!
//! Run with `cargo run --example gradient_check`.

use genbasis::data::{generate_synthetic, SyntheticKind, SyntheticSpec};
use genbasis::nn::{gradient_check, Architecture, ModelConfig};

fn main() -> genbasis::Result<()> {
    let pool = generate_synthetic(&SyntheticSpec {
        kind: SyntheticKind::Gauss2,
        n_samples: 16,
        noise: 0.05,
        seed: 2,
    })?;
    let batch: Vec<(Vec<f32>, u8)> = (0..4)
        .map(|i| (pool.sample(i).to_vec(), pool.label(i)))
        .collect();
    let mlp = ModelConfig::new(Architecture::Mlp(vec![16]), 2, vec![2]);
    let err = gradient_check(&mlp, &batch)?;
    println!("mlp:16 on 2-d points: max relative error {err:.2e}");
    assert!(err < 1e-4);

    // A synthetic 12x12 "image" batch for the conv stack.
    let conv = ModelConfig::new(Architecture::Conv(10), 3, vec![12, 12]);
    let batch: Vec<(Vec<f32>, u8)> = (0..3)
        .map(|i| {
            let x: Vec<f32> = (0..144)
                .map(|j| (((i * 37 + j * 11) % 97) as f32) / 97.0)
                .collect();
            (x, i as u8)
        })
        .collect();
    let err = gradient_check(&conv, &batch)?;
    println!("conv:10 on 12x12 inputs: max relative error {err:.2e}");
    assert!(err < 1e-4);

    println!("backprop matches central differences on both architectures");
    Ok(())
}
