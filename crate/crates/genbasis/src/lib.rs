//! Exact set-theoretic generalization calculus plus an ensemble-driven
//! sample basis selector.
//!
//! The crate has two halves that check each other:
//!
//! * [`finite_core`] and [`property_oracle`] work on small finite universes
//!   where everything is enumerable: hypothesis spaces, feasible sets,
//!   generalization sets, and a brute-force verifier for the algebraic laws
//!   those operators satisfy.
//! * [`nn`], [`data`], and [`surrogate`] scale the same loop to real
//!   datasets, replacing the exhaustive feasible set with a small ensemble
//!   of networks trained to 100% accuracy on the current basis.
//!
//! Start with the runnable examples:
//!
//! * `exact_demo` walks the set calculus on a four-point universe.
//! * `verify_properties` sweeps randomized structures through every law.
//! * `memorizer_no_generalization` builds lookup-table spaces that
//!   provably never generalize.
//! * `gradient_check` compares backprop against central differences.
//! * `select_bases_synthetic` runs the full selection loop on synthetic
//!   data and compares the basis against a same-size prefix.
//!
//! The `genbasis` binary exposes the same capabilities as subcommands
//! (`verify`, `select-bases`, `retrain-eval`, `mispredict-report`,
//! `exact-demo`).

pub mod cli;
pub mod data;
pub mod error;
pub mod finite_core;
pub mod nn;
pub mod plot;
pub mod property_oracle;
pub mod surrogate;

pub use error::{Error, Result};
