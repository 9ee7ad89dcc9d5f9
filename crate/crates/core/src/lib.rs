//! Training library for small feedforward regression networks, built around
//! a comparison between two strategies: conventional joint training of all
//! parameters and a greedy sequential schedule that trains one hidden layer
//! at a time against a temporary scalar head, freezing each layer before the
//! next is fit. The sequential schedule solves a series of much smaller
//! optimization problems while targeting the same final architecture.
//!
//! The crate is `no_std` (with `alloc`) and brings its own pinned PRNG and
//! portable math kernels, so training runs are bit-reproducible for a given
//! seed across platforms. IO, file formats, and the experiment CLI live in
//! the companion `layerwise-cli` crate.
//!
//! Pieces:
//! - [`network`]: layers, scalar output head, architectures, forward passes,
//!   parameter counting.
//! - [`train`]: losses, reverse-mode gradients with a finite-difference
//!   oracle, SGD/Adam, and the `train_full` / `train_sequential` drivers.
//! - [`data`]: dataset container, a synthetic exponential-curve generator,
//!   splitting, standardization, and activation caching for frozen prefixes.
//! - [`rng`]: the pinned generator and seed-stream derivation.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod activation;
pub mod data;
pub mod error;
pub mod network;
pub mod rng;
pub mod train;

pub use activation::ActivationKind;
pub use data::{
    generate, map_through, split, standardize_apply, standardize_fit, Dataset, GeneratorConfig,
    Provenance, Sample, StandardizeStats,
};
pub use error::{Error, Result};
pub use network::{Architecture, LayerParams, Mlp, OutputHead};
pub use rng::{stream_seed, Xorshift64Star};
pub use train::{
    backprop, evaluate, finite_diff_grad, loss, optimizer_step, train_full, train_sequential,
    train_stage, Gradients, Hyperparams, LossNorm, OptimizerKind, OptimizerState, StageReport,
    Strategy, TrainReport,
};
