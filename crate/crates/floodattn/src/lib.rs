//! Layer-wise block-sparse attention training.
//!
//! Trains a small encoder-only Transformer densely while tracking each
//! layer's mean attention map; once successive maps' Frobenius norms
//! stabilize, a per-layer block sparsity pattern is extracted — diagonal
//! convolution, block average-pooling, quantile thresholding, and an
//! edge-seeded flood fill — frozen, and training continues on CSR sparse
//! kernels (sddmm, implicit-zero sparse softmax, spmm) with hand-written
//! gradients throughout.
//!
//! # Modules
//!
//! - [`tensor`] — row-major matrices, gemm, layer norm, softmax, dropout,
//!   and their backward passes, all with 64-bit accumulation.
//! - [`sparse`] — CSR storage with a binary file format, the sparse
//!   attention kernel chain, and its gradients.
//! - [`pattern`] — the extraction pipeline from attention map to block
//!   pattern, stage by stage.
//! - [`model`] — the encoder classifier: forward in dense or sparse
//!   attention mode, manual backward, bit-exact checkpoints.
//! - [`trainer`] — shuffled minibatch Adam training, the transition test,
//!   pattern freezing, and per-epoch metrics.
//! - [`analyzer`] — closed-form operation counts and density reports.
//! - [`data`] — synthetic majority and nested-operator datasets plus a
//!   CSV loader.
//! - [`config`] / [`cli`] — flat key=value run configuration and the
//!   `train` / `gen-pattern` / `analyze` commands.
//! - [`rng`] — the deterministic, serializable random stream every
//!   component draws from.
//! - [`opcount`] — per-thread multiply tallies for cost measurements.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --release -p floodattn --example train_three_phase
//! cargo run -p floodattn --example extract_pattern
//! cargo run --release -p floodattn --example sparse_vs_dense_kernels
//! cargo run -p floodattn --example flood_fill_walkthrough
//! cargo run -p floodattn --example op_count_analysis
//! cargo run -p floodattn --example listops_dataset
//! ```
//!
//! The `floodattn` binary wraps the same machinery behind a CLI; run
//! `floodattn --help` for the commands and config keys.

mod bytes;
pub mod analyzer;
pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod model;
pub mod opcount;
pub mod pattern;
pub mod rng;
pub mod sparse;
pub mod tensor;
pub mod trainer;

pub use error::{Error, Result};
