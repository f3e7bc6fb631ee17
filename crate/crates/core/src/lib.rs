//! Classification pipeline for small, imbalanced tabular datasets.
//!
//! Stages, in order:
//!
//! 1. [`data`]: parse the raw CSV, drop constant columns, encode against a
//!    declared schema, min-max scale.
//! 2. [`resample`]: Borderline-SMOTE oversampling of the minority class over a
//!    brute-force Euclidean k-NN index.
//! 3. [`augment`]: train a dense autoencoder and append its reconstructions as
//!    extra samples.
//! 4. [`models`] and [`eval`]: a 1D CNN and classical baselines compared by
//!    stratified k-fold cross-validation.
//!
//! [`nn`] is the small neural-network engine shared by the autoencoder, the
//! CNN and the MLP baseline. [`pipeline`] wires the stages to a config file
//! and the `cadpipe` command line tool.

pub mod augment;
pub mod data;
pub mod error;
pub mod eval;
pub mod matrix;
pub mod models;
pub mod nn;
pub mod pipeline;
pub mod resample;
pub mod rng;

pub use data::{ClassCounts, Dataset, Label, Provenance, TaggedDataset};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use rng::Prng;
