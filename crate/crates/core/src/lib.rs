//! Rule-based text augmentation (EDA, AEDA, softEDA) with per-dataset
//! augmentation-policy search.
//!
//! The crate is organized bottom-up:
//!
//! - [`textops`]: whitespace tokenization, stopwords, synonym lexicon.
//! - [`augment`]: the four EDA suboperations, the EDA dispatcher and AEDA.
//! - [`labels`]: label smoothing and soft-target cross-entropy.
//! - [`policy`]: the 12-dimensional augmentation policy and its application.
//! - [`classifier`]: a hashed n-gram softmax model used as the evaluator.
//! - [`search`]: TPE search over policies.
//! - [`harness`]: datasets, low-resource subsampling, experiments, reports.

pub mod augment;
pub mod classifier;
pub mod error;
pub mod harness;
pub mod labels;
pub mod policy;
pub mod rng;
pub mod search;
pub mod textops;

pub use error::{Error, Result};
