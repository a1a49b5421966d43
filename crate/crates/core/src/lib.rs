//! # recipe-iot-core
//!
//! Turns cooking-recipe instructions into kitchen-device command tuples
//! (Where, What, Why, How).
//!
//! The crate is `no_std` (it only needs `alloc`) and contains the pure
//! algorithmic pieces of the pipeline:
//!
//! - [`corpus`]: text normalization, tokenization, the slot annotation model,
//!   span/IOB conversion and stratified splitting.
//! - [`lexicon`]: the hierarchical device dictionary and embedding-based
//!   candidate expansion.
//! - [`features`]: sparse token feature extraction for the CRF.
//! - [`crf`]: a linear-chain conditional random field with exact inference and
//!   OWL-QN training (L1 + L2).
//! - [`eval`]: entity-level scoring, cross-validated random search, feature
//!   ablation, annotator agreement and label distributions.
//! - [`command`]: assembling labeled spans into IoT commands, parsing How
//!   values, rule-based slot inference and control-flow cues.
//!
//! File formats, model storage and the command-line tool live in the
//! companion `recipe-iot` crate.
#![cfg_attr(not(feature = "std"), no_std)]

#[macro_use]
extern crate alloc;

pub mod command;
pub mod corpus;
pub mod crf;
pub mod errors;
pub mod eval;
pub mod features;
pub mod lexicon;
mod math;

pub use errors::{Error, Result};
