//! Argument component classification for annotated essays.
//!
//! The pipeline runs in three stages:
//!
//! 1. [`corpus`] parses essay text plus standoff annotations into labeled
//!    instances: one per annotated component (major claim, claim, premise)
//!    and one per sentence without any component.
//! 2. [`features`] and [`dataset`] turn instances into a sparse labeled
//!    matrix: seven structural features, n-gram presence booleans over a
//!    corpus vocabulary, a modal-verb flag, and optional indicator features
//!    from a discourse-marker keyword lexicon.
//! 3. [`svm`] and [`eval`] train one-vs-rest linear SVMs by dual coordinate
//!    descent and report stratified k-fold cross-validation accuracy with a
//!    confusion matrix, including a with/without-indicator ablation mode.
//!
//! The `argmine` binary exposes the stages as `ingest`, `extract` and `cv`
//! subcommands; see [`cli`].

pub mod cli;
pub mod corpus;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod svm;
pub mod text;

pub use error::{Error, Result};
