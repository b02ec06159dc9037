//! Predicting which phone-call edges persist and which decay.
//!
//! The library turns raw call-detail records into two adjacent window
//! graphs (τ₁/τ₂), derives fifteen per-arc features with persist/decay
//! labels, and provides the analysis stack around them: descriptive
//! statistics, information-gain feature ranking, a decision tree, a
//! logistic regression, an evaluation harness, and a seeded synthetic
//! corpus generator with a known planted mechanism.
//!
//! Everything is deterministic: fixed seeds, canonical orderings, and
//! stable file formats, so a rerun reproduces outputs byte for byte.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod graph;
pub mod infogain;
pub mod ingest;
pub mod logit;
pub mod model;
pub mod stats;
pub mod synth;
pub mod tree;

pub use dataset::Dataset;
pub use error::{DecayError, Result};
pub use features::{EdgeFeatureVector, FeatureConfig, LabeledEdge, FEATURE_NAMES};
pub use graph::{RobotFilter, TimeWindow, WindowConfig, WindowGraph};
pub use ingest::{CallRecord, IngestConfig, IngestReport};
pub use model::Model;

/// Cap the global worker pool used by parallel sections. Only the first
/// call in a process takes effect; later calls are ignored.
pub fn limit_threads(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}
