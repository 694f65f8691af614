//! Core algorithms for measuring how close a derivative image sits to its
//! original in an embedding space, and for simulating how revenue from
//! generated content could be shared with the people whose work trained the
//! generator.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! filesystem (embedding files, the rulings CSV, scenario configs) lives in
//! the `airoyalties` companion crate.
//!
//! - [`embedding`]: embedding records and the single-model store
//! - [`metric`]: cosine similarity between works (the "CLIP metric")
//! - [`rulings`]: ruling labels, per-class statistics, threshold bands
//! - [`histogram`]: fixed-width binning of labelled metric values
//! - [`influence`]: attribution weights of training items to outputs
//! - [`money`]: integer cents and exact fractions
//! - [`schemes`]: the compensation frameworks and scenario dispatch

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod embedding;
pub mod histogram;
pub mod influence;
mod linalg;
pub mod metric;
pub mod money;
pub mod rulings;
pub mod schemes;

pub use embedding::{EmbeddingRecord, EmbeddingStore, StoreError};
pub use metric::{clip_metric, pairwise_matrix, unit_normalize, MetricError, MetricValue};
pub use money::{Cents, Fraction};
