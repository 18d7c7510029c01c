//! Numeric core for geometry-preserving depth evaluation.
//!
//! Scale-invariant (SI) and shift-and-scale-invariant (SSI) pairwise losses
//! with O(N log N) evaluation and analytic gradients, prediction alignment,
//! evaluation metrics, pinhole back-projection, and the stereo-disparity
//! validity rules. The crate is `no_std` and only needs `alloc`; file formats
//! and the command-line driver live in the `depthgeo` crate.
//!
//! All logarithms are natural logarithms.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod alignment;
mod error;
pub mod geometry;
pub mod losses;
pub mod map;
pub mod metrics;
pub mod pipeline;
pub mod stats;

pub use error::{Error, Result};
pub use map::{DepthKind, DepthMap, DisparityMap, MaskedMap, MaskedValues, OrdinalPair, Relation};
