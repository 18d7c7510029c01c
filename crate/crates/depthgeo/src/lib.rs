//! File formats, batch drivers and command implementations on top of
//! `depthgeo-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod cloud;
mod error;
pub mod evaluate;
pub mod filter;
pub mod pfm;
pub mod ply;
pub mod records;
pub mod selfcheck;
pub mod synthesize;

pub use depthgeo_core as core;
pub use error::{Error, Result};
