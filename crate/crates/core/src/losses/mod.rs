//! Scale-invariant and shift-and-scale-invariant depth losses.
//!
//! Every map-level loss takes its prediction and ground truth as
//! [`MaskedMap`]s of the same size and evaluates over the joint mask. When a
//! gradient is requested it is returned as a full-size map aligned with the
//! prediction, holding exactly `0.0` on pixels outside the joint mask.
//!
//! The residual-level kernels ([`pairwise_l1_sorted`] and friends) operate on
//! plain slices and are what the map-level functions call into.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::map::MaskedMap;

mod mixture;
mod pairwise;
mod pointwise;
mod ssi;

pub use mixture::{mixture_loss, MixtureResult, MixtureWeights};
pub use pairwise::{
    l2_pairwise, pairwise_l1_naive, pairwise_l1_sorted, pairwise_l2_literal_naive,
    pairwise_l2_variance, si_pairwise_l1, si_pairwise_l1_naive, NAIVE_LIMIT,
};
pub use pointwise::{
    pointwise_l1, pointwise_l1_residuals, pointwise_l2, pointwise_l2_residuals, si_pointwise_l1,
    si_pointwise_l1_residuals, si_pointwise_l2, si_pointwise_l2_residuals,
};
pub use ssi::{normalize_disparity, ssi_pairwise_l1, NormalizedDisparity};

/// Whether a loss should also produce its gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Want {
    Value,
    Gradient,
}

/// Loss value and, when requested, the gradient with respect to the
/// prediction (full-size, zero off the joint mask).
#[derive(Debug, Clone, PartialEq)]
pub struct LossResult {
    pub value: f64,
    pub gradient: Option<Vec<f64>>,
}

/// `R_i = log d_i - log d*_i` over the joint mask, in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualVector {
    pub values: Vec<f64>,
    pub origin_indices: Vec<usize>,
    map_len: usize,
}

impl ResidualVector {
    /// Residuals `pred - gt` over the joint mask of two same-sized maps.
    pub fn between(pred: &MaskedMap, gt: &MaskedMap) -> Result<Self> {
        let joint = pred.joint_mask(gt)?;
        let mut values = Vec::new();
        let mut origin_indices = Vec::new();
        for (i, &m) in joint.iter().enumerate() {
            if m {
                let r = pred.values()[i] - gt.values()[i];
                if !r.is_finite() {
                    return Err(Error::NonFinite { index: i });
                }
                values.push(r);
                origin_indices.push(i);
            }
        }
        if values.is_empty() {
            return Err(Error::EmptyMask);
        }
        Ok(ResidualVector {
            values,
            origin_indices,
            map_len: pred.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn require(&self, required: usize) -> Result<()> {
        if self.len() < required {
            return Err(Error::TooFewPixels {
                required,
                got: self.len(),
            });
        }
        Ok(())
    }

    /// Spreads per-residual gradient entries back onto a full-size map.
    pub fn scatter(&self, per_residual: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.map_len];
        for (&i, &g) in self.origin_indices.iter().zip(per_residual) {
            out[i] = g;
        }
        out
    }
}

/// Evaluates a residual kernel, scattering its gradient when asked to.
fn run_kernel(
    residuals: &ResidualVector,
    want: Want,
    kernel: impl FnOnce(&[f64], Option<&mut [f64]>) -> f64,
) -> LossResult {
    match want {
        Want::Value => LossResult {
            value: kernel(&residuals.values, None),
            gradient: None,
        },
        Want::Gradient => {
            let mut grad = vec![0.0; residuals.len()];
            let value = kernel(&residuals.values, Some(&mut grad));
            LossResult {
                value,
                gradient: Some(residuals.scatter(&grad)),
            }
        }
    }
}

/// Unweighted mean of per-image loss values.
pub fn batch_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(crate::stats::mean(values))
    }
}
