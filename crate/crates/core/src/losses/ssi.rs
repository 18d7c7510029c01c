use alloc::vec;
use alloc::vec::Vec;

use super::{pairwise_l1_sorted, LossResult, ResidualVector, Want};
use crate::error::{Error, Result};
use crate::map::MaskedMap;
use crate::stats;

/// A disparity map standardized to zero mean and unit sample deviation over
/// its mask.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedDisparity {
    pub map: MaskedMap,
    pub mean: f64,
    pub std: f64,
}

/// `(D_i - mean) / std` over the valid pixels, with the sample (`1/(N-1)`)
/// standard deviation.
pub fn normalize_disparity(disp: &MaskedMap) -> Result<NormalizedDisparity> {
    let valid = disp.masked_values()?;
    if valid.len() < 2 {
        return Err(Error::TooFewPixels {
            required: 2,
            got: valid.len(),
        });
    }
    let mean = stats::mean(&valid.values);
    let std = stats::sample_std(&valid.values, mean);
    if !(std >= 1e-12 * libm::fmax(1.0, libm::fabs(mean))) {
        return Err(Error::DegenerateDisparity { sigma: std });
    }
    let map = disp.map_valid(|v| (v - mean) / std)?;
    Ok(NormalizedDisparity { map, mean, std })
}

/// Shift-and-scale-invariant pairwise L1 loss between two disparity maps.
///
/// Both maps are standardized over their joint mask; the sorted pairwise L1
/// kernel then runs on the standardized residuals. The gradient is taken with
/// respect to the raw predicted disparity and accounts for the dependence of
/// the mean and deviation on every valid pixel.
pub fn ssi_pairwise_l1(
    pred_disp: &MaskedMap,
    gt_disp: &MaskedMap,
    want: Want,
) -> Result<LossResult> {
    let joint = pred_disp.joint_mask(gt_disp)?;
    let pred = normalize_disparity(&pred_disp.with_mask(joint.clone())?)?;
    let gt = normalize_disparity(&gt_disp.with_mask(joint)?)?;
    let r = ResidualVector::between(&pred.map, &gt.map)?;

    if want == Want::Value {
        return Ok(LossResult {
            value: pairwise_l1_sorted(&r.values, None),
            gradient: None,
        });
    }

    let n = r.len();
    let mut g = vec![0.0; n];
    let value = pairwise_l1_sorted(&r.values, Some(&mut g));

    // dL/dD_j = (g_j - mean(g) - z_j * sum_i(g_i z_i) / (N - 1)) / std
    let z: Vec<f64> = r
        .origin_indices
        .iter()
        .map(|&i| pred.map.values()[i])
        .collect();
    let g_mean = stats::mean(&g);
    let gz: f64 = g.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() / (n as f64 - 1.0);
    let chained: Vec<f64> = g
        .iter()
        .zip(&z)
        .map(|(&gj, &zj)| (gj - g_mean - zj * gz) / pred.std)
        .collect();
    Ok(LossResult {
        value,
        gradient: Some(r.scatter(&chained)),
    })
}
