use super::{run_kernel, LossResult, ResidualVector, Want};
use crate::error::Result;
use crate::map::MaskedMap;
use crate::stats;

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `(1/N) sum |R_i|`.
pub fn pointwise_l1_residuals(residuals: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let n = residuals.len() as f64;
    if let Some(g) = grad {
        for (g, &r) in g.iter_mut().zip(residuals) {
            *g = sign(r) / n;
        }
    }
    residuals.iter().map(|&r| libm::fabs(r)).sum::<f64>() / n
}

/// `(1/N) sum R_i^2`.
pub fn pointwise_l2_residuals(residuals: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let n = residuals.len() as f64;
    if let Some(g) = grad {
        for (g, &r) in g.iter_mut().zip(residuals) {
            *g = 2.0 * r / n;
        }
    }
    residuals.iter().map(|&r| r * r).sum::<f64>() / n
}

/// `(1/N) sum (R_i - mean(R))^2`.
pub fn si_pointwise_l2_residuals(residuals: &[f64], grad: Option<&mut [f64]>) -> f64 {
    super::pairwise_l2_variance(residuals, grad)
}

/// `(1/N) sum |R_i - median(R)|` with the lower median.
///
/// The median element's own gradient collects the derivative that flows
/// through the median: `-(1/N) sum_{j != m} sign(R_j - R_m)`.
pub fn si_pointwise_l1_residuals(residuals: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let n = residuals.len() as f64;
    let Some(mi) = stats::lower_median_index(residuals) else {
        return 0.0;
    };
    let median = residuals[mi];
    if let Some(g) = grad {
        let mut through_median = 0.0;
        for (j, (g, &r)) in g.iter_mut().zip(residuals).enumerate() {
            if j == mi {
                continue;
            }
            let s = sign(r - median);
            *g = s / n;
            through_median -= s / n;
        }
        g[mi] = through_median;
    }
    residuals
        .iter()
        .map(|&r| libm::fabs(r - median))
        .sum::<f64>()
        / n
}

/// Pointwise L1 loss on log depth.
pub fn pointwise_l1(pred_log: &MaskedMap, gt_log: &MaskedMap, want: Want) -> Result<LossResult> {
    let r = ResidualVector::between(pred_log, gt_log)?;
    Ok(run_kernel(&r, want, pointwise_l1_residuals))
}

/// Pointwise L2 loss on log depth.
pub fn pointwise_l2(pred_log: &MaskedMap, gt_log: &MaskedMap, want: Want) -> Result<LossResult> {
    let r = ResidualVector::between(pred_log, gt_log)?;
    Ok(run_kernel(&r, want, pointwise_l2_residuals))
}

/// Mean-centered pointwise L2 loss on log depth.
pub fn si_pointwise_l2(pred_log: &MaskedMap, gt_log: &MaskedMap, want: Want) -> Result<LossResult> {
    let r = ResidualVector::between(pred_log, gt_log)?;
    Ok(run_kernel(&r, want, si_pointwise_l2_residuals))
}

/// Median-centered pointwise L1 loss on log depth.
pub fn si_pointwise_l1(pred_log: &MaskedMap, gt_log: &MaskedMap, want: Want) -> Result<LossResult> {
    let r = ResidualVector::between(pred_log, gt_log)?;
    Ok(run_kernel(&r, want, si_pointwise_l1_residuals))
}
