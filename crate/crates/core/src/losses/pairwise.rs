use alloc::vec::Vec;

use super::{run_kernel, LossResult, ResidualVector, Want};
use crate::error::{Error, Result};
use crate::map::MaskedMap;

/// Largest N accepted by the quadratic reference implementations.
pub const NAIVE_LIMIT: usize = 4096;

/// Pairwise L1 loss `(1/N^2) sum_{i,j} |R_i - R_j|` in O(N log N).
///
/// The residuals are stably sorted ascending; the element of 0-based rank `r`
/// enters the sum with integer weight `2r - (N - 1)`. The gradient at that
/// element is the same weight times `2/N^2`. Exactly tied residuals share the
/// mean weight of their group, which keeps the subgradient independent of
/// input order and zero for a constant residual.
pub fn pairwise_l1_sorted(residuals: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let n = residuals.len();
    if n < 2 {
        if let Some(g) = grad {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        return 0.0;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| residuals[a].total_cmp(&residuals[b]));

    let scale = 2.0 / (n as f64 * n as f64);
    // The weights sum to zero, so subtracting the minimum changes nothing
    // except rounding.
    let base = residuals[order[0]];
    let mut acc = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        let weight = (2 * rank) as f64 - (n - 1) as f64;
        acc += (residuals[i] - base) * weight;
    }
    if let Some(g) = grad {
        let mut start = 0;
        while start < n {
            let value = residuals[order[start]];
            let mut end = start + 1;
            while end < n && residuals[order[end]] == value {
                end += 1;
            }
            // mean of 2r - (n-1) over r in start..end
            let weight = (start + end - 1) as f64 - (n - 1) as f64;
            for &i in &order[start..end] {
                g[i] = scale * weight;
            }
            start = end;
        }
    }
    (scale * acc).max(0.0)
}

/// Literal double sum over all ordered pairs. Reference for
/// [`pairwise_l1_sorted`].
pub fn pairwise_l1_naive(residuals: &[f64]) -> Result<f64> {
    let n = residuals.len();
    if n > NAIVE_LIMIT {
        return Err(Error::OracleSizeExceeded {
            limit: NAIVE_LIMIT,
            got: n,
        });
    }
    let mut total = 0.0;
    for &a in residuals {
        for &b in residuals {
            total += libm::fabs(a - b);
        }
    }
    Ok(total / (n as f64 * n as f64))
}

/// `(1/N) sum R_i^2 - (1/N^2) (sum R_i)^2`, the population variance of the
/// residuals, in O(N). Gradient `(2/N)(R_i - mean)`.
pub fn pairwise_l2_variance(residuals: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let n = residuals.len() as f64;
    let mean = crate::stats::mean(residuals);
    // Centered form of the same quantity; numerically stable.
    let value = residuals
        .iter()
        .map(|r| (r - mean) * (r - mean))
        .sum::<f64>()
        / n;
    if let Some(g) = grad {
        for (g, r) in g.iter_mut().zip(residuals) {
            *g = 2.0 / n * (r - mean);
        }
    }
    value
}

/// Literal `(1/N^2) sum_{i,j} (R_i - R_j)^2`; equals twice
/// [`pairwise_l2_variance`].
pub fn pairwise_l2_literal_naive(residuals: &[f64]) -> Result<f64> {
    let n = residuals.len();
    if n > NAIVE_LIMIT {
        return Err(Error::OracleSizeExceeded {
            limit: NAIVE_LIMIT,
            got: n,
        });
    }
    let mut total = 0.0;
    for &a in residuals {
        for &b in residuals {
            total += (a - b) * (a - b);
        }
    }
    Ok(total / (n as f64 * n as f64))
}

/// Scale-invariant pairwise L1 loss between two log-depth maps.
pub fn si_pairwise_l1(pred_log: &MaskedMap, gt_log: &MaskedMap, want: Want) -> Result<LossResult> {
    let r = ResidualVector::between(pred_log, gt_log)?;
    r.require(2)?;
    Ok(run_kernel(&r, want, pairwise_l1_sorted))
}

/// Quadratic-time reference for [`si_pairwise_l1`] (value only).
pub fn si_pairwise_l1_naive(pred_log: &MaskedMap, gt_log: &MaskedMap) -> Result<LossResult> {
    let r = ResidualVector::between(pred_log, gt_log)?;
    r.require(2)?;
    Ok(LossResult {
        value: pairwise_l1_naive(&r.values)?,
        gradient: None,
    })
}

/// Pairwise L2 loss in its O(N) variance form.
///
/// The literal mean of squared pairwise differences is exactly twice this.
pub fn l2_pairwise(pred_log: &MaskedMap, gt_log: &MaskedMap, want: Want) -> Result<LossResult> {
    let r = ResidualVector::between(pred_log, gt_log)?;
    r.require(2)?;
    Ok(run_kernel(&r, want, pairwise_l2_variance))
}
