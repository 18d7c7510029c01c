//! Small order statistics shared by the loss, alignment and synthesis code.

use alloc::vec::Vec;

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Position (in the original slice) of the lower median: the element at
/// sorted index `ceil(n/2) - 1`. Ties are broken by original position.
pub fn lower_median_index(values: &[f64]) -> Option<usize> {
    if values.is_empty() {
        return None;
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Some(order[values.len().div_ceil(2) - 1])
}

pub fn lower_median(values: &[f64]) -> Option<f64> {
    lower_median_index(values).map(|i| values[i])
}

/// Square root of the `1/(n-1)`-weighted sum of squared deviations.
pub fn sample_std(values: &[f64], mean: f64) -> f64 {
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    libm::sqrt(ss / (values.len() as f64 - 1.0))
}
