#![allow(dead_code)]

use depthgeo_core::MaskedMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Central finite differences of `f` at every valid pixel of `x`.
pub fn finite_difference(x: &MaskedMap, h: f64, f: impl Fn(&MaskedMap) -> f64) -> Vec<f64> {
    let at = |values: Vec<f64>| {
        MaskedMap::new(x.width(), x.height(), values, x.mask().to_vec()).unwrap()
    };
    let mut out = vec![0.0; x.len()];
    for i in 0..x.len() {
        if !x.mask()[i] {
            continue;
        }
        let mut plus = x.values().to_vec();
        let mut minus = x.values().to_vec();
        plus[i] += h;
        minus[i] -= h;
        out[i] = (f(&at(plus)) - f(&at(minus))) / (2.0 * h);
    }
    out
}

/// `max |a - b|` divided by the max-norm of the reference `b`.
pub fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let scale = numeric
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    analytic
        .iter()
        .zip(numeric)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        / scale
}

pub fn random_dims(rng: &mut ChaCha8Rng) -> (usize, usize) {
    (rng.random_range(8..=16), rng.random_range(8..=16))
}

pub fn uniform_map(rng: &mut ChaCha8Rng, w: usize, h: usize, lo: f64, hi: f64) -> MaskedMap {
    let v = (0..w * h).map(|_| rng.random_range(lo..hi)).collect();
    MaskedMap::full(w, h, v).unwrap()
}

/// Log-depth prediction and ground truth whose residuals are a shuffled,
/// jittered grid: pairwise distinct with gaps of at least `0.2 * 4/N` and
/// bounded away from zero.
pub fn separated_log_pair(rng: &mut ChaCha8Rng, w: usize, h: usize) -> (MaskedMap, MaskedMap) {
    let n = w * h;
    let step = 4.0 / n as f64;
    let mut residuals: Vec<f64> = (0..n)
        .map(|k| (k as f64 + rng.random_range(0.2..0.8)) * step - 2.0)
        .collect();
    residuals.shuffle(rng);
    let gt = uniform_map(rng, w, h, -1.5, 1.5);
    let pred: Vec<f64> = gt
        .values()
        .iter()
        .zip(&residuals)
        .map(|(g, r)| g + r)
        .collect();
    (MaskedMap::full(w, h, pred).unwrap(), gt)
}

/// Smallest gap between sorted values.
pub fn min_gap(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}
