//! Stereo-disparity validity rules and the UTS / UTSS data synthesizers.
//!
//! Disparity convention: both directional maps store non-negative magnitudes
//! and left pixel `x` corresponds to right pixel `x - D_lr(x, y)`; right pixel
//! `x'` corresponds to left pixel `x' + D_rl(x', y)`.

use alloc::vec::Vec;
use core::ops::Range;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::map::{DepthKind, DepthMap, DisparityMap, MaskedMap};
use crate::stats;

/// Thresholds of the stereo frame filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameRules {
    /// Left-right discrepancy must be strictly below this (pixels).
    pub consistency_px: f64,
    /// Valid fraction must be strictly above this.
    pub min_valid_fraction: f64,
    /// `max - min` of valid disparities must be strictly above this (pixels).
    pub min_disparity_range: f64,
    /// Fraction of frames dropped at each end of a sequence.
    pub trim_fraction: f64,
}

impl Default for FrameRules {
    fn default() -> Self {
        FrameRules {
            consistency_px: 8.0,
            min_valid_fraction: 0.8,
            min_disparity_range: 8.0,
            trim_fraction: 0.1,
        }
    }
}

/// Left-to-right and right-to-left disparities of one rectified frame.
#[derive(Debug, Clone, PartialEq)]
pub struct StereoDisparityPair {
    left_to_right: MaskedMap,
    right_to_left: MaskedMap,
}

impl StereoDisparityPair {
    pub fn new(left_to_right: MaskedMap, right_to_left: MaskedMap) -> Result<Self> {
        left_to_right.check_same_dims(&right_to_left)?;
        for m in [&left_to_right, &right_to_left] {
            if m.values()
                .iter()
                .zip(m.mask())
                .any(|(&v, &ok)| ok && v < 0.0)
            {
                return Err(Error::InvalidParameter(
                    "stereo disparities must be non-negative magnitudes",
                ));
            }
        }
        Ok(StereoDisparityPair {
            left_to_right,
            right_to_left,
        })
    }

    pub fn left_to_right(&self) -> &MaskedMap {
        &self.left_to_right
    }

    pub fn right_to_left(&self) -> &MaskedMap {
        &self.right_to_left
    }
}

/// Pixel `(x, y)` of the left view is valid iff `x' = round(x - D_lr)` lies
/// inside the image, both maps are valid there, and
/// `|D_lr(x, y) - D_rl(x', y)| < threshold_px`.
pub fn lr_consistency_mask(pair: &StereoDisparityPair, threshold_px: f64) -> Result<Vec<bool>> {
    if !(threshold_px > 0.0) {
        return Err(Error::InvalidParameter(
            "consistency threshold must be positive",
        ));
    }
    let (lr, rl) = (&pair.left_to_right, &pair.right_to_left);
    let (w, h) = lr.dims();
    let mut mask = alloc::vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let Some(d) = lr.get(x, y) else { continue };
            let xr = libm::round(x as f64 - d);
            if !(xr >= 0.0 && xr < w as f64) {
                continue;
            }
            if let Some(back) = rl.get(xr as usize, y) {
                mask[y * w + x] = libm::fabs(d - back) < threshold_px;
            }
        }
    }
    Ok(mask)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameDecision {
    pub accepted: bool,
    pub valid_fraction: f64,
    pub disparity_range: f64,
}

/// Accepts a frame iff strictly more than the required fraction of pixels is
/// valid and the valid disparities span strictly more than the required range.
pub fn frame_accept(disp: &MaskedMap, mask: &[bool], rules: &FrameRules) -> Result<FrameDecision> {
    if disp.is_empty() {
        return Err(Error::EmptyMask);
    }
    let valid = disp.restrict(mask)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut count = 0usize;
    for (&v, &m) in valid.values().iter().zip(valid.mask()) {
        if m {
            count += 1;
            lo = libm::fmin(lo, v);
            hi = libm::fmax(hi, v);
        }
    }
    let valid_fraction = count as f64 / disp.len() as f64;
    let disparity_range = if count == 0 { 0.0 } else { hi - lo };
    Ok(FrameDecision {
        accepted: valid_fraction > rules.min_valid_fraction
            && disparity_range > rules.min_disparity_range,
        valid_fraction,
        disparity_range,
    })
}

/// Half-open range of frames kept after dropping `ceil(0.1 n)` frames at each
/// end. Empty for very short sequences.
pub fn trim_frames(frame_count: usize) -> Range<usize> {
    trim_frames_by(frame_count, FrameRules::default().trim_fraction)
}

pub fn trim_frames_by(frame_count: usize, fraction: f64) -> Range<usize> {
    // The default 10% is computed in integers so that e.g. n = 100 trims
    // exactly 10 rather than ceil(10.000000000000002).
    let cut = if fraction == 0.1 {
        frame_count.div_ceil(10)
    } else {
        libm::ceil(fraction * frame_count as f64) as usize
    };
    let start = cut.min(frame_count);
    let end = frame_count.saturating_sub(cut).max(start);
    start..end
}

/// Random-draw ranges of the synthesizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthRanges {
    /// Scales are log-uniform in `[scale_min, scale_max]`.
    pub scale_min: f64,
    pub scale_max: f64,
    /// UTSS shifts are uniform in `[-f, f] * median(1/depth)`.
    pub shift_fraction: f64,
}

impl Default for SynthRanges {
    fn default() -> Self {
        SynthRanges {
            scale_min: 0.25,
            scale_max: 4.0,
            shift_fraction: 0.5,
        }
    }
}

impl SynthRanges {
    fn draw_scale(&self, rng: &mut ChaCha8Rng) -> f64 {
        let (lo, hi) = (libm::log(self.scale_min), libm::log(self.scale_max));
        libm::exp(lo + rng.random::<f64>() * (hi - lo))
    }

    fn check(&self) -> Result<()> {
        if !(self.scale_min > 0.0 && self.scale_max >= self.scale_min) {
            return Err(Error::InvalidParameter(
                "scale range must be positive and ordered",
            ));
        }
        if !(self.shift_fraction >= 0.0) {
            return Err(Error::InvalidParameter(
                "shift fraction must be non-negative",
            ));
        }
        Ok(())
    }
}

/// Deterministic generator for one frame: the `frame`-th stream of the
/// ChaCha8 generator seeded with `seed`. Serial and parallel runs draw the
/// same numbers for the same frame.
pub fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    rng
}

/// A synthesized map with the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthesized<M> {
    pub map: M,
    pub scale: f64,
    pub shift: f64,
}

fn require_absolute(depth: &DepthMap) -> Result<()> {
    if depth.kind() != DepthKind::Absolute {
        return Err(Error::KindMismatch(depth.kind()));
    }
    Ok(())
}

/// Multiplies absolute depth by a random positive scale.
pub fn make_uts(
    depth: &DepthMap,
    seed: u64,
    frame: u64,
    ranges: &SynthRanges,
) -> Result<Synthesized<DepthMap>> {
    require_absolute(depth)?;
    ranges.check()?;
    let mut rng = frame_rng(seed, frame);
    let scale = ranges.draw_scale(&mut rng);
    let map = DepthMap::new(depth.map().map_valid(|v| scale * v)?, DepthKind::Uts)?;
    Ok(Synthesized {
        map,
        scale,
        shift: 0.0,
    })
}

/// Turns absolute depth into `a / depth + b` with random scale `a` and shift
/// `b` proportional to the median inverse depth.
pub fn make_utss(
    depth: &DepthMap,
    seed: u64,
    frame: u64,
    ranges: &SynthRanges,
) -> Result<Synthesized<DisparityMap>> {
    require_absolute(depth)?;
    ranges.check()?;
    let inverse = depth.to_inverse()?;
    let median =
        stats::lower_median(&inverse.map().masked_values()?.values).ok_or(Error::EmptyMask)?;
    let mut rng = frame_rng(seed, frame);
    let scale = ranges.draw_scale(&mut rng);
    let shift = (2.0 * rng.random::<f64>() - 1.0) * ranges.shift_fraction * median;
    let map = inverse.map().map_valid(|v| scale * v + shift)?;
    Ok(Synthesized {
        map: DisparityMap::new(map, DepthKind::Utss)?,
        scale,
        shift,
    })
}

/// Tags `round(p n)` of `n` samples as UTS and the rest as UTSS, with the
/// UTS subset chosen by a seeded shuffle.
pub fn mixture_manifest(sample_count: usize, p: f64, seed: u64) -> Result<Vec<DepthKind>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(
            "mixture fraction must be in [0, 1]",
        ));
    }
    let uts = libm::round(p * sample_count as f64) as usize;
    let mut order: Vec<usize> = (0..sample_count).collect();
    order.shuffle(&mut frame_rng(seed, u64::MAX));
    let mut kinds = alloc::vec![DepthKind::Utss; sample_count];
    for &i in &order[..uts] {
        kinds[i] = DepthKind::Uts;
    }
    Ok(kinds)
}
