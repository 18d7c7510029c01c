//! Evaluation metrics: threshold accuracy error, mean absolute relative
//! error, WHDR, and ground-truth depth capping.
//!
//! Metrics expect predictions that have already been aligned.

use crate::error::{Error, Result};
use crate::map::{DepthMap, MaskedMap, OrdinalPair, Relation};

/// Default ratio threshold for [`delta_error`].
pub const DELTA_THRESHOLD: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub delta_error: f64,
    pub rel: f64,
    pub whdr: Option<f64>,
    pub pixels_evaluated: usize,
    pub pairs_evaluated: usize,
}

fn joint_pixels<'a>(
    pred: &'a MaskedMap,
    gt: &'a MaskedMap,
) -> Result<impl Iterator<Item = (usize, f64, f64)> + 'a> {
    let joint = pred.joint_mask(gt)?;
    if !joint.iter().any(|&m| m) {
        return Err(Error::EmptyMask);
    }
    Ok(joint
        .into_iter()
        .enumerate()
        .filter(|&(_, m)| m)
        .map(move |(i, _)| (i, pred.values()[i], gt.values()[i])))
}

/// Fraction of jointly valid pixels with `max(pred/gt, gt/pred) > threshold`.
pub fn delta_error(
    pred: impl AsRef<MaskedMap>,
    gt: impl AsRef<MaskedMap>,
    threshold: f64,
) -> Result<f64> {
    if !(threshold > 1.0) {
        return Err(Error::InvalidParameter("delta threshold must exceed 1"));
    }
    let (pred, gt) = (pred.as_ref(), gt.as_ref());
    let mut total = 0usize;
    let mut bad = 0usize;
    for (i, p, g) in joint_pixels(pred, gt)? {
        if !(p > 0.0) {
            return Err(Error::NonPositiveValue { index: i, value: p });
        }
        if !(g > 0.0) {
            return Err(Error::NonPositiveValue { index: i, value: g });
        }
        total += 1;
        if libm::fmax(p / g, g / p) > threshold {
            bad += 1;
        }
    }
    Ok(bad as f64 / total as f64)
}

/// Mean of `|gt - pred| / |gt|` over jointly valid pixels.
pub fn rel_error(pred: impl AsRef<MaskedMap>, gt: impl AsRef<MaskedMap>) -> Result<f64> {
    let (pred, gt) = (pred.as_ref(), gt.as_ref());
    let mut total = 0usize;
    let mut sum = 0.0;
    for (i, p, g) in joint_pixels(pred, gt)? {
        if g == 0.0 {
            return Err(Error::ZeroGroundTruth { index: i });
        }
        total += 1;
        sum += libm::fabs(g - p) / libm::fabs(g);
    }
    Ok(sum / total as f64)
}

/// Fraction of ordinal pairs whose predicted ordering contradicts the
/// annotation. Equal predicted depths count as a disagreement.
pub fn whdr(pred: impl AsRef<MaskedMap>, pairs: &[OrdinalPair]) -> Result<f64> {
    let pred = pred.as_ref();
    if pairs.is_empty() {
        return Err(Error::NoPairs);
    }
    let lookup = |(x, y): (usize, usize)| pred.get(x, y).ok_or(Error::PairOutOfBounds { x, y });
    let mut wrong = 0usize;
    for pair in pairs {
        let a = lookup(pair.pixel_a)?;
        let b = lookup(pair.pixel_b)?;
        let agrees = match pair.relation {
            Relation::ACloser => a < b,
            Relation::BCloser => b < a,
        };
        if !agrees {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / pairs.len() as f64)
}

/// Marks ground-truth pixels deeper than `cap_meters` invalid. Values are
/// left untouched.
pub fn cap_depth(gt: &DepthMap, cap_meters: f64) -> Result<DepthMap> {
    if !(cap_meters > 0.0) {
        return Err(Error::InvalidParameter("depth cap must be positive"));
    }
    let m = gt.map();
    let mask = m
        .values()
        .iter()
        .zip(m.mask())
        .map(|(&v, &valid)| valid && v <= cap_meters)
        .collect();
    DepthMap::new(m.with_mask(mask)?, gt.kind())
}

/// Computes the full report for one image. `pairs` may be empty, in which
/// case WHDR is absent.
pub fn evaluate(
    pred: &DepthMap,
    gt: &DepthMap,
    pairs: &[OrdinalPair],
    threshold: f64,
) -> Result<MetricReport> {
    let delta = delta_error(pred, gt, threshold)?;
    let rel = rel_error(pred, gt)?;
    let pixels_evaluated = pred
        .map()
        .joint_mask(gt.map())?
        .iter()
        .filter(|&&m| m)
        .count();
    let whdr = if pairs.is_empty() {
        None
    } else {
        Some(whdr(pred, pairs)?)
    };
    Ok(MetricReport {
        delta_error: delta,
        rel,
        whdr,
        pixels_evaluated,
        pairs_evaluated: pairs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::DepthKind;
    use alloc::vec;

    fn depth(v: &[f64]) -> DepthMap {
        DepthMap::new(
            MaskedMap::full(v.len(), 1, v.to_vec()).unwrap(),
            DepthKind::Absolute,
        )
        .unwrap()
    }

    #[test]
    fn delta_examples() {
        let gt = depth(&[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(
            delta_error(depth(&[1.0, 1.2, 1.3, 2.0]), &gt, 1.25).unwrap(),
            0.5
        );
        assert_eq!(delta_error(&gt, &gt, 1.25).unwrap(), 0.0);
        assert_eq!(
            delta_error(depth(&[1.25, 1.25, 1.25, 1.25]), &gt, 1.25).unwrap(),
            0.0
        );
        assert!(delta_error(&gt, &gt, 1.0).is_err());
    }

    #[test]
    fn rel_examples() {
        assert_eq!(
            rel_error(depth(&[1.0, 5.0]), depth(&[2.0, 4.0])).unwrap(),
            0.375
        );
        let gt = depth(&[0.7, 3.0]);
        assert_eq!(rel_error(&gt, &gt).unwrap(), 0.0);
        assert_eq!(rel_error(depth(&[1.4, 6.0]), &gt).unwrap(), 1.0);
        let zero = MaskedMap::full(2, 1, vec![0.0, 1.0]).unwrap();
        assert_eq!(
            rel_error(&zero, &zero).unwrap_err(),
            Error::ZeroGroundTruth { index: 0 }
        );
    }

    #[test]
    fn whdr_examples() {
        let pair = [OrdinalPair::new((0, 0), (1, 0), Relation::ACloser)];
        assert_eq!(whdr(depth(&[2.0, 1.0]), &pair).unwrap(), 1.0);
        assert_eq!(whdr(depth(&[1.0, 2.0]), &pair).unwrap(), 0.0);
        assert_eq!(whdr(depth(&[1.5, 1.5]), &pair).unwrap(), 1.0);
        assert_eq!(whdr(depth(&[1.0, 2.0]), &[]).unwrap_err(), Error::NoPairs);
        let outside = [OrdinalPair::new((0, 0), (5, 0), Relation::BCloser)];
        assert_eq!(
            whdr(depth(&[1.0, 2.0]), &outside).unwrap_err(),
            Error::PairOutOfBounds { x: 5, y: 0 }
        );
    }

    #[test]
    fn capping() {
        let gt = depth(&[5.0, 9.0, 11.0]);
        let capped = cap_depth(&gt, 10.0).unwrap();
        assert_eq!(capped.map().mask(), &[true, true, false]);
        assert_eq!(capped.map().values(), gt.map().values());
        assert_eq!(cap_depth(&gt, 100.0).unwrap(), gt);

        let none = cap_depth(&gt, 1.0).unwrap();
        assert_eq!(rel_error(&gt, &none).unwrap_err(), Error::EmptyMask);
    }

    #[test]
    fn report_counts() {
        let gt = depth(&[1.0, 2.0, 3.0]);
        let r = evaluate(&gt, &gt, &[], DELTA_THRESHOLD).unwrap();
        assert_eq!(r.pixels_evaluated, 3);
        assert_eq!(r.whdr, None);
        assert_eq!(r.pairs_evaluated, 0);
    }
}
