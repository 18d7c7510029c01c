//! Fitting the free parameters of a prediction to ground truth before
//! evaluation: a log-domain shift (median) or a disparity-domain affine map
//! (least squares).

use crate::error::{Error, Result};
use crate::map::MaskedMap;
use crate::stats;

/// Additive constant in the log domain (the log of a multiplicative scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleAlignment {
    pub log_shift: f64,
}

/// `aligned = scale * pred + shift` in the disparity domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftScaleAlignment {
    pub scale: f64,
    pub shift: f64,
}

impl ShiftScaleAlignment {
    /// A negative scale flips the depth ordering; depth reconstructed from
    /// such an alignment is meaningless and callers should surface it.
    pub fn negative_scale(&self) -> bool {
        self.scale < 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alignment {
    Identity,
    Scale(ScaleAlignment),
    ShiftScale(ShiftScaleAlignment),
}

impl From<ScaleAlignment> for Alignment {
    fn from(a: ScaleAlignment) -> Self {
        Alignment::Scale(a)
    }
}

impl From<ShiftScaleAlignment> for Alignment {
    fn from(a: ShiftScaleAlignment) -> Self {
        Alignment::ShiftScale(a)
    }
}

/// Lower median of `gt_log - pred_log` over the joint mask. This shift
/// minimizes `sum |pred_log + s - gt_log|`.
pub fn align_scale_median(pred_log: &MaskedMap, gt_log: &MaskedMap) -> Result<ScaleAlignment> {
    let r = crate::losses::ResidualVector::between(gt_log, pred_log)?;
    let log_shift = stats::lower_median(&r.values).ok_or(Error::EmptyMask)?;
    Ok(ScaleAlignment { log_shift })
}

/// Closed-form least-squares fit of `scale * pred + shift` to `gt`.
pub fn align_shift_scale_lsq(
    pred_disp: &MaskedMap,
    gt_disp: &MaskedMap,
) -> Result<ShiftScaleAlignment> {
    let joint = pred_disp.joint_mask(gt_disp)?;
    let mut n = 0usize;
    let (mut sp, mut sg) = (0.0, 0.0);
    for (i, &m) in joint.iter().enumerate() {
        if m {
            n += 1;
            sp += pred_disp.values()[i];
            sg += gt_disp.values()[i];
        }
    }
    if n < 2 {
        return Err(Error::TooFewPixels {
            required: 2,
            got: n,
        });
    }
    let (pm, gm) = (sp / n as f64, sg / n as f64);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (i, &m) in joint.iter().enumerate() {
        if m {
            let dp = pred_disp.values()[i] - pm;
            sxx += dp * dp;
            sxy += dp * (gt_disp.values()[i] - gm);
        }
    }
    let floor = 1e-12 * libm::fmax(1.0, libm::fabs(pm));
    if !(sxx > floor * floor * n as f64) {
        return Err(Error::DegeneratePrediction);
    }
    let scale = sxy / sxx;
    let shift = gm - scale * pm;
    if !scale.is_finite() || !shift.is_finite() {
        return Err(Error::DegeneratePrediction);
    }
    Ok(ShiftScaleAlignment { scale, shift })
}

impl ScaleAlignment {
    pub fn apply(&self, log_map: &MaskedMap) -> Result<MaskedMap> {
        let s = self.log_shift;
        log_map.map_valid(|v| v + s)
    }
}

impl ShiftScaleAlignment {
    pub fn apply(&self, disp: &MaskedMap) -> Result<MaskedMap> {
        let (a, b) = (self.scale, self.shift);
        disp.map_valid(|v| a * v + b)
    }
}

/// Applies a log-domain shift or a disparity-domain affine map to the valid
/// pixels; the mask is preserved.
pub fn apply_alignment(map: &MaskedMap, alignment: &Alignment) -> Result<MaskedMap> {
    match alignment {
        Alignment::Identity => Ok(map.clone()),
        Alignment::Scale(a) => {
            if !a.log_shift.is_finite() {
                return Err(Error::InvalidParameter("alignment is not finite"));
            }
            a.apply(map)
        }
        Alignment::ShiftScale(a) => {
            if !a.scale.is_finite() || !a.shift.is_finite() {
                return Err(Error::InvalidParameter("alignment is not finite"));
            }
            a.apply(map)
        }
    }
}
