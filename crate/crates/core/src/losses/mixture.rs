use super::{si_pairwise_l1, ssi_pairwise_l1, LossResult, Want};
use crate::error::{Error, Result};
use crate::map::{DepthKind, MaskedMap};

/// Term weights of the mixture loss. Both default to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureWeights {
    pub si: f64,
    pub ssi: f64,
}

impl Default for MixtureWeights {
    fn default() -> Self {
        MixtureWeights { si: 1.0, ssi: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureResult {
    /// Weighted sum of the terms; gradient with respect to the predicted
    /// log-disparity.
    pub total: LossResult,
    /// Unweighted SI term; `None` for UTSS ground truth.
    pub si: Option<f64>,
    /// Unweighted SSI term.
    pub ssi: f64,
}

/// SI + SSI mixture for a prediction made in the log-disparity domain.
///
/// `gt_disp` is the ground-truth disparity (inverse depth). For absolute and
/// UTS ground truth both terms are active and the SI term compares log depths
/// (`-log disparity`). For UTSS ground truth only the SSI term is used.
pub fn mixture_loss(
    pred_log_disp: &MaskedMap,
    gt_disp: &MaskedMap,
    kind: DepthKind,
    weights: MixtureWeights,
    want: Want,
) -> Result<MixtureResult> {
    let use_si = match kind {
        DepthKind::Absolute | DepthKind::Uts => true,
        DepthKind::Utss => false,
        DepthKind::Ordinal => return Err(Error::KindMismatch(kind)),
    };

    let pred_disp = pred_log_disp.to_exp()?;
    let ssi = ssi_pairwise_l1(&pred_disp, gt_disp, want)?;
    let mut value = weights.ssi * ssi.value;
    let mut gradient = ssi.gradient.map(|mut g| {
        // d/d(log D) = D * d/dD
        for ((g, &d), &m) in g.iter_mut().zip(pred_disp.values()).zip(pred_disp.mask()) {
            *g = if m { *g * d * weights.ssi } else { 0.0 };
        }
        g
    });

    let mut si_value = None;
    if use_si {
        let gt_log_depth = gt_disp.to_log()?.map_valid(|v| -v)?;
        let pred_log_depth = pred_log_disp.map_valid(|v| -v)?;
        let si = si_pairwise_l1(&pred_log_depth, &gt_log_depth, want)?;
        value += weights.si * si.value;
        if let (Some(total), Some(sg)) = (gradient.as_mut(), si.gradient) {
            for (t, s) in total.iter_mut().zip(sg) {
                *t -= weights.si * s;
            }
        }
        si_value = Some(si.value);
    }

    Ok(MixtureResult {
        total: LossResult { value, gradient },
        si: si_value,
        ssi: ssi.value,
    })
}
