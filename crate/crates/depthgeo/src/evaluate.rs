//! Batch evaluation of predicted depth maps against ground truth.

use std::path::{Path, PathBuf};

use depthgeo_core::alignment::align_shift_scale_lsq;
use depthgeo_core::metrics::{self, MetricReport};
use depthgeo_core::{stats, DepthKind, DepthMap, OrdinalPair};
use serde::{Deserialize, Serialize};

use crate::batch::{ensure_dir, list_pfm, ordered_map, write_text};
use crate::error::{Error, Result};
use crate::{pfm, records};

/// How the prediction is aligned to ground truth before metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignMode {
    /// Metrics on the raw prediction.
    None,
    /// Median shift of log disparity (UTS protocol).
    ScaleMedian,
    /// Least-squares scale and shift of disparity (UTSS protocol).
    ShiftScaleLsq,
}

/// Flat per-image record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub delta_1_25: f64,
    pub rel: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub whdr: Option<f64>,
    pub pixels_evaluated: usize,
    pub pairs_evaluated: usize,
    pub alignment_mode: AlignMode,
}

impl ReportRecord {
    pub fn new(report: &MetricReport, mode: AlignMode) -> Self {
        ReportRecord {
            delta_1_25: report.delta_error,
            rel: report.rel,
            whdr: report.whdr,
            pixels_evaluated: report.pixels_evaluated,
            pairs_evaluated: report.pairs_evaluated,
            alignment_mode: mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageFailure {
    pub image: String,
    pub error: String,
}

/// Dataset aggregate: unweighted means over successfully evaluated images
/// (WHDR over the images that carry pairs), summed counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRecord {
    #[serde(flatten)]
    pub metrics: Option<ReportRecord>,
    pub images: usize,
    pub failed: Vec<ImageFailure>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct EvaluateConfig {
    pub pred_dir: PathBuf,
    pub gt_dir: PathBuf,
    pub out_dir: Option<PathBuf>,
    pub align: AlignMode,
    pub threshold: f64,
    pub cap_meters: Option<f64>,
    pub jobs: usize,
}

#[derive(Debug, Clone)]
pub struct ImageOutcome {
    pub image: String,
    pub result: std::result::Result<ReportRecord, String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub images: Vec<ImageOutcome>,
    pub aggregate: AggregateRecord,
}

/// Aligns `pred` to `gt` and computes the metrics for one image.
///
/// Ground truth is capped first. Under least-squares alignment, pixels whose
/// aligned disparity is not positive cannot be turned back into depth; they
/// are excluded and reported in the warnings, as is a negative scale.
pub fn evaluate_image(
    pred: &DepthMap,
    gt: &DepthMap,
    pairs: &[OrdinalPair],
    mode: AlignMode,
    threshold: f64,
    cap_meters: Option<f64>,
) -> Result<(ReportRecord, Vec<String>)> {
    let gt = match cap_meters {
        Some(cap) => metrics::cap_depth(gt, cap)?,
        None => gt.clone(),
    };
    let mut warnings = Vec::new();
    let aligned = match mode {
        AlignMode::None => pred.clone(),
        AlignMode::ScaleMedian => {
            // Shifting log disparity by the lower median of
            // log(pred / gt) divides depth by the lower median ratio.
            let joint = pred.map().joint_mask(gt.map())?;
            let ratios: Vec<f64> = (0..joint.len())
                .filter(|&i| joint[i])
                .map(|i| pred.map().values()[i] / gt.map().values()[i])
                .collect();
            let ratio = stats::lower_median(&ratios).ok_or(depthgeo_core::Error::EmptyMask)?;
            DepthMap::new(pred.map().map_valid(|v| v / ratio)?, pred.kind())?
        }
        AlignMode::ShiftScaleLsq => {
            let pred_disp = pred.to_inverse()?;
            let gt_disp = gt.to_inverse()?;
            let a = align_shift_scale_lsq(pred_disp.map(), gt_disp.map())?;
            if a.negative_scale() {
                warnings.push(format!("negative alignment scale {}", a.scale));
            }
            let disp = a.apply(pred_disp.map())?;
            let positive: Vec<bool> = disp
                .values()
                .iter()
                .zip(disp.mask())
                .map(|(&v, &m)| m && v > 0.0)
                .collect();
            let dropped = disp.valid_count() - positive.iter().filter(|&&m| m).count();
            if dropped > 0 {
                warnings.push(format!(
                    "{dropped} pixels with non-positive aligned disparity excluded"
                ));
            }
            let depth = disp.with_mask(positive)?.map_valid(|v| 1.0 / v)?;
            DepthMap::new(depth, pred.kind())?
        }
    };
    let report = metrics::evaluate(&aligned, &gt, pairs, threshold)?;
    Ok((ReportRecord::new(&report, mode), warnings))
}

fn evaluate_file(cfg: &EvaluateConfig, name: &str) -> Result<(ReportRecord, Vec<String>)> {
    let pred_path = cfg.pred_dir.join(name);
    let gt_path = cfg.gt_dir.join(name);
    if !gt_path.is_file() {
        return Err(Error::MissingPair(name.to_string()));
    }
    let pred = pfm::read_depth(&pred_path, DepthKind::Uts)?;
    let gt = pfm::read_depth(&gt_path, DepthKind::Absolute)?;
    let pairs_path = gt_path.with_extension("pairs");
    let pairs = if pairs_path.is_file() {
        records::read_pairs(&pairs_path)?
    } else {
        Vec::new()
    };
    evaluate_image(&pred, &gt, &pairs, cfg.align, cfg.threshold, cfg.cap_meters)
}

/// Mean of per-image records in the given order.
pub fn aggregate(outcomes: &[ImageOutcome], mode: AlignMode) -> AggregateRecord {
    let ok: Vec<&ReportRecord> = outcomes
        .iter()
        .filter_map(|o| o.result.as_ref().ok())
        .collect();
    let failed = outcomes
        .iter()
        .filter_map(|o| {
            o.result.as_ref().err().map(|e| ImageFailure {
                image: o.image.clone(),
                error: e.clone(),
            })
        })
        .collect();
    let warnings = outcomes
        .iter()
        .flat_map(|o| o.warnings.iter().map(move |w| format!("{}: {w}", o.image)))
        .collect();
    let metrics = (!ok.is_empty()).then(|| {
        let n = ok.len() as f64;
        let whdrs: Vec<f64> = ok.iter().filter_map(|r| r.whdr).collect();
        ReportRecord {
            delta_1_25: ok.iter().map(|r| r.delta_1_25).sum::<f64>() / n,
            rel: ok.iter().map(|r| r.rel).sum::<f64>() / n,
            whdr: (!whdrs.is_empty()).then(|| whdrs.iter().sum::<f64>() / whdrs.len() as f64),
            pixels_evaluated: ok.iter().map(|r| r.pixels_evaluated).sum(),
            pairs_evaluated: ok.iter().map(|r| r.pairs_evaluated).sum(),
            alignment_mode: mode,
        }
    });
    AggregateRecord {
        metrics,
        images: ok.len(),
        failed,
        warnings,
    }
}

fn stem(name: &str) -> &str {
    Path::new(name)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(name)
}

/// Evaluates every `*.pfm` of the prediction directory against the
/// same-named ground-truth file. Per-image failures are recorded, not fatal.
/// With an output directory, writes `<stem>.json` per image and
/// `aggregate.json`.
pub fn cmd_evaluate(cfg: &EvaluateConfig) -> Result<Evaluation> {
    if !(cfg.threshold > 1.0) {
        return Err(Error::format("--threshold must be greater than 1"));
    }
    let mut names = list_pfm(&cfg.pred_dir)?;
    for extra in list_pfm(&cfg.gt_dir)? {
        if !names.contains(&extra) {
            names.push(extra);
        }
    }
    names.sort();

    let images: Vec<ImageOutcome> = ordered_map(cfg.jobs, &names, |_, name| {
        if !cfg.pred_dir.join(name).is_file() {
            return ImageOutcome {
                image: name.clone(),
                result: Err(Error::MissingPair(name.clone()).to_string()),
                warnings: Vec::new(),
            };
        }
        match evaluate_file(cfg, name) {
            Ok((record, warnings)) => ImageOutcome {
                image: name.clone(),
                result: Ok(record),
                warnings,
            },
            Err(e) => ImageOutcome {
                image: name.clone(),
                result: Err(e.to_string()),
                warnings: Vec::new(),
            },
        }
    });
    let aggregate = aggregate(&images, cfg.align);

    if let Some(out) = &cfg.out_dir {
        ensure_dir(out)?;
        for img in &images {
            if let Ok(record) = &img.result {
                write_text(
                    &out.join(format!("{}.json", stem(&img.image))),
                    &to_json(record),
                )?;
            }
        }
        write_text(&out.join("aggregate.json"), &to_json(&aggregate))?;
    }
    Ok(Evaluation { images, aggregate })
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use depthgeo_core::MaskedMap;

    fn depth(v: &[f64]) -> DepthMap {
        DepthMap::new(
            MaskedMap::full(v.len(), 1, v.to_vec()).unwrap(),
            DepthKind::Absolute,
        )
        .unwrap()
    }

    #[test]
    fn record_field_names() {
        let r = ReportRecord {
            delta_1_25: 0.5,
            rel: 0.25,
            whdr: None,
            pixels_evaluated: 4,
            pairs_evaluated: 0,
            alignment_mode: AlignMode::ScaleMedian,
        };
        let v: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        assert_eq!(
            keys,
            [
                "alignment_mode",
                "delta_1_25",
                "pairs_evaluated",
                "pixels_evaluated",
                "rel"
            ]
        );
        assert_eq!(v["alignment_mode"], "scale_median");
    }

    #[test]
    fn alignment_modes_on_scaled_prediction() {
        let gt = depth(&[1.0, 2.0, 4.0, 3.0]);
        let pred = depth(&[2.0, 4.0, 8.0, 6.0]);
        let (none, _) = evaluate_image(&pred, &gt, &[], AlignMode::None, 1.25, None).unwrap();
        assert_eq!(none.rel, 1.0);
        let (med, _) = evaluate_image(&pred, &gt, &[], AlignMode::ScaleMedian, 1.25, None).unwrap();
        assert_eq!(med.rel, 0.0);
        assert_eq!(med.delta_1_25, 0.0);
        let (lsq, w) =
            evaluate_image(&pred, &gt, &[], AlignMode::ShiftScaleLsq, 1.25, None).unwrap();
        assert!(lsq.rel < 1e-12);
        assert!(w.is_empty());
    }

    #[test]
    fn cap_reduces_pixel_count() {
        let gt = depth(&[1.0, 20.0, 4.0]);
        let (r, _) = evaluate_image(&gt, &gt, &[], AlignMode::None, 1.25, Some(10.0)).unwrap();
        assert_eq!(r.pixels_evaluated, 2);
    }

    #[test]
    fn reversed_prediction_warns() {
        let gt = depth(&[1.0, 2.0, 4.0]);
        let pred = depth(&[4.0, 2.0, 1.0]);
        let (_, w) = evaluate_image(&pred, &gt, &[], AlignMode::ShiftScaleLsq, 1.25, None).unwrap();
        assert!(w.iter().any(|m| m.contains("negative")));
    }

    #[test]
    fn median_ratio_matches_log_disparity_alignment() {
        use depthgeo_core::alignment::align_scale_median;
        let gt = depth(&[1.0, 2.0, 4.0, 3.0, 5.0, 7.0]);
        let pred = depth(&[1.5, 2.5, 3.0, 6.0, 4.0, 9.0]);
        let (direct, _) =
            evaluate_image(&pred, &gt, &[], AlignMode::ScaleMedian, 1.25, None).unwrap();
        let neg_log = |d: &DepthMap| d.to_log().unwrap().map_valid(|v| -v).unwrap();
        let a = align_scale_median(&neg_log(&pred), &neg_log(&gt)).unwrap();
        let via_log = a
            .apply(&neg_log(&pred))
            .unwrap()
            .map_valid(|v| (-v).exp())
            .unwrap();
        let via_log = DepthMap::new(via_log, DepthKind::Uts).unwrap();
        let expected = metrics::rel_error(&via_log, &gt).unwrap();
        assert!((direct.rel - expected).abs() < 1e-12);
    }
}
