//! Stereo frame filtering over a directory of disparity pairs.

use std::fmt::Write as _;
use std::path::PathBuf;

use depthgeo_core::pipeline::{
    frame_accept, lr_consistency_mask, trim_frames_by, FrameRules, StereoDisparityPair,
};

use crate::batch::{list_pfm, ordered_map, write_text};
use crate::error::{Error, Result};
use crate::pfm;

#[derive(Debug, Clone)]
pub struct FilterConfig {
    /// Left-to-right disparities, one PFM per frame.
    pub lr_dir: PathBuf,
    /// Right-to-left disparities with matching file names.
    pub rl_dir: PathBuf,
    pub manifest: Option<PathBuf>,
    pub rules: FrameRules,
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrameOutcome {
    Accepted {
        valid_fraction: f64,
        disparity_range: f64,
    },
    Rejected {
        valid_fraction: f64,
        disparity_range: f64,
    },
    Error(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub path: String,
    pub outcome: FrameOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterReport {
    pub total_frames: usize,
    pub frames: Vec<FrameRecord>,
}

impl FilterReport {
    pub fn accepted(&self) -> usize {
        self.frames
            .iter()
            .filter(|f| matches!(f.outcome, FrameOutcome::Accepted { .. }))
            .count()
    }

    /// One tab-separated line per examined frame:
    /// `path decision valid_fraction disparity_range`. Errors carry the
    /// message in place of the statistics.
    pub fn manifest(&self) -> String {
        let mut s = String::from("# path\tdecision\tvalid_fraction\tdisparity_range\n");
        for f in &self.frames {
            let _ = match &f.outcome {
                FrameOutcome::Accepted {
                    valid_fraction,
                    disparity_range,
                } => writeln!(s, "{}\taccept\t{valid_fraction}\t{disparity_range}", f.path),
                FrameOutcome::Rejected {
                    valid_fraction,
                    disparity_range,
                } => writeln!(s, "{}\treject\t{valid_fraction}\t{disparity_range}", f.path),
                FrameOutcome::Error(e) => {
                    writeln!(s, "{}\terror\t{}", f.path, e.replace(['\t', '\n'], " "))
                }
            };
        }
        s
    }
}

fn examine(cfg: &FilterConfig, name: &str) -> Result<FrameOutcome> {
    let lr = pfm::read(cfg.lr_dir.join(name))?;
    let rl_path = cfg.rl_dir.join(name);
    if !rl_path.is_file() {
        return Err(Error::MissingPair(name.to_string()));
    }
    let rl = pfm::read(rl_path)?;
    let pair = StereoDisparityPair::new(lr, rl)?;
    let mask = lr_consistency_mask(&pair, cfg.rules.consistency_px)?;
    let d = frame_accept(pair.left_to_right(), &mask, &cfg.rules)?;
    Ok(if d.accepted {
        FrameOutcome::Accepted {
            valid_fraction: d.valid_fraction,
            disparity_range: d.disparity_range,
        }
    } else {
        FrameOutcome::Rejected {
            valid_fraction: d.valid_fraction,
            disparity_range: d.disparity_range,
        }
    })
}

/// Trims the sorted frame list, then checks every retained frame.
pub fn cmd_filter(cfg: &FilterConfig) -> Result<FilterReport> {
    let names = list_pfm(&cfg.lr_dir)?;
    let kept = &names[trim_frames_by(names.len(), cfg.rules.trim_fraction)];
    let frames = ordered_map(cfg.jobs, kept, |_, name| FrameRecord {
        path: name.clone(),
        outcome: examine(cfg, name).unwrap_or_else(|e| FrameOutcome::Error(e.to_string())),
    });
    let report = FilterReport {
        total_frames: names.len(),
        frames,
    };
    if let Some(path) = &cfg.manifest {
        write_text(path, &report.manifest())?;
    }
    Ok(report)
}
