//! Converts a directory of absolute depth maps into a seeded UTS / UTSS mix.

use std::fmt::Write as _;
use std::path::PathBuf;

use depthgeo_core::pipeline::{make_uts, make_utss, mixture_manifest, SynthRanges};
use depthgeo_core::DepthKind;

use crate::batch::{ensure_dir, list_pfm, ordered_map, write_text};
use crate::error::{Error, Result};
use crate::pfm;

#[derive(Debug, Clone)]
pub struct SynthesizeConfig {
    pub input_dir: PathBuf,
    pub out_dir: PathBuf,
    /// Fraction of samples converted to UTS; the rest become UTSS.
    pub p: f64,
    pub seed: u64,
    pub ranges: SynthRanges,
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub file: String,
    pub kind: DepthKind,
    /// `(scale, shift)` actually drawn, or the error message.
    pub result: std::result::Result<(f64, f64), String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisReport {
    pub samples: Vec<SampleRecord>,
}

impl SynthesisReport {
    pub fn count(&self, kind: DepthKind) -> usize {
        self.samples.iter().filter(|s| s.kind == kind).count()
    }

    /// `file kind scale shift`, tab-separated. UTS files hold depth, UTSS
    /// files hold disparity.
    pub fn manifest(&self) -> String {
        let mut s = String::from("# file\tkind\tscale\tshift\n");
        for r in &self.samples {
            let _ = match &r.result {
                Ok((a, b)) => writeln!(s, "{}\t{}\t{a}\t{b}", r.file, r.kind.as_str()),
                Err(e) => writeln!(
                    s,
                    "{}\t{}\terror\t{}",
                    r.file,
                    r.kind.as_str(),
                    e.replace(['\t', '\n'], " ")
                ),
            };
        }
        s
    }
}

fn convert(
    cfg: &SynthesizeConfig,
    index: usize,
    name: &str,
    kind: DepthKind,
) -> Result<(f64, f64)> {
    let depth = pfm::read_depth(cfg.input_dir.join(name), DepthKind::Absolute)?;
    let out = cfg.out_dir.join(name);
    match kind {
        DepthKind::Uts => {
            let s = make_uts(&depth, cfg.seed, index as u64, &cfg.ranges)?;
            pfm::write(out, s.map.map())?;
            Ok((s.scale, s.shift))
        }
        _ => {
            let s = make_utss(&depth, cfg.seed, index as u64, &cfg.ranges)?;
            pfm::write(out, s.map.map())?;
            Ok((s.scale, s.shift))
        }
    }
}

/// Writes converted maps and `manifest.txt` into the output directory.
/// Sample `i` (in file-name order) draws from stream `i` of the seed.
pub fn cmd_synthesize(cfg: &SynthesizeConfig) -> Result<SynthesisReport> {
    if !(0.0..=1.0).contains(&cfg.p) {
        return Err(Error::format("--p must lie in [0, 1]"));
    }
    let names = list_pfm(&cfg.input_dir)?;
    let kinds = mixture_manifest(names.len(), cfg.p, cfg.seed)?;
    ensure_dir(&cfg.out_dir)?;
    let samples = ordered_map(cfg.jobs, &names, |i, name| SampleRecord {
        file: name.clone(),
        kind: kinds[i],
        result: convert(cfg, i, name, kinds[i]).map_err(|e| e.to_string()),
    });
    let report = SynthesisReport { samples };
    write_text(&cfg.out_dir.join("manifest.txt"), &report.manifest())?;
    Ok(report)
}
