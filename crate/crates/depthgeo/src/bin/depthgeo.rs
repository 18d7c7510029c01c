use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use depthgeo::core::pipeline::{FrameRules, SynthRanges};
use depthgeo::core::DepthKind;
use depthgeo::evaluate::{cmd_evaluate, AlignMode, EvaluateConfig};
use depthgeo::filter::{cmd_filter, FilterConfig};
use depthgeo::selfcheck::{run_selfcheck, SelfCheckConfig};
use depthgeo::synthesize::{cmd_synthesize, SynthesizeConfig};
use depthgeo::{cloud, Error};

#[derive(Parser)]
#[command(
    name = "depthgeo",
    version,
    about = "Depth map evaluation, back-projection and dataset tools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute delta, rel and WHDR for a directory of predictions.
    Evaluate(EvaluateArgs),
    /// Turn a depth PFM into a binary PLY point cloud.
    Backproject(BackprojectArgs),
    /// Check stereo frames for left-right consistency and write a manifest.
    Filter(FilterArgs),
    /// Convert absolute depth maps into a seeded UTS/UTSS mixture.
    Synthesize(SynthesizeArgs),
    /// Run the built-in loss, gradient and invariance checks.
    Selfcheck(SelfcheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Align {
    None,
    Median,
    Lsq,
}

impl From<Align> for AlignMode {
    fn from(a: Align) -> Self {
        match a {
            Align::None => AlignMode::None,
            Align::Median => AlignMode::ScaleMedian,
            Align::Lsq => AlignMode::ShiftScaleLsq,
        }
    }
}

#[derive(Args)]
struct EvaluateArgs {
    /// Directory of predicted depth PFMs.
    #[arg(long)]
    pred: PathBuf,
    /// Directory of ground-truth depth PFMs with matching names.
    #[arg(long)]
    gt: PathBuf,
    /// Directory for per-image and aggregate JSON reports.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "none")]
    align: Align,
    /// Delta ratio threshold.
    #[arg(long, default_value_t = 1.25)]
    threshold: f64,
    /// Ignore ground truth deeper than this many meters.
    #[arg(long)]
    cap: Option<f64>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct BackprojectArgs {
    /// Depth PFM.
    #[arg(long, visible_alias = "depth")]
    pred: PathBuf,
    /// Intrinsics record with fx, fy, cx, cy.
    #[arg(long)]
    intrinsics: PathBuf,
    /// Output PLY path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FilterArgs {
    /// Left-to-right disparity PFMs.
    #[arg(long)]
    lr: PathBuf,
    /// Right-to-left disparity PFMs with matching names.
    #[arg(long)]
    rl: PathBuf,
    /// Manifest path; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest left-right discrepancy in pixels still counted as valid.
    #[arg(long, default_value_t = 8.0)]
    threshold: f64,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct SynthesizeArgs {
    /// Directory of absolute depth PFMs.
    #[arg(long, visible_alias = "input")]
    gt: PathBuf,
    /// Output directory for converted maps and manifest.txt.
    #[arg(long)]
    out: PathBuf,
    /// Fraction of samples converted to UTS.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct SelfcheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Evaluate(a) => {
            let cfg = EvaluateConfig {
                pred_dir: a.pred,
                gt_dir: a.gt,
                out_dir: a.out,
                align: a.align.into(),
                threshold: a.threshold,
                cap_meters: a.cap,
                jobs: a.jobs,
            };
            let ev = cmd_evaluate(&cfg)?;
            for f in &ev.aggregate.failed {
                eprintln!("warning: {}: {}", f.image, f.error);
            }
            println!("{}", serde_json::to_string_pretty(&ev.aggregate)?);
        }
        Command::Backproject(a) => {
            let cloud = cloud::cmd_backproject(&a.pred, &a.intrinsics, &a.out)?;
            println!("wrote {} points to {}", cloud.len(), a.out.display());
        }
        Command::Filter(a) => {
            let cfg = FilterConfig {
                lr_dir: a.lr,
                rl_dir: a.rl,
                manifest: a.out.clone(),
                rules: FrameRules {
                    consistency_px: a.threshold,
                    ..FrameRules::default()
                },
                jobs: a.jobs,
            };
            let report = cmd_filter(&cfg)?;
            if a.out.is_none() {
                print!("{}", report.manifest());
            }
            eprintln!(
                "{} of {} frames examined, {} accepted",
                report.frames.len(),
                report.total_frames,
                report.accepted()
            );
        }
        Command::Synthesize(a) => {
            let cfg = SynthesizeConfig {
                input_dir: a.gt,
                out_dir: a.out,
                p: a.p,
                seed: a.seed,
                ranges: SynthRanges::default(),
                jobs: a.jobs,
            };
            let report = cmd_synthesize(&cfg)?;
            for s in &report.samples {
                if let Err(e) = &s.result {
                    eprintln!("warning: {}: {e}", s.file);
                }
            }
            println!(
                "{} UTS, {} UTSS",
                report.count(DepthKind::Uts),
                report.count(DepthKind::Utss)
            );
        }
        Command::Selfcheck(a) => {
            let report = run_selfcheck(&SelfCheckConfig {
                seed: a.seed,
                ..SelfCheckConfig::default()
            });
            print!("{}", report.summary());
            eprint!("{}", report.timings());
            if let Err(e) = report.into_result() {
                eprintln!("error: {e}");
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e.downcast_ref::<Error>() {
                Some(Error::SelfCheckFailure { .. }) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
