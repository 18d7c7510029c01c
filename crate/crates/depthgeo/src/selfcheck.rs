//! Built-in property suites run on generated data: fast/naive loss
//! agreement, analytic versus numeric gradients, and invariances.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use depthgeo_core::losses::{
    l2_pairwise, normalize_disparity, pairwise_l1_naive, pairwise_l1_sorted,
    pairwise_l2_literal_naive, pairwise_l2_variance, pointwise_l1_residuals,
    pointwise_l2_residuals, si_pairwise_l1, si_pointwise_l1_residuals, si_pointwise_l2_residuals,
    ssi_pairwise_l1, Want,
};
use depthgeo_core::pipeline::frame_rng;
use depthgeo_core::MaskedMap;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A residual kernel: value, with the gradient written into the slice when
/// one is supplied.
pub type ResidualLoss = fn(&[f64], Option<&mut [f64]>) -> f64;

#[derive(Debug, Clone, Copy)]
pub struct SelfCheckConfig {
    pub seed: u64,
    /// The fast pairwise L1 kernel under test. Swappable so that a broken
    /// kernel can be shown to be caught.
    pub fast_loss: ResidualLoss,
}

impl Default for SelfCheckConfig {
    fn default() -> Self {
        SelfCheckConfig {
            seed: 0,
            fast_loss: pairwise_l1_sorted,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    /// First violated property, if any.
    pub failure: Option<String>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfCheckReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl SelfCheckReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failure.is_none())
    }

    /// Report text without timings, identical across runs with one seed.
    pub fn summary(&self) -> String {
        let mut s = format!("selfcheck seed={}\n", self.seed);
        for suite in &self.suites {
            let _ = match &suite.failure {
                None => writeln!(s, "{}: pass ({} cases)", suite.name, suite.cases),
                Some(f) => writeln!(s, "{}: FAIL ({} cases): {f}", suite.name, suite.cases),
            };
        }
        let _ = writeln!(
            s,
            "{}",
            if self.passed() {
                "all suites passed"
            } else {
                "self-check failed"
            }
        );
        s
    }

    pub fn timings(&self) -> String {
        let mut s = String::new();
        for suite in &self.suites {
            let _ = writeln!(s, "{}: {:.3} s", suite.name, suite.elapsed.as_secs_f64());
        }
        s
    }

    /// `Err` naming the first failed suite and property.
    pub fn into_result(self) -> Result<Self> {
        match self
            .suites
            .iter()
            .find_map(|s| s.failure.clone().map(|f| (s.name, f)))
        {
            Some((suite, detail)) => Err(Error::SelfCheckFailure {
                suite: suite.to_string(),
                detail,
            }),
            None => Ok(self),
        }
    }
}

type Check = std::result::Result<usize, String>;
type Suite = (&'static str, fn(&SelfCheckConfig, &mut ChaCha8Rng) -> Check);

pub fn run_selfcheck(cfg: &SelfCheckConfig) -> SelfCheckReport {
    let suites: [Suite; 3] = [
        ("oracle-equivalence", oracle_suite),
        ("gradient", gradient_suite),
        ("invariance", invariance_suite),
    ];
    let suites = suites
        .iter()
        .enumerate()
        .map(|(i, (name, run))| {
            let start = Instant::now();
            let mut rng = frame_rng(cfg.seed, i as u64);
            let (cases, failure) = match run(cfg, &mut rng) {
                Ok(n) => (n, None),
                Err(e) => (0, Some(e)),
            };
            SuiteReport {
                name,
                cases,
                failure,
                elapsed: start.elapsed(),
            }
        })
        .collect();
    SelfCheckReport {
        seed: cfg.seed,
        suites,
    }
}

/// Runs every suite and fails with the first violated property.
pub fn cmd_selfcheck(cfg: &SelfCheckConfig) -> Result<SelfCheckReport> {
    run_selfcheck(cfg).into_result()
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn oracle_suite(cfg: &SelfCheckConfig, rng: &mut ChaCha8Rng) -> Check {
    let mut cases = 0;
    for &n in &[2usize, 3, 5, 17, 256, 1024] {
        for k in 0..8 {
            let r: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let fast = (cfg.fast_loss)(&r, None);
            let naive = pairwise_l1_naive(&r).map_err(|e| e.to_string())?;
            if rel_diff(fast, naive) > 1e-10 {
                return Err(format!(
                    "sorted pairwise L1 disagrees with the double sum (N={n}, case {k}): {fast} vs {naive}"
                ));
            }
            let var = pairwise_l2_variance(&r, None);
            let lit = pairwise_l2_literal_naive(&r).map_err(|e| e.to_string())?;
            if rel_diff(2.0 * var, lit) > 1e-10 {
                return Err(format!(
                    "twice the variance differs from the mean squared pairwise difference (N={n}): {} vs {lit}",
                    2.0 * var
                ));
            }
            cases += 1;
        }
    }
    Ok(cases)
}

/// Pairwise-distinct residuals spaced about `4/n` apart and bounded away
/// from zero, so no kink lies within a finite-difference step.
fn separated_residuals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let step = 4.0 / n as f64;
    let mut r: Vec<f64> = (0..n)
        .map(|k| (k as f64 + rng.random_range(0.2..0.8)) * step - 2.0)
        .collect();
    r.shuffle(rng);
    r
}

fn max_rel_error(analytic: &[f64], numeric: &[f64]) -> f64 {
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

fn numeric_gradient(x: &[f64], h: f64, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            p[i] = x[i] + h;
            let up = f(&p);
            p[i] = x[i] - h;
            let down = f(&p);
            p[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

const FD_STEP: f64 = 1e-5;
const FD_TOL: f64 = 1e-4;

fn gradient_suite(cfg: &SelfCheckConfig, rng: &mut ChaCha8Rng) -> Check {
    let kernels: [(&str, ResidualLoss); 6] = [
        ("si_pairwise_l1", cfg.fast_loss),
        ("l2_pairwise", pairwise_l2_variance),
        ("pointwise_l1", pointwise_l1_residuals),
        ("pointwise_l2", pointwise_l2_residuals),
        ("si_pointwise_l1", si_pointwise_l1_residuals),
        ("si_pointwise_l2", si_pointwise_l2_residuals),
    ];
    let mut cases = 0;
    for case in 0..10 {
        let n = rng.random_range(64..=256);
        let r = separated_residuals(rng, n);
        for (name, kernel) in kernels {
            let mut g = vec![0.0; n];
            kernel(&r, Some(&mut g));
            let num = numeric_gradient(&r, FD_STEP, |x| kernel(x, None));
            let err = max_rel_error(&g, &num);
            if !(err <= FD_TOL) {
                return Err(format!(
                    "{name} gradient off by {err:.3e} relative (case {case}, N={n})"
                ));
            }
            cases += 1;
        }
    }

    let mut ssi_cases = 0;
    while ssi_cases < 10 {
        let (w, h) = (rng.random_range(8..=16), rng.random_range(8..=16));
        let pred = random_map(rng, w, h, 0.2, 2.0);
        let gt = random_map(rng, w, h, 0.2, 2.0);
        if !ssi_well_separated(&pred, &gt) {
            continue;
        }
        let fail = |e: depthgeo_core::Error| e.to_string();
        let g = ssi_pairwise_l1(&pred, &gt, Want::Gradient)
            .map_err(fail)?
            .gradient
            .unwrap_or_default();
        let num = numeric_gradient(pred.values(), FD_STEP, |x| {
            let p = MaskedMap::full(w, h, x.to_vec()).expect("same shape");
            ssi_pairwise_l1(&p, &gt, Want::Value)
                .map(|l| l.value)
                .unwrap_or(f64::NAN)
        });
        let err = max_rel_error(&g, &num);
        if !(err <= FD_TOL) {
            return Err(format!(
                "ssi_pairwise_l1 gradient off by {err:.3e} relative ({w}x{h})"
            ));
        }
        ssi_cases += 1;
    }
    Ok(cases + ssi_cases)
}

fn random_map(rng: &mut ChaCha8Rng, w: usize, h: usize, lo: f64, hi: f64) -> MaskedMap {
    let v = (0..w * h).map(|_| rng.random_range(lo..hi)).collect();
    MaskedMap::full(w, h, v).expect("positive dimensions")
}

/// Standardized residuals at least `2e-4` apart.
fn ssi_well_separated(pred: &MaskedMap, gt: &MaskedMap) -> bool {
    let (Ok(p), Ok(g)) = (normalize_disparity(pred), normalize_disparity(gt)) else {
        return false;
    };
    let mut r: Vec<f64> = p
        .map
        .values()
        .iter()
        .zip(g.map.values())
        .map(|(a, b)| a - b)
        .collect();
    r.sort_by(f64::total_cmp);
    r.windows(2).all(|w| w[1] - w[0] >= 2e-4)
}

fn invariance_suite(cfg: &SelfCheckConfig, rng: &mut ChaCha8Rng) -> Check {
    let fail = |e: depthgeo_core::Error| e.to_string();
    let mut cases = 0;
    for case in 0..20 {
        let (w, h) = (rng.random_range(8..=16), rng.random_range(8..=16));
        let pred_log = random_map(rng, w, h, -2.0, 2.0);
        let gt_log = random_map(rng, w, h, -2.0, 2.0);

        // Scaling predicted depth by s shifts its log by log s.
        let shift = rng.random_range(0.25f64..4.0).ln();
        let scaled = pred_log.map_valid(|v| v + shift).map_err(fail)?;
        for (name, loss) in [
            (
                "si_pairwise_l1",
                si_pairwise_l1 as fn(&MaskedMap, &MaskedMap, Want) -> _,
            ),
            ("l2_pairwise", l2_pairwise),
        ] {
            let a = loss(&pred_log, &gt_log, Want::Value).map_err(fail)?.value;
            let b = loss(&scaled, &gt_log, Want::Value).map_err(fail)?.value;
            if (a - b).abs() > 1e-10 {
                return Err(format!(
                    "{name} changed by {:.3e} under depth scaling (case {case})",
                    (a - b).abs()
                ));
            }
        }

        let residuals: Vec<f64> = pred_log
            .values()
            .iter()
            .zip(gt_log.values())
            .map(|(p, g)| p - g)
            .collect();
        let mut g = vec![0.0; residuals.len()];
        (cfg.fast_loss)(&residuals, Some(&mut g));
        let sum: f64 = g.iter().sum();
        if sum.abs() > 1e-12 {
            return Err(format!(
                "si_pairwise_l1 gradient sums to {sum:.3e} (case {case})"
            ));
        }

        let pred_disp = pred_log.to_exp().map_err(fail)?;
        let gt_disp = gt_log.to_exp().map_err(fail)?;
        let a = rng.random_range(0.1..10.0);
        let b = rng.random_range(-5.0..5.0);
        let affine = pred_disp.map_valid(|v| a * v + b).map_err(fail)?;
        let before = ssi_pairwise_l1(&pred_disp, &gt_disp, Want::Value)
            .map_err(fail)?
            .value;
        let after = ssi_pairwise_l1(&affine, &gt_disp, Want::Value)
            .map_err(fail)?
            .value;
        if (before - after).abs() > 1e-9 {
            return Err(format!(
                "ssi_pairwise_l1 changed by {:.3e} under a positive affine map (case {case})",
                (before - after).abs()
            ));
        }
        cases += 1;
    }
    Ok(cases)
}
