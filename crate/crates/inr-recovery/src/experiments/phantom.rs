//! Phantom reconstruction studies: ground truth, zero-fill baseline, and
//! penalized INR fits over a lambda grid for each regularizer, with images
//! and a per-lambda metrics table.

use std::fmt::Write as _;
use std::path::Path;

use super::config::{bad_value, parse_bool, parse_list, parse_scalar, unknown_key, RawConfig};
use super::{run_indexed, Manifest, Profile};
use crate::forward_op::{zero_fill_synthesis, ForwardConfig};
use crate::phantoms::{dot_phantom, grid_mse, phantom_coeffs, write_grid_2d, Disc, Phantom};
use crate::rng::derive_seed;
use crate::spectral::{FeatureMap, FrequencySet};
use crate::training::{
    adam_fit, flatten_params, init_student, ImageMseProbe, LrStage, RegKind, Regularizer,
    TrainConfig,
};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhantomKind {
    Dot,
    Discs,
}

impl PhantomKind {
    pub fn label(&self) -> &'static str {
        match self {
            PhantomKind::Dot => "dot",
            PhantomKind::Discs => "discs",
        }
    }
}

/// Parameter set for one phantom reconstruction study.
#[derive(Debug, Clone)]
pub struct PhantomConfig {
    pub kind: PhantomKind,
    /// Sampling box radius.
    pub k: i64,
    /// Teacher band of the dot phantom.
    pub dot_k0: i64,
    pub n_dots: usize,
    /// Disc layout for the disc phantom.
    pub discs: Vec<Disc>,
    /// Student feature band and width.
    pub student_k0: i64,
    pub width: usize,
    pub regs: Vec<RegKind>,
    pub lambdas: Vec<f64>,
    /// Operator oversampling grid (per axis).
    pub grid_m: usize,
    /// Metrics/render grid (per axis).
    pub image_grid: usize,
    /// Adam schedule of the penalized fit.
    pub stages: Vec<LrStage>,
    pub mse_check_every: usize,
    pub seed: u64,
    pub workers: usize,
    pub write_traces: bool,
}

impl PhantomConfig {
    pub fn desk() -> Self {
        PhantomConfig {
            kind: PhantomKind::Dot,
            k: 16,
            dot_k0: 6,
            n_dots: 10,
            discs: default_discs(),
            student_k0: 6,
            width: 64,
            regs: vec![RegKind::StandardWd, RegKind::ModifiedWd],
            lambdas: vec![1e-5, 1e-3],
            grid_m: 64,
            image_grid: 256,
            stages: vec![
                LrStage {
                    iters: 3000,
                    lr: 1e-3,
                },
                LrStage {
                    iters: 1000,
                    lr: 1e-4,
                },
            ],
            mse_check_every: 100,
            seed: 21,
            workers: 0,
            write_traces: false,
        }
    }

    pub fn paper() -> Self {
        PhantomConfig {
            kind: PhantomKind::Dot,
            k: 32,
            dot_k0: 8,
            n_dots: 50,
            discs: default_discs(),
            student_k0: 10,
            width: 100,
            regs: vec![RegKind::StandardWd, RegKind::ModifiedWd],
            lambdas: vec![1e-6, 1e-5, 1e-4, 1e-3],
            grid_m: 512,
            image_grid: 256,
            stages: vec![
                LrStage {
                    iters: 40_000,
                    lr: 1e-3,
                },
                LrStage {
                    iters: 10_000,
                    lr: 1e-4,
                },
            ],
            mse_check_every: 500,
            seed: 21,
            workers: 0,
            write_traces: false,
        }
    }

    pub fn for_profile(profile: Profile) -> Self {
        match profile {
            Profile::Desk => Self::desk(),
            Profile::Paper => Self::paper(),
        }
    }

    pub fn apply(&mut self, raw: &RawConfig) -> Result<()> {
        for (section, key, value) in &raw.entries {
            match (section.as_str(), key.as_str()) {
                ("experiment", "kind") => {
                    if value != "phantom" {
                        return Err(bad_value(
                            "kind",
                            format!("config is for `{value}`, not phantom"),
                        ));
                    }
                }
                ("experiment", "seed") => self.seed = parse_scalar(key, value)?,
                ("experiment", "workers") => self.workers = parse_scalar(key, value)?,
                ("experiment", "write_traces") => self.write_traces = parse_bool(key, value)?,
                ("phantom", "phantom") => {
                    self.kind = match value.as_str() {
                        "dot" => PhantomKind::Dot,
                        "discs" => PhantomKind::Discs,
                        other => {
                            return Err(bad_value(
                                "phantom",
                                format!("expected dot or discs, got {other:?}"),
                            ))
                        }
                    };
                }
                ("phantom", "k") => self.k = parse_scalar(key, value)?,
                ("phantom", "dot_k0") => self.dot_k0 = parse_scalar(key, value)?,
                ("phantom", "n_dots") => self.n_dots = parse_scalar(key, value)?,
                ("phantom", "discs") => self.discs = parse_discs(value)?,
                ("model", "student_k0") => self.student_k0 = parse_scalar(key, value)?,
                ("model", "width") => self.width = parse_scalar(key, value)?,
                ("model", "regs") => {
                    let names: Vec<String> = parse_list(key, value)?;
                    self.regs = names
                        .iter()
                        .map(|n| match n.as_str() {
                            "standard" => Ok(RegKind::StandardWd),
                            "modified" => Ok(RegKind::ModifiedWd),
                            other => {
                                Err(bad_value("regs", format!("unknown regularizer {other:?}")))
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                }
                ("training", "lambdas") => self.lambdas = parse_list(key, value)?,
                ("training", "grid_m") => self.grid_m = parse_scalar(key, value)?,
                ("training", "image_grid") => self.image_grid = parse_scalar(key, value)?,
                ("training", "stages") => self.stages = parse_stages(value)?,
                ("training", "mse_check_every") => self.mse_check_every = parse_scalar(key, value)?,
                _ => return Err(unknown_key(section, key)),
            }
        }
        Ok(())
    }

    fn snapshot(&self, manifest: &mut Manifest) {
        manifest.push_config("phantom", self.kind.label());
        manifest.push_config("k", self.k);
        manifest.push_config("dot_k0", self.dot_k0);
        manifest.push_config("n_dots", self.n_dots);
        manifest.push_config(
            "discs",
            self.discs
                .iter()
                .map(|d| {
                    format!(
                        "{},{},{},{}",
                        d.center[0], d.center[1], d.radius, d.amplitude
                    )
                })
                .collect::<Vec<_>>()
                .join(";"),
        );
        manifest.push_config("student_k0", self.student_k0);
        manifest.push_config("width", self.width);
        manifest.push_config(
            "regs",
            self.regs
                .iter()
                .map(|r| r.label())
                .collect::<Vec<_>>()
                .join(","),
        );
        manifest.push_config(
            "lambdas",
            self.lambdas
                .iter()
                .map(|l| format!("{l:e}"))
                .collect::<Vec<_>>()
                .join(","),
        );
        manifest.push_config("grid_m", self.grid_m);
        manifest.push_config("image_grid", self.image_grid);
        manifest.push_config(
            "stages",
            self.stages
                .iter()
                .map(|s| format!("{}@{:e}", s.iters, s.lr))
                .collect::<Vec<_>>()
                .join(","),
        );
        manifest.push_config("mse_check_every", self.mse_check_every);
        manifest.push_config("seed", self.seed);
        manifest.push_config("workers", self.workers);
        manifest.push_config("write_traces", self.write_traces);
    }

    fn build_phantom(&self) -> Result<Phantom> {
        match self.kind {
            PhantomKind::Dot => Ok(dot_phantom(
                self.n_dots,
                self.dot_k0,
                derive_seed(self.seed, &[31]),
            )),
            PhantomKind::Discs => Phantom::discs(self.discs.clone()),
        }
    }
}

fn default_discs() -> Vec<Disc> {
    vec![
        Disc {
            center: [0.38, 0.42],
            radius: 0.17,
            amplitude: 1.0,
        },
        Disc {
            center: [0.63, 0.61],
            radius: 0.11,
            amplitude: 0.6,
        },
        Disc {
            center: [0.52, 0.28],
            radius: 0.06,
            amplitude: -0.4,
        },
    ]
}

/// `cx,cy,r,a;cx,cy,r,a;...`
fn parse_discs(value: &str) -> Result<Vec<Disc>> {
    value
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|entry| {
            let parts: Vec<f64> = entry
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|e| bad_value("discs", format!("{e} in {entry:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if parts.len() != 4 {
                return Err(bad_value(
                    "discs",
                    format!("expected cx,cy,r,a got {entry:?}"),
                ));
            }
            Ok(Disc {
                center: [parts[0], parts[1]],
                radius: parts[2],
                amplitude: parts[3],
            })
        })
        .collect()
}

/// `iters@lr,iters@lr,...`
fn parse_stages(value: &str) -> Result<Vec<LrStage>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|entry| {
            let (iters, lr) = entry
                .split_once('@')
                .ok_or_else(|| bad_value("stages", format!("expected iters@lr, got {entry:?}")))?;
            Ok(LrStage {
                iters: iters
                    .trim()
                    .parse()
                    .map_err(|e| bad_value("stages", format!("{e} in {entry:?}")))?,
                lr: lr
                    .trim()
                    .parse()
                    .map_err(|e| bad_value("stages", format!("{e} in {entry:?}")))?,
            })
        })
        .collect()
}

/// One penalized fit's outcome.
#[derive(Debug, Clone)]
pub struct PhantomRun {
    pub reg: RegKind,
    pub lambda: f64,
    pub final_mse: f64,
    pub best_probe_mse: f64,
    pub max_abs_err: f64,
    pub recon: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PhantomResults {
    pub truth: Vec<f64>,
    pub zero_fill: Vec<f64>,
    pub zero_fill_mse: f64,
    pub runs: Vec<PhantomRun>,
    pub image_grid: usize,
}

impl PhantomResults {
    /// Best (lowest final MSE) run for a regularizer: the grid-search pick.
    pub fn best_for(&self, reg: RegKind) -> Option<&PhantomRun> {
        self.runs
            .iter()
            .filter(|r| r.reg == reg)
            .min_by(|a, b| a.final_mse.partial_cmp(&b.final_mse).unwrap())
    }

    pub fn metrics_csv(&self, kind: PhantomKind) -> String {
        let mut out = String::from("phantom,reg,lambda,final_mse,best_probe_mse,max_abs_err\n");
        let _ = writeln!(
            out,
            "{},zero-fill,,{:.17e},,",
            kind.label(),
            self.zero_fill_mse
        );
        for r in &self.runs {
            let _ = writeln!(
                out,
                "{},{},{:e},{:.17e},{:.17e},{:.17e}",
                kind.label(),
                r.reg.label(),
                r.lambda,
                r.final_mse,
                r.best_probe_mse,
                r.max_abs_err
            );
        }
        out
    }
}

/// Evaluates the phantom on the image grid (row-major).
fn truth_grid(ph: &Phantom, m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m * m);
    for r in 0..m {
        for c in 0..m {
            out.push(ph.eval(&[r as f64 / m as f64, c as f64 / m as f64]));
        }
    }
    out
}

/// Runs the study: measurements, zero-fill baseline, one penalized fit per
/// (regularizer, lambda) pair.
pub fn run(cfg: &PhantomConfig) -> Result<PhantomResults> {
    Ok(run_full(cfg)?.0)
}

fn run_full(cfg: &PhantomConfig) -> Result<(PhantomResults, crate::spectral::Measurements)> {
    let ph = cfg.build_phantom()?;
    let omega = FrequencySet::full_box(cfg.k, 2);
    let fwd = ForwardConfig::grid(cfg.k, 2, cfg.grid_m);
    let y = phantom_coeffs(&ph, &omega, &fwd)?;

    let truth = truth_grid(&ph, cfg.image_grid);
    let zero_fill = zero_fill_synthesis(&y, cfg.image_grid)?;
    let zero_fill_mse = grid_mse(&truth, &zero_fill);

    let fm = FeatureMap::new(cfg.student_k0, 2);
    let mut jobs = Vec::new();
    for &reg in &cfg.regs {
        for &lambda in &cfg.lambdas {
            jobs.push((reg, lambda));
        }
    }
    let truth_ref = &truth;
    let results = run_indexed(jobs.len(), cfg.workers, |idx| -> Result<PhantomRun> {
        let (reg_kind, lambda) = jobs[idx];
        let reg = match reg_kind {
            RegKind::StandardWd => Regularizer::standard(),
            RegKind::ModifiedWd => Regularizer::modified(fwd.clone()),
        };
        let seed = derive_seed(cfg.seed, &[super::reg_tag(reg_kind), idx as u64]);
        let student = init_student(&fm, cfg.width, seed);
        let probe = ImageMseProbe::from_truth_values(&fm, cfg.image_grid, truth_ref.clone())?;
        let train = TrainConfig {
            inner_iters: cfg.stages.iter().map(|s| s.iters).sum(),
            lr: cfg.stages.first().map(|s| s.lr).unwrap_or(1e-3),
            lr_stages: cfg.stages.clone(),
            lambda,
            mse_check_every: cfg.mse_check_every,
            stop_at_mse: None,
            seed,
            ..TrainConfig::default()
        };
        let report = adam_fit(&student, &y, &reg, &fwd, &train, Some(&probe))?;
        let flat = flatten_params(&report.params);
        let recon = {
            let trivial = FrequencySet::full_box(0, 2);
            let engine = crate::forward_op::GridEngine::new(&fm, &trivial, cfg.image_grid)?;
            let mut img = vec![0.0; engine.grid_len()];
            let mut cplx = vec![num_complex::Complex64::default(); engine.grid_len()];
            engine.eval_units_grid(&flat, &mut img, &mut cplx);
            img
        };
        let final_mse = grid_mse(truth_ref, &recon);
        let max_abs_err = truth_ref
            .iter()
            .zip(recon.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        Ok(PhantomRun {
            reg: reg_kind,
            lambda,
            final_mse,
            best_probe_mse: report.best_mse.unwrap_or(f64::NAN),
            max_abs_err,
            recon,
        })
    });
    let mut runs = Vec::with_capacity(results.len());
    for r in results {
        runs.push(r?);
    }
    Ok((
        PhantomResults {
            truth,
            zero_fill,
            zero_fill_mse,
            runs,
            image_grid: cfg.image_grid,
        },
        y,
    ))
}

/// Runs the study and writes images, metrics and the manifest under `out`:
/// ground truth, zero-fill baseline, and per-regularizer best-lambda
/// reconstruction plus absolute-difference image.
pub fn run_to_dir(cfg: &PhantomConfig, profile: Profile, out: &Path) -> Result<PhantomResults> {
    let (results, y) = run_full(cfg)?;
    std::fs::create_dir_all(out)?;
    let mut meas_csv = Vec::new();
    y.write_csv(&mut meas_csv)?;
    std::fs::write(out.join("measurements.csv"), meas_csv)?;
    let m = results.image_grid;
    write_grid_2d(&results.truth, m, &out.join("ground_truth"))?;
    write_grid_2d(&results.zero_fill, m, &out.join("zero_fill"))?;
    for &reg in &cfg.regs {
        if let Some(best) = results.best_for(reg) {
            let stem = out.join(format!("recon_{}", reg.label()));
            write_grid_2d(&best.recon, m, &stem)?;
            let diff: Vec<f64> = results
                .truth
                .iter()
                .zip(best.recon.iter())
                .map(|(a, b)| (a - b).abs())
                .collect();
            write_grid_2d(&diff, m, &out.join(format!("absdiff_{}", reg.label())))?;
        }
    }
    super::write_text_file(out, "metrics.csv", &results.metrics_csv(cfg.kind))?;
    let mut manifest = Manifest::new("phantom", profile.label());
    cfg.snapshot(&mut manifest);
    manifest.outcome_header = "reg,lambda,final_mse,best_probe_mse,max_abs_err".into();
    manifest.outcomes = results
        .runs
        .iter()
        .map(|r| {
            format!(
                "{},{:e},{:.17e},{:.17e},{:.17e}",
                r.reg.label(),
                r.lambda,
                r.final_mse,
                r.best_probe_mse,
                r.max_abs_err
            )
        })
        .collect();
    manifest.config.push((
        "zero_fill_mse".into(),
        format!("{:.17e}", results.zero_fill_mse),
    ));
    manifest.write(out)?;
    Ok(results)
}
