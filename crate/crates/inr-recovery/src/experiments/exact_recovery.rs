//! Exact-recovery probability tables: random teacher networks of width W,
//! measured on the box of radius K, fitted by an equality-constrained
//! student; a trial succeeds when the running-minimum image-grid MSE drops
//! below the exactness threshold at any point during training.

use std::fmt::Write as _;
use std::path::Path;

use super::config::{parse_bool, parse_list, parse_scalar, unknown_key, RawConfig};
use super::{run_indexed, Manifest, Profile};
use crate::forward_op::{inr_coeffs, ForwardConfig};
use crate::model::random_teacher;
use crate::rng::derive_seed;
use crate::spectral::FeatureMap;
use crate::training::{
    al_solve, init_student, AlConfig, ImageMseProbe, RegKind, Regularizer, StepDecay, TrainConfig,
};
use crate::{Error, Result};

/// Full parameter set for one exact-recovery table run.
#[derive(Debug, Clone)]
pub struct ExactRecoveryConfig {
    pub dim: usize,
    pub k0: i64,
    pub k_list: Vec<i64>,
    pub w_list: Vec<usize>,
    pub trials: usize,
    pub regs: Vec<RegKind>,
    pub student_width: usize,
    /// Oversampling grid of the measurement operator (per axis).
    pub grid_m: usize,
    /// Image grid for the exactness probe (per axis).
    pub mse_grid: usize,
    pub success_mse: f64,
    pub inner_iters: usize,
    pub max_outer: usize,
    pub lr: f64,
    /// Halve-style decay of the inner learning rate every N outer
    /// iterations (0 disables).
    pub al_decay_every: usize,
    pub al_decay_factor: f64,
    pub al_rho0: f64,
    pub al_rho_growth: f64,
    pub al_tol: f64,
    pub mse_check_every: usize,
    /// Stop a trial as soon as the success threshold is crossed.
    pub stop_on_success: bool,
    pub seed: u64,
    pub workers: usize,
    pub write_traces: bool,
}

impl ExactRecoveryConfig {
    /// CI-runnable scale: W in {1,2}, K in {2,...,12}, 5 trials,
    /// 20 x 2000 steps.
    pub fn desk() -> Self {
        ExactRecoveryConfig {
            dim: 1,
            k0: 2,
            k_list: vec![2, 4, 6, 8, 10, 12],
            w_list: vec![1, 2],
            trials: 5,
            regs: vec![RegKind::StandardWd, RegKind::ModifiedWd],
            student_width: 100,
            grid_m: 128,
            mse_grid: 1024,
            success_mse: 1e-9,
            inner_iters: 2000,
            max_outer: 20,
            lr: 1e-3,
            al_decay_every: 0,
            al_decay_factor: 0.5,
            al_rho0: 10.0,
            al_rho_growth: 2.0,
            al_tol: 1e-12,
            mse_check_every: 10,
            stop_on_success: true,
            seed: 7,
            workers: 0,
            write_traces: false,
        }
    }

    /// The full-size study: K up to 30, W up to 5, 10 trials,
    /// 60 x 5000 steps.
    pub fn paper() -> Self {
        ExactRecoveryConfig {
            dim: 1,
            k0: 2,
            k_list: (1..=15).map(|i| 2 * i).collect(),
            w_list: vec![1, 2, 3, 4, 5],
            trials: 10,
            regs: vec![RegKind::StandardWd, RegKind::ModifiedWd],
            student_width: 100,
            grid_m: 4096,
            mse_grid: 1024,
            success_mse: 1e-9,
            inner_iters: 5000,
            max_outer: 60,
            lr: 1e-3,
            al_decay_every: 0,
            al_decay_factor: 0.5,
            al_rho0: 10.0,
            al_rho_growth: 2.0,
            al_tol: 1e-12,
            mse_check_every: 10,
            stop_on_success: true,
            seed: 7,
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

    /// Applies config-file overrides; unknown keys are rejected by name.
    pub fn apply(&mut self, raw: &RawConfig) -> Result<()> {
        for (section, key, value) in &raw.entries {
            match (section.as_str(), key.as_str()) {
                ("experiment", "kind") => {
                    if value != "exact-recovery" {
                        return Err(Error::BadConfigValue {
                            key: "kind".into(),
                            reason: format!("config is for `{value}`, not exact-recovery"),
                        });
                    }
                }
                ("experiment", "seed") => self.seed = parse_scalar(key, value)?,
                ("experiment", "workers") => self.workers = parse_scalar(key, value)?,
                ("experiment", "write_traces") => self.write_traces = parse_bool(key, value)?,
                ("sampling", "dim") => self.dim = parse_scalar(key, value)?,
                ("sampling", "k0") => self.k0 = parse_scalar(key, value)?,
                ("sampling", "k_list") => self.k_list = parse_list(key, value)?,
                ("sampling", "grid_m") => self.grid_m = parse_scalar(key, value)?,
                ("model", "w_list") => self.w_list = parse_list(key, value)?,
                ("model", "student_width") => self.student_width = parse_scalar(key, value)?,
                ("model", "regs") => {
                    let names: Vec<String> = parse_list(key, value)?;
                    self.regs = names
                        .iter()
                        .map(|n| match n.as_str() {
                            "standard" => Ok(RegKind::StandardWd),
                            "modified" => Ok(RegKind::ModifiedWd),
                            other => Err(Error::BadConfigValue {
                                key: "regs".into(),
                                reason: format!("unknown regularizer {other:?}"),
                            }),
                        })
                        .collect::<Result<Vec<_>>>()?;
                }
                ("training", "trials") => self.trials = parse_scalar(key, value)?,
                ("training", "inner_iters") => self.inner_iters = parse_scalar(key, value)?,
                ("training", "max_outer") => self.max_outer = parse_scalar(key, value)?,
                ("training", "lr") => self.lr = parse_scalar(key, value)?,
                ("training", "al_decay_every") => self.al_decay_every = parse_scalar(key, value)?,
                ("training", "al_decay_factor") => self.al_decay_factor = parse_scalar(key, value)?,
                ("training", "al_rho0") => self.al_rho0 = parse_scalar(key, value)?,
                ("training", "al_rho_growth") => self.al_rho_growth = parse_scalar(key, value)?,
                ("training", "al_tol") => self.al_tol = parse_scalar(key, value)?,
                ("training", "mse_check_every") => self.mse_check_every = parse_scalar(key, value)?,
                ("training", "mse_grid") => self.mse_grid = parse_scalar(key, value)?,
                ("training", "success_mse") => self.success_mse = parse_scalar(key, value)?,
                ("training", "stop_on_success") => self.stop_on_success = parse_bool(key, value)?,
                _ => return Err(unknown_key(section, key)),
            }
        }
        Ok(())
    }

    fn snapshot(&self, manifest: &mut Manifest) {
        manifest.push_config("dim", self.dim);
        manifest.push_config("k0", self.k0);
        manifest.push_config("k_list", join(&self.k_list));
        manifest.push_config("w_list", join(&self.w_list));
        manifest.push_config("trials", self.trials);
        manifest.push_config(
            "regs",
            self.regs
                .iter()
                .map(|r| r.label())
                .collect::<Vec<_>>()
                .join(","),
        );
        manifest.push_config("student_width", self.student_width);
        manifest.push_config("grid_m", self.grid_m);
        manifest.push_config("mse_grid", self.mse_grid);
        manifest.push_config("success_mse", format!("{:e}", self.success_mse));
        manifest.push_config("inner_iters", self.inner_iters);
        manifest.push_config("max_outer", self.max_outer);
        manifest.push_config("lr", format!("{:e}", self.lr));
        manifest.push_config("al_decay_every", self.al_decay_every);
        manifest.push_config("al_decay_factor", self.al_decay_factor);
        manifest.push_config("al_rho0", self.al_rho0);
        manifest.push_config("al_rho_growth", self.al_rho_growth);
        manifest.push_config("al_tol", format!("{:e}", self.al_tol));
        manifest.push_config("mse_check_every", self.mse_check_every);
        manifest.push_config("stop_on_success", self.stop_on_success);
        manifest.push_config("seed", self.seed);
        manifest.push_config("workers", self.workers);
        manifest.push_config("write_traces", self.write_traces);
    }
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// One trial's outcome.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub reg: RegKind,
    pub k: i64,
    pub w: usize,
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    pub min_mse: f64,
    pub final_constraint: f64,
    pub outers_run: usize,
    pub iters_run: usize,
    pub diverged: bool,
}

/// Aggregated success counts for one (reg, K, W) cell.
#[derive(Debug, Clone)]
pub struct CellSummary {
    pub reg: RegKind,
    pub k: i64,
    pub w: usize,
    pub successes: usize,
    pub trials: usize,
}

impl CellSummary {
    pub fn probability(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExactRecoveryResults {
    pub outcomes: Vec<TrialOutcome>,
    pub cells: Vec<CellSummary>,
}

impl ExactRecoveryResults {
    pub fn cell(&self, reg: RegKind, k: i64, w: usize) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.reg == reg && c.k == k && c.w == w)
    }

    /// The sampling-law trend statistic for one regularizer: the mean over
    /// teacher widths of (success probability at K >= threshold(W)) minus
    /// (success probability at K < threshold(W)).
    pub fn trend_margin(&self, reg: RegKind, threshold: impl Fn(usize) -> i64) -> f64 {
        let widths: Vec<usize> = {
            let mut ws: Vec<usize> = self
                .cells
                .iter()
                .filter(|c| c.reg == reg)
                .map(|c| c.w)
                .collect();
            ws.sort_unstable();
            ws.dedup();
            ws
        };
        let mut total = 0.0;
        for &w in &widths {
            let thr = threshold(w);
            let mean_of = |above: bool| {
                let probs: Vec<f64> = self
                    .cells
                    .iter()
                    .filter(|c| c.reg == reg && c.w == w && ((c.k >= thr) == above))
                    .map(|c| c.probability())
                    .collect();
                if probs.is_empty() {
                    0.0
                } else {
                    probs.iter().sum::<f64>() / probs.len() as f64
                }
            };
            total += mean_of(true) - mean_of(false);
        }
        if widths.is_empty() {
            0.0
        } else {
            total / widths.len() as f64
        }
    }

    pub fn table_csv(&self) -> String {
        let mut out = String::from("reg,k,w,successes,trials,probability\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.3}",
                c.reg.label(),
                c.k,
                c.w,
                c.successes,
                c.trials,
                c.probability()
            );
        }
        out
    }

    pub fn outcomes_csv(&self) -> String {
        let mut out = String::from(outcome_header());
        out.push('\n');
        for o in &self.outcomes {
            out.push_str(&outcome_row(o));
            out.push('\n');
        }
        out
    }
}

fn outcome_header() -> &'static str {
    "reg,k,w,trial,seed,success,min_mse,final_constraint,outers_run,iters_run,diverged"
}

fn outcome_row(o: &TrialOutcome) -> String {
    format!(
        "{},{},{},{},{},{},{:.17e},{:.17e},{},{},{}",
        o.reg.label(),
        o.k,
        o.w,
        o.trial,
        o.seed,
        o.success,
        o.min_mse,
        o.final_constraint,
        o.outers_run,
        o.iters_run,
        o.diverged
    )
}

/// Runs one seeded trial: teacher, measurements, student, constrained fit.
pub fn run_trial(
    cfg: &ExactRecoveryConfig,
    reg_kind: RegKind,
    k: i64,
    w: usize,
    trial: usize,
) -> Result<(TrialOutcome, crate::training::FitReport)> {
    let seed = derive_seed(
        cfg.seed,
        &[super::reg_tag(reg_kind), k as u64, w as u64, trial as u64],
    );
    let fm = FeatureMap::new(cfg.k0, cfg.dim);
    let fwd = ForwardConfig::grid(k, cfg.dim, cfg.grid_m);
    let reg = match reg_kind {
        RegKind::StandardWd => Regularizer::standard(),
        RegKind::ModifiedWd => Regularizer::modified(fwd.clone()),
    };
    let weighting = reg.prepare(&fm)?;
    let teacher = random_teacher(w, &fm, derive_seed(seed, &[1]), weighting.as_fn())?;
    let y = inr_coeffs(&teacher, &fwd)?;
    let student = init_student(&fm, cfg.student_width, derive_seed(seed, &[2]));
    let probe = ImageMseProbe::for_teacher(&teacher, cfg.mse_grid)?;
    let train = TrainConfig {
        inner_iters: cfg.inner_iters,
        lr: cfg.lr,
        lr_stages: Vec::new(),
        al_lr_decay: if cfg.al_decay_every > 0 {
            Some(StepDecay {
                every: cfg.al_decay_every,
                factor: cfg.al_decay_factor,
            })
        } else {
            None
        },
        lambda: 0.0,
        al: AlConfig {
            max_outer: cfg.max_outer,
            rho0: cfg.al_rho0,
            rho_growth: cfg.al_rho_growth,
            tol: cfg.al_tol,
        },
        seed,
        mse_check_every: cfg.mse_check_every,
        stop_at_mse: if cfg.stop_on_success {
            Some(cfg.success_mse)
        } else {
            None
        },
    };
    let report = al_solve(&student, &y, &reg, &fwd, &train, Some(&probe))?;
    let min_mse = report.best_mse.unwrap_or(f64::INFINITY);
    let outcome = TrialOutcome {
        reg: reg_kind,
        k,
        w,
        trial,
        seed,
        success: min_mse < cfg.success_mse,
        min_mse,
        final_constraint: report.constraint_trace.last().copied().unwrap_or(f64::NAN),
        outers_run: report.constraint_trace.len().saturating_sub(1),
        iters_run: report.loss_trace.len(),
        diverged: report.diverged,
    };
    Ok((outcome, report))
}

/// Runs the whole table. Trials execute concurrently up to the worker
/// count; results are collected in deterministic order.
pub fn run(cfg: &ExactRecoveryConfig) -> Result<ExactRecoveryResults> {
    Ok(run_keeping_reports(cfg, false)?.0)
}

fn run_keeping_reports(
    cfg: &ExactRecoveryConfig,
    keep: bool,
) -> Result<(
    ExactRecoveryResults,
    Vec<Option<crate::training::FitReport>>,
)> {
    let mut jobs = Vec::new();
    for &reg in &cfg.regs {
        for &k in &cfg.k_list {
            for &w in &cfg.w_list {
                for trial in 0..cfg.trials {
                    jobs.push((reg, k, w, trial));
                }
            }
        }
    }
    let results = run_indexed(jobs.len(), cfg.workers, |idx| {
        let (reg, k, w, trial) = jobs[idx];
        run_trial(cfg, reg, k, w, trial)
            .map(|(outcome, report)| (outcome, if keep { Some(report) } else { None }))
    });
    let mut outcomes = Vec::with_capacity(results.len());
    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        let (outcome, report) = r?;
        outcomes.push(outcome);
        reports.push(report);
    }
    let mut cells = Vec::new();
    for &reg in &cfg.regs {
        for &k in &cfg.k_list {
            for &w in &cfg.w_list {
                let successes = outcomes
                    .iter()
                    .filter(|o| o.reg == reg && o.k == k && o.w == w && o.success)
                    .count();
                cells.push(CellSummary {
                    reg,
                    k,
                    w,
                    successes,
                    trials: cfg.trials,
                });
            }
        }
    }
    Ok((ExactRecoveryResults { outcomes, cells }, reports))
}

/// Runs the table and writes `table.csv`, `outcomes.csv`, optional traces,
/// and `manifest.txt` under `out`.
pub fn run_to_dir(
    cfg: &ExactRecoveryConfig,
    profile: Profile,
    out: &Path,
) -> Result<ExactRecoveryResults> {
    let (results, reports) = run_keeping_reports(cfg, cfg.write_traces)?;
    std::fs::create_dir_all(out)?;
    super::write_text_file(out, "table.csv", &results.table_csv())?;
    super::write_text_file(out, "outcomes.csv", &results.outcomes_csv())?;
    if cfg.write_traces {
        let trace_dir = out.join("traces");
        std::fs::create_dir_all(&trace_dir)?;
        for (o, report) in results.outcomes.iter().zip(reports.iter()) {
            let Some(report) = report else { continue };
            let name = format!("trace-{}-k{}-w{}-t{}.csv", o.reg.label(), o.k, o.w, o.trial);
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            std::fs::write(trace_dir.join(name), buf)?;
        }
    }
    let mut manifest = Manifest::new("exact-recovery", profile.label());
    cfg.snapshot(&mut manifest);
    manifest.outcome_header = outcome_header().to_string();
    manifest.outcomes = results.outcomes.iter().map(outcome_row).collect();
    manifest.write(out)?;
    Ok(results)
}
