//! Weight-decay regularizers with hand-derived gradients, the penalized
//! least-squares objective, Adam, and the augmented Lagrangian solver for
//! the equality-constrained fit.
//!
//! Gradients are exact for the discretized objective. The chain through the
//! ReLU uses the strict indicator `1{tau > 0}` evaluated on the same grid as
//! the coefficients, and the inner products against
//! `F_Omega[1{tau>0} gamma_j]` collapse to one masked-image FFT per unit:
//!
//! ```text
//! Re<r, F[g gamma_j]> = (1/M^d) sum_m g[m] R[m] gamma_j(x_m),
//! R = zero-fill synthesis of r
//! ```
//!
//! so a full gradient costs four grid transforms per unit (three for
//! standard weight decay).

use num_complex::Complex64;
use std::io::Write;
use std::time::{Duration, Instant};

use crate::forward_op::{ForwardConfig, GridEngine};
use crate::model::{InrParams, Unit};
use crate::rng::Rng;
use crate::spectral::{FeatureMap, FrequencySet, Measurements};
use crate::{Error, Result};

/// Which weighting function `eta` the regularizer applies to inner weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegKind {
    /// `eta(w) = ||w||_2` — standard weight decay.
    StandardWd,
    /// `eta(w) = ||F_Omega [w . gamma]_+||_2` — modified weight decay.
    ModifiedWd,
}

impl RegKind {
    pub fn label(&self) -> &'static str {
        match self {
            RegKind::StandardWd => "standard",
            RegKind::ModifiedWd => "modified",
        }
    }
}

/// Regularizer `R(theta) = 1/2 sum_i (|a_i|^2 + eta(w_i)^2)`.
#[derive(Debug, Clone)]
pub struct Regularizer {
    kind: RegKind,
    cfg: Option<ForwardConfig>,
}

impl Regularizer {
    pub fn standard() -> Self {
        Regularizer {
            kind: RegKind::StandardWd,
            cfg: None,
        }
    }

    /// Modified weight decay measured through the given operator.
    pub fn modified(cfg: ForwardConfig) -> Self {
        Regularizer {
            kind: RegKind::ModifiedWd,
            cfg: Some(cfg),
        }
    }

    pub fn kind(&self) -> RegKind {
        self.kind
    }

    pub fn config(&self) -> Option<&ForwardConfig> {
        self.cfg.as_ref()
    }

    /// Binds the weighting function to a feature map so it can be evaluated
    /// repeatedly without rebuilding operator tables.
    pub fn prepare(&self, fm: &FeatureMap) -> Result<Weighting> {
        let engine = match self.kind {
            RegKind::StandardWd => None,
            RegKind::ModifiedWd => {
                let cfg = self
                    .cfg
                    .as_ref()
                    .expect("modified regularizer carries a config");
                Some(GridEngine::from_config(fm, cfg)?)
            }
        };
        Ok(Weighting {
            kind: self.kind,
            engine,
        })
    }
}

/// A prepared weighting function `eta`.
pub struct Weighting {
    kind: RegKind,
    engine: Option<GridEngine>,
}

impl Weighting {
    pub fn eta(&self, w: &[f64]) -> f64 {
        match self.kind {
            RegKind::StandardWd => w.iter().map(|v| v * v).sum::<f64>().sqrt(),
            RegKind::ModifiedWd => self
                .engine
                .as_ref()
                .expect("modified weighting has an engine")
                .unit_coeffs(w)
                .norm(),
        }
    }

    pub fn as_fn(&self) -> impl Fn(&[f64]) -> f64 + '_ {
        move |w| self.eta(w)
    }
}

/// `R(theta) = 1/2 sum_i (|a_i|^2 + eta(w_i)^2)`.
pub fn reg_value(params: &InrParams, reg: &Regularizer) -> Result<f64> {
    let weighting = reg.prepare(params.feature_map())?;
    Ok(params
        .units()
        .iter()
        .map(|u| 0.5 * (u.outer * u.outer + weighting.eta(&u.weights).powi(2)))
        .sum())
}

/// One constant-learning-rate segment of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrStage {
    pub iters: usize,
    pub lr: f64,
}

/// Step decay: multiply the learning rate by `factor` every `every` outer
/// iterations of the augmented Lagrangian loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDecay {
    pub every: usize,
    pub factor: f64,
}

/// Augmented Lagrangian outer-loop controls.
#[derive(Debug, Clone, PartialEq)]
pub struct AlConfig {
    pub max_outer: usize,
    pub rho0: f64,
    pub rho_growth: f64,
    /// Stop once the constraint norm falls below this.
    pub tol: f64,
}

impl Default for AlConfig {
    fn default() -> Self {
        AlConfig {
            max_outer: 60,
            // A unit initial penalty lets the regularizer dominate the first
            // inner solves and the dual updates stall on hard draws; starting
            // at 10 keeps the data term competitive from the first outer
            // iteration.
            rho0: 10.0,
            rho_growth: 2.0,
            tol: 1e-12,
        }
    }
}

/// Training controls shared by the penalized and constrained paths.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub inner_iters: usize,
    pub lr: f64,
    /// Optional explicit schedule for the penalized path; when empty the
    /// run is a single `(inner_iters, lr)` stage.
    pub lr_stages: Vec<LrStage>,
    /// Optional step decay of the inner learning rate across augmented
    /// Lagrangian outer iterations.
    pub al_lr_decay: Option<StepDecay>,
    /// Penalty weight lambda of the penalized objective.
    pub lambda: f64,
    pub al: AlConfig,
    pub seed: u64,
    /// Evaluate the image-grid MSE probe every this many iterations
    /// (0 disables probing).
    pub mse_check_every: usize,
    /// Stop the run once the probed MSE falls below this value; the running
    /// minimum is recorded either way.
    pub stop_at_mse: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            inner_iters: 5000,
            lr: 1e-3,
            lr_stages: Vec::new(),
            al_lr_decay: None,
            lambda: 0.0,
            al: AlConfig::default(),
            seed: 0,
            mse_check_every: 10,
            stop_at_mse: None,
        }
    }
}

impl TrainConfig {
    pub fn stages(&self) -> Vec<LrStage> {
        if self.lr_stages.is_empty() {
            vec![LrStage {
                iters: self.inner_iters,
                lr: self.lr,
            }]
        } else {
            self.lr_stages.clone()
        }
    }
}

/// Outcome of a fit: final parameters plus traces with the executed lengths.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub params: InrParams,
    /// Objective value at every executed inner iteration.
    pub loss_trace: Vec<f64>,
    /// `||F_Omega f_theta - y||_2` per outer iteration, the entry at index 0
    /// being the starting point (penalized runs record start and end).
    pub constraint_trace: Vec<f64>,
    /// `(iteration, image MSE)` at every probe evaluation.
    pub mse_trace: Vec<(usize, f64)>,
    /// Running minimum of the probed MSE.
    pub best_mse: Option<f64>,
    /// Set when the constraint norm grew tenfold over five outer iterations.
    pub diverged: bool,
    pub wall: Duration,
}

impl FitReport {
    /// CSV rows `iter,loss,constraint_norm,mse`; the constraint and MSE
    /// columns repeat their most recent value (NaN before the first).
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "iter,loss,constraint_norm,mse")?;
        let mut mse_iter = self.mse_trace.iter().peekable();
        let mut current_mse = f64::NAN;
        let outers = self.constraint_trace.len().saturating_sub(1);
        let per_outer = if outers == 0 {
            usize::MAX
        } else {
            (self.loss_trace.len() / outers).max(1)
        };
        for (i, &loss) in self.loss_trace.iter().enumerate() {
            while let Some(&&(at, mse)) = mse_iter.peek() {
                if at <= i {
                    current_mse = mse;
                    mse_iter.next();
                } else {
                    break;
                }
            }
            let outer_idx = (i / per_outer).min(self.constraint_trace.len().saturating_sub(1));
            let cnorm = self
                .constraint_trace
                .get(outer_idx)
                .copied()
                .unwrap_or(f64::NAN);
            writeln!(out, "{i},{loss:.17e},{cnorm:.17e},{current_mse:.17e}")?;
        }
        Ok(())
    }
}

/// Image-grid MSE probe against fixed ground-truth values.
pub struct ImageMseProbe {
    engine: GridEngine,
    truth: Vec<f64>,
    grid_m: usize,
}

impl ImageMseProbe {
    /// Probe against an explicit truth grid (row-major, length `m^d`).
    pub fn from_truth_values(fm: &FeatureMap, m: usize, truth: Vec<f64>) -> Result<Self> {
        let trivial = FrequencySet::full_box(0, fm.dim());
        let engine = GridEngine::new(fm, &trivial, m)?;
        assert_eq!(truth.len(), engine.grid_len());
        Ok(ImageMseProbe {
            engine,
            truth,
            grid_m: m,
        })
    }

    /// Probe against a teacher network evaluated on the image grid.
    pub fn for_teacher(teacher: &InrParams, m: usize) -> Result<Self> {
        let fm = teacher.feature_map();
        let trivial = FrequencySet::full_box(0, fm.dim());
        let engine = GridEngine::new(fm, &trivial, m)?;
        let mut truth = vec![0.0; engine.grid_len()];
        let mut cplx = vec![Complex64::default(); engine.grid_len()];
        let flat = flatten_params(teacher);
        engine.eval_units_grid(&flat, &mut truth, &mut cplx);
        Ok(ImageMseProbe {
            engine,
            truth,
            grid_m: m,
        })
    }

    pub fn grid_size(&self) -> usize {
        self.grid_m
    }

    pub fn truth(&self) -> &[f64] {
        &self.truth
    }

    pub fn mse_of_flat(&self, flat: &[f64]) -> f64 {
        let mut img = vec![0.0; self.engine.grid_len()];
        let mut cplx = vec![Complex64::default(); self.engine.grid_len()];
        self.engine.eval_units_grid(flat, &mut img, &mut cplx);
        img.iter()
            .zip(self.truth.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / self.truth.len() as f64
    }

    pub fn mse_of_params(&self, params: &InrParams) -> f64 {
        self.mse_of_flat(&flatten_params(params))
    }
}

/// Unit-major flattening `[a, w[0..D)] * width` used by the optimizers.
pub fn flatten_params(params: &InrParams) -> Vec<f64> {
    let d_out = params.feature_map().dim_out();
    let mut flat = Vec::with_capacity(params.width() * (d_out + 1));
    for u in params.units() {
        flat.push(u.outer);
        flat.extend_from_slice(&u.weights);
    }
    flat
}

pub fn unflatten_params(fm: &FeatureMap, flat: &[f64]) -> InrParams {
    let stride = fm.dim_out() + 1;
    assert_eq!(flat.len() % stride, 0);
    let units = flat
        .chunks_exact(stride)
        .map(|c| Unit::new(c[0], c[1..].to_vec()))
        .collect();
    InrParams::new(fm.clone(), units)
}

/// Student initialization: inner weights uniform on the unit sphere, outer
/// weights N(0, 0.01^2) so the run starts near the regularizer's valley.
pub fn init_student(fm: &FeatureMap, width: usize, seed: u64) -> InrParams {
    let mut rng = Rng::new(seed);
    let units = (0..width)
        .map(|_| {
            let w = rng.unit_vector(fm.dim_out());
            Unit::new(0.01 * rng.normal(), w)
        })
        .collect();
    InrParams::new(fm.clone(), units)
}

/// The discretized objective
/// `s_quad/2 ||F f - y||^2 + Re<nu, F f - y> + s_reg R(theta)`
/// with exact gradients. The mode coefficients cover both the penalized path
/// (`s_quad = 1, nu = 0, s_reg = lambda`) and augmented Lagrangian inner
/// problems (`s_quad = rho, s_reg = 1`).
pub(crate) struct Objective {
    engine: GridEngine,
    y: Vec<Complex64>,
    reg: RegKind,
    s_quad: f64,
    nu: Vec<Complex64>,
    s_reg: f64,
    width: usize,
    // scratch, allocated once
    relu_all: Vec<f64>,
    vhat_all: Vec<Complex64>,
    eta: Vec<f64>,
    cplx: Vec<Complex64>,
    resid: Vec<Complex64>,
    res_eff: Vec<Complex64>,
    r_img: Vec<f64>,
    v_img: Vec<f64>,
    u_img: Vec<f64>,
    constraint_norm: f64,
}

impl Objective {
    pub(crate) fn new(
        fm: &FeatureMap,
        y: &Measurements,
        reg: RegKind,
        cfg: &ForwardConfig,
        width: usize,
    ) -> Result<Self> {
        let engine = GridEngine::from_config(fm, cfg)?;
        assert_eq!(y.set(), engine.omega(), "measurements must live on Omega");
        let nk = engine.omega_len();
        let n = engine.grid_len();
        Ok(Objective {
            y: y.vals().to_vec(),
            reg,
            s_quad: 1.0,
            nu: vec![Complex64::default(); nk],
            s_reg: 0.0,
            width,
            relu_all: vec![0.0; width * n],
            vhat_all: vec![Complex64::default(); width * nk],
            eta: vec![0.0; width],
            cplx: vec![Complex64::default(); n],
            resid: vec![Complex64::default(); nk],
            res_eff: vec![Complex64::default(); nk],
            r_img: vec![0.0; n],
            v_img: vec![0.0; n],
            u_img: vec![0.0; n],
            constraint_norm: f64::NAN,
            engine,
        })
    }

    pub(crate) fn set_penalized(&mut self, lambda: f64) {
        self.s_quad = 1.0;
        self.s_reg = lambda;
        self.nu.fill(Complex64::default());
    }

    pub(crate) fn set_al_mode(&mut self, rho: f64) {
        self.s_quad = rho;
        self.s_reg = 1.0;
    }

    /// `nu += rho c` with the residual of the most recent evaluation.
    pub(crate) fn dual_ascent(&mut self, rho: f64) {
        for (nu, &c) in self.nu.iter_mut().zip(self.resid.iter()) {
            *nu += rho * c;
        }
    }

    /// Recomputes the residual norm at `flat` without touching gradients.
    pub(crate) fn refresh_residual(&mut self, flat: &[f64]) -> f64 {
        let nk = self.y.len();
        let n = self.engine.grid_len();
        let stride = self.engine.feature_map().dim_out() + 1;
        self.resid
            .iter_mut()
            .for_each(|c| *c = Complex64::default());
        for (i, unit) in flat.chunks_exact(stride).enumerate() {
            let relu = &mut self.relu_all[i * n..(i + 1) * n];
            let vhat = &mut self.vhat_all[i * nk..(i + 1) * nk];
            self.engine
                .unit_forward(&unit[1..], relu, vhat, &mut self.cplx);
            for (r, &v) in self.resid.iter_mut().zip(vhat.iter()) {
                *r += unit[0] * v;
            }
        }
        for (r, &yv) in self.resid.iter_mut().zip(self.y.iter()) {
            *r -= yv;
        }
        self.constraint_norm = self.resid.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        self.constraint_norm
    }

    /// Value and gradient at the flattened parameters.
    pub(crate) fn eval(&mut self, flat: &[f64], grad: &mut [f64]) -> f64 {
        let d_out = self.engine.feature_map().dim_out();
        let stride = d_out + 1;
        debug_assert_eq!(flat.len(), self.width * stride);
        debug_assert_eq!(grad.len(), flat.len());
        let nk = self.y.len();
        let n = self.engine.grid_len();

        // forward: per-unit coefficients, weighting values, total residual
        self.resid
            .iter_mut()
            .for_each(|c| *c = Complex64::default());
        let mut reg_sum = 0.0;
        for (i, unit) in flat.chunks_exact(stride).enumerate() {
            let a = unit[0];
            let w = &unit[1..];
            let relu = &mut self.relu_all[i * n..(i + 1) * n];
            let vhat = &mut self.vhat_all[i * nk..(i + 1) * nk];
            self.engine.unit_forward(w, relu, vhat, &mut self.cplx);
            let eta = match self.reg {
                RegKind::StandardWd => w.iter().map(|v| v * v).sum::<f64>().sqrt(),
                RegKind::ModifiedWd => vhat.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
            };
            self.eta[i] = eta;
            reg_sum += 0.5 * (a * a + eta * eta);
            for (r, &v) in self.resid.iter_mut().zip(vhat.iter()) {
                *r += a * v;
            }
        }
        for (r, &yv) in self.resid.iter_mut().zip(self.y.iter()) {
            *r -= yv;
        }
        let c_norm_sqr: f64 = self.resid.iter().map(|c| c.norm_sqr()).sum();
        self.constraint_norm = c_norm_sqr.sqrt();
        let nu_pairing: f64 = self
            .nu
            .iter()
            .zip(self.resid.iter())
            .map(|(nu, c)| (nu.conj() * c).re)
            .sum();
        let value = 0.5 * self.s_quad * c_norm_sqr + nu_pairing + self.s_reg * reg_sum;

        // the effective residual drives every data-fit gradient term
        for ((e, &c), &nu) in self
            .res_eff
            .iter_mut()
            .zip(self.resid.iter())
            .zip(self.nu.iter())
        {
            *e = self.s_quad * c + nu;
        }
        self.engine
            .synthesize_omega(&self.res_eff, &mut self.r_img, &mut self.cplx);

        for (i, (unit, grad_unit)) in flat
            .chunks_exact(stride)
            .zip(grad.chunks_exact_mut(stride))
            .enumerate()
        {
            let a = unit[0];
            let w = &unit[1..];
            let relu = &self.relu_all[i * n..(i + 1) * n];
            let vhat = &self.vhat_all[i * nk..(i + 1) * nk];
            let data_a: f64 = self
                .res_eff
                .iter()
                .zip(vhat.iter())
                .map(|(r, v)| (r.conj() * v).re)
                .sum();
            grad_unit[0] = data_a + self.s_reg * a;
            match self.reg {
                RegKind::ModifiedWd => {
                    self.engine
                        .synthesize_omega(vhat, &mut self.v_img, &mut self.cplx);
                    for ((u, &r), &v) in self
                        .u_img
                        .iter_mut()
                        .zip(self.r_img.iter())
                        .zip(self.v_img.iter())
                    {
                        *u = a * r + self.s_reg * v;
                    }
                    self.engine.masked_feature_adjoint(
                        relu,
                        &self.u_img,
                        &mut grad_unit[1..],
                        &mut self.cplx,
                    );
                }
                RegKind::StandardWd => {
                    for (u, &r) in self.u_img.iter_mut().zip(self.r_img.iter()) {
                        *u = a * r;
                    }
                    self.engine.masked_feature_adjoint(
                        relu,
                        &self.u_img,
                        &mut grad_unit[1..],
                        &mut self.cplx,
                    );
                    for (g, &wj) in grad_unit[1..].iter_mut().zip(w.iter()) {
                        *g += self.s_reg * wj;
                    }
                }
            }
        }
        value
    }
}

/// Penalized objective `1/2 ||F f - y||^2 + lambda R(theta)` and its
/// gradient with respect to every parameter, flattened unit-major.
pub fn loss_and_grad(
    params: &InrParams,
    y: &Measurements,
    reg: &Regularizer,
    lambda: f64,
    cfg: &ForwardConfig,
) -> Result<(f64, Vec<f64>)> {
    let mut obj = Objective::new(params.feature_map(), y, reg.kind(), cfg, params.width())?;
    obj.set_penalized(lambda);
    let flat = flatten_params(params);
    let mut grad = vec![0.0; flat.len()];
    let value = obj.eval(&flat, &mut grad);
    Ok((value, grad))
}

/// What the per-iteration hook tells the optimizer to do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Deterministic Adam (beta1 = 0.9, beta2 = 0.999, eps = 1e-8) over a flat
/// parameter vector. The hook sees `(iteration, loss, params)` after every
/// step and may stop the run. Aborts on a non-finite loss.
pub fn adam_minimize<F, H>(
    x: &mut [f64],
    mut objective: F,
    stages: &[LrStage],
    loss_trace: &mut Vec<f64>,
    mut hook: H,
) -> Result<()>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
    H: FnMut(usize, f64, &[f64]) -> Control,
{
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;
    let mut grad = vec![0.0; x.len()];
    let mut m = vec![0.0; x.len()];
    let mut v = vec![0.0; x.len()];
    let mut t = 0i32;
    let mut iter = loss_trace.len();
    for stage in stages {
        for _ in 0..stage.iters {
            let loss = objective(x, &mut grad);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { iter, value: loss });
            }
            t += 1;
            let bc1 = 1.0 - BETA1.powi(t);
            let bc2 = 1.0 - BETA2.powi(t);
            for ((xi, &gi), (mi, vi)) in x
                .iter_mut()
                .zip(grad.iter())
                .zip(m.iter_mut().zip(v.iter_mut()))
            {
                *mi = BETA1 * *mi + (1.0 - BETA1) * gi;
                *vi = BETA2 * *vi + (1.0 - BETA2) * gi * gi;
                let m_hat = *mi / bc1;
                let v_hat = *vi / bc2;
                *xi -= stage.lr * m_hat / (v_hat.sqrt() + EPS);
            }
            loss_trace.push(loss);
            let control = hook(iter, loss, x);
            iter += 1;
            if control == Control::Stop {
                return Ok(());
            }
        }
    }
    Ok(())
}

struct ProbeState<'a> {
    probe: Option<&'a ImageMseProbe>,
    every: usize,
    stop_below: Option<f64>,
    mse_trace: Vec<(usize, f64)>,
    best: Option<f64>,
}

impl<'a> ProbeState<'a> {
    fn new(probe: Option<&'a ImageMseProbe>, cfg: &TrainConfig) -> Self {
        ProbeState {
            probe,
            every: cfg.mse_check_every,
            stop_below: cfg.stop_at_mse,
            mse_trace: Vec::new(),
            best: None,
        }
    }

    fn check(&mut self, iter: usize, flat: &[f64]) -> Control {
        let Some(probe) = self.probe else {
            return Control::Continue;
        };
        if self.every == 0 || iter % self.every != 0 {
            return Control::Continue;
        }
        let mse = probe.mse_of_flat(flat);
        self.mse_trace.push((iter, mse));
        self.best = Some(self.best.map_or(mse, |b: f64| b.min(mse)));
        match self.stop_below {
            Some(threshold) if mse < threshold => Control::Stop,
            _ => Control::Continue,
        }
    }
}

/// Fits the penalized objective (regularized least squares) with Adam.
pub fn adam_fit(
    params0: &InrParams,
    y: &Measurements,
    reg: &Regularizer,
    cfg: &ForwardConfig,
    train: &TrainConfig,
    probe: Option<&ImageMseProbe>,
) -> Result<FitReport> {
    let start = Instant::now();
    let fm = params0.feature_map().clone();
    let mut obj = Objective::new(&fm, y, reg.kind(), cfg, params0.width())?;
    obj.set_penalized(train.lambda);
    let mut flat = flatten_params(params0);
    let start_constraint = obj.refresh_residual(&flat);
    let mut loss_trace = Vec::new();
    let mut probe_state = ProbeState::new(probe, train);
    {
        let obj_ref = &mut obj;
        let probe_ref = &mut probe_state;
        adam_minimize(
            &mut flat,
            |x, g| obj_ref.eval(x, g),
            &train.stages(),
            &mut loss_trace,
            |iter, _loss, x| probe_ref.check(iter, x),
        )?;
    }
    let final_constraint = obj.refresh_residual(&flat);
    Ok(FitReport {
        params: unflatten_params(&fm, &flat),
        loss_trace,
        constraint_trace: vec![start_constraint, final_constraint],
        mse_trace: probe_state.mse_trace,
        best_mse: probe_state.best,
        diverged: false,
        wall: start.elapsed(),
    })
}

/// Minimizes `R(theta)` subject to `F_Omega f_theta = y` by the augmented
/// Lagrangian method: each outer iteration Adam-minimizes
/// `R + Re<nu, c> + rho/2 ||c||^2`, then `nu += rho c`; `rho` grows whenever
/// the constraint norm failed to shrink by a factor of four.
pub fn al_solve(
    params0: &InrParams,
    y: &Measurements,
    reg: &Regularizer,
    cfg: &ForwardConfig,
    train: &TrainConfig,
    probe: Option<&ImageMseProbe>,
) -> Result<FitReport> {
    let start = Instant::now();
    let fm = params0.feature_map().clone();
    let mut obj = Objective::new(&fm, y, reg.kind(), cfg, params0.width())?;
    let mut flat = flatten_params(params0);
    let mut loss_trace = Vec::new();
    let mut constraint_trace = Vec::new();
    let mut probe_state = ProbeState::new(probe, train);
    let mut rho = train.al.rho0;
    let mut diverged = false;

    let mut c_norm = obj.refresh_residual(&flat);
    constraint_trace.push(c_norm);
    let mut stopped_early = false;
    for outer in 0..train.al.max_outer {
        if c_norm < train.al.tol || stopped_early {
            break;
        }
        let lr = match train.al_lr_decay {
            Some(decay) if decay.every > 0 => {
                train.lr * decay.factor.powi((outer / decay.every) as i32)
            }
            _ => train.lr,
        };
        let inner_stages = vec![LrStage {
            iters: train.inner_iters,
            lr,
        }];
        obj.set_al_mode(rho);
        {
            let obj_ref = &mut obj;
            let probe_ref = &mut probe_state;
            let mut stop_flag = false;
            adam_minimize(
                &mut flat,
                |x, g| obj_ref.eval(x, g),
                &inner_stages,
                &mut loss_trace,
                |iter, _loss, x| {
                    let control = probe_ref.check(iter, x);
                    if control == Control::Stop {
                        stop_flag = true;
                    }
                    control
                },
            )?;
            stopped_early = stop_flag;
        }
        let c_prev = c_norm;
        c_norm = obj.refresh_residual(&flat);
        constraint_trace.push(c_norm);
        obj.dual_ascent(rho);
        if c_norm > c_prev / 4.0 {
            rho *= train.al.rho_growth;
        }
        let outers = constraint_trace.len();
        if outers > 5 && constraint_trace[outers - 1] > 10.0 * constraint_trace[outers - 6] {
            diverged = true;
        }
    }
    Ok(FitReport {
        params: unflatten_params(&fm, &flat),
        loss_trace,
        constraint_trace,
        mse_trace: probe_state.mse_trace,
        best_mse: probe_state.best,
        diverged,
        wall: start.elapsed(),
    })
}
