//! Atomic measures over the weight sphere, the weighted total-variation
//! objective, the operator `K_Omega`, and numerical dual certificates.
//!
//! A finite-width INR corresponds to the atomic measure
//! `mu = sum_i a_i delta_{w_i}` with unit-norm directions, and its weighted
//! TV norm `sum_i |a_i| eta(w_i)` matches the rebalanced weight-decay value.
//! The dual of TV minimization asks for a coefficient vector `q` with
//! `|<q, v(w)>| <= eta(w)` for every direction, where `v(w) = F_Omega
//! [w . gamma]_+`; for modified weight decay the width-1 certificate
//! `q = sign(a) v(w0)/||v(w0)||` is feasible by Cauchy-Schwarz and tight at
//! `w0`, so the verifier's job is to measure the equality gap elsewhere.
//! Feasibility over the sphere is spot-checked by seeded sampling plus
//! projected gradient ascent on the constraint ratio.

use num_complex::Complex64;
use std::io::Write;

use crate::forward_op::{ForwardConfig, GridEngine};
use crate::model::InrParams;
use crate::rng::Rng;
use crate::spectral::{FeatureMap, Measurements};
use crate::training::{RegKind, Weighting};
use crate::{Error, Result};

/// One weighted Dirac: amplitude and unit-norm direction on the sphere of
/// feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub amplitude: f64,
    pub direction: Vec<f64>,
}

/// A signed atomic measure `sum_i a_i delta_{w_i}` over the weight sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    fm: FeatureMap,
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    /// Directions must be unit-norm to 1e-12.
    pub fn new(fm: FeatureMap, atoms: Vec<Atom>) -> Result<Self> {
        for (i, atom) in atoms.iter().enumerate() {
            if atom.direction.len() != fm.dim_out() {
                return Err(Error::Parse(format!(
                    "atom {i}: direction has length {}, expected {}",
                    atom.direction.len(),
                    fm.dim_out()
                )));
            }
            let norm: f64 = atom.direction.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::Parse(format!(
                    "atom {i}: direction norm {norm} is not 1"
                )));
            }
        }
        Ok(AtomicMeasure { fm, atoms })
    }

    pub fn empty(fm: FeatureMap) -> Self {
        AtomicMeasure {
            fm,
            atoms: Vec::new(),
        }
    }

    /// The measure of a parameter vector: normalize to the sphere, keep
    /// units with nonzero outer weight.
    pub fn from_params(params: &InrParams) -> Self {
        let normed = params.normalize_to_sphere();
        let atoms = normed
            .units()
            .iter()
            .filter(|u| u.outer != 0.0)
            .map(|u| Atom {
                amplitude: u.outer,
                direction: u.weights.clone(),
            })
            .collect();
        AtomicMeasure {
            fm: params.feature_map().clone(),
            atoms,
        }
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.fm
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

/// Weighted TV norm `sum_i |a_i| eta(w_i)`.
pub fn tv_norm(mu: &AtomicMeasure, eta: &Weighting) -> f64 {
    mu.atoms
        .iter()
        .map(|a| a.amplitude.abs() * eta.eta(&a.direction))
        .sum()
}

/// `K_Omega mu = sum_i a_i F_Omega [w_i . gamma]_+`; identical to the INR
/// coefficients of the corresponding parameter vector.
pub fn apply_k(mu: &AtomicMeasure, cfg: &ForwardConfig) -> Result<Measurements> {
    let mut acc = Measurements::zeros(cfg.omega().clone());
    for atom in &mu.atoms {
        let v = crate::forward_op::unit_coeffs(&atom.direction, &mu.fm, cfg)?;
        for (slot, &c) in acc.vals_mut().iter_mut().zip(v.vals().iter()) {
            *slot += atom.amplitude * c;
        }
    }
    Ok(acc)
}

/// Condensed outcome of a feasibility check.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilitySummary {
    pub max_ratio: f64,
    pub argmax: Vec<f64>,
}

/// A dual vector on Omega together with the regularizer it certifies for.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    q: Measurements,
    kind: RegKind,
    /// Filled in after a verification pass.
    pub summary: Option<FeasibilitySummary>,
}

impl DualCertificate {
    /// `q` must be Hermitian-symmetric (it pairs with real-valued functions).
    pub fn new(q: Measurements, kind: RegKind) -> Result<Self> {
        if !q.is_hermitian(1e-10) {
            return Err(Error::NotHermitian {
                violation: q.hermitian_violation(),
            });
        }
        Ok(DualCertificate {
            q,
            kind,
            summary: None,
        })
    }

    pub fn q(&self) -> &Measurements {
        &self.q
    }

    pub fn kind(&self) -> RegKind {
        self.kind
    }

    /// Dual pairing `Re<q, y>`.
    pub fn pair(&self, y: &Measurements) -> f64 {
        self.q
            .vals()
            .iter()
            .zip(y.vals().iter())
            .map(|(q, y)| (q.conj() * y).re)
            .sum()
    }
}

/// The width-1 certificate for modified weight decay:
/// `q = sign * v(w0) / ||v(w0)||_2`. Every constraint
/// `|<q, v(w)>| <= ||v(w)||_2 = eta(w)` holds by Cauchy-Schwarz with
/// equality at `w0`. Requires the sampling box to cover the tripled feature
/// band (`K >= 3 K0`) and `eta(w0) > 0`.
pub fn certificate_width1_modified(
    w0: &[f64],
    sign: f64,
    fm: &FeatureMap,
    cfg: &ForwardConfig,
) -> Result<DualCertificate> {
    let k = cfg.omega().radius();
    let k0 = fm.max_freq();
    if k < 3 * k0 {
        return Err(Error::CertificateBand { k, k0 });
    }
    let v = crate::forward_op::unit_coeffs(w0, fm, cfg)?;
    let norm = v.norm();
    if norm <= 1e-12 {
        return Err(Error::ZeroWeighting {
            index: 0,
            eta: norm,
        });
    }
    let s = sign.signum() / norm;
    let vals = v.vals().iter().map(|&c| s * c).collect();
    DualCertificate::new(
        Measurements::new(cfg.omega().clone(), vals),
        RegKind::ModifiedWd,
    )
}

/// Sampling and refinement controls for the feasibility verifier.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub n_samples: usize,
    pub refine_steps: usize,
    pub refine_step_size: f64,
    /// How many of the highest-ratio samples get refined.
    pub refine_top: usize,
    pub seed: u64,
    /// Directions with `eta(w)` below this are skipped.
    pub skip_eta_below: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            n_samples: 100_000,
            refine_steps: 200,
            refine_step_size: 1e-2,
            refine_top: 10,
            seed: 0,
            skip_eta_below: 1e-10,
        }
    }
}

/// Feasibility report: all sampled constraint ratios, the refined local
/// maxima, and the near-equality set.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    /// Constraint ratio `|<q, v(w)>| / eta(w)` per retained sample.
    pub ratios: Vec<f64>,
    /// Sampled directions, flattened D at a time, parallel to `ratios`.
    pub directions: Vec<f64>,
    /// Directions skipped because `eta` was below the floor.
    pub skipped: usize,
    /// `(direction, ratio)` after projected gradient ascent from the
    /// highest-ratio samples.
    pub refined: Vec<(Vec<f64>, f64)>,
    /// Directions (sampled or refined) with ratio above `1 - 1e-6`.
    pub near_equality: Vec<(Vec<f64>, f64)>,
    pub max_ratio: f64,
    pub argmax: Vec<f64>,
}

impl FeasibilityReport {
    pub fn summary(&self) -> FeasibilitySummary {
        FeasibilitySummary {
            max_ratio: self.max_ratio,
            argmax: self.argmax.clone(),
        }
    }

    pub fn dim_out(&self) -> usize {
        if self.ratios.is_empty() {
            self.argmax.len()
        } else {
            self.directions.len() / self.ratios.len()
        }
    }

    /// CSV rows `sample,ratio,w0..w{D-1}`; refined points get indices past
    /// the sampled range.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let d = self.dim_out();
        write!(out, "sample,ratio")?;
        for j in 0..d {
            write!(out, ",w{j}")?;
        }
        writeln!(out)?;
        for (i, &r) in self.ratios.iter().enumerate() {
            write!(out, "{i},{r:.17e}")?;
            for &c in &self.directions[i * d..(i + 1) * d] {
                write!(out, ",{c:.17e}")?;
            }
            writeln!(out)?;
        }
        for (j, (dir, r)) in self.refined.iter().enumerate() {
            write!(out, "refined-{j},{r:.17e}")?;
            for &c in dir {
                write!(out, ",{c:.17e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Scratch for repeated `v(w)` evaluations through one engine.
struct VerifyWorkspace {
    relu: Vec<f64>,
    vhat: Vec<Complex64>,
    cplx: Vec<Complex64>,
    q_img: Vec<f64>,
    v_img: Vec<f64>,
    grad_num: Vec<f64>,
    grad_eta: Vec<f64>,
}

impl VerifyWorkspace {
    fn new(engine: &GridEngine) -> Self {
        VerifyWorkspace {
            relu: vec![0.0; engine.grid_len()],
            vhat: vec![Complex64::default(); engine.omega_len()],
            cplx: vec![Complex64::default(); engine.grid_len()],
            q_img: vec![0.0; engine.grid_len()],
            v_img: vec![0.0; engine.grid_len()],
            grad_num: vec![0.0; engine.feature_map().dim_out()],
            grad_eta: vec![0.0; engine.feature_map().dim_out()],
        }
    }
}

/// `(<q, v(w)>, eta(w))` for one direction.
fn pairing_and_eta(
    engine: &GridEngine,
    q: &[Complex64],
    kind: RegKind,
    w: &[f64],
    ws: &mut VerifyWorkspace,
) -> (f64, f64) {
    engine.unit_forward(w, &mut ws.relu, &mut ws.vhat, &mut ws.cplx);
    let pairing: f64 = q
        .iter()
        .zip(ws.vhat.iter())
        .map(|(q, v)| (q.conj() * v).re)
        .sum();
    let eta = match kind {
        RegKind::ModifiedWd => ws.vhat.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
        RegKind::StandardWd => w.iter().map(|v| v * v).sum::<f64>().sqrt(),
    };
    (pairing, eta)
}

/// Projected gradient ascent on the constraint ratio, staying on the sphere.
fn refine_direction(
    engine: &GridEngine,
    q: &[Complex64],
    kind: RegKind,
    start: &[f64],
    opts: &VerifyOptions,
    ws: &mut VerifyWorkspace,
) -> (Vec<f64>, f64) {
    let d = start.len();
    let mut w = start.to_vec();
    let mut best_w = w.clone();
    let (p0, e0) = pairing_and_eta(engine, q, kind, &w, ws);
    let mut best_ratio = if e0 > opts.skip_eta_below {
        p0.abs() / e0
    } else {
        0.0
    };
    for _ in 0..opts.refine_steps {
        let (pairing, eta) = pairing_and_eta(engine, q, kind, &w, ws);
        if eta <= opts.skip_eta_below {
            break;
        }
        let ratio = pairing.abs() / eta;
        if ratio > best_ratio {
            best_ratio = ratio;
            best_w.copy_from_slice(&w);
        }
        // gradient of |<q, v>|: masked adjoint of the synthesized q image
        engine.synthesize_omega(q, &mut ws.q_img, &mut ws.cplx);
        engine.masked_feature_adjoint(&ws.relu, &ws.q_img, &mut ws.grad_num, &mut ws.cplx);
        let sign = if pairing >= 0.0 { 1.0 } else { -1.0 };
        // gradient of eta
        match kind {
            RegKind::ModifiedWd => {
                engine.synthesize_omega(&ws.vhat, &mut ws.v_img, &mut ws.cplx);
                engine.masked_feature_adjoint(&ws.relu, &ws.v_img, &mut ws.grad_eta, &mut ws.cplx);
                for g in ws.grad_eta.iter_mut() {
                    *g /= eta;
                }
            }
            RegKind::StandardWd => {
                for (g, &wj) in ws.grad_eta.iter_mut().zip(w.iter()) {
                    *g = wj / eta;
                }
            }
        }
        // d(ratio)/dw, then project onto the tangent space of the sphere
        let mut step = vec![0.0; d];
        for j in 0..d {
            step[j] = (sign * ws.grad_num[j] * eta - pairing.abs() * ws.grad_eta[j]) / (eta * eta);
        }
        let radial: f64 = step.iter().zip(w.iter()).map(|(s, w)| s * w).sum();
        for (s, &wj) in step.iter_mut().zip(w.iter()) {
            *s -= radial * wj;
        }
        for (wj, s) in w.iter_mut().zip(step.iter()) {
            *wj += opts.refine_step_size * s;
        }
        let norm: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        for wj in w.iter_mut() {
            *wj /= norm;
        }
    }
    let (pairing, eta) = pairing_and_eta(engine, q, kind, &w, ws);
    if eta > opts.skip_eta_below {
        let ratio = pairing.abs() / eta;
        if ratio > best_ratio {
            best_ratio = ratio;
            best_w.copy_from_slice(&w);
        }
    }
    (best_w, best_ratio)
}

/// Samples directions uniformly on the sphere, computes the constraint
/// ratio `|<q, v(w)>|/eta(w)` for each, refines the highest ratios by
/// projected gradient ascent, and reports the maximum together with the
/// near-equality set (`ratio > 1 - 1e-6`). Report-only: a violation shows
/// up as `max_ratio > 1`, never as an error.
pub fn verify_certificate(
    cert: &DualCertificate,
    fm: &FeatureMap,
    cfg: &ForwardConfig,
    opts: &VerifyOptions,
) -> Result<FeasibilityReport> {
    let engine = GridEngine::from_config(fm, cfg)?;
    let mut ws = VerifyWorkspace::new(&engine);
    let q = cert.q().vals();
    let d = fm.dim_out();
    let mut rng = Rng::new(opts.seed);
    let mut ratios = Vec::with_capacity(opts.n_samples);
    let mut directions = Vec::with_capacity(opts.n_samples * d);
    let mut skipped = 0usize;
    for _ in 0..opts.n_samples {
        let w = rng.unit_vector(d);
        let (pairing, eta) = pairing_and_eta(&engine, q, cert.kind(), &w, &mut ws);
        if eta < opts.skip_eta_below {
            skipped += 1;
            continue;
        }
        ratios.push(pairing.abs() / eta);
        directions.extend_from_slice(&w);
    }

    // refine the highest-ratio samples
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    order.sort_by(|&a, &b| ratios[b].partial_cmp(&ratios[a]).unwrap());
    let mut refined = Vec::new();
    for &idx in order.iter().take(opts.refine_top) {
        let start = &directions[idx * d..(idx + 1) * d];
        let (w, ratio) = refine_direction(&engine, q, cert.kind(), start, opts, &mut ws);
        refined.push((w, ratio));
    }

    let mut max_ratio = 0.0f64;
    let mut argmax = vec![0.0; d];
    let mut near_equality = Vec::new();
    for (i, &r) in ratios.iter().enumerate() {
        let dir = &directions[i * d..(i + 1) * d];
        if r > max_ratio {
            max_ratio = r;
            argmax.copy_from_slice(dir);
        }
        if r > 1.0 - 1e-6 {
            near_equality.push((dir.to_vec(), r));
        }
    }
    for (dir, r) in &refined {
        if *r > max_ratio {
            max_ratio = *r;
            argmax.copy_from_slice(dir);
        }
        if *r > 1.0 - 1e-6 {
            near_equality.push((dir.clone(), *r));
        }
    }
    Ok(FeasibilityReport {
        ratios,
        directions,
        skipped,
        refined,
        near_equality,
        max_ratio,
        argmax,
    })
}

/// `tv_norm(mu) - Re<q, y>` for a primal-dual pair that passed feasibility.
/// A gap near zero certifies `mu` as optimal for the measure-space problem.
/// Rejects pairs violating either precondition, naming the failed condition.
pub fn duality_gap_estimate(
    mu: &AtomicMeasure,
    cert: &DualCertificate,
    y: &Measurements,
    eta: &Weighting,
    cfg: &ForwardConfig,
    report: &FeasibilityReport,
) -> Result<f64> {
    let k_mu = apply_k(mu, cfg)?;
    let mut diff_sqr = 0.0;
    for (a, b) in k_mu.vals().iter().zip(y.vals().iter()) {
        diff_sqr += (a - b).norm_sqr();
    }
    let feas_tol = 1e-8 * (1.0 + y.norm());
    if diff_sqr.sqrt() > feas_tol {
        return Err(Error::Infeasible {
            condition: format!(
                "primal constraint: ||K mu - y|| = {:.3e} exceeds {:.3e}",
                diff_sqr.sqrt(),
                feas_tol
            ),
        });
    }
    if report.max_ratio > 1.0 + 1e-8 {
        return Err(Error::Infeasible {
            condition: format!(
                "dual constraint: max ratio {:.12} exceeds 1 + 1e-8",
                report.max_ratio
            ),
        });
    }
    Ok(tv_norm(mu, eta) - cert.pair(y))
}
