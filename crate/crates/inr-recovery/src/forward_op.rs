//! The measurement operator `F_Omega` applied to rectified units and whole
//! INRs, with two interchangeable backends:
//!
//! - a grid backend (any dimension): sample on an oversampled `M^d` grid,
//!   DFT, restrict to the box Omega;
//! - an analytic backend (d = 1): locate the zero crossings of the unit's
//!   trigonometric polynomial and integrate `tau(x) e^{-2 pi i k x}` in
//!   closed form over each positive interval.
//!
//! The grid backend is the one experiments train against (measurements and
//! reconstruction go through the same discretized operator, so quadrature
//! bias cancels); the analytic backend exists to validate it.

use num_complex::Complex64;

use crate::fft::GridFft;
use crate::model::InrParams;
use crate::spectral::{
    dft_coeffs, grid_bin, grid_samples, FeatureMap, FrequencySet, Measurements, SetKind, TrigPoly,
};
use crate::{Error, Result};

/// Which discretization computes coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Oversampled-grid DFT with M samples per axis. M must exceed both 2K
    /// and 2K0; for rectified (kinked) integrands M >= 64 max(K, K0) keeps
    /// the quadrature bias small.
    Grid { m: usize },
    /// Closed-form piecewise integration; d = 1 only.
    Analytic1d,
}

/// Measurement operator configuration: the frequency box and the backend.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardConfig {
    omega: FrequencySet,
    backend: Backend,
}

impl ForwardConfig {
    pub fn new(omega: FrequencySet, backend: Backend) -> Self {
        assert_eq!(omega.kind(), SetKind::FullBox);
        ForwardConfig { omega, backend }
    }

    /// Grid backend over the box of radius `k` in dimension `dim`.
    pub fn grid(k: i64, dim: usize, m: usize) -> Self {
        Self::new(FrequencySet::full_box(k, dim), Backend::Grid { m })
    }

    /// Analytic 1-D backend over the box of radius `k`.
    pub fn analytic(k: i64) -> Self {
        Self::new(FrequencySet::full_box(k, 1), Backend::Analytic1d)
    }

    pub fn omega(&self) -> &FrequencySet {
        &self.omega
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn with_omega(&self, omega: FrequencySet) -> Self {
        Self::new(omega, self.backend)
    }
}

/// Precomputed FFT machinery for one (feature map, Omega, M) triple.
///
/// All methods are `&self` and write into caller-supplied buffers, so one
/// engine can be shared across threads; each fit owns its own scratch.
#[derive(Debug, Clone)]
pub struct GridEngine {
    fm: FeatureMap,
    omega: FrequencySet,
    m: usize,
    dim: usize,
    n: usize,
    fft: GridFft,
    omega_bins: Vec<usize>,
    feat_bins_pos: Vec<usize>,
    feat_bins_neg: Vec<usize>,
    inv_n: f64,
}

impl GridEngine {
    pub fn new(fm: &FeatureMap, omega: &FrequencySet, m: usize) -> Result<Self> {
        assert_eq!(omega.kind(), SetKind::FullBox);
        assert_eq!(omega.dim(), fm.dim());
        let needed = (2 * omega.radius().max(fm.max_freq()) + 1) as usize;
        if m < needed {
            return Err(Error::GridTooSmall { m, needed });
        }
        if !m.is_power_of_two() {
            return Err(Error::GridNotPowerOfTwo { m });
        }
        let dim = fm.dim();
        let n = m.pow(dim as u32);
        let omega_bins = omega.iter().map(|k| grid_bin(k, m)).collect();
        let mut feat_bins_pos = Vec::with_capacity(fm.p());
        let mut feat_bins_neg = Vec::with_capacity(fm.p());
        let mut neg = vec![0i64; dim];
        for k in fm.freqs().iter() {
            feat_bins_pos.push(grid_bin(k, m));
            for (n_c, &c) in neg.iter_mut().zip(k.iter()) {
                *n_c = -c;
            }
            feat_bins_neg.push(grid_bin(&neg, m));
        }
        Ok(GridEngine {
            fm: fm.clone(),
            omega: omega.clone(),
            m,
            dim,
            n,
            fft: GridFft::new(m, dim),
            omega_bins,
            feat_bins_pos,
            feat_bins_neg,
            inv_n: 1.0 / n as f64,
        })
    }

    pub fn from_config(fm: &FeatureMap, cfg: &ForwardConfig) -> Result<Self> {
        match cfg.backend() {
            Backend::Grid { m } => Self::new(fm, cfg.omega(), m),
            Backend::Analytic1d => Err(Error::AnalyticDimension { dim: fm.dim() }),
        }
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.fm
    }

    pub fn omega(&self) -> &FrequencySet {
        &self.omega
    }

    pub fn omega_len(&self) -> usize {
        self.omega.len()
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid_len(&self) -> usize {
        self.n
    }

    /// Synthesizes `tau = w . gamma(.)` on the grid by scattering its sparse
    /// spectrum and inverse-transforming. `buf` must have length `M^d`; on
    /// return the real parts hold tau.
    pub fn tau_grid(&self, w: &[f64], buf: &mut [Complex64]) {
        debug_assert_eq!(w.len(), self.fm.dim_out());
        debug_assert_eq!(buf.len(), self.n);
        buf.fill(Complex64::default());
        buf[0] = Complex64::new(w[0], 0.0);
        let p = self.fm.p();
        let inv_sqrt2 = 1.0 / std::f64::consts::SQRT_2;
        for j in 0..p {
            let c = Complex64::new(w[1 + j], -w[1 + p + j]) * inv_sqrt2;
            self.add_at(buf, self.feat_bins_pos[j], c);
            self.add_at(buf, self.feat_bins_neg[j], c.conj());
        }
        self.fft.inverse(buf);
    }

    #[inline]
    fn add_at(&self, buf: &mut [Complex64], bin: usize, c: Complex64) {
        buf[bin] += c;
    }

    /// Forward pass of one unit: writes `relu[m] = [tau(x_m)]_+` and the
    /// restricted coefficients `vhat[k] = F_M[relu](k)` for `k in Omega`.
    pub fn unit_forward(
        &self,
        w: &[f64],
        relu: &mut [f64],
        vhat: &mut [Complex64],
        cplx: &mut [Complex64],
    ) {
        debug_assert_eq!(relu.len(), self.n);
        debug_assert_eq!(vhat.len(), self.omega.len());
        self.tau_grid(w, cplx);
        for (r, c) in relu.iter_mut().zip(cplx.iter()) {
            *r = if c.re > 0.0 { c.re } else { 0.0 };
        }
        for (c, &r) in cplx.iter_mut().zip(relu.iter()) {
            *c = Complex64::new(r, 0.0);
        }
        self.fft.forward(cplx);
        for (out, &bin) in vhat.iter_mut().zip(self.omega_bins.iter()) {
            *out = cplx[bin] * self.inv_n;
        }
    }

    /// Zero-fill synthesis of a coefficient vector on Omega:
    /// `out[m] = Re sum_k vals[k] e^{+2 pi i k.m/M}`.
    pub fn synthesize_omega(&self, vals: &[Complex64], out: &mut [f64], cplx: &mut [Complex64]) {
        debug_assert_eq!(vals.len(), self.omega.len());
        cplx.fill(Complex64::default());
        for (&v, &bin) in vals.iter().zip(self.omega_bins.iter()) {
            cplx[bin] += v;
        }
        self.fft.inverse(cplx);
        for (o, c) in out.iter_mut().zip(cplx.iter()) {
            *o = c.re;
        }
    }

    /// Adjoint of the linearized unit map: with mask `g = 1{relu > 0}`,
    /// computes `grad[j] = (1/M^d) sum_m g[m] img[m] gamma_j(x_m)` for every
    /// feature channel j, via one FFT of the masked image.
    pub fn masked_feature_adjoint(
        &self,
        relu: &[f64],
        img: &[f64],
        grad: &mut [f64],
        cplx: &mut [Complex64],
    ) {
        debug_assert_eq!(grad.len(), self.fm.dim_out());
        for ((c, &r), &v) in cplx.iter_mut().zip(relu.iter()).zip(img.iter()) {
            *c = Complex64::new(if r > 0.0 { v } else { 0.0 }, 0.0);
        }
        self.fft.forward(cplx);
        let p = self.fm.p();
        let sqrt2 = std::f64::consts::SQRT_2;
        grad[0] = cplx[0].re * self.inv_n;
        for j in 0..p {
            let c = cplx[self.feat_bins_pos[j]] * self.inv_n;
            grad[1 + j] = sqrt2 * c.re;
            grad[1 + p + j] = -sqrt2 * c.im;
        }
    }

    /// Accumulates `sum_i a_i [tau_i]_+` over the grid for flattened
    /// parameters laid out unit-major as `[a, w[0..D)] * width`.
    pub fn eval_units_grid(&self, flat: &[f64], out: &mut [f64], cplx: &mut [Complex64]) {
        let stride = self.fm.dim_out() + 1;
        debug_assert_eq!(flat.len() % stride, 0);
        out.fill(0.0);
        for unit in flat.chunks_exact(stride) {
            let a = unit[0];
            if a == 0.0 {
                continue;
            }
            self.tau_grid(&unit[1..], cplx);
            for (o, c) in out.iter_mut().zip(cplx.iter()) {
                if c.re > 0.0 {
                    *o += a * c.re;
                }
            }
        }
    }

    /// Coefficients of a single rectified unit on Omega.
    pub fn unit_coeffs(&self, w: &[f64]) -> Measurements {
        let mut relu = vec![0.0; self.n];
        let mut vhat = vec![Complex64::default(); self.omega.len()];
        let mut cplx = vec![Complex64::default(); self.n];
        self.unit_forward(w, &mut relu, &mut vhat, &mut cplx);
        Measurements::new(self.omega.clone(), vhat)
    }
}

/// Fourier coefficients on Omega of a single rectified unit
/// `x -> [w . gamma(x)]_+`.
pub fn unit_coeffs(w: &[f64], fm: &FeatureMap, cfg: &ForwardConfig) -> Result<Measurements> {
    match cfg.backend() {
        Backend::Grid { m } => {
            if m.is_power_of_two() {
                Ok(GridEngine::new(fm, cfg.omega(), m)?.unit_coeffs(w))
            } else {
                let needed = (2 * cfg.omega().radius().max(fm.max_freq()) + 1) as usize;
                if m < needed {
                    return Err(Error::GridTooSmall { m, needed });
                }
                let tp = TrigPoly::new(fm.clone(), w.to_vec());
                let samples = grid_samples(|x| tp.eval(x).max(0.0), m, fm.dim());
                dft_coeffs(&samples, m, cfg.omega())
            }
        }
        Backend::Analytic1d => {
            if fm.dim() != 1 {
                return Err(Error::AnalyticDimension { dim: fm.dim() });
            }
            let tp = TrigPoly::new(fm.clone(), w.to_vec());
            analytic_unit_coeffs(&tp, cfg.omega())
        }
    }
}

/// Coefficients of the whole INR: the linear combination
/// `sum_i a_i F_Omega [w_i . gamma]_+`.
pub fn inr_coeffs(params: &InrParams, cfg: &ForwardConfig) -> Result<Measurements> {
    let mut acc = Measurements::zeros(cfg.omega().clone());
    match cfg.backend() {
        Backend::Grid { m } if m.is_power_of_two() => {
            let engine = GridEngine::new(params.feature_map(), cfg.omega(), m)?;
            let mut relu = vec![0.0; engine.grid_len()];
            let mut vhat = vec![Complex64::default(); engine.omega_len()];
            let mut cplx = vec![Complex64::default(); engine.grid_len()];
            for unit in params.units() {
                if unit.outer == 0.0 {
                    continue;
                }
                engine.unit_forward(&unit.weights, &mut relu, &mut vhat, &mut cplx);
                for (a, &v) in acc.vals_mut().iter_mut().zip(vhat.iter()) {
                    *a += unit.outer * v;
                }
            }
            Ok(acc)
        }
        _ => {
            for unit in params.units() {
                if unit.outer == 0.0 {
                    continue;
                }
                let v = unit_coeffs(&unit.weights, params.feature_map(), cfg)?;
                for (a, &b) in acc.vals_mut().iter_mut().zip(v.vals().iter()) {
                    *a += unit.outer * b;
                }
            }
            Ok(acc)
        }
    }
}

/// Open intervals of `[0, 1)` where a 1-D trigonometric polynomial is
/// positive, endpoints refined by bisection; sampled zeros that do not
/// change sign are flagged rather than treated as crossings.
#[derive(Debug, Clone)]
pub struct PositiveRegion {
    pub intervals: Vec<(f64, f64)>,
    /// Sample points where |tau| < 1e-13 without a sign change nearby.
    pub tangential: Vec<f64>,
}

impl PositiveRegion {
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }
}

const ROOT_SCAN_POINTS: usize = 16_384;

/// Locates the maximal positive intervals of `tau` on `[0, 1)`.
pub fn find_positive_intervals(tp: &TrigPoly) -> Result<PositiveRegion> {
    if tp.feature_map().dim() != 1 {
        return Err(Error::AnalyticDimension {
            dim: tp.feature_map().dim(),
        });
    }
    let n = ROOT_SCAN_POINTS;
    let vals: Vec<f64> = (0..n).map(|i| tp.eval(&[i as f64 / n as f64])).collect();
    let mut crossings: Vec<f64> = Vec::new();
    let mut tangential = Vec::new();
    for i in 0..n {
        let a = vals[i];
        let b = vals[(i + 1) % n];
        let xa = i as f64 / n as f64;
        let xb = (i + 1) as f64 / n as f64;
        let pos_a = a > 0.0;
        let pos_b = b > 0.0;
        if pos_a != pos_b {
            crossings.push(bisect_root(tp, xa, xb)?);
        } else if a.abs() < 1e-13 {
            tangential.push(xa);
        }
    }
    let intervals = if crossings.is_empty() {
        // constant sign: midpoint decides
        if tp.eval(&[0.5]) > 0.0 {
            vec![(0.0, 1.0)]
        } else {
            Vec::new()
        }
    } else {
        crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut intervals = Vec::new();
        let r = crossings.len();
        for j in 0..r {
            let start = crossings[j];
            let end = if j + 1 < r {
                crossings[j + 1]
            } else {
                crossings[0] + 1.0
            };
            let mid = 0.5 * (start + end);
            let mid_wrapped = mid.fract();
            if tp.eval(&[mid_wrapped]) > 0.0 {
                if end <= 1.0 {
                    intervals.push((start, end));
                } else {
                    // wrap-around interval, reported clipped to [0, 1)
                    intervals.push((start, 1.0));
                    intervals.push((0.0, end - 1.0));
                }
            }
        }
        intervals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        intervals
    };
    Ok(PositiveRegion {
        intervals,
        tangential,
    })
}

fn bisect_root(tp: &TrigPoly, mut lo: f64, mut hi: f64) -> Result<f64> {
    let f_lo = tp.eval(&[lo]);
    let f_hi = tp.eval(&[hi]);
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::RootBracketing { near: lo });
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if (tp.eval(&[mid]) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form coefficients of `[tau]_+` on Omega (d = 1): expand
/// `tau(x) e^{-2 pi i k x}` into integer-frequency exponentials and
/// integrate over each positive interval. The zero-frequency term
/// contributes the interval length.
fn analytic_unit_coeffs(tp: &TrigPoly, omega: &FrequencySet) -> Result<Measurements> {
    let region = find_positive_intervals(tp)?;
    let exp = tp.exp_coeffs();
    let k0 = tp.feature_map().max_freq();
    let mut vals = vec![Complex64::default(); omega.len()];
    let two_pi = 2.0 * std::f64::consts::PI;
    for (slot, k) in vals.iter_mut().zip(omega.iter()) {
        let k = k[0];
        let mut acc = Complex64::default();
        for &(alpha, beta) in &region.intervals {
            for n in -k0..=k0 {
                let c = exp.value_at(&[n]).expect("coefficient in box");
                let q = (n - k) as f64;
                let piece = if n == k {
                    Complex64::new(beta - alpha, 0.0)
                } else {
                    let eb = Complex64::new(0.0, two_pi * q * beta).exp();
                    let ea = Complex64::new(0.0, two_pi * q * alpha).exp();
                    (eb - ea) / Complex64::new(0.0, two_pi * q)
                };
                acc += c * piece;
            }
        }
        *slot = acc;
    }
    Ok(Measurements::new(omega.clone(), vals))
}

/// Zero-fill reconstruction: `out[m] = sum_{k in Omega} y[k] e^{+2 pi i k.m/M}`
/// on the `M^d` grid. Rejects non-Hermitian inputs; the imaginary residue of
/// a Hermitian synthesis is roundoff and is discarded.
pub fn zero_fill_synthesis(y: &Measurements, m: usize) -> Result<Vec<f64>> {
    let violation = y.hermitian_violation();
    if !y.is_hermitian(1e-12) {
        return Err(Error::NotHermitian { violation });
    }
    let needed = (2 * y.set().radius() + 1) as usize;
    if m < needed {
        return Err(Error::GridTooSmall { m, needed });
    }
    let dim = y.set().dim();
    let n = m.pow(dim as u32);
    if m.is_power_of_two() {
        let fft = GridFft::new(m, dim);
        let mut buf = vec![Complex64::default(); n];
        for (&v, k) in y.vals().iter().zip(y.set().iter()) {
            buf[grid_bin(k, m)] += v;
        }
        fft.inverse(&mut buf);
        let scale: f64 = 1.0f64.max(y.vals().iter().map(|v| v.norm()).fold(0.0, f64::max));
        let max_imag = buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        debug_assert!(max_imag <= 1e-10 * scale * n as f64);
        Ok(buf.into_iter().map(|c| c.re).collect())
    } else {
        // direct synthesis for odd grid sizes
        let mut out = vec![0.0; n];
        let mut idx = vec![0usize; dim];
        let two_pi = 2.0 * std::f64::consts::PI;
        for slot in out.iter_mut() {
            let mut acc = Complex64::default();
            for (&v, k) in y.vals().iter().zip(y.set().iter()) {
                let phase: f64 = k
                    .iter()
                    .zip(idx.iter())
                    .map(|(&ki, &mi)| ki as f64 * mi as f64)
                    .sum::<f64>()
                    * (two_pi / m as f64);
                acc += v * Complex64::new(phase.cos(), phase.sin());
            }
            *slot = acc.re;
            for axis in (0..dim).rev() {
                idx[axis] += 1;
                if idx[axis] < m {
                    break;
                }
                idx[axis] = 0;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Unit;
    use crate::rng::Rng;
    use crate::spectral::grid_samples;

    fn e0(d_out: usize) -> Vec<f64> {
        let mut w = vec![0.0; d_out];
        w[0] = 1.0;
        w
    }

    #[test]
    fn constant_unit_has_dc_only() {
        let fm = FeatureMap::new(2, 1);
        let cfg = ForwardConfig::grid(4, 1, 256);
        let meas = unit_coeffs(&e0(fm.dim_out()), &fm, &cfg).unwrap();
        for (k, v) in meas.set().iter().zip(meas.vals().iter()) {
            if k[0] == 0 {
                assert!((v.re - 1.0).abs() < 1e-13 && v.im.abs() < 1e-14);
            } else {
                assert!(v.norm() < 1e-13);
            }
        }
        // negated constant: everything clips to zero
        let neg: Vec<f64> = e0(fm.dim_out()).iter().map(|v| -v).collect();
        let meas = unit_coeffs(&neg, &fm, &cfg).unwrap();
        assert!(meas.norm() < 1e-14);
    }

    /// Half-wave rectified cosine: tau = cos(2 pi x) via w1_1 = 1/sqrt(2).
    /// Classical series: c0 = 1/pi, c+-1 = 1/4, c+-2 = 1/(3 pi),
    /// c+-4 = -1/(15 pi), c+-6 = 1/(35 pi), odd k >= 3 vanish.
    fn half_wave_expected(k: i64) -> f64 {
        use std::f64::consts::PI;
        match k.abs() {
            0 => 1.0 / PI,
            1 => 0.25,
            2 => 1.0 / (3.0 * PI),
            4 => -1.0 / (15.0 * PI),
            6 => 1.0 / (35.0 * PI),
            _ => 0.0,
        }
    }

    fn cos_unit_weights(fm: &FeatureMap) -> Vec<f64> {
        let mut w = vec![0.0; fm.dim_out()];
        w[1] = 1.0 / std::f64::consts::SQRT_2; // k = 1 cosine channel
        w
    }

    #[test]
    fn half_wave_cosine_analytic() {
        let fm = FeatureMap::new(2, 1);
        let cfg = ForwardConfig::analytic(6);
        let meas = unit_coeffs(&cos_unit_weights(&fm), &fm, &cfg).unwrap();
        for (k, v) in meas.set().iter().zip(meas.vals().iter()) {
            assert!(
                (v.re - half_wave_expected(k[0])).abs() < 1e-12,
                "k = {}: got {}, want {}",
                k[0],
                v.re,
                half_wave_expected(k[0])
            );
            assert!(v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn half_wave_cosine_high_resolution_grid() {
        let fm = FeatureMap::new(2, 1);
        let cfg = ForwardConfig::grid(6, 1, 1 << 20);
        let meas = unit_coeffs(&cos_unit_weights(&fm), &fm, &cfg).unwrap();
        for (k, v) in meas.set().iter().zip(meas.vals().iter()) {
            assert!((v.re - half_wave_expected(k[0])).abs() < 1e-10);
            assert!(v.im.abs() < 1e-10);
        }
    }

    #[test]
    fn backends_agree_and_converge_second_order() {
        let fm = FeatureMap::new(2, 1);
        let mut rng = Rng::new(41);
        let analytic_cfg = ForwardConfig::analytic(6);
        let err_at = |m: usize, w: &[f64]| {
            let grid_cfg = ForwardConfig::grid(6, 1, m);
            let a = unit_coeffs(w, &fm, &analytic_cfg).unwrap();
            let g = unit_coeffs(w, &fm, &grid_cfg).unwrap();
            a.vals()
                .iter()
                .zip(g.vals().iter())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
        };
        let mut total_coarse = 0.0;
        let mut total_fine = 0.0;
        for _ in 0..10 {
            let w = rng.unit_vector(fm.dim_out());
            total_coarse += err_at(1 << 12, &w);
            total_fine += err_at(1 << 13, &w);
            assert!(err_at(1 << 14, &w).sqrt() < 1e-6);
        }
        let ratio = total_coarse.sqrt() / total_fine.sqrt();
        assert!(ratio >= 3.0, "convergence ratio {ratio} below second order");
    }

    #[test]
    fn inr_coeffs_is_linear_and_matches_whole_function_dft() {
        let fm = FeatureMap::new(2, 1);
        let mut rng = Rng::new(42);
        let units: Vec<Unit> = (0..3)
            .map(|_| Unit::new(rng.normal(), rng.unit_vector(fm.dim_out())))
            .collect();
        let params = InrParams::new(fm.clone(), units);
        let cfg = ForwardConfig::grid(5, 1, 512);
        let combined = inr_coeffs(&params, &cfg).unwrap();
        // linearity: equals the weighted sum of per-unit coefficients
        let mut manual = vec![Complex64::default(); combined.vals().len()];
        for u in params.units() {
            let v = unit_coeffs(&u.weights, &fm, &cfg).unwrap();
            for (m, &c) in manual.iter_mut().zip(v.vals().iter()) {
                *m += u.outer * c;
            }
        }
        for (a, b) in combined.vals().iter().zip(manual.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        // and equals the DFT of the sampled function
        let samples = grid_samples(|x| params.eval(x), 512, 1);
        let direct = dft_coeffs(&samples, 512, cfg.omega()).unwrap();
        for (a, b) in combined.vals().iter().zip(direct.vals().iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn cancelling_units_give_zero() {
        let fm = FeatureMap::new(2, 1);
        let mut rng = Rng::new(43);
        let w = rng.unit_vector(fm.dim_out());
        let params = InrParams::new(fm, vec![Unit::new(1.3, w.clone()), Unit::new(-1.3, w)]);
        let cfg = ForwardConfig::grid(4, 1, 256);
        let meas = inr_coeffs(&params, &cfg).unwrap();
        assert!(meas.norm() < 1e-13);
        // all-zero outer weights too
        let zero = InrParams::zeros(FeatureMap::new(2, 1), 4);
        let meas = inr_coeffs(&zero, &cfg).unwrap();
        assert_eq!(meas.norm(), 0.0);
    }

    #[test]
    fn forward_outputs_are_hermitian() {
        let fm = FeatureMap::new(2, 1);
        let mut rng = Rng::new(44);
        for cfg in [ForwardConfig::grid(6, 1, 512), ForwardConfig::analytic(6)] {
            let w = rng.unit_vector(fm.dim_out());
            let meas = unit_coeffs(&w, &fm, &cfg).unwrap();
            assert!(meas.is_hermitian(1e-10));
        }
        let fm2 = FeatureMap::new(1, 2);
        let cfg = ForwardConfig::grid(3, 2, 64);
        let w = rng.unit_vector(fm2.dim_out());
        let meas = unit_coeffs(&w, &fm2, &cfg).unwrap();
        assert!(meas.is_hermitian(1e-10));
    }

    #[test]
    fn positive_intervals_examples() {
        let fm = FeatureMap::new(2, 1);
        // tau = 1
        let region = find_positive_intervals(&TrigPoly::new(fm.clone(), e0(fm.dim_out()))).unwrap();
        assert_eq!(region.intervals, vec![(0.0, 1.0)]);
        // tau = cos(2 pi x): positive on [0, 1/4) and (3/4, 1)
        let region =
            find_positive_intervals(&TrigPoly::new(fm.clone(), cos_unit_weights(&fm))).unwrap();
        assert_eq!(region.intervals.len(), 2);
        let (a, b) = region.intervals[0];
        let (c, d) = region.intervals[1];
        assert!(a.abs() < 1e-12 && (b - 0.25).abs() < 1e-12);
        assert!((c - 0.75).abs() < 1e-12 && (d - 1.0).abs() < 1e-12);
        // tau = -1: nothing
        let neg: Vec<f64> = e0(fm.dim_out()).iter().map(|v| -v).collect();
        let region = find_positive_intervals(&TrigPoly::new(fm, neg)).unwrap();
        assert!(region.intervals.is_empty());
    }

    #[test]
    fn positive_measure_matches_grid_indicator() {
        let fm = FeatureMap::new(2, 1);
        let mut rng = Rng::new(45);
        for _ in 0..10 {
            let w = rng.unit_vector(fm.dim_out());
            let tp = TrigPoly::new(fm.clone(), w);
            let region = find_positive_intervals(&tp).unwrap();
            let m = 1 << 23;
            let count = (0..m)
                .filter(|&i| tp.eval(&[i as f64 / m as f64]) > 0.0)
                .count();
            let grid_measure = count as f64 / m as f64;
            assert!((region.measure() - grid_measure).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_fill_reproduces_bandlimited_input() {
        // DC-only spectrum: constant image
        let set = FrequencySet::full_box(2, 1);
        let mut y = Measurements::zeros(set.clone());
        let dc = set.index_of(&[0]).unwrap();
        y.vals_mut()[dc] = Complex64::new(1.0, 0.0);
        let img = zero_fill_synthesis(&y, 16).unwrap();
        for v in img {
            assert!((v - 1.0).abs() < 1e-13);
        }
        // bandlimited trig poly reproduced exactly at the Nyquist-satisfying grid
        let fm = FeatureMap::new(2, 1);
        let mut rng = Rng::new(46);
        let w: Vec<f64> = (0..fm.dim_out()).map(|_| rng.normal()).collect();
        let tp = TrigPoly::new(fm, w);
        let samples = grid_samples(|x| tp.eval(x), 64, 1);
        let y = dft_coeffs(&samples, 64, &set).unwrap();
        let img = zero_fill_synthesis(&y, 64).unwrap();
        for (i, v) in img.iter().enumerate() {
            assert!((v - tp.eval(&[i as f64 / 64.0])).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_fill_on_rectified_unit_shows_truncation_error() {
        let fm = FeatureMap::new(2, 1);
        let mut rng = Rng::new(47);
        let w = rng.unit_vector(fm.dim_out());
        let cfg = ForwardConfig::grid(6, 1, 4096);
        let y = unit_coeffs(&w, &fm, &cfg).unwrap();
        let m = 256;
        let img = zero_fill_synthesis(&y, m).unwrap();
        let tp = TrigPoly::new(fm, w);
        let mse: f64 = img
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let truth = tp.eval(&[i as f64 / m as f64]).max(0.0);
                (v - truth).powi(2)
            })
            .sum::<f64>()
            / m as f64;
        assert!(mse > 1e-9, "rectified unit is not bandlimited; mse = {mse}");
    }

    #[test]
    fn zero_fill_rejects_non_hermitian() {
        let set = FrequencySet::full_box(1, 1);
        let mut y = Measurements::zeros(set.clone());
        let idx = set.index_of(&[1]).unwrap();
        y.vals_mut()[idx] = Complex64::new(0.3, 0.7); // no conjugate partner
        assert!(matches!(
            zero_fill_synthesis(&y, 16),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn grid_engine_rejects_small_or_odd_sizes() {
        let fm = FeatureMap::new(2, 1);
        let omega = FrequencySet::full_box(6, 1);
        assert!(matches!(
            GridEngine::new(&fm, &omega, 8),
            Err(Error::GridTooSmall { .. })
        ));
        assert!(matches!(
            GridEngine::new(&fm, &omega, 48),
            Err(Error::GridNotPowerOfTwo { .. })
        ));
    }

    #[test]
    fn teacher_measurements_reproducible_by_identical_student() {
        // same-operator principle: identical parameters, identical coefficients
        let fm = FeatureMap::new(2, 1);
        let eta = |w: &[f64]| w.iter().map(|v| v * v).sum::<f64>().sqrt();
        let teacher = crate::model::random_teacher(3, &fm, 11, eta).unwrap();
        let cfg = ForwardConfig::grid(6, 1, 512);
        let a = inr_coeffs(&teacher, &cfg).unwrap();
        let b = inr_coeffs(&teacher.clone(), &cfg).unwrap();
        for (x, y) in a.vals().iter().zip(b.vals().iter()) {
            assert_eq!(x, y);
        }
    }
}
