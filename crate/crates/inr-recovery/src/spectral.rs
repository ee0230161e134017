//! Integer frequency sets, the Fourier-features map, trigonometric
//! polynomials, and DFT-based coefficient extraction on uniform grids.
//!
//! Frequency sets come in two kinds: the full box `{k : ||k||_inf <= K}` used
//! to index measurement vectors, and the half-space representatives used by
//! the Fourier-features layer (one of each +/- pair of nonzero tuples).
//! Both are ordered lexicographically so every vector indexed by a set has a
//! reproducible layout.

use num_complex::Complex64;
use std::io::{BufRead, Write};

use crate::fft::GridFft;
use crate::{Error, Result};

/// Which tuples of the box a set contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    /// All tuples with `||k||_inf <= radius`, zero included.
    FullBox,
    /// One representative per +/- pair of nonzero tuples; canonical sign is
    /// "first nonzero coordinate positive".
    HalfSpace,
}

/// An ordered set of integer frequency d-tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencySet {
    dim: usize,
    radius: i64,
    kind: SetKind,
    // flattened tuples, dim entries each, lexicographic order
    freqs: Vec<i64>,
}

impl FrequencySet {
    /// The box `{k in Z^d : ||k||_inf <= radius}` in lexicographic order.
    pub fn full_box(radius: i64, dim: usize) -> Self {
        assert!(radius >= 0, "box radius must be nonnegative");
        assert!(dim >= 1, "dimension must be positive");
        let side = (2 * radius + 1) as usize;
        let count = side.pow(dim as u32);
        let mut freqs = Vec::with_capacity(count * dim);
        let mut tuple = vec![-radius; dim];
        loop {
            freqs.extend_from_slice(&tuple);
            // lexicographic increment, last coordinate fastest
            let mut axis = dim;
            loop {
                if axis == 0 {
                    debug_assert_eq!(freqs.len(), count * dim);
                    return FrequencySet {
                        dim,
                        radius,
                        kind: SetKind::FullBox,
                        freqs,
                    };
                }
                axis -= 1;
                if tuple[axis] < radius {
                    tuple[axis] += 1;
                    for t in tuple.iter_mut().skip(axis + 1) {
                        *t = -radius;
                    }
                    break;
                }
            }
        }
    }

    /// Half-space representatives of the nonzero tuples of `full_box`,
    /// canonical sign first-nonzero-positive, in the order the full box
    /// enumerates them.
    pub fn half_space(radius: i64, dim: usize) -> Self {
        let full = Self::full_box(radius, dim);
        let mut freqs = Vec::with_capacity(full.freqs.len() / 2);
        for k in full.iter() {
            let lead = k.iter().copied().find(|&c| c != 0);
            if lead.map_or(false, |c| c > 0) {
                freqs.extend_from_slice(k);
            }
        }
        FrequencySet {
            dim,
            radius,
            kind: SetKind::HalfSpace,
            freqs,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Maximum infinity norm over the set (the box radius).
    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.freqs.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn freq(&self, i: usize) -> &[i64] {
        &self.freqs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.freqs.chunks_exact(self.dim)
    }

    /// The dilation `n * box(K) = box(nK)`; full-box sets only.
    pub fn dilate(&self, n: i64) -> Self {
        assert_eq!(self.kind, SetKind::FullBox, "dilation acts on full boxes");
        assert!(n >= 1);
        Self::full_box(self.radius * n, self.dim)
    }

    /// Position of tuple `k` in this set's order, if present.
    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim || k.iter().any(|c| c.abs() > self.radius) {
            return None;
        }
        match self.kind {
            SetKind::FullBox => {
                // closed form: mixed-radix digits (k_i + radius)
                let side = (2 * self.radius + 1) as usize;
                let mut idx = 0usize;
                for &c in k {
                    idx = idx * side + (c + self.radius) as usize;
                }
                Some(idx)
            }
            SetKind::HalfSpace => self.iter().position(|f| f == k),
        }
    }
}

/// The Fourier-features layer: `x -> [1, sqrt(2) cos(2 pi k_j.x) ...,
/// sqrt(2) sin(2 pi k_j.x) ...]` over the half-space representatives of the
/// box of radius `K0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    freqs: FrequencySet,
}

impl FeatureMap {
    pub fn new(k0: i64, dim: usize) -> Self {
        FeatureMap {
            freqs: FrequencySet::half_space(k0, dim),
        }
    }

    /// Spatial dimension d.
    pub fn dim(&self) -> usize {
        self.freqs.dim()
    }

    /// Maximum feature frequency K0.
    pub fn max_freq(&self) -> i64 {
        self.freqs.radius()
    }

    /// Number of frequency vectors p.
    pub fn p(&self) -> usize {
        self.freqs.len()
    }

    /// Output dimension D = 2p + 1.
    pub fn dim_out(&self) -> usize {
        2 * self.p() + 1
    }

    pub fn freqs(&self) -> &FrequencySet {
        &self.freqs
    }

    /// Evaluates gamma(x) into `out` (length D). Layout: constant channel,
    /// then the cos block, then the sin block, both in frequency order.
    /// Periodic in every coordinate, so x may lie outside the unit cell.
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        let p = self.p();
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim_out());
        out[0] = 1.0;
        let sqrt2 = std::f64::consts::SQRT_2;
        for (j, k) in self.freqs.iter().enumerate() {
            let phase: f64 = k
                .iter()
                .zip(x.iter())
                .map(|(&ki, &xi)| ki as f64 * xi)
                .sum::<f64>()
                * (2.0 * std::f64::consts::PI);
            out[1 + j] = sqrt2 * phase.cos();
            out[1 + p + j] = sqrt2 * phase.sin();
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim_out()];
        self.eval_into(x, &mut out);
        out
    }
}

/// A real trigonometric polynomial `tau = w . gamma(.)` given by its weight
/// vector in feature coordinates `(w0, w1 in R^p, w2 in R^p)`.
#[derive(Debug, Clone)]
pub struct TrigPoly {
    fm: FeatureMap,
    weights: Vec<f64>,
}

impl TrigPoly {
    pub fn new(fm: FeatureMap, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), fm.dim_out());
        TrigPoly { fm, weights }
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.fm
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Closed-form evaluation
    /// `w0 + sqrt(2) sum_j (w1_j cos(2 pi k_j.x) + w2_j sin(2 pi k_j.x))`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let p = self.fm.p();
        let mut acc = self.weights[0];
        let sqrt2 = std::f64::consts::SQRT_2;
        for (j, k) in self.fm.freqs().iter().enumerate() {
            let phase: f64 = k
                .iter()
                .zip(x.iter())
                .map(|(&ki, &xi)| ki as f64 * xi)
                .sum::<f64>()
                * (2.0 * std::f64::consts::PI);
            acc +=
                sqrt2 * (self.weights[1 + j] * phase.cos() + self.weights[1 + p + j] * phase.sin());
        }
        acc
    }

    /// Exponential coefficients on the full box of radius K0:
    /// `c[0] = w0`, `c[k_j] = (w1_j - i w2_j)/sqrt(2)`, `c[-k_j] = conj`.
    pub fn exp_coeffs(&self) -> Measurements {
        let box_set = FrequencySet::full_box(self.fm.max_freq(), self.fm.dim());
        let mut vals = vec![Complex64::default(); box_set.len()];
        let p = self.fm.p();
        let zero_idx = box_set
            .index_of(&vec![0; self.fm.dim()])
            .expect("zero tuple in box");
        vals[zero_idx] = Complex64::new(self.weights[0], 0.0);
        let inv_sqrt2 = 1.0 / std::f64::consts::SQRT_2;
        for (j, k) in self.fm.freqs().iter().enumerate() {
            let c = Complex64::new(self.weights[1 + j], -self.weights[1 + p + j]) * inv_sqrt2;
            let pos = box_set.index_of(k).expect("feature freq in box");
            let neg_tuple: Vec<i64> = k.iter().map(|&c| -c).collect();
            let neg = box_set.index_of(&neg_tuple).expect("mirror freq in box");
            vals[pos] = c;
            vals[neg] = c.conj();
        }
        Measurements::new(box_set, vals)
    }
}

/// A complex coefficient vector indexed by a full-box frequency set.
#[derive(Debug, Clone)]
pub struct Measurements {
    set: FrequencySet,
    vals: Vec<Complex64>,
}

impl Measurements {
    pub fn new(set: FrequencySet, vals: Vec<Complex64>) -> Self {
        assert_eq!(
            set.kind(),
            SetKind::FullBox,
            "measurements index a full box"
        );
        assert_eq!(vals.len(), set.len());
        Measurements { set, vals }
    }

    pub fn zeros(set: FrequencySet) -> Self {
        let n = set.len();
        Self::new(set, vec![Complex64::default(); n])
    }

    pub fn set(&self) -> &FrequencySet {
        &self.set
    }

    pub fn vals(&self) -> &[Complex64] {
        &self.vals
    }

    pub fn vals_mut(&mut self) -> &mut [Complex64] {
        &mut self.vals
    }

    pub fn value_at(&self, k: &[i64]) -> Option<Complex64> {
        self.set.index_of(k).map(|i| self.vals[i])
    }

    /// l2 norm summing squared moduli over every tuple in the set.
    pub fn norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation from Hermitian symmetry `v[-k] = conj(v[k])`.
    pub fn hermitian_violation(&self) -> f64 {
        let dim = self.set.dim();
        let mut worst = 0.0f64;
        let mut neg = vec![0i64; dim];
        for (i, k) in self.set.iter().enumerate() {
            for (n, &c) in neg.iter_mut().zip(k.iter()) {
                *n = -c;
            }
            let j = self.set.index_of(&neg).expect("box is sign-symmetric");
            let dev = (self.vals[j] - self.vals[i].conj()).norm();
            worst = worst.max(dev);
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_violation() <= tol * self.scale()
    }

    fn scale(&self) -> f64 {
        1.0f64.max(self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max))
    }

    /// CSV columns `k1..kd, re, im`, rows in set order, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for d in 0..self.set.dim() {
            write!(out, "k{},", d + 1)?;
        }
        writeln!(out, "re,im")?;
        for (k, v) in self.set.iter().zip(self.vals.iter()) {
            for c in k {
                write!(out, "{c},")?;
            }
            writeln!(out, "{:.17e},{:.17e}", v.re, v.im)?;
        }
        Ok(())
    }

    /// Reads a CSV produced by `write_csv`; the frequency tuples must match
    /// `set` in order.
    pub fn read_csv<R: BufRead>(set: FrequencySet, input: R) -> Result<Self> {
        let mut vals = Vec::with_capacity(set.len());
        let dim = set.dim();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            if lineno == 0 || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != dim + 2 {
                return Err(Error::Parse(format!(
                    "line {}: expected {} fields, found {}",
                    lineno + 1,
                    dim + 2,
                    fields.len()
                )));
            }
            let idx = vals.len();
            if idx >= set.len() {
                return Err(Error::Parse("more rows than set entries".into()));
            }
            for (c, field) in set.freq(idx).iter().zip(fields.iter()) {
                let parsed: i64 = field
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad frequency", lineno + 1)))?;
                if parsed != *c {
                    return Err(Error::Parse(format!(
                        "line {}: frequency {} does not match set order ({})",
                        lineno + 1,
                        parsed,
                        c
                    )));
                }
            }
            let re: f64 = fields[dim]
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad re", lineno + 1)))?;
            let im: f64 = fields[dim + 1]
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad im", lineno + 1)))?;
            vals.push(Complex64::new(re, im));
        }
        if vals.len() != set.len() {
            return Err(Error::Parse(format!(
                "expected {} rows, found {}",
                set.len(),
                vals.len()
            )));
        }
        Ok(Self::new(set, vals))
    }
}

/// Samples `f` at the left-endpoint grid `m/M` for all multi-indices
/// `m in {0..M-1}^d`, row-major with axis 0 slowest.
pub fn grid_samples<F: Fn(&[f64]) -> f64>(f: F, m: usize, dim: usize) -> Vec<f64> {
    assert!(m >= 1);
    assert!(dim >= 1);
    let n = m.pow(dim as u32);
    let mut out = Vec::with_capacity(n);
    let mut x = vec![0.0f64; dim];
    let mut idx = vec![0usize; dim];
    let inv_m = 1.0 / m as f64;
    for _ in 0..n {
        for (xi, &mi) in x.iter_mut().zip(idx.iter()) {
            *xi = mi as f64 * inv_m;
        }
        out.push(f(&x));
        // odometer increment, last axis fastest
        for axis in (0..dim).rev() {
            idx[axis] += 1;
            if idx[axis] < m {
                break;
            }
            idx[axis] = 0;
        }
    }
    out
}

/// Flat grid bin for frequency tuple `k` (negative frequencies wrap).
pub(crate) fn grid_bin(k: &[i64], m: usize) -> usize {
    let mm = m as i64;
    let mut idx = 0usize;
    for &c in k {
        let wrapped = c.rem_euclid(mm) as usize;
        idx = idx * m + wrapped;
    }
    idx
}

/// Fourier coefficients of a real sample grid on the target set:
/// `fhat[k] = (1/M^d) sum_m f[m] e^{-2 pi i k.m/M}`.
///
/// Uses the radix-2 FFT when M is a power of two and direct summation
/// otherwise; exact (to roundoff) for trigonometric polynomials with
/// degree below M/2.
pub fn dft_coeffs(samples: &[f64], m: usize, target: &FrequencySet) -> Result<Measurements> {
    let dim = target.dim();
    let n = m.pow(dim as u32);
    if samples.len() != n {
        return Err(Error::Parse(format!(
            "sample grid has {} entries, expected {}^{} = {}",
            samples.len(),
            m,
            dim,
            n
        )));
    }
    if (m as i64) <= 2 * target.radius() {
        return Err(Error::GridTooSmall {
            m,
            needed: (2 * target.radius() + 1) as usize,
        });
    }
    if m.is_power_of_two() {
        Ok(dft_coeffs_fft(samples, m, target))
    } else {
        Ok(dft_coeffs_direct(samples, m, target))
    }
}

pub(crate) fn dft_coeffs_fft(samples: &[f64], m: usize, target: &FrequencySet) -> Measurements {
    let dim = target.dim();
    let fft = GridFft::new(m, dim);
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.forward(&mut buf);
    let inv_n = 1.0 / buf.len() as f64;
    let vals = target.iter().map(|k| buf[grid_bin(k, m)] * inv_n).collect();
    Measurements::new(target.clone(), vals)
}

pub(crate) fn dft_coeffs_direct(samples: &[f64], m: usize, target: &FrequencySet) -> Measurements {
    let dim = target.dim();
    let inv_m = 1.0 / m as f64;
    let n = samples.len();
    let mut vals = Vec::with_capacity(target.len());
    let mut idx = vec![0usize; dim];
    for k in target.iter() {
        let mut acc = Complex64::default();
        idx.iter_mut().for_each(|i| *i = 0);
        for &s in samples.iter().take(n) {
            let phase: f64 = k
                .iter()
                .zip(idx.iter())
                .map(|(&ki, &mi)| ki as f64 * mi as f64)
                .sum::<f64>()
                * (-2.0 * std::f64::consts::PI * inv_m);
            acc += s * Complex64::new(phase.cos(), phase.sin());
            for axis in (0..dim).rev() {
                idx[axis] += 1;
                if idx[axis] < m {
                    break;
                }
                idx[axis] = 0;
            }
        }
        vals.push(acc / n as f64);
    }
    Measurements::new(target.clone(), vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn full_box_examples() {
        let s = FrequencySet::full_box(2, 1);
        assert_eq!(s.len(), 5);
        let listed: Vec<i64> = s.iter().map(|k| k[0]).collect();
        assert_eq!(listed, vec![-2, -1, 0, 1, 2]);

        let s = FrequencySet::full_box(0, 3);
        assert_eq!(s.len(), 1);
        assert_eq!(s.freq(0), &[0, 0, 0]);

        let s = FrequencySet::full_box(2, 2);
        assert_eq!(s.len(), 25);
    }

    #[test]
    fn half_space_counts_and_signs() {
        let s = FrequencySet::half_space(2, 1);
        let listed: Vec<i64> = s.iter().map(|k| k[0]).collect();
        assert_eq!(listed, vec![1, 2]);

        let s = FrequencySet::half_space(1, 2);
        assert_eq!(s.len(), 4);
        for k in s.iter() {
            let lead = k.iter().copied().find(|&c| c != 0).unwrap();
            assert!(lead > 0);
        }
        // ((2K+1)^d - 1)/2 of them
        let s = FrequencySet::half_space(2, 2);
        assert_eq!(s.len(), 12);
    }

    #[test]
    fn dilation_law() {
        let base = FrequencySet::full_box(2, 2);
        let dilated = base.dilate(3);
        assert_eq!(dilated, FrequencySet::full_box(6, 2));
        // containment of the smaller box
        for k in base.iter() {
            assert!(dilated.index_of(k).is_some());
        }
    }

    #[test]
    fn index_of_round_trip() {
        let s = FrequencySet::full_box(3, 2);
        for (i, k) in s.iter().enumerate() {
            assert_eq!(s.index_of(k), Some(i));
        }
        assert_eq!(s.index_of(&[4, 0]), None);
    }

    #[test]
    fn feature_map_examples() {
        let fm = FeatureMap::new(2, 1);
        assert_eq!(fm.p(), 2);
        assert_eq!(fm.dim_out(), 5);
        let listed: Vec<i64> = fm.freqs().iter().map(|k| k[0]).collect();
        assert_eq!(listed, vec![1, 2]);

        let fm = FeatureMap::new(0, 1);
        assert_eq!(fm.p(), 0);
        assert_eq!(fm.dim_out(), 1);

        let fm = FeatureMap::new(1, 2);
        assert_eq!(fm.p(), 4);
        assert_eq!(fm.dim_out(), 9);
    }

    #[test]
    fn gamma_at_special_points() {
        let fm = FeatureMap::new(2, 1);
        let g = fm.eval(&[0.0]);
        let s2 = std::f64::consts::SQRT_2;
        let expect = [1.0, s2, s2, 0.0, 0.0];
        for (a, b) in g.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-15);
        }

        let fm = FeatureMap::new(1, 1);
        let g = fm.eval(&[0.25]);
        assert!((g[0] - 1.0).abs() < 1e-15);
        assert!(g[1].abs() < 1e-15);
        assert!((g[2] - s2).abs() < 1e-15);
    }

    #[test]
    fn gamma_norm_is_sqrt_d() {
        let mut rng = Rng::new(21);
        for &(k0, d) in &[(2i64, 1usize), (1, 2), (3, 1), (2, 2)] {
            let fm = FeatureMap::new(k0, d);
            for _ in 0..100 {
                let x: Vec<f64> = (0..d).map(|_| rng.uniform_in(-1.0, 2.0)).collect();
                let g = fm.eval(&x);
                let norm_sq: f64 = g.iter().map(|v| v * v).sum();
                assert!((norm_sq - fm.dim_out() as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gamma_is_periodic() {
        let fm = FeatureMap::new(2, 2);
        let mut rng = Rng::new(22);
        for _ in 0..20 {
            let x: Vec<f64> = (0..2).map(|_| rng.uniform()).collect();
            let shifted: Vec<f64> = x.iter().map(|&v| v + 3.0).collect();
            let a = fm.eval(&x);
            let b = fm.eval(&shifted);
            for (u, v) in a.iter().zip(b.iter()) {
                assert!((u - v).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn trig_poly_matches_feature_dot_product() {
        let mut rng = Rng::new(23);
        let fm = FeatureMap::new(2, 1);
        let weights: Vec<f64> = (0..fm.dim_out()).map(|_| rng.normal()).collect();
        let tp = TrigPoly::new(fm.clone(), weights.clone());
        for _ in 0..50 {
            let x = [rng.uniform()];
            let gamma = fm.eval(&x);
            let dot: f64 = weights.iter().zip(gamma.iter()).map(|(w, g)| w * g).sum();
            assert!((tp.eval(&x) - dot).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_samples_examples() {
        let ones = grid_samples(|_| 1.0, 4, 1);
        assert_eq!(ones, vec![1.0; 4]);

        let cosine = grid_samples(|x| (2.0 * std::f64::consts::PI * x[0]).cos(), 4, 1);
        let expect = [1.0, 0.0, -1.0, 0.0];
        for (a, b) in cosine.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn grid_samples_match_direct_eval() {
        let mut rng = Rng::new(24);
        let fm = FeatureMap::new(2, 1);
        let weights: Vec<f64> = (0..fm.dim_out()).map(|_| rng.normal()).collect();
        let tp = TrigPoly::new(fm, weights);
        let m = 8;
        let grid = grid_samples(|x| tp.eval(x), m, 1);
        for (i, &v) in grid.iter().enumerate() {
            let direct = tp.eval(&[i as f64 / m as f64]);
            assert!((v - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn dft_of_constant_is_dc_only() {
        let target = FrequencySet::full_box(3, 1);
        let samples = grid_samples(|_| 1.0, 16, 1);
        let meas = dft_coeffs(&samples, 16, &target).unwrap();
        for (k, v) in meas.set().iter().zip(meas.vals().iter()) {
            if k[0] == 0 {
                assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
            } else {
                assert!(v.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn dft_of_sqrt2_cosine() {
        let target = FrequencySet::full_box(2, 1);
        let s2 = std::f64::consts::SQRT_2;
        let samples = grid_samples(|x| s2 * (2.0 * std::f64::consts::PI * x[0]).cos(), 16, 1);
        let meas = dft_coeffs(&samples, 16, &target).unwrap();
        for (k, v) in meas.set().iter().zip(meas.vals().iter()) {
            if k[0].abs() == 1 {
                assert!((v.re - s2 / 2.0).abs() < 1e-14 && v.im.abs() < 1e-14);
            } else {
                assert!(v.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn dft_recovers_trig_poly_coefficients() {
        // analytic map: c0 = w0, c[k_j] = (w1_j - i w2_j)/sqrt(2)
        let mut rng = Rng::new(25);
        for _ in 0..10 {
            let fm = FeatureMap::new(2, 1);
            let weights: Vec<f64> = (0..fm.dim_out()).map(|_| rng.normal()).collect();
            let tp = TrigPoly::new(fm, weights);
            let samples = grid_samples(|x| tp.eval(x), 16, 1);
            let target = FrequencySet::full_box(2, 1);
            let meas = dft_coeffs(&samples, 16, &target).unwrap();
            let expect = tp.exp_coeffs();
            for (a, b) in meas.vals().iter().zip(expect.vals().iter()) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn fft_and_direct_paths_agree() {
        let mut rng = Rng::new(26);
        // d = 1, power-of-two vs odd M on the same function
        let fm = FeatureMap::new(2, 1);
        let weights: Vec<f64> = (0..fm.dim_out()).map(|_| rng.normal()).collect();
        let tp = TrigPoly::new(fm, weights);
        let target = FrequencySet::full_box(2, 1);
        let m = 16;
        let samples = grid_samples(|x| tp.eval(x), m, 1);
        let via_fft = dft_coeffs_fft(&samples, m, &target);
        let via_direct = dft_coeffs_direct(&samples, m, &target);
        for (a, b) in via_fft.vals().iter().zip(via_direct.vals().iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        // odd M exercises the public direct path and stays exact
        let m = 15;
        let samples = grid_samples(|x| tp.eval(x), m, 1);
        let meas = dft_coeffs(&samples, m, &target).unwrap();
        for (a, b) in meas.vals().iter().zip(tp.exp_coeffs().vals().iter()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn dft_output_is_hermitian_for_real_input() {
        let mut rng = Rng::new(27);
        for &m in &[16usize, 12] {
            let samples: Vec<f64> = (0..m * m).map(|_| rng.normal()).collect();
            let target = FrequencySet::full_box(3, 2);
            let meas = dft_coeffs(&samples, m, &target).unwrap();
            assert!(meas.hermitian_violation() < 1e-12 * meas.scale());
        }
    }

    #[test]
    fn dft_rejects_small_grids() {
        let target = FrequencySet::full_box(4, 1);
        let samples = vec![0.0; 8];
        assert!(matches!(
            dft_coeffs(&samples, 8, &target),
            Err(Error::GridTooSmall { .. })
        ));
    }

    #[test]
    fn measurements_csv_round_trip() {
        let mut rng = Rng::new(28);
        let set = FrequencySet::full_box(2, 2);
        let vals: Vec<Complex64> = (0..set.len())
            .map(|_| Complex64::new(rng.normal(), rng.normal()))
            .collect();
        let meas = Measurements::new(set.clone(), vals);
        let mut buf = Vec::new();
        meas.write_csv(&mut buf).unwrap();
        let back = Measurements::read_csv(set, buf.as_slice()).unwrap();
        for (a, b) in meas.vals().iter().zip(back.vals().iter()) {
            assert_eq!(a, b);
        }
    }
}
