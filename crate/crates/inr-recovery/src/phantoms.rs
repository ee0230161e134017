//! Continuous-domain test images with exactly known Fourier coefficients:
//! teacher-network phantoms, a dot phantom assembled from INR-realizable
//! bumps, an analytic piecewise-constant disc phantom, image metrics, and
//! image writers.
//!
//! The disc phantom's coefficients come from the closed form
//! `fhat[k] = a e^{-2 pi i k.c} r J1(2 pi ||k|| r) / ||k||` with the order-1
//! Bessel function evaluated in-crate (power series below argument 12,
//! Miller downward recurrence above).

use num_complex::Complex64;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::forward_op::{inr_coeffs, ForwardConfig};
use crate::model::{InrParams, Unit};
use crate::rng::Rng;
use crate::spectral::{FeatureMap, FrequencySet, Measurements, SetKind};
use crate::{Error, Result};

/// One disc feature: center, radius, amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    pub center: [f64; 2],
    pub radius: f64,
    pub amplitude: f64,
}

/// A ground-truth image with exactly known coefficients.
#[derive(Debug, Clone)]
pub enum Phantom {
    /// Realizable by the INR architecture itself.
    Teacher(InrParams),
    /// Piecewise constant, not bandlimited, not INR-realizable.
    Discs(Vec<Disc>),
}

impl Phantom {
    /// Discs must lie strictly inside the unit square with positive radius.
    pub fn discs(discs: Vec<Disc>) -> Result<Self> {
        for (i, d) in discs.iter().enumerate() {
            let inside = d.radius > 0.0
                && d.center[0] - d.radius > 0.0
                && d.center[0] + d.radius < 1.0
                && d.center[1] - d.radius > 0.0
                && d.center[1] + d.radius < 1.0;
            if !inside {
                return Err(Error::Parse(format!(
                    "disc {i} (center {:?}, radius {}) is not inside the unit square",
                    d.center, d.radius
                )));
            }
        }
        Ok(Phantom::Discs(discs))
    }

    pub fn dim(&self) -> usize {
        match self {
            Phantom::Teacher(p) => p.feature_map().dim(),
            Phantom::Discs(_) => 2,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Phantom::Teacher(p) => p.eval(x),
            Phantom::Discs(discs) => {
                let mut acc = 0.0;
                for d in discs {
                    let dx = x[0] - d.center[0];
                    let dy = x[1] - d.center[1];
                    if dx * dx + dy * dy <= d.radius * d.radius {
                        acc += d.amplitude;
                    }
                }
                acc
            }
        }
    }
}

/// Order-1 Bessel function of the first kind, accurate to ~1e-13 across the
/// arguments reached by the phantom band (split at 12 between the power
/// series and recurrence-stabilized evaluation).
pub fn bessel_j1(x: f64) -> f64 {
    let z = x.abs();
    let val = if z <= 12.0 {
        j1_series(z)
    } else {
        j1_miller(z)
    };
    if x < 0.0 {
        -val
    } else {
        val
    }
}

/// `J1(z) = (z/2) sum_m (-1)^m (z^2/4)^m / (m! (m+1)!)`.
fn j1_series(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let q = 0.25 * z * z;
    let mut term = 0.5 * z;
    let mut sum = term;
    for m in 1..200 {
        term *= -q / (m as f64 * (m + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Miller's downward recurrence, normalized by `J0 + 2 sum J_{2m} = 1`.
fn j1_miller(z: f64) -> f64 {
    let n_start = ((z as usize + 40).max((1.3 * z) as usize + 20) + 1) & !1usize;
    let mut j_next = 0.0f64; // J_{n+1}
    let mut j = 1e-30f64; // J_n
    let mut j1_val = 0.0f64;
    let mut sum = if n_start % 2 == 0 { 2.0 * j } else { 0.0 };
    for n in (1..=n_start).rev() {
        let j_prev = (2.0 * n as f64 / z) * j - j_next;
        j_next = j;
        j = j_prev;
        let idx = n - 1;
        if idx == 1 {
            j1_val = j;
        }
        if idx % 2 == 0 {
            sum += if idx == 0 { j } else { 2.0 * j };
        }
        if j.abs() > 1e250 {
            j /= 1e250;
            j_next /= 1e250;
            sum /= 1e250;
            j1_val /= 1e250;
        }
    }
    j1_val / sum
}

/// Coefficients of the phantom on `omega`: teacher phantoms go through the
/// measurement operator (`cfg` supplies the backend), disc phantoms use the
/// closed-form Bessel expression.
pub fn phantom_coeffs(
    ph: &Phantom,
    omega: &FrequencySet,
    cfg: &ForwardConfig,
) -> Result<Measurements> {
    match ph {
        Phantom::Teacher(params) => inr_coeffs(params, &cfg.with_omega(omega.clone())),
        Phantom::Discs(discs) => {
            assert_eq!(omega.kind(), SetKind::FullBox);
            assert_eq!(omega.dim(), 2);
            let two_pi = 2.0 * std::f64::consts::PI;
            let mut vals = Vec::with_capacity(omega.len());
            for k in omega.iter() {
                let norm_k = ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt();
                let mut acc = Complex64::default();
                for d in discs {
                    let phase = -two_pi * (k[0] as f64 * d.center[0] + k[1] as f64 * d.center[1]);
                    let shift = Complex64::new(phase.cos(), phase.sin());
                    let magnitude = if norm_k == 0.0 {
                        std::f64::consts::PI * d.radius * d.radius
                    } else {
                        d.radius * bessel_j1(two_pi * norm_k * d.radius) / norm_k
                    };
                    acc += d.amplitude * magnitude * shift;
                }
                vals.push(acc);
            }
            Ok(Measurements::new(omega.clone(), vals))
        }
    }
}

/// Fourier coefficient of the normalized 1-D Fejer kernel (peak value 1).
fn fejer_coeff(q: i64, k0: i64) -> f64 {
    let band = (k0 + 1) as f64;
    if q.abs() > k0 {
        0.0
    } else {
        (1.0 - q.abs() as f64 / band) / band
    }
}

/// A 2-D phantom of `n_dots` radially peaked rectified units: each unit's
/// polynomial is a product-Fejer bump centered at a random point minus a
/// random threshold, so its positive set is a connected neighborhood of the
/// center. Thresholds stay in (0.2, 0.8): the kernel's side lobes never
/// exceed 0.2, which keeps the positive set inside the main lobe.
pub fn dot_phantom(n_dots: usize, k0: i64, seed: u64) -> Phantom {
    let fm = FeatureMap::new(k0, 2);
    let mut rng = Rng::new(seed);
    let p = fm.p();
    let sqrt2 = std::f64::consts::SQRT_2;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut units = Vec::with_capacity(n_dots);
    for _ in 0..n_dots {
        let center = [rng.uniform(), rng.uniform()];
        let threshold = rng.uniform_in(0.2, 0.8);
        let mut w = vec![0.0; fm.dim_out()];
        w[0] = fejer_coeff(0, k0) * fejer_coeff(0, k0) - threshold;
        for (j, k) in fm.freqs().iter().enumerate() {
            let b = fejer_coeff(k[0], k0) * fejer_coeff(k[1], k0);
            let phase = -two_pi * (k[0] as f64 * center[0] + k[1] as f64 * center[1]);
            let c = b * Complex64::new(phase.cos(), phase.sin());
            w[1 + j] = sqrt2 * c.re;
            w[1 + p + j] = -sqrt2 * c.im;
        }
        let amplitude = rng.uniform_in(0.5, 1.5);
        units.push(Unit::new(amplitude, w));
    }
    Phantom::Teacher(InrParams::new(fm, units))
}

/// Image-domain error metrics over an `M^d` comparison grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub mse: f64,
    pub max_abs_err: f64,
    pub grid: usize,
}

/// Mean squared difference (and max absolute difference) between two
/// functions on the uniform `M^d` grid.
pub fn image_mse<F, G>(f_true: F, f_est: G, m: usize, dim: usize) -> Metrics
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> f64,
{
    let n = m.pow(dim as u32);
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0f64; dim];
    let inv_m = 1.0 / m as f64;
    let mut sum_sq = 0.0;
    let mut max_abs: f64 = 0.0;
    for _ in 0..n {
        for (xi, &mi) in x.iter_mut().zip(idx.iter()) {
            *xi = mi as f64 * inv_m;
        }
        let diff = f_true(&x) - f_est(&x);
        sum_sq += diff * diff;
        max_abs = max_abs.max(diff.abs());
        for axis in (0..dim).rev() {
            idx[axis] += 1;
            if idx[axis] < m {
                break;
            }
            idx[axis] = 0;
        }
    }
    Metrics {
        mse: sum_sq / n as f64,
        max_abs_err: max_abs,
        grid: m,
    }
}

/// Mean squared difference between two precomputed grids.
pub fn grid_mse(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.len() as f64
}

/// Renders `f` on the `M^d` grid. For d = 1 writes a CSV curve
/// `<stem>.csv`; for d = 2 writes a binary PGM `<stem>.pgm` (min-max
/// normalized, constants in `<stem>.meta`) plus a raw little-endian f32
/// grid `<stem>.raw` with a text header `<stem>.hdr`.
pub fn render_image<F>(f: F, m: usize, dim: usize, stem: &Path) -> Result<()>
where
    F: Fn(&[f64]) -> f64,
{
    match dim {
        1 => {
            let mut out =
                std::io::BufWriter::new(std::fs::File::create(stem.with_extension("csv"))?);
            writeln!(out, "x,value")?;
            for i in 0..m {
                let x = i as f64 / m as f64;
                writeln!(out, "{x:.17e},{:.17e}", f(&[x]))?;
            }
            Ok(())
        }
        2 => {
            let mut values = Vec::with_capacity(m * m);
            for r in 0..m {
                for c in 0..m {
                    values.push(f(&[r as f64 / m as f64, c as f64 / m as f64]));
                }
            }
            write_grid_2d(&values, m, stem)
        }
        _ => Err(Error::Parse(format!(
            "render_image supports d <= 2, got {dim}"
        ))),
    }
}

/// Writes an already-sampled 2-D grid (row-major, `m * m`).
pub fn write_grid_2d(values: &[f64], m: usize, stem: &Path) -> Result<()> {
    assert_eq!(values.len(), m * m);
    let vmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    let vmax = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if vmax > vmin { vmax - vmin } else { 1.0 };

    let mut pgm = Vec::with_capacity(m * m + 64);
    pgm.extend_from_slice(format!("P5\n{m} {m}\n255\n").as_bytes());
    for &v in values {
        let level = ((v - vmin) / span * 255.0).round().clamp(0.0, 255.0) as u8;
        pgm.push(level);
    }
    std::fs::write(stem.with_extension("pgm"), pgm)?;
    std::fs::write(
        stem.with_extension("meta"),
        format!("vmin={vmin:.17e}\nvmax={vmax:.17e}\n"),
    )?;

    let mut raw = Vec::with_capacity(values.len() * 4);
    for &v in values {
        raw.extend_from_slice(&(v as f32).to_le_bytes());
    }
    std::fs::write(stem.with_extension("raw"), raw)?;
    std::fs::write(
        stem.with_extension("hdr"),
        format!("d=2\nm={m}\ndtype=f32le\n"),
    )?;
    Ok(())
}

/// Reads back a raw grid written by `write_grid_2d`.
pub fn read_grid_2d(stem: &Path) -> Result<(usize, Vec<f32>)> {
    let hdr = std::fs::read_to_string(stem.with_extension("hdr"))?;
    let mut m = 0usize;
    for line in hdr.lines() {
        if let Some(v) = line.strip_prefix("m=") {
            m = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad grid size in header: {v:?}")))?;
        }
    }
    if m == 0 {
        return Err(Error::Parse("header is missing the grid size".into()));
    }
    let raw = std::fs::read(stem.with_extension("raw"))?;
    if raw.len() != m * m * 4 {
        return Err(Error::Parse(format!(
            "raw payload has {} bytes, expected {}",
            raw.len(),
            m * m * 4
        )));
    }
    let values = raw
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    Ok((m, values))
}

/// Reads a d = 1 CSV curve back as `(x, value)` pairs.
pub fn read_curve_csv<R: BufRead>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let mut fields = line.trim().split(',');
        let x: f64 = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("line {}: bad x", i + 1)))?;
        let v: f64 = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("line {}: bad value", i + 1)))?;
        out.push((x, v));
    }
    Ok(out)
}
