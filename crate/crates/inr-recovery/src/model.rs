//! The shallow INR `f(x) = sum_i a_i [w_i . gamma(x)]_+`: parameter
//! containers, evaluation, sphere normalization, the rebalancing transform
//! behind the weight-decay/weighted-l1 equivalence, and random teacher
//! generation for recovery experiments.

use std::io::{BufRead, Write};

use crate::rng::Rng;
use crate::spectral::{grid_samples, FeatureMap, TrigPoly};
use crate::{Error, Result};

/// One hidden unit: outer weight `a` and inner weight vector `w` in feature
/// coordinates (length D).
#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    pub outer: f64,
    pub weights: Vec<f64>,
}

impl Unit {
    pub fn new(outer: f64, weights: Vec<f64>) -> Self {
        Unit { outer, weights }
    }

    pub fn weight_norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}

/// Width-W parameter vector of a shallow INR tied to a feature map.
#[derive(Debug, Clone, PartialEq)]
pub struct InrParams {
    fm: FeatureMap,
    units: Vec<Unit>,
}

impl InrParams {
    pub fn new(fm: FeatureMap, units: Vec<Unit>) -> Self {
        let d_out = fm.dim_out();
        assert!(
            units.iter().all(|u| u.weights.len() == d_out),
            "every inner weight vector must have length D = {d_out}"
        );
        InrParams { fm, units }
    }

    pub fn zeros(fm: FeatureMap, width: usize) -> Self {
        let d_out = fm.dim_out();
        let units = (0..width)
            .map(|_| Unit::new(0.0, vec![0.0; d_out]))
            .collect();
        InrParams { fm, units }
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.fm
    }

    pub fn width(&self) -> usize {
        self.units.len()
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn units_mut(&mut self) -> &mut [Unit] {
        &mut self.units
    }

    /// `f(x) = sum_i a_i [w_i . gamma(x)]_+`; ReLU at exactly zero is zero.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut gamma = vec![0.0; self.fm.dim_out()];
        self.fm.eval_into(x, &mut gamma);
        self.eval_with_features(&gamma)
    }

    /// Evaluation against a precomputed feature vector gamma(x).
    pub fn eval_with_features(&self, gamma: &[f64]) -> f64 {
        let mut acc = 0.0;
        for unit in &self.units {
            let pre: f64 = unit
                .weights
                .iter()
                .zip(gamma.iter())
                .map(|(w, g)| w * g)
                .sum();
            if pre > 0.0 {
                acc += unit.outer * pre;
            }
        }
        acc
    }

    /// Rescales every unit to `||w_i|| = 1` without changing the function:
    /// `(a, w) -> (a ||w||, w/||w||)` by positive homogeneity of the ReLU.
    /// Units with `w = 0` realize the zero function and collapse to `(0, 0)`.
    pub fn normalize_to_sphere(&self) -> InrParams {
        let units = self
            .units
            .iter()
            .map(|u| {
                let norm = u.weight_norm();
                if norm == 0.0 {
                    Unit::new(0.0, u.weights.clone())
                } else {
                    Unit::new(u.outer * norm, u.weights.iter().map(|w| w / norm).collect())
                }
            })
            .collect();
        InrParams {
            fm: self.fm.clone(),
            units,
        }
    }

    /// Per-unit rescaling `(a, w) -> (sign(a) sqrt(|a| eta(w)), w sqrt(|a|/eta(w)))`
    /// so that `|a'| = eta(w')` for every active unit. The function is
    /// unchanged pointwise and the weight-decay value drops to the weighted
    /// l1 form `sum_i |a_i| eta(w_i)` computed on the original parameters.
    ///
    /// Rejects units that contribute (`a != 0`) while `eta(w) = 0`, since the
    /// weighting function is then inadmissible for them.
    pub fn rebalance<F: Fn(&[f64]) -> f64>(&self, eta: F) -> Result<InrParams> {
        let mut units = Vec::with_capacity(self.units.len());
        for (index, u) in self.units.iter().enumerate() {
            if u.outer == 0.0 {
                units.push(Unit::new(0.0, vec![0.0; u.weights.len()]));
                continue;
            }
            let e = eta(&u.weights);
            if e <= 0.0 {
                return Err(Error::ZeroWeighting { index, eta: e });
            }
            let a_abs = u.outer.abs();
            let new_outer = u.outer.signum() * (a_abs * e).sqrt();
            let scale = (a_abs / e).sqrt();
            units.push(Unit::new(
                new_outer,
                u.weights.iter().map(|w| w * scale).collect(),
            ));
        }
        Ok(InrParams {
            fm: self.fm.clone(),
            units,
        })
    }

    /// The trigonometric polynomial `tau_i = w_i . gamma(.)` of one unit.
    pub fn unit_trig_poly(&self, i: usize) -> TrigPoly {
        TrigPoly::new(self.fm.clone(), self.units[i].weights.clone())
    }

    /// Flat text record: header `d,k0,width` then one `a,w[0..D)` row per
    /// unit, 17 significant digits (bit-exact round trip).
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "d,k0,width")?;
        writeln!(
            out,
            "{},{},{}",
            self.fm.dim(),
            self.fm.max_freq(),
            self.width()
        )?;
        for u in &self.units {
            write!(out, "{:.17e}", u.outer)?;
            for w in &u.weights {
                write!(out, ",{w:.17e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim() != "d,k0,width" {
            return Err(Error::Parse(format!("bad header line: {header:?}")));
        }
        let dims = lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::Parse("missing dimension line".into()))?;
        let parts: Vec<&str> = dims.trim().split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("bad dimension line: {dims:?}")));
        }
        let parse_usize = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad integer: {s:?}")))
        };
        let d = parse_usize(parts[0])?;
        let k0 = parts[1]
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("bad k0: {:?}", parts[1])))?;
        let width = parse_usize(parts[2])?;
        let fm = FeatureMap::new(k0, d);
        let d_out = fm.dim_out();
        let mut units = Vec::with_capacity(width);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != d_out + 1 {
                return Err(Error::Parse(format!(
                    "unit row has {} fields, expected {}",
                    fields.len(),
                    d_out + 1
                )));
            }
            let parse_f64 = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad float: {s:?}")))
            };
            let outer = parse_f64(fields[0])?;
            let weights = fields[1..]
                .iter()
                .map(|s| parse_f64(s))
                .collect::<Result<Vec<f64>>>()?;
            units.push(Unit::new(outer, weights));
        }
        if units.len() != width {
            return Err(Error::Parse(format!(
                "expected {} units, found {}",
                width,
                units.len()
            )));
        }
        Ok(InrParams::new(fm, units))
    }
}

/// Draws a width-W teacher network: inner weights uniform on the unit sphere
/// of R^D (redrawn while `eta(w) <= 1e-8` or the rectified unit is
/// identically zero), outer weights `s * u` with random sign and
/// `u ~ U[0.5, 1.5]`. Deterministic in the seed.
pub fn random_teacher<F: Fn(&[f64]) -> f64>(
    width: usize,
    fm: &FeatureMap,
    seed: u64,
    eta: F,
) -> Result<InrParams> {
    let mut rng = Rng::new(seed);
    let d_out = fm.dim_out();
    // grid fine enough to witness positivity of a K0-bandlimited polynomial
    let probe_m = match fm.dim() {
        1 => (8 * fm.max_freq().max(1) as usize)
            .max(64)
            .next_power_of_two(),
        2 => (4 * fm.max_freq().max(1) as usize)
            .max(32)
            .next_power_of_two(),
        _ => 16,
    };
    let mut units = Vec::with_capacity(width);
    let max_attempts = 1000;
    for _ in 0..width {
        let mut attempts = 0;
        let weights = loop {
            attempts += 1;
            if attempts > max_attempts {
                return Err(Error::RedrawLimit {
                    attempts: max_attempts,
                });
            }
            let w = rng.unit_vector(d_out);
            if eta(&w) <= 1e-8 {
                continue;
            }
            let tp = TrigPoly::new(fm.clone(), w.clone());
            let max_val = grid_samples(|x| tp.eval(x), probe_m, fm.dim())
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            if max_val <= 0.0 {
                continue;
            }
            break w;
        };
        let outer = rng.sign() * rng.uniform_in(0.5, 1.5);
        units.push(Unit::new(outer, weights));
    }
    Ok(InrParams::new(fm.clone(), units))
}
