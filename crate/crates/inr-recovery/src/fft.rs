//! Radix-2 FFT over d-dimensional cubic grids.
//!
//! Conventions used throughout the crate:
//!
//! - analysis:  `fhat[k] = (1/M^d) sum_m f[m] e^{-2pi i k.m/M}` — the forward
//!   transform here is unnormalized, callers apply `1/M^d` when collecting
//!   coefficients;
//! - synthesis: `f[m] = sum_k fhat[k] e^{+2pi i k.m/M}` — exactly the
//!   unnormalized inverse transform.
//!
//! Grids are row-major with axis 0 slowest: flat index of the multi-index
//! `(m_0, .., m_{d-1})` is `((m_0 * M) + m_1) * M + ...`.

use num_complex::Complex64;

/// Precomputed radix-2 plan for one transform length (power of two).
#[derive(Debug, Clone)]
pub struct Radix2Plan {
    n: usize,
    // twiddles[k] = exp(-2 pi i k / n) for k < n/2
    twiddles: Vec<Complex64>,
}

impl Radix2Plan {
    pub fn new(n: usize) -> Self {
        assert!(
            n.is_power_of_two(),
            "radix-2 plan needs a power-of-two size"
        );
        let twiddles = (0..n / 2)
            .map(|k| {
                let angle = -2.0 * std::f64::consts::PI * k as f64 / n as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        Radix2Plan { n, twiddles }
    }

    /// Unnormalized forward transform (sign -1), in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// Unnormalized inverse transform (sign +1), in place.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        assert_eq!(data.len(), n);
        if n <= 1 {
            return;
        }
        // bit-reversal permutation
        let shift = usize::BITS - n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> shift;
            if j > i {
                data.swap(i, j);
            }
        }
        let mut m = 2;
        while m <= n {
            let half = m / 2;
            let stride = n / m;
            for start in (0..n).step_by(m) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let i1 = start + k;
                    let i2 = start + k + half;
                    let t = w * data[i2];
                    data[i2] = data[i1] - t;
                    data[i1] += t;
                }
            }
            m <<= 1;
        }
    }
}

/// FFT over an `M^d` grid, applied separably along each axis.
#[derive(Debug, Clone)]
pub struct GridFft {
    m: usize,
    dim: usize,
    plan: Radix2Plan,
}

impl GridFft {
    pub fn new(m: usize, dim: usize) -> Self {
        assert!(dim >= 1);
        GridFft {
            m,
            dim,
            plan: Radix2Plan::new(m),
        }
    }

    pub fn grid_len(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let m = self.m;
        let n = self.grid_len();
        assert_eq!(data.len(), n);
        let mut line = vec![Complex64::default(); m];
        // Axis `a` has stride m^(d-1-a); the last axis is contiguous.
        for axis in 0..self.dim {
            let stride = m.pow((self.dim - 1 - axis) as u32);
            let lines = n / m;
            for l in 0..lines {
                // Decompose the line index into (block, offset) around the axis.
                let block = l / stride;
                let offset = l % stride;
                let base = block * stride * m + offset;
                if stride == 1 {
                    let seg = &mut data[base..base + m];
                    if inverse {
                        self.plan.inverse(seg);
                    } else {
                        self.plan.forward(seg);
                    }
                } else {
                    for (i, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + i * stride];
                    }
                    if inverse {
                        self.plan.inverse(&mut line);
                    } else {
                        self.plan.forward(&mut line);
                    }
                    for (i, slot) in line.iter().enumerate() {
                        data[base + i * stride] = *slot;
                    }
                }
            }
        }
    }
}
