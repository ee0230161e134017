//! Recovery of periodic continuous-domain signals and images from their
//! low-pass Fourier coefficients, using single-hidden-layer ReLU networks
//! with a Fourier-features input layer ("shallow INRs").
//!
//! The image model is a weighted sum of rectified trigonometric polynomials
//! `f(x) = sum_i a_i [w_i . gamma(x)]_+`, fitted to a box of low-pass
//! Fourier coefficients by penalized least squares or by an augmented
//! Lagrangian solve of the equality-constrained problem, under standard or
//! modified weight decay regularization. Alongside the solvers, the crate
//! carries the machinery to check optimality numerically: the rebalancing
//! identity connecting weight decay to a weighted l1 penalty, atomic
//! measures over the weight sphere with their weighted TV norm, and dual
//! certificates with a sphere-sampling feasibility verifier.
//!
//! Module map:
//!
//! - [`spectral`]: frequency boxes, the Fourier-features map, trig
//!   polynomials, grid sampling and DFT coefficient extraction;
//! - [`model`]: INR parameters, evaluation, sphere normalization, the
//!   rebalancing transform, random teacher networks;
//! - [`forward_op`]: the measurement operator on grids (any dimension) and
//!   in closed form (1-D), plus zero-fill synthesis;
//! - [`training`]: regularizers with hand-derived gradients, Adam, and the
//!   augmented Lagrangian solver;
//! - [`certificate`]: atomic measures, weighted TV norm, dual-certificate
//!   construction and verification;
//! - [`phantoms`]: test images with exactly known coefficients and image
//!   metrics;
//! - [`experiments`]: seeded experiment harness behind the CLI (probability
//!   tables, phantom reconstructions, certificate reports).
//!
//! Runnable walkthroughs for each capability live under `examples/`.

pub mod certificate;
pub mod experiments;
mod fft;
pub mod forward_op;
pub mod model;
pub mod phantoms;
pub mod rng;
pub mod spectral;
pub mod training;

pub use forward_op::{Backend, ForwardConfig};
pub use model::InrParams;
pub use spectral::{FeatureMap, FrequencySet, Measurements, TrigPoly};
pub use training::{RegKind, Regularizer, TrainConfig};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid size {m} is too small: need at least {needed} samples per axis")]
    GridTooSmall { m: usize, needed: usize },

    #[error("grid size must be a power of two for this backend, got {m}")]
    GridNotPowerOfTwo { m: usize },

    #[error("measurements are not Hermitian-symmetric (violation {violation:.3e})")]
    NotHermitian { violation: f64 },

    #[error("unit {index} has nonzero outer weight but weighting eta(w) = {eta:.3e}")]
    ZeroWeighting { index: usize, eta: f64 },

    #[error("gave up after {attempts} redraws: weighting function rejects every direction")]
    RedrawLimit { attempts: usize },

    #[error("analytic backend supports d = 1 only, got d = {dim}")]
    AnalyticDimension { dim: usize },

    #[error("certificate construction requires K >= 3 K0, got K = {k}, K0 = {k0}")]
    CertificateBand { k: i64, k0: i64 },

    #[error("root bracketing failed near x = {near:.6}")]
    RootBracketing { near: f64 },

    #[error("non-finite loss at iteration {iter}: {value}")]
    NonFiniteLoss { iter: usize, value: f64 },

    #[error("infeasible input to duality gap: {condition}")]
    Infeasible { condition: String },

    #[error("unknown config key `{key}`{}", section_suffix(.section))]
    UnknownConfigKey { key: String, section: String },

    #[error("config value for `{key}` did not parse: {reason}")]
    BadConfigValue { key: String, reason: String },

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn section_suffix(section: &str) -> String {
    if section.is_empty() {
        String::new()
    } else {
        format!(" in section [{section}]")
    }
}

pub type Result<T> = std::result::Result<T, Error>;
