//! Bayesian MMSE and maximum-SNR estimation for additive non-Gaussian channels.
//!
//! Every estimator `g(y)` of a zero-mean parameter `x` admits the orthogonal
//! decomposition `g(y) = K_g x + w_g`. This crate computes that decomposition
//! (gain, output-noise power, output SNR and MSE) for:
//!
//! - the unconstrained MMSE estimator, in closed form for a Laplace signal in
//!   Laplace-mixture noise and by quadrature for any other model;
//! - estimators built on a basis expansion (B-MMSE, B-MSNR, B-UMMSE, B-MG);
//! - quantization-constrained estimators on a partition of the observation
//!   axis (Q-MMSE, sampled MMSE, Lloyd–Max optimal quantizer);
//! - the soft limiter baseline.
//!
//! The [`harness`] module drives sweeps and Monte-Carlo runs and writes CSV.
//! The `bayesnr` binary is a thin CLI over it.
//!
//! ```
//! use bayesnr::distributions::{Distribution, LaplaceLaw, LaplaceMixtureLaw, ObservationModel};
//! use bayesnr::estimator::{mmse_closed, report, ReportMode};
//!
//! let signal = Distribution::Laplace(LaplaceLaw::new(1.0).unwrap());
//! let noise = Distribution::LaplaceMixture(LaplaceMixtureLaw::two_component(4.0, 0.9, 1e-3).unwrap());
//! let model = ObservationModel::new(signal, noise).unwrap();
//! let g = mmse_closed(&model).unwrap();
//! let r = report(&model, &g, &ReportMode::Quadrature).unwrap();
//! assert!((r.mse - (1.0 - r.gain)).abs() < 1e-6);
//! ```

pub mod bem;
pub mod distributions;
mod error;
pub mod estimator;
pub mod harness;
pub mod numerics;
pub mod quantized;

pub use error::{Error, Result};

/// Converts a power ratio to decibels.
pub fn to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Converts decibels to a power ratio.
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
