use super::{report, Estimator, EstimatorReport, ReportMode};
use crate::distributions::ObservationModel;
use crate::{Error, Result};

/// Second-order quantities of the MMSE estimator as functions of its gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1 {
    /// `K σ_x²`
    pub output_power: f64,
    /// `(1 - K) σ_x²`
    pub mmse: f64,
    /// `K (1 - K) σ_x²`
    pub noise_power: f64,
    /// `K / (1 - K)`
    pub msnr: f64,
    /// `(1 - K) σ_x² / K`
    pub ummse_mse: f64,
}

pub fn table1(k: f64, sigma_x2: f64) -> Table1 {
    let msnr = if k >= 1.0 { f64::INFINITY } else { k / (1.0 - k) };
    let ummse_mse = if k <= 0.0 { f64::INFINITY } else { (1.0 - k) * sigma_x2 / k };
    Table1 {
        output_power: k * sigma_x2,
        mmse: (1.0 - k) * sigma_x2,
        noise_power: k * (1.0 - k) * sigma_x2,
        msnr,
        ummse_mse,
    }
}

/// `g(y) = y` for `|y| ≤ β`, `β sgn(y)` otherwise.
pub fn soft_limiter(beta: f64) -> Result<Estimator> {
    if !(beta > 0.0) {
        return Err(Error::invalid(format!("soft limiter threshold must be positive, got {beta}")));
    }
    Ok(Estimator::SoftLimiter { beta })
}

/// Result of scanning soft-limiter thresholds.
#[derive(Debug, Clone)]
pub struct LimiterScan {
    pub betas: Vec<f64>,
    pub reports: Vec<EstimatorReport>,
    /// threshold with the smallest MSE
    pub beta_mse: f64,
    /// threshold with the largest SNR
    pub beta_snr: f64,
}

/// Evaluates soft limiters on `points` thresholds spread evenly over
/// `[lo, hi] · σ_y` (defaults used elsewhere: 400 points on `[0.05, 5]`).
pub fn scan_soft_limiter(model: &ObservationModel, lo: f64, hi: f64, points: usize) -> Result<LimiterScan> {
    if points < 2 || !(0.0 < lo && lo < hi) {
        return Err(Error::invalid("soft limiter scan needs 0 < lo < hi and at least 2 points"));
    }
    let sy = model.obs_std_dev();
    let betas: Vec<f64> = (0..points)
        .map(|i| sy * (lo + (hi - lo) * i as f64 / (points - 1) as f64))
        .collect();
    use rayon::prelude::*;
    let reports = betas
        .par_iter()
        .map(|&b| report(model, &Estimator::SoftLimiter { beta: b }, &ReportMode::Quadrature))
        .collect::<Result<Vec<_>>>()?;
    let mut i_mse = 0;
    let mut i_snr = 0;
    for (i, r) in reports.iter().enumerate() {
        if r.mse < reports[i_mse].mse {
            i_mse = i;
        }
        if r.snr > reports[i_snr].snr {
            i_snr = i;
        }
    }
    Ok(LimiterScan {
        beta_mse: betas[i_mse],
        beta_snr: betas[i_snr],
        betas,
        reports,
    })
}
