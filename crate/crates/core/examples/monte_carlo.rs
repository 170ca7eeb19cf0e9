//! Seeded Monte-Carlo estimates of gain, MSE and SNR against quadrature.

use bayesnr::estimator::{monte_carlo_report, report, ReportMode};
use bayesnr::harness::{mmse_for, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = ExperimentConfig::default().model()?;
    let g = mmse_for(&model);
    let exact = report(&model, &g, &ReportMode::Quadrature)?;
    let mc = monte_carlo_report(&model, &g, 7, 1_000_000)?;
    println!("{:<6} {:>14} {:>14} {:>12}", "", "quadrature", "monte carlo", "std err");
    println!("{:<6} {:>14.8} {:>14.8} {:>12.2e}", "K", exact.gain, mc.report.gain, mc.gain_se);
    println!("{:<6} {:>14.8} {:>14.8} {:>12.2e}", "J", exact.mse, mc.report.mse, mc.mse_se);
    println!("{:<6} {:>14.8} {:>14.8} {:>12.2e}", "SNR", exact.snr, mc.report.snr, mc.snr_se);
    Ok(())
}
