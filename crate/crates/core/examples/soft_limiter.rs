//! Scans the soft-limiter threshold and shows that the MSE-optimal and the
//! SNR-optimal thresholds differ.

use bayesnr::estimator::scan_soft_limiter;
use bayesnr::harness::ExperimentConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = ExperimentConfig::default().model()?;
    let sy = model.obs_std_dev();
    let scan = scan_soft_limiter(&model, 0.05, 5.0, 400)?;
    for (b, r) in scan.betas.iter().zip(&scan.reports).step_by(25) {
        println!("beta {:>7.4} sigma_y  J {:.6}  SNR {:.6}", b / sy, r.mse, r.snr);
    }
    println!("argmin J   = {:.4} sigma_y", scan.beta_mse / sy);
    println!("argmax SNR = {:.4} sigma_y", scan.beta_snr / sy);
    Ok(())
}
