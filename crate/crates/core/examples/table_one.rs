//! Gain, noise power, SNR and MSE of the MMSE and unbiased-MMSE estimators,
//! computed by quadrature and compared with the closed-form identities.

use bayesnr::estimator::{report, table1, ummse, ReportMode};
use bayesnr::harness::{mmse_for, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::default();
    for snr_db in [-15.0, -10.0, -5.0, 0.0] {
        let model = cfg.model_at_snr(snr_db)?;
        let g = mmse_for(&model);
        let r = report(&model, &g, &ReportMode::Quadrature)?;
        let t = table1(r.gain, model.signal_variance());
        let u = report(&model, &ummse(g, r.gain)?, &ReportMode::Quadrature)?;
        println!("input SNR {snr_db:>5} dB   K = {:.6}", r.gain);
        println!("  P      {:.8e}  identity {:.8e}", r.output_power, t.output_power);
        println!("  J      {:.8e}  identity {:.8e}", r.mse, t.mmse);
        println!("  sw2    {:.8e}  identity {:.8e}", r.output_noise_var, t.noise_power);
        println!("  gamma  {:.8e}  identity {:.8e}", r.snr, t.msnr);
        println!("  J_U    {:.8e}  identity {:.8e}  unbiased gain {:.6}", u.mse, t.ummse_mse, u.gain);
    }
    Ok(())
}
