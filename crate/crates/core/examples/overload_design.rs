//! Uniform quantizers designed for a target overload probability, and the
//! overload range that maximizes the Q-MMSE gain.

use bayesnr::harness::ExperimentConfig;
use bayesnr::quantized::{default_overload_grid, optimize_overload, q_mmse, uniform_partition_for_overload};
use bayesnr::to_db;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = ExperimentConfig::default().model()?;
    let sy = model.obs_std_dev();
    for p_ol in [0.1, 0.0327, 0.01] {
        let p = uniform_partition_for_overload(&model, 127, p_ol)?;
        let l = *p.thresholds().last().unwrap();
        let r = q_mmse(&model, &p)?.report(&model)?;
        println!("P_ol {p_ol:<7} L = {:.4} sigma_y  gain {:.4} dB", l / sy, to_db(r.snr / model.input_snr()));
    }
    let best = optimize_overload(&model, 127, &default_overload_grid(&model))?;
    println!(
        "best L = {:.4} sigma_y, P_ol = {:.5}, gain {:.4} dB",
        best.l / sy,
        best.overload_probability,
        to_db(best.gain)
    );
    Ok(())
}
