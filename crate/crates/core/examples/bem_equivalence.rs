//! Builds a basis-expansion system on a uniform partition and checks that the
//! MMSE, maximum-SNR and unbiased solutions share one output SNR.

use bayesnr::bem::{assemble, b_mg, b_mmse, b_msnr_eig, b_msnr_sherman, b_ummse, bem_mse, bem_snr, BemBasis};
use bayesnr::harness::ExperimentConfig;
use bayesnr::quantized::Partition;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = ExperimentConfig::default().model()?;
    let partition = Partition::symmetric_uniform(33, 3.0 * model.obs_std_dev())?;
    let sys = assemble(&model, &BemBasis::Rectangular(partition))?;
    let sols = [
        ("B-MMSE", b_mmse(&sys)?),
        ("B-MSNR c=1", b_msnr_sherman(&sys, 1.0)?),
        ("B-MSNR eig", b_msnr_eig(&sys)?),
        ("B-UMMSE", b_ummse(&sys)?),
        ("B-MG P=1", b_mg(&sys, 1.0)?),
    ];
    println!("{:<12} {:>14} {:>14}", "solution", "SNR", "MSE");
    for (name, c) in &sols {
        println!("{name:<12} {:>14.10} {:>14.10}", bem_snr(&sys, &c.g)?, bem_mse(&sys, &c.g));
    }
    Ok(())
}
