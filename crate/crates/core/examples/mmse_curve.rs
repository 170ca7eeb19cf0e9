//! Prints the closed-form MMSE estimator next to its numeric counterpart and
//! the identity, for the default Laplace signal in impulsive noise.

use bayesnr::estimator::{mmse_closed, mmse_numeric};
use bayesnr::harness::ExperimentConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = ExperimentConfig::default().model()?;
    let closed = mmse_closed(&model)?;
    let numeric = mmse_numeric(&model);
    println!("{:>8} {:>14} {:>14}", "y", "closed", "numeric");
    for i in 0..=24 {
        let y = i as f64 * 2.0;
        println!("{y:>8.2} {:>14.8} {:>14.8}", closed.eval(y), numeric.try_eval(y)?);
    }
    Ok(())
}
