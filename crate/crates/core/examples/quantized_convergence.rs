//! Q-MMSE and sampled-MMSE performance as a uniform partition is refined.

use bayesnr::estimator::{report, ReportMode};
use bayesnr::harness::{mmse_for, ExperimentConfig};
use bayesnr::quantized::{q_mmse, s_mmse, Partition};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = ExperimentConfig::default().model()?;
    let g = mmse_for(&model);
    let j = report(&model, &g, &ReportMode::Quadrature)?.mse;
    println!("MMSE J = {j:.8}");
    println!("{:>6} {:>12} {:>12} {:>10}", "cells", "J Q-MMSE", "J S-MMSE", "gap %");
    for n in [5, 9, 17, 33, 65, 129, 257] {
        let p = Partition::symmetric_uniform(n, 10.0 * model.obs_std_dev())?;
        let q = q_mmse(&model, &p)?.report(&model)?;
        let s = s_mmse(&model, &p, &g)?.report(&model)?;
        println!("{n:>6} {:>12.8} {:>12.8} {:>10.4}", q.mse, s.mse, 100.0 * (q.mse - j) / j);
    }
    Ok(())
}
