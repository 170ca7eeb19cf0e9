//! Lloyd-Max quantizer of the signal density and its distortion trace.

use bayesnr::harness::ExperimentConfig;
use bayesnr::quantized::lloyd_max;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = ExperimentConfig::default().model()?;
    for n in [4, 8, 17] {
        let q = lloyd_max(model.signal(), n)?;
        println!("N = {n}: {} iterations, distortion {:.10}", q.iterations, q.distortion());
        let t: Vec<String> = q.partition.thresholds().iter().map(|t| format!("{t:.5}")).collect();
        println!("  thresholds {}", t.join(" "));
        let l: Vec<String> = q.levels.iter().map(|l| format!("{l:.5}")).collect();
        println!("  levels     {}", l.join(" "));
    }
    Ok(())
}
