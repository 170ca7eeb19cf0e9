//! Gain of the quantized estimators over input SNR; writes sweep.csv to the
//! directory given as the first argument (default: current directory).

use std::path::PathBuf;

use bayesnr::harness::{run_sweep, write_table, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    let sweep = run_sweep(&ExperimentConfig::default())?;
    for p in &sweep.points {
        let best = p.designs.iter().map(|d| d.qmmse.gain_db).fold(f64::NEG_INFINITY, f64::max);
        println!("{:>6} dB  MMSE {:>8.4} dB  best Q-MMSE {:>8.4} dB", p.input_snr_db, p.mmse.gain_db, best);
    }
    write_table(&dir, "sweep.csv", &sweep.to_table())?;
    Ok(())
}
