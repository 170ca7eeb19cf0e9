use std::path::PathBuf;
use std::process::ExitCode;

use bayesnr::harness::{self, ExperimentConfig, HarnessError, ValidateOptions};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bayesnr", version, about = "MMSE and maximum-SNR estimators for additive non-Gaussian noise")]
struct Cli {
    /// Directory for output CSV files
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimator curves g(y) -> curve.csv
    Curve { config: PathBuf },
    /// SNR gain and MSE against input SNR -> sweep.csv
    Sweep { config: PathBuf },
    /// Monte-Carlo estimates with standard errors -> mc.csv
    Mc { config: PathBuf },
    /// Designed quantizer thresholds -> thresholds.csv
    Thresholds { config: PathBuf },
    /// Run the built-in invariant suites
    Validate {
        /// Corrupt the closed-form MMSE constants by this relative amount
        #[arg(long, hide = true)]
        perturb_c1: Option<f64>,
    },
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    ExperimentConfig::from_json(&text)
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let written = match &cli.command {
        Command::Curve { config } => harness::write_table(&cli.out, "curve.csv", &harness::run_curve(&load(config)?)?)?,
        Command::Sweep { config } => harness::write_table(&cli.out, "sweep.csv", &harness::run_sweep(&load(config)?)?.to_table())?,
        Command::Mc { config } => harness::write_table(&cli.out, "mc.csv", &harness::run_mc(&load(config)?)?)?,
        Command::Thresholds { config } => {
            let t = harness::run_thresholds(&load(config)?)?;
            print!("{}", t.to_csv());
            harness::write_table(&cli.out, "thresholds.csv", &t)?
        }
        Command::Validate { perturb_c1 } => {
            let report = harness::run_validate(&ValidateOptions { perturb_c1: *perturb_c1 });
            print!("{}", report.render());
            if !report.passed() {
                return Err(HarnessError::Validation("one or more suites failed".into()));
            }
            return Ok(());
        }
    };
    eprintln!("wrote {}", written.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("BAYESNR_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: BAYESNR_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(1);
            }
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
