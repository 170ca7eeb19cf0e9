use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_bayesnr");

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(dir).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL: &str = r#"{
  "quantizer": {"kind": "uniform", "N": [9, 17], "y_max": 10.0, "p_ol": 0.0327, "optimized_n": 17},
  "sweep": {"input_snr_db_min": -12.0, "input_snr_db_max": 0.0, "input_snr_db_step": 6.0},
  "mc": {"samples": 20000, "seed": 3, "over_sweep": false},
  "curve": {"y_min": 0.0, "y_max": 12.0, "step": 0.5}
}"#;

#[test]
fn every_subcommand_writes_its_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let out_s = out.to_string_lossy().into_owned();
    for (cmd, file, header) in [
        ("curve", "curve.csv", "y,g_mmse,g_qmmse_N9,g_qmmse_N17,g_smmse_N9,g_smmse_N17"),
        ("sweep", "sweep.csv", "input_snr_db,gain_db_mmse,mse_mmse,gain_db_qmmse_u_N9"),
        ("mc", "mc.csv", "input_snr_db,estimator,samples,seed,K,K_se"),
        ("thresholds", "thresholds.csv", "design,N,L,p_ol,i,y_i"),
    ] {
        let o = run(&[cmd, &cfg, "--out", &out_s], dir.path());
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let text = fs::read_to_string(out.join(file)).unwrap();
        assert!(text.starts_with(header), "{cmd}: {}", text.lines().next().unwrap());
        assert!(!text.contains('\r'));
    }
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let mut seen = Vec::new();
    for (threads, sub) in [("1", "a"), ("4", "b")] {
        let out = dir.path().join(sub);
        let o = Command::new(BIN)
            .args(["mc", &cfg, "--out", &out.to_string_lossy()])
            .env("BAYESNR_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success());
        let s = Command::new(BIN)
            .args(["sweep", &cfg, "--out", &out.to_string_lossy()])
            .env("BAYESNR_THREADS", threads)
            .output()
            .unwrap();
        assert!(s.status.success());
        seen.push((fs::read(out.join("mc.csv")).unwrap(), fs::read(out.join("sweep.csv")).unwrap()));
    }
    assert_eq!(seen[0], seen[1]);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"noise": {"type": "laplace-mixture", "sigma_n": 4, "p0": 1.7, "R_pow": 0.001}}"#);
    let o = run(&["sweep", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("noise.p0"));
    let o = run(&["sweep", "does-not-exist.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let cfg = write_config(dir.path(), "{\n \"signal\": {\"type\": \"cauchy\", \"sigma_x\": 1}\n}");
    let o = run(&["curve", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = Command::new(BIN).args(["validate"]).env("BAYESNR_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_passes_and_catches_a_corrupted_constant() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["validate"], dir.path());
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.lines().last().unwrap().contains("\"failed\":0"));
    let o = run(&["validate", "--perturb-c1", "1e-3"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL oracle"));
}
