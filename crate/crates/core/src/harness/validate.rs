use std::time::Instant;

use super::config::ExperimentConfig;
use super::experiments::mmse_for;
use crate::bem::{b_mg, b_mmse, b_msnr_eig, b_msnr_sherman, b_ummse, bem_snr, BemSystem};
use crate::distributions::ObservationModel;
use crate::estimator::{mmse_closed, mmse_numeric, monte_carlo_report, report, soft_limiter, Estimator, MmseClosedForm, ReportMode};
use crate::numerics::{rng_uniform, SymMatrix};
use crate::quantized::{cell_moments, d_func, oq_estimator, q_mmse_from_moments, q_mmse_mse, s_mmse, Partition};

/// Knobs for exercising the validator itself.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ValidateOptions {
    /// Multiply the closed-form MMSE constants `C_{1,m}` by `1 + rel`.
    pub perturb_c1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One `PASS`/`FAIL` line per suite followed by a JSON summary line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag} {} ({:.2}s): {}\n", c.suite, c.seconds, c.detail));
        }
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.passed).map(|c| c.suite).collect();
        let summary = serde_json::json!({
            "passed": self.checks.len() - failed.len(),
            "failed": failed.len(),
            "failed_suites": failed,
        });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }
}

type Outcome = Result<(bool, String), crate::Error>;

fn reference_model(snr_db: f64) -> ObservationModel {
    ExperimentConfig::default().model_at_snr(snr_db).expect("reference config is valid")
}

fn mmse_under_test(model: &ObservationModel, opts: &ValidateOptions) -> Estimator {
    match (opts.perturb_c1, model.channel()) {
        (Some(rel), Some(c)) => Estimator::MmseClosed(MmseClosedForm::from_channel(c).with_perturbed_c1(rel)),
        _ => mmse_for(model),
    }
}

fn closed_vs_quadrature(opts: &ValidateOptions) -> Outcome {
    let m = reference_model(-12.0);
    let q = m.to_quadrature();
    let g = mmse_under_test(&m, opts);
    let num = mmse_numeric(&m);
    let (mut eg, mut ed, mut ef) = (0.0f64, 0.0f64, 0.0f64);
    for i in -40..=40 {
        let y = 0.5 * i as f64;
        eg = eg.max((g.try_eval(y)? - num.try_eval(y)?).abs());
        ed = ed.max((d_func(&m, y)? - d_func(&q, y)?).abs());
        ef = ef.max((m.obs_cdf(y)? - q.obs_cdf(y)?).abs());
    }
    Ok((
        eg <= 1e-6 && ed <= 1e-8 && ef <= 1e-8,
        format!("max |g| gap {eg:.2e}, |D| gap {ed:.2e}, |F_Y| gap {ef:.2e}"),
    ))
}

fn table_one(opts: &ValidateOptions) -> Outcome {
    let mut worst = 0.0f64;
    for snr in [-12.0, -6.0, 0.0] {
        let m = reference_model(snr);
        let r = report(&m, &mmse_under_test(&m, opts), &ReportMode::Quadrature)?;
        let k = r.gain;
        let sx2 = m.signal_variance();
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        worst = worst
            .max(rel(r.output_power, k * sx2))
            .max(rel(r.mse, (1.0 - k) * sx2))
            .max(rel(r.output_noise_var, k * (1.0 - k) * sx2))
            .max(rel(r.snr, k / (1.0 - k)));
    }
    Ok((worst <= 1e-6, format!("largest relative deviation {worst:.2e}")))
}

fn random_system(rng: &mut crate::numerics::UniformStream, n: usize) -> Result<BemSystem, crate::Error> {
    let a: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.next_f64() - 0.5).collect()).collect();
    let r = SymMatrix::from_fn(n, |i, j| (0..n).map(|k| a[i][k] * a[j][k]).sum::<f64>() + if i == j { 0.1 } else { 0.0 });
    let raw: Vec<f64> = (0..n).map(|_| rng.next_f64() - 0.5).collect();
    let e = BemSystem::new(raw.clone(), r.clone(), 1.0)?.explained()?;
    // scale θ so that θᵀR⁻¹θ lands in (0.1, 0.9) σ_x²
    let s = ((0.1 + 0.8 * rng.next_f64()) / e).sqrt();
    BemSystem::new(raw.iter().map(|v| v * s).collect(), r, 1.0)
}

fn theorem_two() -> Outcome {
    let mut rng = rng_uniform(2024);
    let (mut sherman, mut angle, mut snr) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..50 {
        let sys = random_system(&mut rng, 2 + k % 11)?;
        let g = b_mmse(&sys)?.g;
        let c = sys.sigma_x2() - sys.explained()?;
        let h = b_msnr_sherman(&sys, c)?.g;
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        sherman = sherman.max(g.iter().zip(&h).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / norm);
        let e = b_msnr_eig(&sys)?.g;
        let cos = g.iter().zip(&e).map(|(a, b)| a * b).sum::<f64>() / norm;
        angle = angle.max(1.0 - cos.abs());
        let s0 = bem_snr(&sys, &g)?;
        for v in [h, e, b_ummse(&sys)?.g, b_mg(&sys, 0.37)?.g] {
            snr = snr.max(((bem_snr(&sys, &v)? - s0) / s0).abs());
        }
    }
    Ok((
        sherman <= 1e-10 && angle <= 1e-10 && snr <= 1e-9,
        format!("Sherman gap {sherman:.2e}, 1 - |cos| {angle:.2e}, SNR spread {snr:.2e}"),
    ))
}

fn convergence() -> Outcome {
    let m = reference_model(crate::to_db(1.0 / 16.0));
    let j_mmse = report(&m, &mmse_for(&m), &ReportMode::Quadrature)?.mse;
    let mut js = Vec::new();
    for n in [9, 17, 33, 65, 129, 257] {
        let cm = cell_moments(&m, &Partition::uniform(n, -10.0, 10.0)?)?;
        js.push(q_mmse_mse(&cm, m.signal_variance()));
    }
    let monotone = js.windows(2).all(|w| w[1] <= w[0]);
    let gap = (js[5] - j_mmse) / j_mmse;
    Ok((monotone && gap <= 0.01, format!("J(257) {:.6} vs J_MMSE {j_mmse:.6} ({:.3}%)", js[5], 100.0 * gap)))
}

fn dominance(opts: &ValidateOptions) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for snr in [-12.0, -6.0, 0.0] {
        let m = reference_model(snr);
        let g = mmse_under_test(&m, opts);
        for n in [17, 65] {
            let p = Partition::uniform(n, -3.0 * m.obs_std_dev(), 3.0 * m.obs_std_dev())?;
            let cm = cell_moments(&m, &p)?;
            let jq = q_mmse_from_moments(&p, &cm)?.report_with(&cm, 1.0).mse;
            let js = s_mmse(&m, &p, &g)?.report_with(&cm, 1.0).mse;
            let jo = oq_estimator(m.signal(), &p)?.report_with(&cm, 1.0).mse;
            worst = worst.max(jq - js).max(jq - jo);
        }
    }
    Ok((worst <= 1e-12, format!("largest J(Q-MMSE) - J(other) {worst:.2e}")))
}

fn theorem_one(opts: &ValidateOptions) -> Outcome {
    let m = reference_model(-6.0);
    let g = mmse_under_test(&m, opts);
    let best = report(&m, &g, &ReportMode::Quadrature)?.snr;
    let sy = m.obs_std_dev();
    let mut rival = report(&m, &Estimator::Identity, &ReportMode::Quadrature)?.snr;
    for k in 1..=10 {
        rival = rival.max(report(&m, &soft_limiter(0.3 * k as f64 * sy)?, &ReportMode::Quadrature)?.snr);
    }
    let p = Partition::uniform(65, -10.0, 10.0)?;
    let cm = cell_moments(&m, &p)?;
    rival = rival.max(q_mmse_from_moments(&p, &cm)?.report_with(&cm, 1.0).snr);
    let mut spread = 0.0f64;
    for a in [-2.0, 0.5, 3.0] {
        spread = spread.max((report(&m, &g.clone().scaled(a), &ReportMode::Quadrature)?.snr - best).abs());
    }
    Ok((
        best >= rival - 1e-6 && spread <= 1e-8,
        format!("MMSE SNR {best:.6}, best rival {rival:.6}, scaling spread {spread:.2e}"),
    ))
}

fn monte_carlo(opts: &ValidateOptions) -> Outcome {
    let m = reference_model(-6.0);
    let g = mmse_under_test(&m, opts);
    let q = report(&m, &g, &ReportMode::Quadrature)?;
    let mc = monte_carlo_report(&m, &g, 1, 200_000)?;
    let z = [
        (mc.report.gain - q.gain) / mc.gain_se,
        (mc.report.mse - q.mse) / mc.mse_se,
        (mc.report.snr - q.snr) / mc.snr_se,
    ];
    let worst = z.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok((worst <= 4.0, format!("largest deviation {worst:.2} standard errors")))
}

fn overload() -> Outcome {
    let m = reference_model(crate::to_db(1.0 / 16.0));
    let p = Partition::new(vec![-10.0, 10.0])?.overload_probability(&m)?;
    Ok(((0.0322..=0.0332).contains(&p), format!("P_ol at ±10 = {p:.6}")))
}

fn closed_form_available() -> Outcome {
    let m = reference_model(0.0);
    Ok((mmse_closed(&m).is_ok(), "closed form selected for the reference model".into()))
}

/// Runs every invariant suite on the reference setup.
pub fn run_validate(opts: &ValidateOptions) -> ValidationReport {
    let suites: Vec<(&'static str, Box<dyn Fn() -> Outcome>)> = vec![
        ("closed-form", Box::new(closed_form_available)),
        ("overload", Box::new(overload)),
        ("oracle", Box::new(move || closed_vs_quadrature(opts))),
        ("table-one", Box::new(move || table_one(opts))),
        ("theorem-two", Box::new(theorem_two)),
        ("convergence", Box::new(convergence)),
        ("dominance", Box::new(move || dominance(opts))),
        ("theorem-one", Box::new(move || theorem_one(opts))),
        ("monte-carlo", Box::new(move || monte_carlo(opts))),
    ];
    let checks = suites
        .into_iter()
        .map(|(suite, f)| {
            let t = Instant::now();
            let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckResult {
                suite,
                passed,
                detail,
                seconds: t.elapsed().as_secs_f64(),
            }
        })
        .collect();
    ValidationReport { checks }
}
