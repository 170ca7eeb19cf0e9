use std::cell::RefCell;

use rayon::prelude::*;

use super::Estimator;
use crate::distributions::ObservationModel;
use crate::numerics::{integrate_with_breaks, rng_uniform, QuadratureSpec};
use crate::{Error, Result};

const MC_CHUNK: usize = 1 << 16;

/// Regression decomposition of an estimator under a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorReport {
    /// `K_g = E{x g(y)} / σ_x²`
    pub gain: f64,
    /// `σ_w² = E{g²} - K_g² σ_x²`
    pub output_noise_var: f64,
    /// `γ_g = K_g² σ_x² / σ_w²`; `0` when `g ≡ 0`, `+∞` when the output is noiseless.
    pub snr: f64,
    /// `J_g = E{(g(y) - x)²}`
    pub mse: f64,
    /// `E{g²}`
    pub output_power: f64,
}

impl EstimatorReport {
    /// Builds the report from the two moments `E{x g}` and `E{g²}`.
    pub fn from_moments(cross: f64, power: f64, sigma_x2: f64) -> Self {
        let gain = cross / sigma_x2;
        let signal = gain * gain * sigma_x2;
        let mse = (power - 2.0 * cross + sigma_x2).max(0.0);
        if power <= 1e-14 * sigma_x2 {
            return Self {
                gain,
                output_noise_var: power.max(0.0),
                snr: 0.0,
                mse,
                output_power: power.max(0.0),
            };
        }
        let noise = power - signal;
        let (noise, snr) = if noise <= 1e-12 * power {
            (0.0, f64::INFINITY)
        } else {
            (noise, signal / noise)
        };
        Self {
            gain,
            output_noise_var: noise,
            snr,
            mse,
            output_power: power,
        }
    }

    pub fn snr_db(&self) -> f64 {
        crate::to_db(self.snr)
    }
}

/// How [`report`] evaluates the expectations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReportMode {
    /// Deterministic quadrature over `y`.
    Quadrature,
    /// Empirical means over `samples` paired draws of `(x, n)`.
    MonteCarlo { seed: u64, samples: usize },
}

/// Monte-Carlo estimates with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McReport {
    pub report: EstimatorReport,
    pub gain_se: f64,
    pub mse_se: f64,
    pub snr_se: f64,
    pub output_power_se: f64,
    pub samples: usize,
}

pub fn report(model: &ObservationModel, g: &Estimator, mode: &ReportMode) -> Result<EstimatorReport> {
    match *mode {
        ReportMode::Quadrature => quadrature_report(model, g, &QuadratureSpec::tight()),
        ReportMode::MonteCarlo { seed, samples } => monte_carlo_report(model, g, seed, samples).map(|r| r.report),
    }
}

/// `E{x g} = ∫ g(y) ∫ x f_X(x) f_N(y-x) dx dy`, `E{g²} = ∫ g² f_Y dy`.
pub fn quadrature_report(model: &ObservationModel, g: &Estimator, spec: &QuadratureSpec) -> Result<EstimatorReport> {
    let sx2 = model.signal_variance();
    if let Estimator::Zero = g {
        return Ok(EstimatorReport::from_moments(0.0, 0.0, sx2));
    }
    let mut breaks = g.breakpoints();
    breaks.extend(model.obs_kinks());
    breaks.retain(|b| b.is_finite());
    let spec = QuadratureSpec {
        abs_tol: spec.abs_tol * sx2,
        ..*spec
    };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let guard = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let eval = |y: f64| guard(g.try_eval(y));
    let cross = integrate_with_breaks(
        |y| {
            let c = guard(model.cross_density(y));
            if c == 0.0 {
                0.0
            } else {
                eval(y) * c
            }
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &breaks,
        &spec,
    )?;
    let power = integrate_with_breaks(
        |y| {
            let f = guard(model.obs_pdf(y));
            if f == 0.0 {
                0.0
            } else {
                let v = eval(y);
                v * v * f
            }
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &breaks,
        &spec,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(EstimatorReport::from_moments(cross, power, sx2))
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    n: f64,
    xg: f64,
    gg: f64,
    xg2: f64,
    gg2: f64,
    xg_gg: f64,
    e2: f64,
    e4: f64,
}

impl Sums {
    fn merge(mut self, o: &Sums) -> Sums {
        self.n += o.n;
        self.xg += o.xg;
        self.gg += o.gg;
        self.xg2 += o.xg2;
        self.gg2 += o.gg2;
        self.xg_gg += o.xg_gg;
        self.e2 += o.e2;
        self.e4 += o.e4;
        self
    }
}

/// Monte-Carlo report over `samples` draws. Chunks of 65536 draws use
/// independent sub-streams of `seed` and are reduced in order, so the result
/// does not depend on the thread count.
pub fn monte_carlo_report(model: &ObservationModel, g: &Estimator, seed: u64, samples: usize) -> Result<McReport> {
    if samples < 2 {
        return Err(Error::invalid("Monte-Carlo needs at least 2 samples"));
    }
    let root = rng_uniform(seed);
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<Result<Sums>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = root.fork(c as u64);
            let len = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut s = Sums::default();
            for _ in 0..len {
                let x = model.signal().sample(&mut rng);
                let n = model.noise().sample(&mut rng);
                let v = g.try_eval(x + n)?;
                if !v.is_finite() {
                    return Err(Error::NonFinite(v));
                }
                let (a, b, e) = (x * v, v * v, (v - x) * (v - x));
                s.n += 1.0;
                s.xg += a;
                s.gg += b;
                s.xg2 += a * a;
                s.gg2 += b * b;
                s.xg_gg += a * b;
                s.e2 += e;
                s.e4 += e * e;
            }
            Ok(s)
        })
        .collect();
    let mut s = Sums::default();
    for p in &parts {
        s = s.merge(p.as_ref().map_err(Clone::clone)?);
    }
    let m = s.n;
    let sx2 = model.signal_variance();
    let (a, b) = (s.xg / m, s.gg / m);
    let var_a = (s.xg2 / m - a * a).max(0.0) / (m - 1.0);
    let var_b = (s.gg2 / m - b * b).max(0.0) / (m - 1.0);
    let cov_ab = (s.xg_gg / m - a * b) / (m - 1.0);
    let j = s.e2 / m;
    let var_j = (s.e4 / m - j * j).max(0.0) / (m - 1.0);
    let mut report = EstimatorReport::from_moments(a, b, sx2);
    report.mse = j;
    // delta method for γ = a² / (σ_x² b - a²)
    let den = sx2 * b - a * a;
    let snr_se = if report.snr.is_finite() && den > 0.0 {
        let da = 2.0 * a * sx2 * b / (den * den);
        let db = -a * a * sx2 / (den * den);
        (da * da * var_a + db * db * var_b + 2.0 * da * db * cov_ab).max(0.0).sqrt()
    } else {
        0.0
    };
    Ok(McReport {
        report,
        gain_se: var_a.sqrt() / sx2,
        mse_se: var_j.sqrt(),
        snr_se,
        output_power_se: var_b.sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{GaussianLaw, LaplaceLaw, LaplaceMixtureLaw};
    use crate::estimator::{mmse_closed, mmse_numeric, soft_limiter, ummse};
    use crate::numerics::integrate;

    fn paper_model(sigma_n: f64) -> ObservationModel {
        ObservationModel::new(
            LaplaceLaw::new(1.0).unwrap().into(),
            LaplaceMixtureLaw::two_component(sigma_n, 0.9, 1e-3).unwrap().into(),
        )
        .unwrap()
    }

    // E{x g(x+n)} and E{g(x+n)^2} as iterated integrals over (x, n)
    fn double_integral_oracle(model: &ObservationModel, g: &Estimator) -> (f64, f64) {
        let spec = QuadratureSpec::new(1e-11, 1e-10, 4000).unwrap();
        let sx = model.signal();
        let nz = model.noise();
        let inner = |x: f64, sq: bool| {
            let mut br = vec![0.0, -x];
            br.extend(g.breakpoints().iter().map(|b| b - x));
            integrate_with_breaks(
                |n| {
                    let v = g.eval(x + n);
                    (if sq { v * v } else { x * v }) * nz.pdf(n)
                },
                f64::NEG_INFINITY,
                f64::INFINITY,
                &br,
                &spec,
            )
            .unwrap()
        };
        let cross = integrate_with_breaks(|x| inner(x, false) * sx.pdf(x), f64::NEG_INFINITY, f64::INFINITY, &[0.0], &spec).unwrap();
        let power = integrate_with_breaks(|x| inner(x, true) * sx.pdf(x), f64::NEG_INFINITY, f64::INFINITY, &[0.0], &spec).unwrap();
        (cross, power)
    }

    #[test]
    fn identity_and_zero() {
        let m = paper_model(2.0);
        let r = report(&m, &Estimator::Identity, &ReportMode::Quadrature).unwrap();
        assert!((r.gain - 1.0).abs() < 1e-9);
        assert!((r.output_noise_var - 4.0).abs() < 1e-8);
        assert!((r.snr - 0.25).abs() < 1e-9);
        assert!((r.mse - 4.0).abs() < 1e-8);
        let z = report(&m, &Estimator::Zero, &ReportMode::Quadrature).unwrap();
        assert_eq!((z.gain, z.snr), (0.0, 0.0));
        assert!((z.mse - 1.0).abs() < 1e-14);
    }

    #[test]
    fn noiseless_output_is_infinite_snr() {
        let r = EstimatorReport::from_moments(0.5, 0.25, 1.0);
        assert!(r.snr.is_infinite());
        assert_eq!(r.output_noise_var, 0.0);
    }

    #[test]
    fn mmse_matches_double_integral() {
        // input SNR -12 dB
        let m = paper_model(10f64.powf(0.6));
        let g = mmse_closed(&m).unwrap();
        let r = report(&m, &g, &ReportMode::Quadrature).unwrap();
        let (c, p) = double_integral_oracle(&m, &g);
        assert!((r.gain - c).abs() < 1e-7, "{} {}", r.gain, c);
        assert!((r.output_power - p).abs() < 1e-7, "{} {}", r.output_power, p);
    }

    #[test]
    fn soft_limiter_matches_double_integral() {
        let m = paper_model(3.0);
        let g = soft_limiter(2.5).unwrap();
        let r = report(&m, &g, &ReportMode::Quadrature).unwrap();
        let (c, p) = double_integral_oracle(&m, &g);
        assert!((r.gain - c).abs() < 1e-8);
        assert!((r.output_power - p).abs() < 1e-8);
    }

    #[test]
    fn table_one_identities() {
        for sn in [1.0, 4.0, 10f64.powf(0.6)] {
            let m = paper_model(sn);
            let r = report(&m, &mmse_closed(&m).unwrap(), &ReportMode::Quadrature).unwrap();
            let k = r.gain;
            assert!((0.0..=1.0).contains(&k));
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
            assert!(rel(r.output_power, k) < 1e-6);
            assert!(rel(r.mse, 1.0 - k) < 1e-6);
            assert!(rel(r.output_noise_var, k * (1.0 - k)) < 1e-6);
            assert!(rel(r.snr, k / (1.0 - k)) < 1e-6);
            assert!(rel(r.snr, (1.0 - r.mse) / r.mse) < 1e-6);
        }
    }

    #[test]
    fn ummse_properties() {
        let m = paper_model(4.0);
        let g = mmse_closed(&m).unwrap();
        let r = report(&m, &g, &ReportMode::Quadrature).unwrap();
        let u = ummse(g, r.gain).unwrap();
        let ru = report(&m, &u, &ReportMode::Quadrature).unwrap();
        assert!((ru.gain - 1.0).abs() < 1e-8);
        assert!((ru.snr - r.snr).abs() < 1e-8);
        assert!((ru.mse - r.mse / r.gain).abs() < 1e-7);
    }

    #[test]
    fn scaling_leaves_snr_alone() {
        let m = paper_model(4.0);
        let g = mmse_closed(&m).unwrap();
        let r = report(&m, &g, &ReportMode::Quadrature).unwrap();
        for a in [-2.0, 0.5, 3.0] {
            let s = report(&m, &g.clone().scaled(a), &ReportMode::Quadrature).unwrap();
            assert!((s.snr - r.snr).abs() < 1e-8, "{a}");
        }
    }

    #[test]
    fn gaussian_pair_numeric_mmse() {
        let m = ObservationModel::new(GaussianLaw::new(1.0).unwrap().into(), GaussianLaw::new(1.0).unwrap().into()).unwrap();
        let r = quadrature_report(&m, &mmse_numeric(&m), &QuadratureSpec::default()).unwrap();
        assert!((r.gain - 0.5).abs() < 1e-7);
        assert!((r.snr - 1.0).abs() < 1e-6);
    }

    #[test]
    fn decomposition_invariants() {
        let m = paper_model(2.0);
        for g in [Estimator::Identity, soft_limiter(1.0).unwrap(), mmse_closed(&m).unwrap().scaled(1.7)] {
            let r = report(&m, &g, &ReportMode::Quadrature).unwrap();
            assert!((r.output_power - (r.gain * r.gain + r.output_noise_var)).abs() < 1e-10);
            let j = (1.0 - r.gain).powi(2) + r.gain * r.gain / r.snr;
            assert!((r.mse - j).abs() < 1e-9);
        }
    }

    #[test]
    fn monte_carlo_is_deterministic_and_close() {
        let m = paper_model(2.0);
        let g = mmse_closed(&m).unwrap();
        let a = monte_carlo_report(&m, &g, 7, 200_000).unwrap();
        let b = monte_carlo_report(&m, &g, 7, 200_000).unwrap();
        assert_eq!(a, b);
        let q = report(&m, &g, &ReportMode::Quadrature).unwrap();
        assert!((a.report.gain - q.gain).abs() < 5.0 * a.gain_se);
        assert!((a.report.mse - q.mse).abs() < 5.0 * a.mse_se);
        assert!((a.report.snr - q.snr).abs() < 5.0 * a.snr_se);
    }

    #[test]
    fn monte_carlo_identity_gain() {
        let m = paper_model(1.0);
        let r = monte_carlo_report(&m, &Estimator::Identity, 1, 100_000).unwrap();
        assert!((r.report.gain - 1.0).abs() < 5.0 * r.gain_se);
        assert!(monte_carlo_report(&m, &Estimator::Identity, 1, 1).is_err());
    }

    #[test]
    fn helper_integral_sane() {
        let v = integrate(|x| (-x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, &QuadratureSpec::default()).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-9);
    }
}
