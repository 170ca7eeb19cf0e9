use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::distributions::{
    Distribution, EvalMode, GaussianLaw, GaussianMixtureLaw, LaplaceLaw, LaplaceMixtureLaw, ObservationModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalKind {
    Laplace,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SignalSpec {
    #[serde(rename = "type")]
    pub kind: SignalKind,
    pub sigma_x: f64,
}

impl Default for SignalSpec {
    fn default() -> Self {
        Self {
            kind: SignalKind::Laplace,
            sigma_x: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    Laplace,
    LaplaceMixture,
    Gaussian,
    GaussianMixture,
}

/// Two-component mixtures are given by `sigma_n`, `p0` and `R_pow`
/// (`σ²_{n,0}/σ²_{n,1}`); `sigmas` and `weights` override them per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSpec {
    #[serde(rename = "type")]
    pub kind: NoiseKind,
    pub sigma_n: f64,
    pub p0: f64,
    #[serde(rename = "R_pow")]
    pub r_pow: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            kind: NoiseKind::LaplaceMixture,
            sigma_n: 4.0,
            p0: 0.9,
            r_pow: 1e-3,
            sigmas: None,
            weights: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantizerKind {
    /// `N - 1` equispaced thresholds on `[-y_max, y_max]`.
    Uniform,
    /// Lloyd-Max thresholds for the signal density.
    LloydMax,
    /// Equispaced thresholds placed for a target overload probability.
    UniformOverload,
    /// Equispaced thresholds with the overload point chosen by SNR search.
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuantizerSpec {
    pub kind: QuantizerKind,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    pub y_max: f64,
    pub p_ol: f64,
    /// Overload points for `sweep`, as multiples of `σ_y`; defaults to 60
    /// log-spaced values on `[0.5, 10]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_grid: Option<Vec<f64>>,
    /// Cell count of the optimized-overload Q-MMSE curve in sweeps; 0 disables it.
    pub optimized_n: usize,
}

impl Default for QuantizerSpec {
    fn default() -> Self {
        Self {
            kind: QuantizerKind::Uniform,
            n: vec![17, 65, 127],
            y_max: 10.0,
            p_ol: 0.0327,
            l_grid: None,
            optimized_n: 127,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub input_snr_db_min: f64,
    pub input_snr_db_max: f64,
    pub input_snr_db_step: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            input_snr_db_min: -15.0,
            input_snr_db_max: 0.0,
            input_snr_db_step: 1.0,
        }
    }
}

impl SweepSpec {
    /// Grid points from min to max inclusive.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.input_snr_db_max - self.input_snr_db_min) / self.input_snr_db_step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.input_snr_db_min + i as f64 * self.input_snr_db_step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSpec {
    pub samples: usize,
    pub seed: u64,
    /// Run at every sweep point instead of only at the configured noise level.
    pub over_sweep: bool,
}

impl Default for McSpec {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 1,
            over_sweep: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveSpec {
    pub y_min: f64,
    pub y_max: f64,
    pub step: f64,
}

impl Default for CurveSpec {
    fn default() -> Self {
        Self {
            y_min: -20.0,
            y_max: 20.0,
            step: 0.05,
        }
    }
}

impl CurveSpec {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.y_max - self.y_min) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.y_min + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSpec {
    ClosedForm,
    Quadrature,
}

/// A complete experiment description. Every section has defaults matching
/// the reference setup (Laplace signal with `σ_x = 1`, two-component Laplace
/// noise with `σ_n = 4`, `p0 = 0.9`, `R_pow = 0.001`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub signal: SignalSpec,
    pub noise: NoiseSpec,
    pub quantizer: QuantizerSpec,
    pub sweep: SweepSpec,
    pub mc: McSpec,
    pub curve: CurveSpec,
    pub mode: Option<ModeSpec>,
}

fn bad(field: &str, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("{field}: {msg}"))
}

fn positive(field: &str, v: f64) -> Result<(), HarnessError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, format!("must be positive and finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        positive("signal.sigma_x", self.signal.sigma_x)?;
        positive("noise.sigma_n", self.noise.sigma_n)?;
        positive("noise.R_pow", self.noise.r_pow)?;
        if !(0.0..=1.0).contains(&self.noise.p0) {
            return Err(bad("noise.p0", format!("must lie in [0, 1], got {}", self.noise.p0)));
        }
        if self.quantizer.n.is_empty() {
            return Err(bad("quantizer.N", "needs at least one cell count"));
        }
        if let Some(&n) = self.quantizer.n.iter().find(|&&n| n < 3 || n > crate::numerics::MAX_ORDER) {
            return Err(bad("quantizer.N", format!("cell counts must lie in [3, {}], got {n}", crate::numerics::MAX_ORDER)));
        }
        if self.quantizer.optimized_n != 0 && self.quantizer.optimized_n < 3 {
            return Err(bad("quantizer.optimized_n", "must be 0 or at least 3"));
        }
        positive("quantizer.y_max", self.quantizer.y_max)?;
        if !(self.quantizer.p_ol > 0.0 && self.quantizer.p_ol < 1.0) {
            return Err(bad("quantizer.p_ol", format!("must lie in (0, 1), got {}", self.quantizer.p_ol)));
        }
        if let Some(g) = &self.quantizer.l_grid {
            if g.is_empty() {
                return Err(bad("quantizer.l_grid", "is empty"));
            }
            for &l in g {
                positive("quantizer.l_grid", l)?;
            }
        }
        positive("sweep.input_snr_db_step", self.sweep.input_snr_db_step)?;
        if !(self.sweep.input_snr_db_min <= self.sweep.input_snr_db_max) || !self.sweep.input_snr_db_max.is_finite() || !self.sweep.input_snr_db_min.is_finite() {
            return Err(bad("sweep", "input_snr_db_min must not exceed input_snr_db_max"));
        }
        if self.mc.samples < 1 {
            return Err(bad("mc.samples", "must be at least 1"));
        }
        positive("curve.step", self.curve.step)?;
        if !(self.curve.y_min < self.curve.y_max) {
            return Err(bad("curve", "y_min must be below y_max"));
        }
        self.model().map(|_| ())
    }

    fn signal_law(&self) -> Result<Distribution, HarnessError> {
        let s = self.signal.sigma_x;
        Ok(match self.signal.kind {
            SignalKind::Laplace => LaplaceLaw::new(s).map_err(|e| bad("signal", e))?.into(),
            SignalKind::Gaussian => GaussianLaw::new(s).map_err(|e| bad("signal", e))?.into(),
        })
    }

    fn noise_law(&self) -> Result<Distribution, HarnessError> {
        let n = &self.noise;
        let weights = n.weights.clone().unwrap_or_else(|| vec![n.p0, 1.0 - n.p0]);
        let law: Distribution = match (n.kind, &n.sigmas) {
            (NoiseKind::Laplace, _) => LaplaceLaw::new(n.sigma_n).map_err(|e| bad("noise", e))?.into(),
            (NoiseKind::Gaussian, _) => GaussianLaw::new(n.sigma_n).map_err(|e| bad("noise", e))?.into(),
            (NoiseKind::LaplaceMixture, Some(s)) => LaplaceMixtureLaw::new(weights, s.clone()).map_err(|e| bad("noise", e))?.into(),
            (NoiseKind::LaplaceMixture, None) => {
                LaplaceMixtureLaw::two_component(n.sigma_n, n.p0, n.r_pow).map_err(|e| bad("noise", e))?.into()
            }
            (NoiseKind::GaussianMixture, sigmas) => {
                let s = match sigmas {
                    Some(s) => s.clone(),
                    None => {
                        let s1 = n.sigma_n / (n.p0 * n.r_pow + 1.0 - n.p0).sqrt();
                        vec![s1 * n.r_pow.sqrt(), s1]
                    }
                };
                GaussianMixtureLaw::new(weights, s).map_err(|e| bad("noise", e))?.into()
            }
        };
        Ok(law)
    }

    fn mode(&self) -> EvalMode {
        match self.mode {
            Some(ModeSpec::Quadrature) => EvalMode::Quadrature,
            _ => EvalMode::ClosedForm,
        }
    }

    /// The model at the configured noise level.
    pub fn model(&self) -> Result<ObservationModel, HarnessError> {
        ObservationModel::with_mode(self.signal_law()?, self.noise_law()?, self.mode()).map_err(|e| bad("model", e))
    }

    /// The model with noise rescaled to input SNR `snr_db`, keeping the
    /// mixture shape.
    pub fn model_at_snr(&self, snr_db: f64) -> Result<ObservationModel, HarnessError> {
        let signal = self.signal_law()?;
        let sigma_n = signal.std_dev() * 10f64.powf(-snr_db / 20.0);
        let noise = self.noise_law()?.with_std_dev(sigma_n).map_err(|e| bad("noise", e))?;
        ObservationModel::with_mode(signal, noise, self.mode()).map_err(|e| bad("model", e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_reference_setup() {
        let c = ExperimentConfig::from_json("{}").unwrap();
        let m = c.model().unwrap();
        assert!((m.noise_variance() - 16.0).abs() < 1e-12);
        assert_eq!(c.quantizer.n, vec![17, 65, 127]);
        assert_eq!(c.sweep.points().len(), 16);
    }

    #[test]
    fn round_trip() {
        let mut c = ExperimentConfig::default();
        c.noise.sigmas = Some(vec![0.5, 9.0]);
        c.noise.weights = Some(vec![0.8, 0.2]);
        c.quantizer.l_grid = Some(vec![1.0, 2.0]);
        c.mode = Some(ModeSpec::Quadrature);
        let again = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(c, again);
        let d = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn diagnostics_name_the_problem() {
        let e = ExperimentConfig::from_json("{\"noise\": {\"type\": \"laplace-mixture\", \"sigma_n\": -1, \"p0\": 0.9, \"R_pow\": 0.001}}").unwrap_err();
        assert!(e.to_string().contains("noise.sigma_n"), "{e}");
        let e = ExperimentConfig::from_json("{\n  \"bogus\": 1\n}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = ExperimentConfig::from_json("{\"sweep\": {\"input_snr_db_min\": 0, \"input_snr_db_max\": -3, \"input_snr_db_step\": 1}}").unwrap_err();
        assert!(e.to_string().contains("sweep"));
    }

    #[test]
    fn snr_rescaling_keeps_shape() {
        let c = ExperimentConfig::default();
        let m = c.model_at_snr(-12.0).unwrap();
        assert!((crate::to_db(m.input_snr()) + 12.0).abs() < 1e-10);
        match m.noise() {
            Distribution::LaplaceMixture(l) => {
                assert!((l.power_ratio().unwrap() - 1e-3).abs() < 1e-12);
                assert!((l.weights()[0] - 0.9).abs() < 1e-15);
            }
            _ => panic!("noise family changed"),
        }
    }

    #[test]
    fn sweep_grid_is_inclusive() {
        let s = SweepSpec {
            input_snr_db_min: -12.0,
            input_snr_db_max: 0.0,
            input_snr_db_step: 6.0,
        };
        assert_eq!(s.points(), vec![-12.0, -6.0, 0.0]);
    }
}
