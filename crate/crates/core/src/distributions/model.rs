use super::{Distribution, LaplaceChannel};
use crate::numerics::{integrate_with_breaks, QuadratureSpec};
use crate::{Error, Result};

/// How the observation statistics `f_Y`, `F_Y` and friends are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    ClosedForm,
    Quadrature,
}

/// Additive model `y = x + n` with independent zero-mean signal and noise.
#[derive(Debug, Clone)]
pub struct ObservationModel {
    signal: Distribution,
    noise: Distribution,
    channel: Option<LaplaceChannel>,
    requested: EvalMode,
    fallback: Option<Error>,
    quad: QuadratureSpec,
}

impl ObservationModel {
    /// Builds the model, using the closed forms whenever they apply.
    pub fn new(signal: Distribution, noise: Distribution) -> Result<Self> {
        Self::with_mode(signal, noise, EvalMode::ClosedForm)
    }

    /// Builds the model in the requested mode. A closed-form request that the
    /// laws cannot honor (non-Laplace laws, or `α ≈ β_m`) falls back to
    /// quadrature; [`ObservationModel::fallback_reason`] reports why.
    pub fn with_mode(signal: Distribution, noise: Distribution, mode: EvalMode) -> Result<Self> {
        let (channel, fallback) = match mode {
            EvalMode::Quadrature => (None, None),
            EvalMode::ClosedForm => match Self::closed_channel(&signal, &noise) {
                Ok(c) => (Some(c), None),
                Err(e) => (None, Some(e)),
            },
        };
        Ok(Self {
            signal,
            noise,
            channel,
            requested: mode,
            fallback,
            quad: QuadratureSpec::default(),
        })
    }

    fn closed_channel(signal: &Distribution, noise: &Distribution) -> Result<LaplaceChannel> {
        let alpha = match signal {
            Distribution::Laplace(l) => l.rate(),
            _ => return Err(Error::ClosedFormUnavailable),
        };
        match noise {
            Distribution::Laplace(l) => LaplaceChannel::new(alpha, [(1.0, l.rate())]),
            Distribution::LaplaceMixture(m) => LaplaceChannel::new(alpha, m.weights().iter().copied().zip(m.rates())),
            _ => Err(Error::ClosedFormUnavailable),
        }
    }

    /// Replaces the quadrature tolerances used in quadrature mode.
    pub fn with_quadrature(mut self, spec: QuadratureSpec) -> Self {
        self.quad = spec;
        self
    }

    pub fn signal(&self) -> &Distribution {
        &self.signal
    }

    pub fn noise(&self) -> &Distribution {
        &self.noise
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    /// Closed-form evaluator, if the model is running in closed-form mode.
    pub fn channel(&self) -> Option<&LaplaceChannel> {
        self.channel.as_ref()
    }

    pub fn mode(&self) -> EvalMode {
        if self.channel.is_some() {
            EvalMode::ClosedForm
        } else {
            EvalMode::Quadrature
        }
    }

    pub fn requested_mode(&self) -> EvalMode {
        self.requested
    }

    /// Why a closed-form request was downgraded to quadrature, if it was.
    pub fn fallback_reason(&self) -> Option<&Error> {
        self.fallback.as_ref()
    }

    /// A copy of this model forced into quadrature mode.
    pub fn to_quadrature(&self) -> Self {
        Self {
            channel: None,
            requested: EvalMode::Quadrature,
            fallback: None,
            ..self.clone()
        }
    }

    pub fn signal_variance(&self) -> f64 {
        self.signal.variance()
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise.variance()
    }

    /// Input SNR `σ²_x/σ²_n`.
    pub fn input_snr(&self) -> f64 {
        self.signal_variance() / self.noise_variance()
    }

    pub fn obs_variance(&self) -> f64 {
        self.signal_variance() + self.noise_variance()
    }

    pub fn obs_std_dev(&self) -> f64 {
        self.obs_variance().sqrt()
    }

    /// Points where `f_Y` may fail to be smooth.
    pub fn obs_kinks(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self.signal.kinks().iter().chain(self.noise.kinks()).copied().collect();
        k.dedup();
        k
    }

    // breakpoints of an x-integrand that involves f_X(x) and a noise term at y - x
    fn x_breaks(&self, y: f64) -> Vec<f64> {
        let mut b: Vec<f64> = self.signal.kinks().to_vec();
        b.extend(self.noise.kinks().iter().map(|k| y - k));
        b
    }

    fn x_integral(&self, y: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
        integrate_with_breaks(f, f64::NEG_INFINITY, f64::INFINITY, &self.x_breaks(y), &self.quad)
    }

    /// `f_Y(y) = ∫ f_X(x) f_N(y - x) dx`.
    pub fn obs_pdf(&self, y: f64) -> Result<f64> {
        match &self.channel {
            Some(c) => Ok(c.pdf(y)),
            None => self.x_integral(y, |x| self.signal.pdf(x) * self.noise.pdf(y - x)),
        }
    }

    /// `F_Y(y) = ∫ f_X(x) F_N(y - x) dx`.
    pub fn obs_cdf(&self, y: f64) -> Result<f64> {
        if y == f64::INFINITY {
            return Ok(1.0);
        }
        if y == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        match &self.channel {
            Some(c) => Ok(c.cdf(y)),
            None if y <= 0.0 => self.x_integral(y, |x| self.signal.pdf(x) * self.noise.cdf(y - x)),
            None => Ok(1.0 - self.obs_sf(y)?),
        }
    }

    /// `1 - F_Y(y)`, accurate in the upper tail.
    pub fn obs_sf(&self, y: f64) -> Result<f64> {
        if y == f64::INFINITY {
            return Ok(0.0);
        }
        if y == f64::NEG_INFINITY {
            return Ok(1.0);
        }
        match &self.channel {
            Some(c) => Ok(c.sf(y)),
            None if y >= 0.0 => self.x_integral(y, |x| self.signal.pdf(x) * self.noise.sf(y - x)),
            None => Ok(1.0 - self.obs_cdf(y)?),
        }
    }

    /// `P{lo < y <= hi}` evaluated on the side of zero that avoids cancellation.
    pub fn obs_interval_prob(&self, lo: f64, hi: f64) -> Result<f64> {
        if lo >= 0.0 {
            Ok(self.obs_sf(lo)? - self.obs_sf(hi)?)
        } else {
            Ok(self.obs_cdf(hi)? - self.obs_cdf(lo)?)
        }
    }

    /// Cross density `∫ x f_X(x) f_N(y - x) dx`; its ratio to `f_Y(y)` is
    /// the conditional mean `E{x | y}`.
    pub fn cross_density(&self, y: f64) -> Result<f64> {
        match &self.channel {
            Some(c) => Ok(c.cross_density(y)),
            None => self.cross_density_quadrature(y),
        }
    }

    /// Cross density by quadrature regardless of mode.
    pub fn cross_density_quadrature(&self, y: f64) -> Result<f64> {
        self.x_integral(y, |x| x * self.signal.pdf(x) * self.noise.pdf(y - x))
    }

    /// `D(y) = ∫ x f_X(x) F_N(y - x) dx` by quadrature.
    pub fn d_quadrature(&self, y: f64) -> Result<f64> {
        if y.is_infinite() {
            return Ok(0.0);
        }
        if y <= 0.0 {
            self.x_integral(y, |x| x * self.signal.pdf(x) * self.noise.cdf(y - x))
        } else {
            // E{x} = 0 turns ∫ x f_X F_N into -∫ x f_X (1 - F_N)
            self.x_integral(y, |x| -x * self.signal.pdf(x) * self.noise.sf(y - x))
        }
    }
}
