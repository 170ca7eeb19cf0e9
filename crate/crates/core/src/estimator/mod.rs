//! Estimators `g(y)`, their regression decomposition `g(y) = K_g x + w_g`,
//! the optimal MMSE estimator and the scalar baselines.

mod baseline;
mod mmse;
mod report;

use std::fmt;
use std::sync::Arc;

pub use baseline::{scan_soft_limiter, soft_limiter, table1, LimiterScan, Table1};
pub use mmse::{mmse_closed, mmse_numeric, ummse, MmseClosedForm, MmseNumeric};
pub use report::{monte_carlo_report, quadrature_report, report, EstimatorReport, McReport, ReportMode};

use crate::Result;

/// Piecewise-constant map: `levels[i]` on `(thresholds[i-1], thresholds[i]]`
/// with unbounded outer cells.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    thresholds: Vec<f64>,
    levels: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn new(thresholds: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if levels.len() != thresholds.len() + 1 {
            return Err(crate::Error::DimensionMismatch {
                expected: thresholds.len() + 1,
                got: levels.len(),
            });
        }
        if thresholds.windows(2).any(|w| !(w[0] < w[1])) || thresholds.iter().any(|t| !t.is_finite()) {
            return Err(crate::Error::invalid("thresholds must be finite and strictly increasing"));
        }
        Ok(Self { thresholds, levels })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Index of the cell containing `y`.
    pub fn cell(&self, y: f64) -> usize {
        self.thresholds.partition_point(|&t| t < y)
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.levels[self.cell(y)]
    }
}

/// User-supplied estimator.
#[derive(Clone)]
pub struct CustomEstimator {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    breaks: Vec<f64>,
}

impl CustomEstimator {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            breaks: Vec::new(),
        }
    }

    /// Declares points where the map is not smooth, so integrals split there.
    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomEstimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomEstimator").field("name", &self.name).finish()
    }
}

/// An estimator of `x` from `y`.
#[derive(Debug, Clone)]
pub enum Estimator {
    Identity,
    Zero,
    MmseClosed(MmseClosedForm),
    MmseNumeric(MmseNumeric),
    PiecewiseConstant(PiecewiseConstant),
    SoftLimiter { beta: f64 },
    Scaled { factor: f64, inner: Box<Estimator> },
    Custom(CustomEstimator),
}

impl Estimator {
    /// Short tag describing how the estimator was built.
    pub fn tag(&self) -> String {
        match self {
            Estimator::Identity => "identity".into(),
            Estimator::Zero => "zero".into(),
            Estimator::MmseClosed(_) => "mmse-closed".into(),
            Estimator::MmseNumeric(_) => "mmse-numeric".into(),
            Estimator::PiecewiseConstant(_) => "piecewise-constant".into(),
            Estimator::SoftLimiter { .. } => "soft-limiter".into(),
            Estimator::Scaled { factor, inner } => format!("scaled({factor}, {})", inner.tag()),
            Estimator::Custom(c) => format!("custom({})", c.name),
        }
    }

    /// `a · self`.
    pub fn scaled(self, factor: f64) -> Self {
        Estimator::Scaled {
            factor,
            inner: Box::new(self),
        }
    }

    /// Evaluates `g(y)`. Quadrature failures surface as `NaN`; use
    /// [`Estimator::try_eval`] to see the error.
    pub fn eval(&self, y: f64) -> f64 {
        self.try_eval(y).unwrap_or(f64::NAN)
    }

    pub fn try_eval(&self, y: f64) -> Result<f64> {
        Ok(match self {
            Estimator::Identity => y,
            Estimator::Zero => 0.0,
            Estimator::MmseClosed(m) => m.eval(y),
            Estimator::MmseNumeric(m) => m.try_eval(y)?,
            Estimator::PiecewiseConstant(p) => p.eval(y),
            Estimator::SoftLimiter { beta } => y.clamp(-beta, *beta),
            Estimator::Scaled { factor, inner } => factor * inner.try_eval(y)?,
            Estimator::Custom(c) => (c.f)(y),
        })
    }

    /// Points where `g` jumps or has a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Estimator::PiecewiseConstant(p) => p.thresholds.clone(),
            Estimator::SoftLimiter { beta } => vec![-beta, *beta],
            Estimator::Scaled { inner, .. } => inner.breakpoints(),
            Estimator::Custom(c) => c.breaks.clone(),
            Estimator::MmseClosed(_) | Estimator::MmseNumeric(_) => vec![0.0],
            Estimator::Identity | Estimator::Zero => Vec::new(),
        }
    }
}

impl From<PiecewiseConstant> for Estimator {
    fn from(p: PiecewiseConstant) -> Self {
        Estimator::PiecewiseConstant(p)
    }
}
