use rayon::prelude::*;

use super::Partition;
use crate::distributions::{Distribution, EvalMode, ObservationModel};
use crate::estimator::{Estimator, EstimatorReport, PiecewiseConstant};
use crate::Result;

/// Cells with `R_ii` below this carry no usable probability.
pub const EMPTY_CELL: f64 = 1e-14;

/// `D(y) = ∫ x f_X(x) F_N(y - x) dx`, in closed form when the model allows it.
pub fn d_func(model: &ObservationModel, y: f64) -> Result<f64> {
    match model.channel() {
        Some(c) => Ok(c.d(y)),
        None => model.d_quadrature(y),
    }
}

/// `θ_i = E{x 1(y ∈ cell i)}` and `R_ii = P{y ∈ cell i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMoments {
    pub theta: Vec<f64>,
    pub r: Vec<f64>,
    pub empty: Vec<bool>,
    pub mode: EvalMode,
}

impl CellMoments {
    pub fn cells(&self) -> usize {
        self.r.len()
    }

    /// `E{x g}` and `E{g²}` for levels `g` on the same partition.
    pub fn moments_of(&self, levels: &[f64]) -> (f64, f64) {
        let cross = levels.iter().zip(&self.theta).map(|(g, t)| g * t).sum();
        let power = levels.iter().zip(&self.r).map(|(g, r)| g * g * r).sum();
        (cross, power)
    }
}

struct Point {
    cdf: f64,
    sf: f64,
    d: f64,
}

fn point(model: &ObservationModel, y: f64) -> Result<Point> {
    Ok(Point {
        cdf: model.obs_cdf(y)?,
        sf: model.obs_sf(y)?,
        d: d_func(model, y)?,
    })
}

pub fn cell_moments(model: &ObservationModel, p: &Partition) -> Result<CellMoments> {
    let pts: Vec<Point> = match model.mode() {
        EvalMode::ClosedForm => p.thresholds().iter().map(|&y| point(model, y)).collect::<Result<_>>()?,
        EvalMode::Quadrature => p.thresholds().par_iter().map(|&y| point(model, y)).collect::<Result<_>>()?,
    };
    let n = p.cells();
    let mut theta = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.checked_sub(1).map(|k| &pts[k]);
        let hi = pts.get(i);
        let d_lo = lo.map_or(0.0, |q| q.d);
        let d_hi = hi.map_or(0.0, |q| q.d);
        theta.push(d_hi - d_lo);
        // difference on the side of zero where the tail is small
        let prob = match (lo, hi) {
            (None, None) => 1.0,
            (None, Some(h)) => h.cdf,
            (Some(l), None) => l.sf,
            (Some(l), Some(h)) => {
                if p.thresholds()[i - 1] >= 0.0 {
                    l.sf - h.sf
                } else {
                    h.cdf - l.cdf
                }
            }
        };
        r.push(prob.max(0.0));
    }
    let empty = r.iter().map(|&v| v < EMPTY_CELL).collect();
    Ok(CellMoments {
        theta,
        r,
        empty,
        mode: model.mode(),
    })
}

/// `J = σ_x² - Σ θ_i²/R_ii` over non-empty cells.
pub fn q_mmse_mse(moments: &CellMoments, sigma_x2: f64) -> f64 {
    let explained: f64 = moments
        .theta
        .iter()
        .zip(&moments.r)
        .zip(&moments.empty)
        .filter(|(_, &e)| !e)
        .map(|((t, r), _)| t * t / r)
        .sum();
    sigma_x2 - explained
}

/// How a quantized estimator's levels were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantizerKind {
    QMmse,
    SMmse,
    Oq,
    Custom,
}

impl QuantizerKind {
    pub fn label(self) -> &'static str {
        match self {
            QuantizerKind::QMmse => "q-mmse",
            QuantizerKind::SMmse => "s-mmse",
            QuantizerKind::Oq => "oq",
            QuantizerKind::Custom => "custom",
        }
    }
}

/// Piecewise-constant estimator on a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedEstimator {
    partition: Partition,
    levels: Vec<f64>,
    kind: QuantizerKind,
}

impl QuantizedEstimator {
    pub fn new(partition: Partition, levels: Vec<f64>, kind: QuantizerKind) -> Result<Self> {
        if levels.len() != partition.cells() {
            return Err(crate::Error::DimensionMismatch {
                expected: partition.cells(),
                got: levels.len(),
            });
        }
        if let Some(v) = levels.iter().find(|v| !v.is_finite()) {
            return Err(crate::Error::NonFinite(*v));
        }
        Ok(Self { partition, levels, kind })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn kind(&self) -> QuantizerKind {
        self.kind
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.levels[self.partition.cell_of(y)]
    }

    pub fn to_estimator(&self) -> Estimator {
        Estimator::PiecewiseConstant(
            PiecewiseConstant::new(self.partition.thresholds().to_vec(), self.levels.clone())
                .expect("partition and levels validated on construction"),
        )
    }

    /// Report from the cell moments, no integration over `y`.
    pub fn report(&self, model: &ObservationModel) -> Result<EstimatorReport> {
        Ok(self.report_with(&cell_moments(model, &self.partition)?, model.signal_variance()))
    }

    /// Report from precomputed moments on the same partition.
    pub fn report_with(&self, moments: &CellMoments, sigma_x2: f64) -> EstimatorReport {
        let (cross, power) = moments.moments_of(&self.levels);
        EstimatorReport::from_moments(cross, power, sigma_x2)
    }
}

/// Levels `θ_i / R_ii`, `0` on empty cells.
pub fn q_mmse_from_moments(p: &Partition, moments: &CellMoments) -> Result<QuantizedEstimator> {
    let levels = moments
        .theta
        .iter()
        .zip(&moments.r)
        .zip(&moments.empty)
        .map(|((t, r), &e)| if e { 0.0 } else { t / r })
        .collect();
    QuantizedEstimator::new(p.clone(), levels, QuantizerKind::QMmse)
}

/// Best piecewise-constant estimator on `p`: `g_i = E{x | y ∈ cell i}`.
pub fn q_mmse(model: &ObservationModel, p: &Partition) -> Result<QuantizedEstimator> {
    q_mmse_from_moments(p, &cell_moments(model, p)?)
}

/// Samples `g_mmse` at cell midpoints. The unbounded outer cells are sampled
/// half a mean interior width beyond the outer thresholds; with a single
/// threshold that width is taken as `σ_y`.
pub fn s_mmse(model: &ObservationModel, p: &Partition, g_mmse: &Estimator) -> Result<QuantizedEstimator> {
    let t = p.thresholds();
    if t.is_empty() {
        return Err(crate::Error::invalid("sampling needs at least one finite threshold"));
    }
    let delta = p.mean_interior_width().unwrap_or_else(|| model.obs_std_dev());
    let points = (0..p.cells()).map(|i| match p.bounds(i) {
        (lo, hi) if lo.is_infinite() => hi - 0.5 * delta,
        (lo, hi) if hi.is_infinite() => lo + 0.5 * delta,
        (lo, hi) => 0.5 * (lo + hi),
    });
    let levels = points.map(|y| g_mmse.try_eval(y)).collect::<Result<Vec<_>>>()?;
    QuantizedEstimator::new(p.clone(), levels, QuantizerKind::SMmse)
}

/// Levels are conditional means of the signal alone over the cells of `p`,
/// ignoring the noise. A cell with no signal probability gets its finite
/// endpoint nearest the origin, which keeps the levels monotone.
pub fn oq_estimator(signal: &Distribution, p: &Partition) -> Result<QuantizedEstimator> {
    let levels = (0..p.cells())
        .map(|i| {
            let (lo, hi) = p.bounds(i);
            if signal.interval_prob(lo, hi) > 1e-300 {
                signal.conditional_mean(lo, hi)
            } else if hi <= 0.0 {
                hi
            } else {
                lo
            }
        })
        .collect();
    QuantizedEstimator::new(p.clone(), levels, QuantizerKind::Oq)
}
