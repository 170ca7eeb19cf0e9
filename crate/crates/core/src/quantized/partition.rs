use crate::distributions::ObservationModel;
use crate::{Error, Result};

/// Thresholds `y_1 < … < y_{N-1}` splitting the real line into `N` cells
/// `(y_{i-1}, y_i]`, with `y_0 = -∞` and `y_N = +∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    thresholds: Vec<f64>,
}

impl Partition {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("partition thresholds must be finite"));
        }
        if thresholds.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("partition thresholds must be strictly increasing"));
        }
        Ok(Self { thresholds })
    }

    /// The single cell covering the whole line.
    pub fn whole_line() -> Self {
        Self { thresholds: Vec::new() }
    }

    /// `cells` cells whose `cells - 1` thresholds are equispaced on `[lo, hi]`.
    pub fn uniform(cells: usize, lo: f64, hi: f64) -> Result<Self> {
        if cells == 0 {
            return Err(Error::invalid("a partition needs at least one cell"));
        }
        if !(lo < hi) {
            return Err(Error::invalid(format!("empty range [{lo}, {hi}]")));
        }
        let t = match cells {
            1 => Vec::new(),
            2 => vec![0.5 * (lo + hi)],
            _ => {
                let k = (cells - 2) as f64;
                (0..cells - 1).map(|i| lo + (hi - lo) * i as f64 / k).collect()
            }
        };
        Self::new(t)
    }

    /// Uniform partition with outer thresholds at `±l`.
    pub fn symmetric_uniform(cells: usize, l: f64) -> Result<Self> {
        Self::uniform(cells, -l, l)
    }

    /// Number of cells `N`.
    pub fn cells(&self) -> usize {
        self.thresholds.len() + 1
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// `(y_{i-1}, y_i)` for cell `i` (0-based).
    pub fn bounds(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { f64::NEG_INFINITY } else { self.thresholds[i - 1] };
        let hi = self.thresholds.get(i).copied().unwrap_or(f64::INFINITY);
        (lo, hi)
    }

    /// Index of the cell containing `y`.
    pub fn cell_of(&self, y: f64) -> usize {
        self.thresholds.partition_point(|&t| t < y)
    }

    /// Mean width of the bounded cells, if any.
    pub fn mean_interior_width(&self) -> Option<f64> {
        let t = &self.thresholds;
        (t.len() >= 2).then(|| (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64)
    }

    /// Probability that `y` falls in one of the two unbounded cells.
    pub fn overload_probability(&self, model: &ObservationModel) -> Result<f64> {
        match (self.thresholds.first(), self.thresholds.last()) {
            (Some(&a), Some(&b)) => Ok(model.obs_cdf(a)? + model.obs_sf(b)?),
            _ => Ok(0.0),
        }
    }

    /// Partition with cell `i` split at `at`, which must be inside the cell.
    pub fn split(&self, i: usize, at: f64) -> Result<Self> {
        let (lo, hi) = self.bounds(i);
        if !(lo < at && at < hi) {
            return Err(Error::invalid(format!("split point {at} outside cell ({lo}, {hi})")));
        }
        let mut t = self.thresholds.clone();
        t.insert(i, at);
        Self::new(t)
    }
}
