use std::cell::RefCell;

use rayon::prelude::*;

use super::{cell_moments, q_mmse_from_moments, Partition, QuantizedEstimator};
use crate::distributions::ObservationModel;
use crate::numerics::find_root;
use crate::{Error, Result};

/// `N - 1` equispaced thresholds on `[-L, L]`, with `L` chosen so that
/// `P{y < -L} + P{y > L} = p_ol`.
pub fn uniform_partition_for_overload(model: &ObservationModel, cells: usize, p_ol: f64) -> Result<Partition> {
    if cells < 3 {
        return Err(Error::invalid(format!("overload design needs at least 3 cells, got {cells}")));
    }
    if !(p_ol > 0.0 && p_ol < 1.0) {
        return Err(Error::NoBracket {
            lo: 0.0,
            hi: f64::INFINITY,
            f_lo: 1.0 - p_ol,
            f_hi: -p_ol,
        });
    }
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let overload = |l: f64| -> f64 {
        let v = model.obs_cdf(-l).and_then(|a| Ok(a + model.obs_sf(l)?));
        v.unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        })
    };
    let sy = model.obs_std_dev();
    let mut hi = sy;
    while overload(hi) > p_ol && hi < 1e4 * sy {
        hi *= 2.0;
    }
    let root = find_root(|l| overload(l) - p_ol, 0.0, hi, 1e-13 * sy);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Partition::symmetric_uniform(cells, root?)
}

/// Outcome of an exhaustive search over the overload point `L`.
#[derive(Debug, Clone)]
pub struct OverloadDesign {
    pub l: f64,
    pub estimator: QuantizedEstimator,
    /// SNR gain `γ_out / γ_in` at the chosen `L`.
    pub gain: f64,
    pub overload_probability: f64,
    /// `(L, gain)` for every grid point, sorted by `L`.
    pub scan: Vec<(f64, f64)>,
}

/// 60 log-spaced values on `[0.5 σ_y, 10 σ_y]`.
pub fn default_overload_grid(model: &ObservationModel) -> Vec<f64> {
    let sy = model.obs_std_dev();
    let (a, b) = ((0.5 * sy).ln(), (10.0 * sy).ln());
    (0..60).map(|i| (a + (b - a) * i as f64 / 59.0).exp()).collect()
}

/// Q-MMSE on symmetric uniform partitions `[-L, L]` for every `L` in the
/// grid; keeps the largest SNR gain, the smaller `L` on ties.
pub fn optimize_overload(model: &ObservationModel, cells: usize, grid: &[f64]) -> Result<OverloadDesign> {
    if grid.is_empty() {
        return Err(Error::invalid("overload grid is empty"));
    }
    if cells < 3 {
        return Err(Error::invalid(format!("overload design needs at least 3 cells, got {cells}")));
    }
    let mut grid = grid.to_vec();
    if grid.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(Error::invalid("overload points must be positive and finite"));
    }
    grid.sort_by(f64::total_cmp);
    let input_snr = model.input_snr();
    let sx2 = model.signal_variance();
    let scan = grid
        .par_iter()
        .map(|&l| {
            let p = Partition::symmetric_uniform(cells, l)?;
            let cm = cell_moments(model, &p)?;
            let q = q_mmse_from_moments(&p, &cm)?;
            let gain = q.report_with(&cm, sx2).snr / input_snr;
            Ok((l, gain, q))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, s) in scan.iter().enumerate() {
        if s.1 > scan[best].1 {
            best = i;
        }
    }
    let (l, gain, estimator) = scan[best].clone();
    let overload_probability = estimator.partition().overload_probability(model)?;
    Ok(OverloadDesign {
        l,
        estimator,
        gain,
        overload_probability,
        scan: scan.into_iter().map(|(l, g, _)| (l, g)).collect(),
    })
}
