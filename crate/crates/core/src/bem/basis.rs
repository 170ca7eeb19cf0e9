use std::cell::RefCell;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::BemSystem;
use crate::distributions::ObservationModel;
use crate::estimator::{CustomEstimator, Estimator, PiecewiseConstant};
use crate::numerics::{integrate_with_breaks, QuadratureSpec, SymMatrix};
use crate::quantized::{cell_moments, Partition};
use crate::{Error, Result};

/// A named real function used as a basis element.
#[derive(Clone)]
pub struct BasisFunction {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl BasisFunction {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// `y ↦ y^k`.
    pub fn power(k: i32) -> Self {
        Self::new(format!("y^{k}"), move |y| y.powi(k))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.f)(y)
    }
}

impl fmt::Debug for BasisFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BasisFunction({})", self.name)
    }
}

/// The basis `u_1, …, u_N`.
#[derive(Debug, Clone)]
pub enum BemBasis {
    /// Cell indicators of a partition.
    Rectangular(Partition),
    /// Arbitrary functions; `breaks` lists points where any of them is not smooth.
    Custom { functions: Vec<BasisFunction>, breaks: Vec<f64> },
}

impl BemBasis {
    pub fn custom(functions: Vec<BasisFunction>) -> Self {
        BemBasis::Custom {
            functions,
            breaks: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            BemBasis::Rectangular(p) => p.cells(),
            BemBasis::Custom { functions, .. } => functions.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `u_i(y)`.
    pub fn eval(&self, i: usize, y: f64) -> f64 {
        match self {
            BemBasis::Rectangular(p) => f64::from(u8::from(p.cell_of(y) == i)),
            BemBasis::Custom { functions, .. } => functions[i].eval(y),
        }
    }

    /// The estimator `Σ g_i u_i(y)`.
    pub fn estimator(&self, g: &[f64]) -> Result<Estimator> {
        if g.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: g.len(),
            });
        }
        Ok(match self {
            BemBasis::Rectangular(p) => {
                Estimator::PiecewiseConstant(PiecewiseConstant::new(p.thresholds().to_vec(), g.to_vec())?)
            }
            BemBasis::Custom { functions, breaks } => {
                let (fs, g) = (functions.clone(), g.to_vec());
                let name = fs.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join("+");
                Estimator::Custom(
                    CustomEstimator::new(format!("bem[{name}]"), move |y| fs.iter().zip(&g).map(|(f, c)| c * f.eval(y)).sum())
                        .with_breaks(breaks.clone()),
                )
            }
        })
    }
}

/// Builds `θ_i = E{x u_i(y)}` and `R_ij = E{u_i(y) u_j(y)}`.
///
/// Rectangular bases use the cell moments directly. Custom bases integrate
/// over `y` against the cross density `∫ x f_X(x) f_N(y - x) dx` and `f_Y`.
pub fn assemble(model: &ObservationModel, basis: &BemBasis) -> Result<BemSystem> {
    let sx2 = model.signal_variance();
    let (functions, breaks) = match basis {
        BemBasis::Rectangular(p) => {
            let cm = cell_moments(model, p)?;
            return BemSystem::new(cm.theta, SymMatrix::diagonal(&cm.r), sx2);
        }
        BemBasis::Custom { functions, breaks } => (functions, breaks),
    };
    let n = functions.len();
    if n == 0 {
        return Err(Error::invalid("empty basis"));
    }
    let mut br = breaks.clone();
    br.extend(model.obs_kinks());
    let spec = QuadratureSpec {
        abs_tol: 1e-12 * sx2,
        ..QuadratureSpec::tight()
    };
    let integrate_y = |h: &(dyn Fn(f64) -> f64 + Sync), cross: bool| -> Result<f64> {
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let v = integrate_with_breaks(
            |y| {
                let w = if cross { model.cross_density(y) } else { model.obs_pdf(y) };
                match w {
                    Ok(0.0) => 0.0,
                    Ok(w) => h(y) * w,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                }
            },
            f64::NEG_INFINITY,
            f64::INFINITY,
            &br,
            &spec,
        )?;
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(v),
        }
    };
    let theta = (0..n)
        .into_par_iter()
        .map(|i| integrate_y(&|y| functions[i].eval(y), true))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let entries = pairs
        .par_iter()
        .map(|&(i, j)| integrate_y(&|y| functions[i].eval(y) * functions[j].eval(y), false))
        .collect::<Result<Vec<_>>>()?;
    let mut r = SymMatrix::zeros(n);
    for (&(i, j), &v) in pairs.iter().zip(&entries) {
        if !v.is_finite() {
            return Err(Error::NonFinite(v));
        }
        r.set(i, j, v);
    }
    BemSystem::new(theta, r, sx2)
}
