use super::Estimator;
use crate::distributions::{LaplaceChannel, ObservationModel};
use crate::numerics::{integrate_with_breaks, QuadratureSpec};
use crate::{Error, Result};

/// Closed-form conditional mean for a Laplace signal in Laplace-mixture noise:
///
/// `g(y) = sgn(y) Σ p_m [C_{1,m}(e^{-β_m|y|} - e^{-α|y|}) - C_{2,m} β_m |y| e^{-α|y|}]
///                / Σ p_m C_{2,m}(α e^{-β_m|y|} - β_m e^{-α|y|})`
///
/// with `C_{1,m} = α²β_m²/(α² - β_m²)²` and `C_{2,m} = αβ_m/(2(α² - β_m²))`.
#[derive(Debug, Clone, PartialEq)]
pub struct MmseClosedForm {
    alpha: f64,
    // (p_m, β_m, C_{1,m}, C_{2,m})
    terms: Vec<(f64, f64, f64, f64)>,
    shift: f64,
}

impl MmseClosedForm {
    pub fn from_channel(channel: &LaplaceChannel) -> Self {
        let a = channel.alpha();
        let terms = channel
            .terms()
            .iter()
            .map(|&(p, b)| {
                let d = a * a - b * b;
                (p, b, a * a * b * b / (d * d), a * b / (2.0 * d))
            })
            .collect();
        Self {
            alpha: a,
            terms,
            shift: channel.slowest_rate(),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `C_{1,m}` constants.
    pub fn c1(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.2).collect()
    }

    /// `C_{2,m}` constants.
    pub fn c2(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.3).collect()
    }

    /// Copy with every `C_{1,m}` multiplied by `1 + rel`. Only useful to
    /// check that validation suites notice a corrupted constant.
    pub fn with_perturbed_c1(&self, rel: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.2 *= 1.0 + rel;
        }
        out
    }

    pub fn eval(&self, y: f64) -> f64 {
        let yy = y.abs();
        let a = self.alpha;
        // both sums carry the common factor e^{-shift |y|}; drop it so large |y| does not underflow
        let ea = (-(a - self.shift) * yy).exp();
        let (mut num, mut den) = (0.0, 0.0);
        for &(p, b, c1, c2) in &self.terms {
            let eb = (-(b - self.shift) * yy).exp();
            num += p * (c1 * (eb - ea) - c2 * b * yy * ea);
            den += p * c2 * (a * eb - b * ea);
        }
        let v = num / den;
        if y < 0.0 {
            -v
        } else {
            v
        }
    }
}

/// Conditional mean `E{x|y} = ∫ x f_N(y-x) f_X(x) dx / f_Y(y)` by quadrature.
#[derive(Debug, Clone)]
pub struct MmseNumeric {
    model: ObservationModel,
}

impl MmseNumeric {
    pub fn new(model: &ObservationModel) -> Self {
        Self {
            model: model.to_quadrature(),
        }
    }

    pub fn try_eval(&self, y: f64) -> Result<f64> {
        let signal = self.model.signal();
        let noise = self.model.noise();
        let mut breaks = signal.kinks().to_vec();
        breaks.extend(noise.kinks().iter().map(|k| y - k));
        let base = self.model.quadrature();
        // relative accuracy matters here, far-tail densities are tiny
        let rel = QuadratureSpec {
            abs_tol: f64::MIN_POSITIVE,
            rel_tol: base.rel_tol.min(1e-11),
            max_subdivisions: base.max_subdivisions.max(4000),
        };
        let fy = integrate_with_breaks(|x| signal.pdf(x) * noise.pdf(y - x), f64::NEG_INFINITY, f64::INFINITY, &breaks, &rel)?;
        if !(fy >= 1e-300) {
            return Err(Error::DivisionNearZero(fy));
        }
        let scale = signal.std_dev();
        let cross_spec = QuadratureSpec {
            abs_tol: 1e-13 * fy * scale,
            ..rel
        };
        let num = integrate_with_breaks(
            |x| x * signal.pdf(x) * noise.pdf(y - x),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &breaks,
            &cross_spec,
        )?;
        Ok(num / fy)
    }
}

/// The optimal estimator in closed form; needs a Laplace signal, Laplace or
/// Laplace-mixture noise and `α ≠ β_m`.
pub fn mmse_closed(model: &ObservationModel) -> Result<Estimator> {
    match model.channel() {
        Some(c) => Ok(Estimator::MmseClosed(MmseClosedForm::from_channel(c))),
        None => Err(model.fallback_reason().cloned().unwrap_or(Error::ClosedFormUnavailable)),
    }
}

/// The optimal estimator by quadrature, valid for any model.
pub fn mmse_numeric(model: &ObservationModel) -> Estimator {
    Estimator::MmseNumeric(MmseNumeric::new(model))
}

/// Unbiased rescaling `g / K`.
pub fn ummse(g_mmse: Estimator, gain: f64) -> Result<Estimator> {
    if !(gain > 1e-12) {
        return Err(Error::DegenerateGain(gain));
    }
    if gain > 1.0 + 1e-9 {
        return Err(Error::invalid(format!("MMSE gain {gain} exceeds 1")));
    }
    Ok(g_mmse.scaled(1.0 / gain))
}
