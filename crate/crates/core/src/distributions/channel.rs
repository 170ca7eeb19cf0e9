use crate::{Error, Result};

/// Relative gap `|α - β_m|/α` below which the closed forms are refused.
pub(crate) const DEGENERACY_TOL: f64 = 1e-6;

/// Closed-form quantities for a Laplace signal (rate `α`) in Laplace-mixture
/// noise (weights `p_m`, rates `β_m`).
///
/// All expressions are derived for `y > 0` and extended by symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceChannel {
    alpha: f64,
    terms: Vec<(f64, f64)>,
}

impl LaplaceChannel {
    /// `terms` are `(p_m, β_m)` pairs. Zero-weight components are dropped.
    pub fn new(alpha: f64, terms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::invalid(format!("signal rate {alpha} must be positive")));
        }
        let terms: Vec<(f64, f64)> = terms.into_iter().filter(|&(p, _)| p > 0.0).collect();
        if terms.is_empty() {
            return Err(Error::invalid("noise mixture has no weighted component"));
        }
        for &(_, beta) in &terms {
            if !(beta > 0.0) || !beta.is_finite() {
                return Err(Error::invalid(format!("noise rate {beta} must be positive")));
            }
            if (alpha - beta).abs() / alpha < DEGENERACY_TOL {
                return Err(Error::NearDegenerateRates { alpha, beta });
            }
        }
        Ok(Self { alpha, terms })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(p_m, β_m)` pairs with positive weight.
    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    /// Smallest exponential rate present; used to rescale ratios of sums of
    /// exponentials so they survive large `|y|`.
    pub(crate) fn slowest_rate(&self) -> f64 {
        self.terms.iter().fold(self.alpha, |m, &(_, b)| m.min(b))
    }

    /// `f_Y(y) = Σ p_m C_{2,m} (α e^{-β_m|y|} - β_m e^{-α|y|})`.
    pub fn pdf(&self, y: f64) -> f64 {
        self.pdf_scaled(y.abs(), 0.0)
    }

    /// `f_Y(|y|) e^{shift |y|}`.
    pub(crate) fn pdf_scaled(&self, y: f64, shift: f64) -> f64 {
        let a = self.alpha;
        let ea = (-(a - shift) * y).exp();
        self.terms
            .iter()
            .map(|&(p, b)| {
                let c2 = a * b / (2.0 * (a * a - b * b));
                p * c2 * (a * (-(b - shift) * y).exp() - b * ea)
            })
            .sum()
    }

    /// Cross density `∫ x f_X(x) f_N(y - x) dx`; odd in `y`. For `y > 0` it is
    /// `Σ p_m [C_{1,m}(e^{-β_m y} - e^{-α y}) - C_{2,m} β_m y e^{-α y}]`.
    pub fn cross_density(&self, y: f64) -> f64 {
        let v = self.cross_density_scaled(y.abs(), 0.0);
        if y < 0.0 {
            -v
        } else {
            v
        }
    }

    /// Cross density at `|y|` times `e^{shift |y|}`.
    pub(crate) fn cross_density_scaled(&self, y: f64, shift: f64) -> f64 {
        let a = self.alpha;
        let ea = (-(a - shift) * y).exp();
        self.terms
            .iter()
            .map(|&(p, b)| {
                let d = a * a - b * b;
                let c1 = a * a * b * b / (d * d);
                let c2 = a * b / (2.0 * d);
                p * (c1 * ((-(b - shift) * y).exp() - ea) - c2 * b * y * ea)
            })
            .sum()
    }

    /// `D(y) = ∫ x f_X(x) F_N(y - x) dx`. For `y > 0`
    ///
    /// `D(y) = Σ p_m β_m²(3α² - β_m²) e^{-αy} / (2α(α² - β_m²)²)
    ///       - Σ p_m α²β_m e^{-β_m y} / (α² - β_m²)²
    ///       + Σ p_m β_m² y e^{-αy} / (2(α² - β_m²))`
    ///
    /// and `D(-y) = D(y)`: with `x` and `n` symmetric, `D(-y) = -E{x 1(n > y + x)}`
    /// maps onto `D(y) = -E{x 1(n > y - x)}` under `x -> -x`.
    pub fn d(&self, y: f64) -> f64 {
        if y.is_infinite() {
            return 0.0;
        }
        let y = y.abs();
        let a = self.alpha;
        let ea = (-a * y).exp();
        self.terms
            .iter()
            .map(|&(p, b)| {
                let d = a * a - b * b;
                p * (b * b * (3.0 * a * a - b * b) * ea / (2.0 * a * d * d) - a * a * b * (-b * y).exp() / (d * d)
                    + b * b * y * ea / (2.0 * d))
            })
            .sum()
    }

    /// `1 - F_Y(y)` for `y >= 0`:
    /// `Σ p_m (α² e^{-β_m y} - β_m² e^{-α y}) / (2(α² - β_m²))`.
    fn upper_tail(&self, y: f64) -> f64 {
        let a = self.alpha;
        let ea = (-a * y).exp();
        self.terms
            .iter()
            .map(|&(p, b)| p * (a * a * (-b * y).exp() - b * b * ea) / (2.0 * (a * a - b * b)))
            .sum()
    }

    pub fn cdf(&self, y: f64) -> f64 {
        if y >= 0.0 {
            1.0 - self.upper_tail(y)
        } else {
            self.upper_tail(-y)
        }
    }

    pub fn sf(&self, y: f64) -> f64 {
        if y >= 0.0 {
            self.upper_tail(y)
        } else {
            1.0 - self.upper_tail(-y)
        }
    }
}
