use crate::numerics::{solve_spd, sym_eig, SymMatrix};
use crate::{Error, Result};

/// Second-order description of a basis under a model.
#[derive(Debug, Clone, PartialEq)]
pub struct BemSystem {
    theta: Vec<f64>,
    r: SymMatrix,
    sigma_x2: f64,
}

impl BemSystem {
    pub fn new(theta: Vec<f64>, r: SymMatrix, sigma_x2: f64) -> Result<Self> {
        if theta.len() != r.order() {
            return Err(Error::DimensionMismatch {
                expected: r.order(),
                got: theta.len(),
            });
        }
        if !(sigma_x2 > 0.0) || !sigma_x2.is_finite() {
            return Err(Error::invalid(format!("signal variance {sigma_x2} must be positive")));
        }
        if let Some(v) = theta.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(*v));
        }
        Ok(Self { theta, r, sigma_x2 })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn r(&self) -> &SymMatrix {
        &self.r
    }

    pub fn sigma_x2(&self) -> f64 {
        self.sigma_x2
    }

    pub fn order(&self) -> usize {
        self.theta.len()
    }

    /// `R⁻¹θ`.
    pub fn r_inv_theta(&self) -> Result<Vec<f64>> {
        solve_spd(&self.r, &self.theta)
    }

    /// `θᵀR⁻¹θ`, the part of `σ_x²` the basis can explain.
    pub fn explained(&self) -> Result<f64> {
        let v = self.r_inv_theta()?;
        Ok(dot(&self.theta, &v))
    }

    /// `σ_x² R - θθᵀ`.
    pub fn snr_matrix(&self) -> SymMatrix {
        self.r.scaled_plus_outer(self.sigma_x2, -1.0, &self.theta)
    }
}

/// Which criterion produced a coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    BMmse,
    /// Sherman-Morrison route with its free constant `c`.
    BMsnr { c: f64 },
    /// Eigen-decomposition route, normalized to unit length.
    BMsnrEig,
    BUmmse,
    /// Maximum gain at output power `power`.
    BMg { power: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BemCoefficients {
    pub g: Vec<f64>,
    pub provenance: Provenance,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn coefficients(g: Vec<f64>, provenance: Provenance) -> Result<BemCoefficients> {
    if let Some(v) = g.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(*v));
    }
    Ok(BemCoefficients { g, provenance })
}

/// `g = R⁻¹θ`.
pub fn b_mmse(sys: &BemSystem) -> Result<BemCoefficients> {
    coefficients(sys.r_inv_theta()?, Provenance::BMmse)
}

/// `g = c / (σ_x² - θᵀR⁻¹θ) · R⁻¹θ`.
pub fn b_msnr_sherman(sys: &BemSystem, c: f64) -> Result<BemCoefficients> {
    if c == 0.0 || !c.is_finite() {
        return Err(Error::invalid("the MSNR constant must be finite and nonzero"));
    }
    let v = sys.r_inv_theta()?;
    let resid = sys.sigma_x2 - dot(&sys.theta, &v);
    if resid <= 1e-14 * sys.sigma_x2 {
        return Err(Error::DegenerateResidual(resid));
    }
    let s = c / resid;
    coefficients(v.into_iter().map(|x| s * x).collect(), Provenance::BMsnr { c })
}

/// Maximizes `gᵀθθᵀg / gᵀ(σ_x²R - θθᵀ)g` through the eigen-decomposition
/// `σ_x²R - θθᵀ = UΛUᵀ`: the maximizer is `UΛ⁻¹Uᵀθ`, returned with unit
/// norm and `gᵀθ > 0`.
pub fn b_msnr_eig(sys: &BemSystem) -> Result<BemCoefficients> {
    let m = sys.snr_matrix();
    let eig = sym_eig(&m)?;
    let trace = m.trace();
    let smallest = *eig.values.last().expect("nonempty system");
    if smallest <= 1e-12 * trace.abs() || !(trace > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: smallest });
    }
    let n = sys.order();
    let mut g = vec![0.0; n];
    for (k, &lambda) in eig.values.iter().enumerate() {
        let u = eig.vector(k);
        let w = dot(&u, &sys.theta) / lambda;
        for (gi, ui) in g.iter_mut().zip(&u) {
            *gi += w * ui;
        }
    }
    let len = dot(&g, &g).sqrt();
    let sign = if dot(&g, &sys.theta) < 0.0 { -1.0 } else { 1.0 };
    if !(len > 0.0) {
        return Err(Error::DegenerateTheta(len));
    }
    coefficients(g.into_iter().map(|x| sign * x / len).collect(), Provenance::BMsnrEig)
}

/// Unit-gain estimator `σ_x² / (θᵀR⁻¹θ) · R⁻¹θ`.
pub fn b_ummse(sys: &BemSystem) -> Result<BemCoefficients> {
    let v = sys.r_inv_theta()?;
    let e = dot(&sys.theta, &v);
    if !(e > 0.0) {
        return Err(Error::DegenerateTheta(e));
    }
    let s = sys.sigma_x2 / e;
    coefficients(v.into_iter().map(|x| s * x).collect(), Provenance::BUmmse)
}

/// Largest gain at output power `P`: `√(P / θᵀR⁻¹θ) · R⁻¹θ`.
pub fn b_mg(sys: &BemSystem, power: f64) -> Result<BemCoefficients> {
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::invalid(format!("output power {power} must be positive")));
    }
    let v = sys.r_inv_theta()?;
    let e = dot(&sys.theta, &v);
    if !(e > 0.0) {
        return Err(Error::DegenerateTheta(e));
    }
    let s = (power / e).sqrt();
    coefficients(v.into_iter().map(|x| s * x).collect(), Provenance::BMg { power })
}

/// `J = σ_x² - 2gᵀθ + gᵀRg`.
pub fn bem_mse(sys: &BemSystem, g: &[f64]) -> f64 {
    sys.sigma_x2 - 2.0 * dot(g, &sys.theta) + sys.r.quad_form(g)
}

/// `γ = (gᵀθ)² / gᵀ(σ_x²R - θθᵀ)g`.
pub fn bem_snr(sys: &BemSystem, g: &[f64]) -> Result<f64> {
    let gt = dot(g, &sys.theta);
    let power = sys.r.quad_form(g);
    let den = sys.sigma_x2 * power - gt * gt;
    if !(den > 1e-14 * sys.sigma_x2 * power) {
        return Err(Error::DegenerateDenominator(den));
    }
    Ok(gt * gt / den)
}
