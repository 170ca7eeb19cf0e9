use std::f64::consts::{PI, SQRT_2};

use crate::numerics::{find_root, UniformStream};
use crate::{Error, Result};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Zero-mean Laplace law parameterized by its standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceLaw {
    sigma: f64,
}

impl LaplaceLaw {
    pub fn new(sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Rate `√2/σ` of the exponential tails.
    pub fn rate(&self) -> f64 {
        SQRT_2 / self.sigma
    }
}

/// Zero-mean Gaussian law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianLaw {
    sigma: f64,
}

impl GaussianLaw {
    pub fn new(sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Finite mixture of zero-mean Laplace laws.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceMixtureLaw {
    weights: Vec<f64>,
    sigmas: Vec<f64>,
}

impl LaplaceMixtureLaw {
    pub fn new(weights: Vec<f64>, sigmas: Vec<f64>) -> Result<Self> {
        check_mixture(&weights, &sigmas)?;
        Ok(Self { weights, sigmas })
    }

    /// Two-component impulsive-noise mixture: component 0 (weight `p0`) is the
    /// background, component 1 the impulsive part, with power ratio
    /// `r_pow = σ²_{n,0}/σ²_{n,1}` and total variance `sigma_n²`.
    pub fn two_component(sigma_n: f64, p0: f64, r_pow: f64) -> Result<Self> {
        check_sigma(sigma_n)?;
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::invalid(format!("p0 = {p0} outside [0, 1]")));
        }
        if !(r_pow > 0.0) || !r_pow.is_finite() {
            return Err(Error::invalid(format!("R_pow = {r_pow} must be positive")));
        }
        let p1 = 1.0 - p0;
        let var1 = sigma_n * sigma_n / (p0 * r_pow + p1);
        let var0 = r_pow * var1;
        Self::new(vec![p0, p1], vec![var0.sqrt(), var1.sqrt()])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    /// Rates `β_m = √2/σ_{n,m}`.
    pub fn rates(&self) -> Vec<f64> {
        self.sigmas.iter().map(|s| SQRT_2 / s).collect()
    }

    /// `σ²_{n,0}/σ²_{n,1}` for a two-component mixture.
    pub fn power_ratio(&self) -> Option<f64> {
        match self.sigmas.as_slice() {
            [s0, s1] => Some((s0 * s0) / (s1 * s1)),
            _ => None,
        }
    }
}

/// Finite mixture of zero-mean Gaussian laws.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixtureLaw {
    weights: Vec<f64>,
    sigmas: Vec<f64>,
}

impl GaussianMixtureLaw {
    pub fn new(weights: Vec<f64>, sigmas: Vec<f64>) -> Result<Self> {
        check_mixture(&weights, &sigmas)?;
        Ok(Self { weights, sigmas })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("standard deviation {sigma} must be positive and finite")))
    }
}

fn check_mixture(weights: &[f64], sigmas: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::invalid("mixture needs at least one component"));
    }
    if weights.len() != sigmas.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: sigmas.len(),
        });
    }
    if weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
        return Err(Error::invalid("mixture weights must lie in [0, 1]"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::invalid(format!("mixture weights sum to {total}, not 1")));
    }
    sigmas.iter().try_for_each(|&s| check_sigma(s))
}

/// Elementary zero-mean component shared by all built-in laws.
#[derive(Debug, Clone, Copy)]
enum Component {
    Laplace { rate: f64 },
    Gaussian { sigma: f64 },
}

impl Component {
    fn pdf(self, x: f64) -> f64 {
        match self {
            Component::Laplace { rate } => 0.5 * rate * (-rate * x.abs()).exp(),
            Component::Gaussian { sigma } => {
                let z = x / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
            }
        }
    }

    fn cdf(self, x: f64) -> f64 {
        match self {
            Component::Laplace { rate } => {
                if x < 0.0 {
                    0.5 * (rate * x).exp()
                } else {
                    1.0 - 0.5 * (-rate * x).exp()
                }
            }
            Component::Gaussian { sigma } => 0.5 * libm::erfc(-x / (sigma * SQRT_2)),
        }
    }

    // upper tail 1 - F(x), without cancellation for large x
    fn sf(self, x: f64) -> f64 {
        self.cdf(-x)
    }

    // ∫_{-∞}^{x} t f(t) dt
    fn lower_moment(self, x: f64) -> f64 {
        if x.is_infinite() {
            return 0.0;
        }
        match self {
            Component::Laplace { rate } => {
                if x <= 0.0 {
                    0.5 * (rate * x).exp() * (x - 1.0 / rate)
                } else {
                    -0.5 * (-rate * x).exp() * (x + 1.0 / rate)
                }
            }
            Component::Gaussian { sigma } => -sigma * sigma * self.pdf(x),
        }
    }

    fn variance(self) -> f64 {
        match self {
            Component::Laplace { rate } => 2.0 / (rate * rate),
            Component::Gaussian { sigma } => sigma * sigma,
        }
    }

    fn sample(self, rng: &mut UniformStream) -> f64 {
        match self {
            Component::Laplace { rate } => {
                let u = rng.next_open();
                if u < 0.5 {
                    (2.0 * u).ln() / rate
                } else {
                    -(2.0 * (1.0 - u)).ln() / rate
                }
            }
            Component::Gaussian { sigma } => {
                // Box–Muller, cosine branch only
                let u1 = rng.next_open();
                let u2 = rng.next_f64();
                sigma * (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
            }
        }
    }
}

/// Any of the built-in zero-mean symmetric laws.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Laplace(LaplaceLaw),
    LaplaceMixture(LaplaceMixtureLaw),
    Gaussian(GaussianLaw),
    GaussianMixture(GaussianMixtureLaw),
}

impl Distribution {
    fn components(&self) -> Vec<(f64, Component)> {
        match self {
            Distribution::Laplace(l) => vec![(1.0, Component::Laplace { rate: l.rate() })],
            Distribution::LaplaceMixture(m) => m
                .weights
                .iter()
                .zip(&m.sigmas)
                .map(|(&w, &s)| (w, Component::Laplace { rate: SQRT_2 / s }))
                .collect(),
            Distribution::Gaussian(g) => vec![(1.0, Component::Gaussian { sigma: g.sigma })],
            Distribution::GaussianMixture(m) => m
                .weights
                .iter()
                .zip(&m.sigmas)
                .map(|(&w, &s)| (w, Component::Gaussian { sigma: s }))
                .collect(),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.components().iter().map(|(w, c)| w * c.pdf(x)).sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        self.components().iter().map(|(w, c)| w * c.cdf(x)).sum()
    }

    /// `1 - cdf(x)`, accurate in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 0.0;
        }
        if x == f64::NEG_INFINITY {
            return 1.0;
        }
        self.components().iter().map(|(w, c)| w * c.sf(x)).sum()
    }

    /// `P{lo < X <= hi}` computed on the side of zero that avoids cancellation.
    pub fn interval_prob(&self, lo: f64, hi: f64) -> f64 {
        if lo >= 0.0 {
            self.sf(lo) - self.sf(hi)
        } else {
            self.cdf(hi) - self.cdf(lo)
        }
    }

    /// `∫_{lo}^{hi} x f(x) dx` in closed form.
    pub fn partial_first_moment(&self, lo: f64, hi: f64) -> f64 {
        self.components()
            .iter()
            .map(|(w, c)| w * (c.lower_moment(hi) - c.lower_moment(lo)))
            .sum()
    }

    /// `E{X | lo < X <= hi}`; zero when the cell carries no mass.
    pub fn conditional_mean(&self, lo: f64, hi: f64) -> f64 {
        let p = self.interval_prob(lo, hi);
        if p > 0.0 {
            self.partial_first_moment(lo, hi) / p
        } else {
            0.0
        }
    }

    pub fn mean(&self) -> f64 {
        0.0
    }

    pub fn variance(&self) -> f64 {
        self.components().iter().map(|(w, c)| w * c.variance()).sum()
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Points where the density is not smooth.
    pub fn kinks(&self) -> &'static [f64] {
        match self {
            Distribution::Laplace(_) | Distribution::LaplaceMixture(_) => &[0.0],
            _ => &[],
        }
    }

    pub fn sample(&self, rng: &mut UniformStream) -> f64 {
        self.sample_with_component(rng).0
    }

    /// Draws a value together with the index of the mixture component it came from.
    pub fn sample_with_component(&self, rng: &mut UniformStream) -> (f64, usize) {
        let comps = self.components();
        let idx = if comps.len() == 1 {
            0
        } else {
            let u = rng.next_f64();
            let mut acc = 0.0;
            comps
                .iter()
                .position(|(w, _)| {
                    acc += w;
                    u < acc
                })
                .unwrap_or(comps.len() - 1)
        };
        (comps[idx].1.sample(rng), idx)
    }

    /// Inverse cdf by bisection, `p` in `(0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!("quantile level {p} outside (0, 1)")));
        }
        if p == 0.5 {
            return Ok(0.0);
        }
        let mut hi = self.std_dev();
        while self.cdf(hi) < p.max(1.0 - p) {
            hi *= 2.0;
        }
        let lo = -hi;
        find_root(|x| self.cdf(x) - p, lo, hi, 1e-14 * hi.max(1.0))
    }

    /// The same family with every component standard deviation scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        check_sigma(factor)?;
        Ok(match self {
            Distribution::Laplace(l) => Distribution::Laplace(LaplaceLaw::new(l.sigma * factor)?),
            Distribution::LaplaceMixture(m) => Distribution::LaplaceMixture(LaplaceMixtureLaw::new(
                m.weights.clone(),
                m.sigmas.iter().map(|s| s * factor).collect(),
            )?),
            Distribution::Gaussian(g) => Distribution::Gaussian(GaussianLaw::new(g.sigma * factor)?),
            Distribution::GaussianMixture(m) => Distribution::GaussianMixture(GaussianMixtureLaw::new(
                m.weights.clone(),
                m.sigmas.iter().map(|s| s * factor).collect(),
            )?),
        })
    }

    /// The same family rescaled to standard deviation `sigma`.
    pub fn with_std_dev(&self, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        self.scaled(sigma / self.std_dev())
    }
}

impl From<LaplaceLaw> for Distribution {
    fn from(l: LaplaceLaw) -> Self {
        Distribution::Laplace(l)
    }
}

impl From<LaplaceMixtureLaw> for Distribution {
    fn from(l: LaplaceMixtureLaw) -> Self {
        Distribution::LaplaceMixture(l)
    }
}

impl From<GaussianLaw> for Distribution {
    fn from(l: GaussianLaw) -> Self {
        Distribution::Gaussian(l)
    }
}

impl From<GaussianMixtureLaw> for Distribution {
    fn from(l: GaussianMixtureLaw) -> Self {
        Distribution::GaussianMixture(l)
    }
}
