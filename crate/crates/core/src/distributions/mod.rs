//! Scalar laws and the additive observation model `y = x + n`.

mod channel;
mod laws;
mod model;

pub use channel::LaplaceChannel;
pub use laws::{Distribution, GaussianLaw, GaussianMixtureLaw, LaplaceLaw, LaplaceMixtureLaw};
pub use model::{EvalMode, ObservationModel};

use crate::numerics::UniformStream;

/// Density of `law` at `x`.
pub fn pdf(law: &Distribution, x: f64) -> f64 {
    law.pdf(x)
}

/// Cumulative distribution of `law` at `x`.
pub fn cdf(law: &Distribution, x: f64) -> f64 {
    law.cdf(x)
}

/// One draw from `law`.
pub fn sample(law: &Distribution, rng: &mut UniformStream) -> f64 {
    law.sample(rng)
}

/// `F_Y(y)` under the model.
pub fn obs_cdf(model: &ObservationModel, y: f64) -> crate::Result<f64> {
    model.obs_cdf(y)
}

/// `f_Y(y)` under the model.
pub fn obs_pdf(model: &ObservationModel, y: f64) -> crate::Result<f64> {
    model.obs_pdf(y)
}
