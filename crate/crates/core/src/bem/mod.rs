//! Estimators restricted to a span of basis functions,
//! `g(y) = Σ g_i u_i(y)`.

mod basis;
mod solve;

pub use basis::{assemble, BasisFunction, BemBasis};
pub use solve::{
    b_mg, b_mmse, b_msnr_eig, b_msnr_sherman, b_ummse, bem_mse, bem_snr, BemCoefficients, BemSystem, Provenance,
};
