//! Numerical kernels shared by the estimators: adaptive quadrature on
//! (possibly unbounded) intervals, bracketed root finding, small symmetric
//! eigenproblems, SPD solves, and the seeded uniform stream.

mod linalg;
mod quadrature;
mod rng;
mod roots;

pub use linalg::{solve_spd, sym_eig, SymEigen, SymMatrix, MAX_ORDER};
pub use quadrature::{integrate, integrate_with_breaks, QuadratureSpec};
pub use rng::{rng_uniform, UniformStream};
pub use roots::find_root;
