//! Estimators on quantized observations: a partition of the observation axis
//! into `N` cells with one output level per cell.

mod design;
mod lloyd;
mod moments;
mod partition;

pub use design::{default_overload_grid, optimize_overload, uniform_partition_for_overload, OverloadDesign};
pub use lloyd::{lloyd_max, LloydMax, LLOYD_MAX_ITERATIONS, LLOYD_MAX_TOL};
pub use moments::{
    cell_moments, d_func, oq_estimator, q_mmse, q_mmse_from_moments, q_mmse_mse, s_mmse, CellMoments, QuantizedEstimator,
    QuantizerKind, EMPTY_CELL,
};
pub use partition::Partition;
