//! Radial grids, fields and the model cusp geometry in `t = log x`.

mod grid;
mod metric;

pub use grid::{RadialField, RadialGrid, DEFAULT_NODES, DEFAULT_T_MIN, MIN_NODES};
pub use metric::{
    bdf_transform, carlson_griffiths_radial, cusp_laplacian, cusp_volume, ricci_radial,
    ricci_relative_to_self, t_derivative, BdfTransform, CarlsonGriffiths, ModelMetric,
};
