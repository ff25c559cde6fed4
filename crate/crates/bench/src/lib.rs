//! Benchmark fixtures shared by the criterion targets.

use logse_core::analytic::exact_on_grid;
use logse_core::{GaussonParams, GridFunction, GridSpec};

/// Square `[-5, 5]^2` with `cells` cells per axis.
pub fn square(cells: usize) -> GridSpec {
    GridSpec::cube(2, -5.0, 5.0, cells).expect("valid grid")
}

/// Stationary Gausson (`omega = 0`, `lambda = -1`) sampled on `spec`.
pub fn gausson_field(spec: &GridSpec) -> GridFunction {
    let g = GaussonParams::new(0.0, -1.0, spec.dim()).expect("valid parameters");
    exact_on_grid(&g, spec, 0.0).expect("finite samples")
}
