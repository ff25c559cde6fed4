//! Dense reference operators over the interior nodes, assembled entry by
//! entry from the stencil. They share no code with the spectral solver and
//! exist to check it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::grid::{GridFunction, GridSpec};

/// `tridiag(1, -2, 1) / h²` of size `(J-1) × (J-1)`.
pub fn dense_second_difference(cells: usize, h: f64) -> DMatrix<f64> {
    let n = cells - 1;
    let w = 1.0 / (h * h);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            -2.0 * w
        } else if i.abs_diff(j) == 1 {
            w
        } else {
            0.0
        }
    })
}

/// Matrix of `σI + δ²_∇` on interior nodes, listed in storage order.
pub fn dense_shifted_laplacian(spec: &GridSpec, sigma: Complex64) -> DMatrix<Complex64> {
    let shape = spec.interior_shape();
    let dim = shape.len();
    let n: usize = shape.iter().product();
    let mut strides = vec![1usize; dim];
    for a in (0..dim.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * shape[a + 1];
    }
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for row in 0..n {
        m[(row, row)] += sigma;
        for a in 0..dim {
            let w = 1.0 / (spec.spacing(a) * spec.spacing(a));
            let pos = (row / strides[a]) % shape[a];
            m[(row, row)] += -2.0 * w;
            if pos > 0 {
                m[(row, row - strides[a])] += w;
            }
            if pos + 1 < shape[a] {
                m[(row, row + strides[a])] += w;
            }
        }
    }
    m
}

/// Solves `(σI + δ²_∇) w = b` by dense LU.
pub fn dense_solve(spec: &GridSpec, sigma: Complex64, b: &GridFunction) -> Result<GridFunction> {
    if b.spec() != spec {
        return Err(invalid("right-hand side lives on a different grid"));
    }
    let m = dense_shifted_laplacian(spec, sigma);
    let rhs = DVector::from_vec(b.interior());
    let x = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| invalid("dense operator is singular"))?;
    GridFunction::from_interior(spec, x.as_slice())
}

/// `(σI + δ²_∇) w` through the dense matrix.
pub fn dense_apply(spec: &GridSpec, sigma: Complex64, w: &GridFunction) -> Result<GridFunction> {
    let m = dense_shifted_laplacian(spec, sigma);
    let y = m * DVector::from_vec(w.interior());
    GridFunction::from_interior(spec, y.as_slice())
}
