//! Rectangular tensor grids and complex grid functions with homogeneous
//! Dirichlet boundary values.
//!
//! A [`GridFunction`] stores every node of the lattice, boundary included,
//! in row-major order with the last axis varying fastest. Boundary entries
//! are always exactly zero, so a grid function is an element of the space
//! of lattice functions vanishing on the boundary node set.
//!
//! All reductions here run sequentially in a fixed index order, which keeps
//! results bitwise independent of the thread count.

use std::ops::{Add, Mul, Range, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Result};

pub const MAX_DIM: usize = 3;

/// Axis-aligned box `∏ (a_i, b_i)` split into `J_i` uniform cells per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    lower: [f64; MAX_DIM],
    upper: [f64; MAX_DIM],
    cells: [usize; MAX_DIM],
}

impl GridSpec {
    pub fn new(bounds: &[(f64, f64)], cells: &[usize]) -> Result<Self> {
        let dim = bounds.len();
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(invalid(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if cells.len() != dim {
            return Err(invalid(format!(
                "{} bounds but {} cell counts",
                dim,
                cells.len()
            )));
        }
        let mut spec = GridSpec {
            dim,
            lower: [0.0; MAX_DIM],
            upper: [0.0; MAX_DIM],
            cells: [0; MAX_DIM],
        };
        for (axis, (&(a, b), &j)) in bounds.iter().zip(cells).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(invalid(format!("axis {axis}: need finite a < b, got ({a}, {b})")));
            }
            if j < 2 {
                return Err(invalid(format!("axis {axis}: need at least 2 cells, got {j}")));
            }
            spec.lower[axis] = a;
            spec.upper[axis] = b;
            spec.cells[axis] = j;
        }
        Ok(spec)
    }

    /// The same interval and cell count on every axis.
    pub fn cube(dim: usize, a: f64, b: f64, cells: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(invalid(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        Self::new(&vec![(a, b); dim], &vec![cells; dim])
    }

    /// Like [`GridSpec::cube`], but picks the cell count from a target
    /// spacing. `(b - a) / h` must be an integer up to roundoff.
    pub fn cube_with_spacing(dim: usize, a: f64, b: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid(format!("spacing must be positive, got {h}")));
        }
        let ratio = (b - a) / h;
        let cells = ratio.round();
        if (ratio - cells).abs() > 1e-9 * ratio.abs().max(1.0) {
            return Err(invalid(format!(
                "spacing {h} does not divide the interval ({a}, {b})"
            )));
        }
        Self::cube(dim, a, b, cells as usize)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self, axis: usize) -> f64 {
        self.lower[axis]
    }

    pub fn upper(&self, axis: usize) -> f64 {
        self.upper[axis]
    }

    pub fn cells(&self, axis: usize) -> usize {
        self.cells[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / self.cells[axis] as f64
    }

    pub fn max_spacing(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).fold(0.0, f64::max)
    }

    /// Coordinate `a + j h` of node `j` along `axis`.
    pub fn node(&self, axis: usize, j: usize) -> f64 {
        self.lower[axis] + j as f64 * self.spacing(axis)
    }

    /// Nodes per axis, padded with 1 for unused axes.
    pub fn shape(&self) -> [usize; MAX_DIM] {
        let mut shape = [1; MAX_DIM];
        for (axis, n) in shape.iter_mut().enumerate().take(self.dim) {
            *n = self.cells[axis] + 1;
        }
        shape
    }

    pub(crate) fn strides(&self) -> [usize; MAX_DIM] {
        let shape = self.shape();
        [shape[1] * shape[2], shape[2], 1]
    }

    pub fn node_count(&self) -> usize {
        self.shape().iter().product()
    }

    /// Interior nodes per used axis (`J_i - 1`).
    pub fn interior_shape(&self) -> Vec<usize> {
        (0..self.dim).map(|a| self.cells[a] - 1).collect()
    }

    pub fn interior_count(&self) -> usize {
        self.interior_shape().iter().product()
    }

    /// `∏ h_i`, the weight of one node in every discrete integral.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    /// `|Ω|`.
    pub fn measure(&self) -> f64 {
        (0..self.dim).map(|a| self.upper[a] - self.lower[a]).product()
    }

    pub(crate) fn interior_range(&self, axis: usize) -> Range<usize> {
        if axis < self.dim {
            1..self.cells[axis]
        } else {
            0..1
        }
    }

    pub fn flat_index(&self, index: &[usize]) -> usize {
        let strides = self.strides();
        index.iter().zip(strides).map(|(i, s)| i * s).sum()
    }

    fn multi_index(&self, flat: usize) -> [usize; MAX_DIM] {
        let shape = self.shape();
        [
            flat / (shape[1] * shape[2]),
            (flat / shape[2]) % shape[1],
            flat % shape[2],
        ]
    }

    fn is_boundary_multi(&self, index: &[usize; MAX_DIM]) -> bool {
        (0..self.dim).any(|a| index[a] == 0 || index[a] == self.cells[a])
    }

    pub fn is_boundary(&self, flat: usize) -> bool {
        self.is_boundary_multi(&self.multi_index(flat))
    }

    /// Calls `f` with the flat index of every interior node, in storage order.
    pub(crate) fn for_each_interior(&self, mut f: impl FnMut(usize)) {
        let strides = self.strides();
        for i in self.interior_range(0) {
            for j in self.interior_range(1) {
                let base = i * strides[0] + j * strides[1];
                for k in self.interior_range(2) {
                    f(base + k);
                }
            }
        }
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dim {
            Err(invalid(format!("axis {axis} out of range for a {}-d grid", self.dim)))
        } else {
            Ok(())
        }
    }
}

/// A complex field on the full node lattice of a [`GridSpec`], zero on the
/// boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(spec: &GridSpec) -> Self {
        GridFunction {
            spec: *spec,
            values: vec![Complex64::new(0.0, 0.0); spec.node_count()],
        }
    }

    /// Samples `f` at interior node coordinates; boundary nodes are set to 0.
    pub fn from_fn<F>(spec: &GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let spec = *spec;
        let values = (0..spec.node_count())
            .into_par_iter()
            .map(|flat| {
                let index = spec.multi_index(flat);
                if spec.is_boundary_multi(&index) {
                    return Complex64::new(0.0, 0.0);
                }
                let mut x = [0.0; MAX_DIM];
                for a in 0..spec.dim {
                    x[a] = spec.node(a, index[a]);
                }
                f(&x[..spec.dim])
            })
            .collect();
        GridFunction { spec, values }
    }

    /// Builds a field from interior values listed in storage order.
    pub fn from_interior(spec: &GridSpec, interior: &[Complex64]) -> Result<Self> {
        if interior.len() != spec.interior_count() {
            return Err(invalid(format!(
                "expected {} interior values, got {}",
                spec.interior_count(),
                interior.len()
            )));
        }
        let mut u = GridFunction::zeros(spec);
        let mut it = interior.iter();
        spec.for_each_interior(|flat| u.values[flat] = *it.next().unwrap());
        Ok(u)
    }

    /// Builds a field from all node values. Boundary entries must be zero.
    pub fn from_values(spec: &GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.node_count() {
            return Err(invalid(format!(
                "expected {} node values, got {}",
                spec.node_count(),
                values.len()
            )));
        }
        if let Some(flat) = (0..values.len())
            .find(|&i| spec.is_boundary(i) && values[i] != Complex64::new(0.0, 0.0))
        {
            return Err(invalid(format!("nonzero value at boundary node {flat}")));
        }
        Ok(GridFunction {
            spec: *spec,
            values,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// All node values, boundary included, in storage order.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn interior(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.spec.interior_count());
        self.spec.for_each_interior(|flat| out.push(self.values[flat]));
        out
    }

    pub fn get(&self, index: &[usize]) -> Complex64 {
        self.values[self.spec.flat_index(index)]
    }

    /// Sets an interior node. Writing to a boundary node is an error.
    pub fn set(&mut self, index: &[usize], value: Complex64) -> Result<()> {
        if index.len() != self.spec.dim {
            return Err(invalid("index rank does not match grid dimension"));
        }
        for (a, &i) in index.iter().enumerate() {
            if i == 0 || i >= self.spec.cells[a] {
                return Err(invalid(format!("index {index:?} is not an interior node")));
            }
        }
        let flat = self.spec.flat_index(index);
        self.values[flat] = value;
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Elementwise map; `f(0)` must be `0` for the result to stay in the
    /// zero-boundary space, so boundary entries are forced to zero.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64 + Sync) -> GridFunction {
        let spec = self.spec;
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(i, &z)| {
                if spec.is_boundary(i) {
                    Complex64::new(0.0, 0.0)
                } else {
                    f(z)
                }
            })
            .collect();
        GridFunction { spec, values }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &GridFunction, b: Complex64) -> GridFunction {
        assert_eq!(self.spec, other.spec, "grid functions on different grids");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        GridFunction {
            spec: self.spec,
            values,
        }
    }
}

impl Add for &GridFunction {
    type Output = GridFunction;

    fn add(self, rhs: &GridFunction) -> GridFunction {
        let one = Complex64::new(1.0, 0.0);
        self.combine(one, rhs, one)
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;

    fn sub(self, rhs: &GridFunction) -> GridFunction {
        self.combine(Complex64::new(1.0, 0.0), rhs, Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &GridFunction {
    type Output = GridFunction;

    fn mul(self, rhs: Complex64) -> GridFunction {
        GridFunction {
            spec: self.spec,
            values: self.values.iter().map(|&z| z * rhs).collect(),
        }
    }
}

impl Mul<f64> for &GridFunction {
    type Output = GridFunction;

    fn mul(self, rhs: f64) -> GridFunction {
        self * Complex64::new(rhs, 0.0)
    }
}

fn same_grid(u: &GridFunction, v: &GridFunction) -> Result<()> {
    if u.spec != v.spec {
        Err(invalid("grid functions live on different grids"))
    } else {
        Ok(())
    }
}

/// `δ²` along one axis: `(u_{j+1} - 2u_j + u_{j-1}) / h²` at interior nodes.
pub fn second_difference(u: &GridFunction, axis: usize) -> Result<GridFunction> {
    let spec = u.spec;
    spec.check_axis(axis)?;
    let mut out = GridFunction::zeros(&spec);
    let stride = spec.strides()[axis];
    let inv_h2 = 1.0 / (spec.spacing(axis) * spec.spacing(axis));
    let v = &u.values;
    spec.for_each_interior(|i| {
        out.values[i] = (v[i + stride] - v[i] * 2.0 + v[i - stride]) * inv_h2;
    });
    Ok(out)
}

/// `δ²_∇ u`, the sum of [`second_difference`] over all axes.
pub fn laplacian(u: &GridFunction) -> GridFunction {
    let spec = u.spec;
    let mut out = GridFunction::zeros(&spec);
    let strides = spec.strides();
    let weights: Vec<(usize, f64)> = (0..spec.dim)
        .map(|a| (strides[a], 1.0 / (spec.spacing(a) * spec.spacing(a))))
        .collect();
    let v = &u.values;
    spec.for_each_interior(|i| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(s, w) in &weights {
            acc += (v[i + s] - v[i] * 2.0 + v[i - s]) * w;
        }
        out.values[i] = acc;
    });
    out
}

/// Forward differences `δ⁺ u_j = (u_{j+1} - u_j) / h` along one axis, on the
/// cell offsets `j = 0..J-1`. Other axes keep their full node range.
#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredField {
    spec: GridSpec,
    axis: usize,
    shape: [usize; MAX_DIM],
    values: Vec<Complex64>,
}

impl StaggeredField {
    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn shape(&self) -> [usize; MAX_DIM] {
        self.shape
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `⟨a, b⟩_h = ∏h Σ a conj(b)` over every offset.
    pub fn inner(&self, other: &StaggeredField) -> Result<Complex64> {
        if self.spec != other.spec || self.axis != other.axis {
            return Err(invalid("staggered fields on different grids or axes"));
        }
        let sum: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(sum * self.spec.cell_volume())
    }
}

pub fn forward_difference(u: &GridFunction, axis: usize) -> Result<StaggeredField> {
    let spec = u.spec;
    spec.check_axis(axis)?;
    let node_shape = spec.shape();
    let node_strides = spec.strides();
    let mut shape = node_shape;
    shape[axis] -= 1;
    let inv_h = 1.0 / spec.spacing(axis);
    let step = node_strides[axis];
    let mut values = Vec::with_capacity(shape.iter().product());
    for i in 0..shape[0] {
        for j in 0..shape[1] {
            for k in 0..shape[2] {
                let flat = i * node_strides[0] + j * node_strides[1] + k;
                values.push((u.values[flat + step] - u.values[flat]) * inv_h);
            }
        }
    }
    Ok(StaggeredField {
        spec,
        axis,
        shape,
        values,
    })
}

/// `(u, v)_h = ∏h Σ_interior u conj(v)`.
pub fn inner_product(u: &GridFunction, v: &GridFunction) -> Result<Complex64> {
    same_grid(u, v)?;
    let mut acc = Complex64::new(0.0, 0.0);
    u.spec
        .for_each_interior(|i| acc += u.values[i] * v.values[i].conj());
    Ok(acc * u.spec.cell_volume())
}

/// `⟨δ⁺_∇u, δ⁺_∇v⟩_h`, summed over axes.
pub fn gradient_inner(u: &GridFunction, v: &GridFunction) -> Result<Complex64> {
    same_grid(u, v)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for axis in 0..u.spec.dim {
        acc += forward_difference(u, axis)?.inner(&forward_difference(v, axis)?)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    /// `(u, u)_h^{1/2}`.
    L2,
    /// `(∏h Σ |u|^r)^{1/r}`; a quasi-norm when `0 < r < 1`.
    Lr(f64),
    /// `|u|₁`, forward differences over offsets `0..J-1` on every axis.
    H1Semi,
    /// `|u|₂ = ‖δ²_∇ u‖`.
    H2Semi,
    /// Max modulus over interior nodes.
    LInf,
}

impl FromStr for NormKind {
    type Err = crate::Error;

    /// Accepts `l2`, `linf`, `h1`, `h2`, `l<r>` (e.g. `l4`) and `lr:<r>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "l2" => return Ok(NormKind::L2),
            "linf" => return Ok(NormKind::LInf),
            "h1" => return Ok(NormKind::H1Semi),
            "h2" => return Ok(NormKind::H2Semi),
            _ => {}
        }
        let r = s
            .strip_prefix("lr:")
            .or_else(|| s.strip_prefix('l'))
            .and_then(|t| t.parse::<f64>().ok());
        match r {
            Some(r) => Ok(NormKind::Lr(r)),
            None => Err(invalid(format!("unknown norm kind `{s}`"))),
        }
    }
}

pub fn norm(u: &GridFunction, kind: NormKind) -> Result<f64> {
    let spec = u.spec;
    let vol = spec.cell_volume();
    match kind {
        NormKind::L2 => {
            let mut acc = 0.0;
            spec.for_each_interior(|i| acc += u.values[i].norm_sqr());
            Ok((acc * vol).sqrt())
        }
        NormKind::Lr(r) => {
            if !(r > 0.0 && r.is_finite()) {
                return Err(invalid(format!("L^r exponent must be positive, got {r}")));
            }
            let mut acc = 0.0;
            spec.for_each_interior(|i| acc += u.values[i].norm().powf(r));
            Ok((acc * vol).powf(1.0 / r))
        }
        NormKind::H1Semi => Ok(gradient_inner(u, u)?.re.max(0.0).sqrt()),
        NormKind::H2Semi => norm(&laplacian(u), NormKind::L2),
        NormKind::LInf => {
            let mut m: f64 = 0.0;
            spec.for_each_interior(|i| m = m.max(u.values[i].norm()));
            Ok(m)
        }
    }
}
