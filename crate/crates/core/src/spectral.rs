//! Discrete sine transforms and the shifted Dirichlet Laplacian solve.
//!
//! The 1D operator `δ²` on `J - 1` interior nodes is the tridiagonal matrix
//! `A = tridiag(1, -2, 1) / h²`. Its eigenpairs are
//!
//! ```text
//!   v_k[j] = sin(kπj/J),    λ_k = -(4/h²) sin²(kπ/(2J)),    k, j = 1..J-1,
//! ```
//!
//! so on a tensor grid `σI + δ²_∇` is diagonal in the product sine basis
//! with entries `σ + Σ_axes λ_k`.
//!
//! Normalization: [`SineTransform::forward`] computes the plain sum
//! `c_k = Σ_j x_j sin(kπj/J)`; the inverse is the same sum scaled by `2/J`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Error, Result};
use crate::grid::{laplacian, norm, GridFunction, GridSpec, NormKind};

/// Smallest cell count that goes through the FFT; below it the `O(J²)`
/// summation is used.
pub const FFT_MIN_CELLS: usize = 64;

/// Multipliers `|σ + Σλ|` below this are treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-300;

/// Multipliers within this many ulps of `|σ| + |Σλ|` are also singular: the
/// computed sum cannot be told apart from zero.
pub const SINGULAR_ULPS: f64 = 8.0;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

enum Kernel {
    /// `sines[m] = sin(πm/J)` for `m = 0..2J`.
    Direct { sines: Vec<f64> },
    /// Odd extension to length `2J`, then one complex FFT.
    Fft {
        fft: Arc<dyn Fft<f64>>,
        scratch_len: usize,
    },
}

/// DST-I on lines of length `J - 1`.
pub struct SineTransform {
    cells: usize,
    kernel: Kernel,
}

/// Per-thread scratch space for [`SineTransform::forward_in_place`].
pub struct SineWorkspace {
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SineTransform {
    /// Picks the FFT path for `cells >= FFT_MIN_CELLS`.
    pub fn new(cells: usize) -> Result<Self> {
        if cells >= FFT_MIN_CELLS {
            Self::with_fft(cells)
        } else {
            Self::direct(cells)
        }
    }

    pub fn direct(cells: usize) -> Result<Self> {
        check_cells(cells)?;
        let sines = (0..2 * cells)
            .map(|m| (std::f64::consts::PI * m as f64 / cells as f64).sin())
            .collect();
        Ok(SineTransform {
            cells,
            kernel: Kernel::Direct { sines },
        })
    }

    pub fn with_fft(cells: usize) -> Result<Self> {
        check_cells(cells)?;
        let fft = FftPlanner::new().plan_fft_forward(2 * cells);
        let scratch_len = fft.get_inplace_scratch_len();
        Ok(SineTransform {
            cells,
            kernel: Kernel::Fft { fft, scratch_len },
        })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Line length `J - 1`.
    pub fn len(&self) -> usize {
        self.cells - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn uses_fft(&self) -> bool {
        matches!(self.kernel, Kernel::Fft { .. })
    }

    /// Factor that turns the forward sum into its inverse.
    pub fn inverse_scale(&self) -> f64 {
        2.0 / self.cells as f64
    }

    pub fn workspace(&self) -> SineWorkspace {
        let scratch_len = match &self.kernel {
            Kernel::Direct { .. } => 0,
            Kernel::Fft { scratch_len, .. } => *scratch_len,
        };
        SineWorkspace {
            buf: vec![ZERO; 2 * self.cells],
            scratch: vec![ZERO; scratch_len],
        }
    }

    /// Unnormalized forward transform of `line` (length `J - 1`), in place.
    pub fn forward_in_place(&self, line: &mut [Complex64], ws: &mut SineWorkspace) {
        debug_assert_eq!(line.len(), self.len());
        let j_cells = self.cells;
        match &self.kernel {
            Kernel::Direct { sines } => {
                let out = &mut ws.buf[..line.len()];
                let period = 2 * j_cells;
                for (k, o) in out.iter_mut().enumerate() {
                    let k = k + 1;
                    let mut acc = ZERO;
                    let mut m = k;
                    for &x in line.iter() {
                        acc += x * sines[m];
                        m += k;
                        if m >= period {
                            m -= period;
                        }
                    }
                    *o = acc;
                }
                line.copy_from_slice(out);
            }
            Kernel::Fft { fft, .. } => {
                let buf = &mut ws.buf;
                buf[0] = ZERO;
                buf[j_cells] = ZERO;
                for (j, &x) in line.iter().enumerate() {
                    buf[j + 1] = x;
                    buf[2 * j_cells - 1 - j] = -x;
                }
                fft.process_with_scratch(buf, &mut ws.scratch);
                // Y_k = -2i Σ x_j sin(πjk/J)
                for (k, out) in line.iter_mut().enumerate() {
                    let y = buf[k + 1];
                    *out = Complex64::new(-0.5 * y.im, 0.5 * y.re);
                }
            }
        }
    }

    pub fn forward(&self, line: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(line.len())?;
        let mut out = line.to_vec();
        self.forward_in_place(&mut out, &mut self.workspace());
        Ok(out)
    }

    pub fn inverse(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = self.forward(coeffs)?;
        let s = self.inverse_scale();
        out.iter_mut().for_each(|z| *z *= s);
        Ok(out)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            Err(invalid(format!(
                "sine transform for {} cells expects length {}, got {len}",
                self.cells,
                self.len()
            )))
        } else {
            Ok(())
        }
    }
}

fn check_cells(cells: usize) -> Result<()> {
    if cells < 2 {
        Err(invalid(format!("need at least 2 cells, got {cells}")))
    } else {
        Ok(())
    }
}

fn cells_for_line(len: usize) -> Result<usize> {
    if len == 0 {
        Err(invalid("sine transform of an empty line"))
    } else {
        Ok(len + 1)
    }
}

/// `c_k = Σ_j line[j] sin(kπj/J)` with `J = line.len() + 1`.
pub fn dst_forward(line: &[Complex64]) -> Result<Vec<Complex64>> {
    SineTransform::new(cells_for_line(line.len())?)?.forward(line)
}

/// Inverse of [`dst_forward`].
pub fn dst_inverse(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    SineTransform::new(cells_for_line(coeffs.len())?)?.inverse(coeffs)
}

/// `λ_k = -(4/h²) sin²(kπ/(2J))` for `k = 1..J-1`.
pub fn eigenvalues(cells: usize, h: f64) -> Result<Vec<f64>> {
    check_cells(cells)?;
    if !(h > 0.0) {
        return Err(invalid(format!("spacing must be positive, got {h}")));
    }
    Ok((1..cells)
        .map(|k| {
            let s = (k as f64 * std::f64::consts::PI / (2.0 * cells as f64)).sin();
            -4.0 / (h * h) * s * s
        })
        .collect())
}

/// Applies `t` along `axis` of a row-major array of the given shape.
fn transform_axis(data: &mut [Complex64], shape: &[usize], axis: usize, t: &SineTransform) {
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    if inner == 1 {
        data.par_chunks_mut(n)
            .for_each_init(|| t.workspace(), |ws, line| t.forward_in_place(line, ws));
        return;
    }
    // Strided axis: gather lines into a contiguous buffer, transform, scatter.
    let mut lines = vec![ZERO; data.len()];
    let src: &[Complex64] = data;
    lines
        .par_chunks_mut(n)
        .enumerate()
        .for_each_init(
            || t.workspace(),
            |ws, (l, line)| {
                let base = (l / inner) * n * inner + l % inner;
                for (j, x) in line.iter_mut().enumerate() {
                    *x = src[base + j * inner];
                }
                t.forward_in_place(line, ws);
            },
        );
    data.par_chunks_mut(inner).enumerate().for_each(|(row, chunk)| {
        let (o, j) = (row / n, row % n);
        for (i, x) in chunk.iter_mut().enumerate() {
            *x = lines[(o * inner + i) * n + j];
        }
    });
}

/// Solver for `(σI + δ²_∇) w = b` on a fixed grid, `w` zero on the boundary.
pub struct ShiftedLaplacian {
    spec: GridSpec,
    shape: Vec<usize>,
    transforms: Vec<SineTransform>,
    /// `Σ_axes λ_k` per interior node, storage order.
    eigen_sum: Vec<f64>,
    scale: f64,
}

impl ShiftedLaplacian {
    pub fn new(spec: &GridSpec) -> Result<Self> {
        let dim = spec.dim();
        let shape = spec.interior_shape();
        let transforms = (0..dim)
            .map(|a| SineTransform::new(spec.cells(a)))
            .collect::<Result<Vec<_>>>()?;
        let axis_eigs = (0..dim)
            .map(|a| eigenvalues(spec.cells(a), spec.spacing(a)))
            .collect::<Result<Vec<_>>>()?;
        let total: usize = shape.iter().product();
        let mut eigen_sum = vec![0.0; total];
        for (flat, e) in eigen_sum.iter_mut().enumerate() {
            let mut rem = flat;
            for a in (0..dim).rev() {
                *e += axis_eigs[a][rem % shape[a]];
                rem /= shape[a];
            }
        }
        let scale = transforms.iter().map(|t| t.inverse_scale()).product();
        Ok(ShiftedLaplacian {
            spec: *spec,
            shape,
            transforms,
            eigen_sum,
            scale,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    fn mode_of(&self, flat: usize) -> Vec<usize> {
        let mut mode = vec![0; self.shape.len()];
        let mut rem = flat;
        for a in (0..self.shape.len()).rev() {
            mode[a] = rem % self.shape[a] + 1;
            rem /= self.shape[a];
        }
        mode
    }

    pub fn solve(&self, sigma: Complex64, b: &GridFunction) -> Result<GridFunction> {
        if *b.spec() != self.spec {
            return Err(invalid("right-hand side lives on a different grid"));
        }
        if let Some((flat, m)) = self
            .eigen_sum
            .iter()
            .map(|&e| {
                let floor = SINGULAR_THRESHOLD.max(SINGULAR_ULPS * f64::EPSILON * (sigma.norm() + e.abs()));
                ((sigma + e).norm(), floor)
            })
            .enumerate()
            .find(|&(_, (m, floor))| !(m >= floor))
            .map(|(flat, (m, _))| (flat, m))
        {
            return Err(Error::SingularMode {
                mode: self.mode_of(flat),
                magnitude: m,
            });
        }
        let mut data = b.interior();
        for (a, t) in self.transforms.iter().enumerate() {
            transform_axis(&mut data, &self.shape, a, t);
        }
        let scale = self.scale;
        data.par_iter_mut()
            .zip(self.eigen_sum.par_iter())
            .for_each(|(z, &e)| *z = *z * scale / (sigma + e));
        for (a, t) in self.transforms.iter().enumerate() {
            transform_axis(&mut data, &self.shape, a, t);
        }
        GridFunction::from_interior(&self.spec, &data)
    }

    /// `σw + δ²_∇ w`.
    pub fn apply(&self, sigma: Complex64, w: &GridFunction) -> GridFunction {
        laplacian(w).combine(Complex64::new(1.0, 0.0), w, sigma)
    }

    /// `‖σw + δ²_∇w − b‖ / max(1, ‖b‖)`.
    pub fn relative_residual(&self, sigma: Complex64, w: &GridFunction, b: &GridFunction) -> Result<f64> {
        let r = &self.apply(sigma, w) - b;
        Ok(norm(&r, NormKind::L2)? / norm(b, NormKind::L2)?.max(1.0))
    }
}

/// One-off solve of `(σI + δ²_∇) w = b`.
pub fn solve_shifted_laplacian(sigma: Complex64, b: &GridFunction) -> Result<GridFunction> {
    ShiftedLaplacian::new(b.spec())?.solve(sigma, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_line(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    /// Reference `Σ_j x_j sin(kπj/J)` straight from the definition.
    fn direct_sum(x: &[Complex64]) -> Vec<Complex64> {
        let j_cells = x.len() + 1;
        (1..j_cells)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, &v)| v * (PI * (k * (j + 1)) as f64 / j_cells as f64).sin())
                    .sum()
            })
            .collect()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn eigenvector_maps_to_scaled_delta() {
        for cells in [9, 16, 100] {
            let m = 3;
            let v: Vec<_> = (1..cells)
                .map(|j| c((m as f64 * PI * j as f64 / cells as f64).sin(), 0.0))
                .collect();
            let coeffs = dst_forward(&v).unwrap();
            for (k, z) in coeffs.iter().enumerate() {
                let expect = if k + 1 == m { cells as f64 / 2.0 } else { 0.0 };
                assert!((z - c(expect, 0.0)).norm() < 1e-12, "{cells} {k} {z}");
            }
            let back = dst_inverse(&coeffs).unwrap();
            assert!(max_diff(&back, &v) < 1e-13);
        }
    }

    #[test]
    fn inverse_of_delta_is_scaled_mode() {
        let cells = 12;
        let k = 5;
        let mut delta = vec![c(0.0, 0.0); cells - 1];
        delta[k - 1] = c(1.0, 0.0);
        let line = dst_inverse(&delta).unwrap();
        for (j, z) in line.iter().enumerate() {
            let expect = 2.0 / cells as f64 * (k as f64 * PI * (j + 1) as f64 / cells as f64).sin();
            assert!((z.re - expect).abs() < 1e-15 && z.im == 0.0);
        }
    }

    #[test]
    fn zero_line_and_length_errors() {
        assert!(dst_forward(&vec![c(0.0, 0.0); 15])
            .unwrap()
            .iter()
            .all(|z| *z == c(0.0, 0.0)));
        assert!(dst_forward(&[]).is_err());
        let t = SineTransform::new(10).unwrap();
        assert!(t.forward(&[c(1.0, 0.0); 8]).is_err());
        assert!(t.inverse(&[c(1.0, 0.0); 10]).is_err());
        assert!(SineTransform::new(1).is_err());
    }

    #[test]
    fn roundtrip_and_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for cells in [2, 3, 16, 63, 64, 65, 128, 250] {
            let x = random_line(cells - 1, &mut rng);
            let fwd = dst_forward(&x).unwrap();
            let reference = direct_sum(&x);
            let scale = cells as f64;
            assert!(max_diff(&fwd, &reference) <= 1e-13 * scale, "{cells}");
            assert!(max_diff(&dst_inverse(&fwd).unwrap(), &x) <= 1e-13, "{cells}");
        }
    }

    #[test]
    fn fft_and_direct_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for cells in [64, 96, 257] {
            let x = random_line(cells - 1, &mut rng);
            let a = SineTransform::direct(cells).unwrap().forward(&x).unwrap();
            let fast = SineTransform::with_fft(cells).unwrap();
            assert!(fast.uses_fft());
            let b = fast.forward(&x).unwrap();
            assert!(max_diff(&a, &b) < 1e-12 * cells as f64);
        }
        assert!(!SineTransform::new(FFT_MIN_CELLS - 1).unwrap().uses_fft());
        assert!(SineTransform::new(FFT_MIN_CELLS).unwrap().uses_fft());
    }

    #[test]
    fn linearity_of_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (a, b) = (c(0.3, -1.2), c(-2.0, 0.5));
        let c1 = random_line(40, &mut rng);
        let c2 = random_line(40, &mut rng);
        let mix: Vec<_> = c1.iter().zip(&c2).map(|(x, y)| a * x + b * y).collect();
        let lhs = dst_inverse(&mix).unwrap();
        let i1 = dst_inverse(&c1).unwrap();
        let i2 = dst_inverse(&c2).unwrap();
        let rhs: Vec<_> = i1.iter().zip(&i2).map(|(x, y)| a * x + b * y).collect();
        assert!(max_diff(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn transform_norm_relation() {
        // Σ|c_k|² = (J/2) Σ|x_j|² for the unnormalized transform
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for cells in [5, 32, 128] {
            let x = random_line(cells - 1, &mut rng);
            let cx = direct_sum(&x);
            let lhs: f64 = cx.iter().map(|z| z.norm_sqr()).sum();
            let rhs: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>() * cells as f64 / 2.0;
            assert!((lhs - rhs).abs() < 1e-12 * rhs);
            let fast: f64 = dst_forward(&x).unwrap().iter().map(|z| z.norm_sqr()).sum();
            assert!((fast - rhs).abs() < 1e-12 * rhs);
        }
    }

    #[test]
    fn eigenvalue_values() {
        let h = 0.25;
        let e2 = eigenvalues(2, h).unwrap();
        assert_eq!(e2.len(), 1);
        assert!((e2[0] + 2.0 / (h * h)).abs() < 1e-12);
        let e3 = eigenvalues(3, h).unwrap();
        assert!((e3[0] + 1.0 / (h * h)).abs() < 1e-12);
        assert!((e3[1] + 3.0 / (h * h)).abs() < 1e-12);
        assert!(eigenvalues(1, h).is_err());
        assert!(eigenvalues(4, 0.0).is_err());
        let e = eigenvalues(40, 0.1).unwrap();
        assert!(e.iter().all(|&l| l < 0.0));
        assert!(e.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn eigenpairs_match_dense_operator() {
        let cells = 9;
        let h = 0.37;
        let a = oracle::dense_second_difference(cells, h);
        let eigs = eigenvalues(cells, h).unwrap();
        for k in 1..cells {
            let v = nalgebra::DVector::from_iterator(
                cells - 1,
                (1..cells).map(|j| (k as f64 * PI * j as f64 / cells as f64).sin()),
            );
            let r = &a * &v - &v * eigs[k - 1];
            assert!(r.amax() <= 1e-12 * 4.0 / (h * h), "{k}");
        }
    }

    #[test]
    fn printed_eigenvalue_formula_fails_dense_check() {
        // -4 sin(kπh/2)/h² on (-1, 1) with h = 2/J
        let cells = 9;
        let h = 2.0 / cells as f64;
        let a = oracle::dense_second_difference(cells, h);
        let k = 2;
        let printed = -4.0 * (k as f64 * PI * h / 2.0).sin() / (h * h);
        let v = nalgebra::DVector::from_iterator(
            cells - 1,
            (1..cells).map(|j| (k as f64 * PI * j as f64 / cells as f64).sin()),
        );
        let r = &a * &v - &v * printed;
        assert!(r.amax() > 1e-3);
    }

    #[test]
    fn solve_trivial_cases() {
        let s = GridSpec::cube(2, -1.0, 1.0, 8).unwrap();
        let z = GridFunction::zeros(&s);
        assert_eq!(solve_shifted_laplacian(c(0.0, 5.0), &z).unwrap(), z);

        let s1 = GridSpec::new(&[(0.0, 0.5)], &[2]).unwrap();
        let h = s1.spacing(0);
        let sigma = c(0.7, 3.0);
        let bval = c(1.5, -0.25);
        let mut b = GridFunction::zeros(&s1);
        b.set(&[1], bval).unwrap();
        let w = solve_shifted_laplacian(sigma, &b).unwrap();
        let expect = bval / (sigma - 2.0 / (h * h));
        assert!((w.get(&[1]) - expect).norm() < 1e-15);
    }

    #[test]
    fn singular_multiplier_is_reported() {
        let s = GridSpec::new(&[(0.0, 0.5)], &[2]).unwrap();
        let h = s.spacing(0);
        let b = GridFunction::from_fn(&s, |_| c(1.0, 0.0));
        match solve_shifted_laplacian(c(2.0 / (h * h), 0.0), &b) {
            Err(Error::SingularMode { mode, .. }) => assert_eq!(mode, vec![1]),
            other => panic!("expected singular mode, got {other:?}"),
        }
        let other = GridSpec::cube(1, 0.0, 1.0, 5).unwrap();
        let solver = ShiftedLaplacian::new(&other).unwrap();
        assert!(solver.solve(c(0.0, 1.0), &b).is_err());
    }

    #[test]
    fn solve_matches_dense_direct_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let s = GridSpec::new(&[(-1.0, 1.0), (0.0, 3.0)], &[9, 9]).unwrap();
        let interior = random_line(s.interior_count(), &mut rng);
        let b = GridFunction::from_interior(&s, &interior).unwrap();
        let sigma = c(0.0, 100.0);
        let w = solve_shifted_laplacian(sigma, &b).unwrap();
        let dense = oracle::dense_solve(&s, sigma, &b).unwrap();
        let rel = norm(&(&w - &dense), NormKind::L2).unwrap() / norm(&dense, NormKind::L2).unwrap();
        assert!(rel < 1e-10, "{rel}");
    }

    #[test]
    fn residual_contract_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for case in 0..100 {
            let dim = 1 + case % 2;
            let cells: Vec<usize> = (0..dim)
                .map(|_| if dim == 1 { rng.gen_range(2..300) } else { rng.gen_range(2..80) })
                .collect();
            let bounds: Vec<(f64, f64)> = (0..dim)
                .map(|_| {
                    let a = rng.gen_range(-10.0..0.0);
                    (a, a + rng.gen_range(0.5..20.0))
                })
                .collect();
            let s = GridSpec::new(&bounds, &cells).unwrap();
            let sigma = c(rng.gen_range(-1e3..1e3), rng.gen_range(1.0..1e4));
            let b = GridFunction::from_interior(&s, &random_line(s.interior_count(), &mut rng)).unwrap();
            let solver = ShiftedLaplacian::new(&s).unwrap();
            let w = solver.solve(sigma, &b).unwrap();
            let r = solver.relative_residual(sigma, &w, &b).unwrap();
            assert!(r <= 1e-10, "case {case}: {r}");
        }
    }

    #[test]
    fn three_dimensional_solve_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let s = GridSpec::new(&[(0.0, 1.0), (0.0, 2.0), (-1.0, 1.0)], &[5, 7, 6]).unwrap();
        let b = GridFunction::from_interior(&s, &random_line(s.interior_count(), &mut rng)).unwrap();
        let sigma = c(3.0, 2.0);
        let w = solve_shifted_laplacian(sigma, &b).unwrap();
        let dense = oracle::dense_solve(&s, sigma, &b).unwrap();
        let rel = norm(&(&w - &dense), NormKind::L2).unwrap() / norm(&dense, NormKind::L2).unwrap();
        assert!(rel < 1e-10, "{rel}");
    }

    #[test]
    fn solve_is_thread_count_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let s = GridSpec::cube(2, -3.0, 3.0, 96).unwrap();
        let b = GridFunction::from_interior(&s, &random_line(s.interior_count(), &mut rng)).unwrap();
        let sigma = c(0.0, 40.0);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let w1 = one.install(|| solve_shifted_laplacian(sigma, &b).unwrap());
        let w4 = many.install(|| solve_shifted_laplacian(sigma, &b).unwrap());
        assert_eq!(w1, w4);
    }

    #[test]
    fn solve_cost_scales_like_n_log_n() {
        use std::time::Instant;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut best = |cells: usize| {
            let s = GridSpec::cube(1, 0.0, 1.0, cells).unwrap();
            let solver = ShiftedLaplacian::new(&s).unwrap();
            let b = GridFunction::from_interior(&s, &random_line(s.interior_count(), &mut rng)).unwrap();
            let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            pool.install(|| {
                (0..30)
                    .map(|_| {
                        let t = Instant::now();
                        std::hint::black_box(solver.solve(c(0.0, 10.0), &b).unwrap());
                        t.elapsed().as_secs_f64()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
        };
        let t1 = best(1 << 14);
        let t2 = best(1 << 15);
        assert!(t2 / t1 < 2.5, "ratio {}", t2 / t1);
    }
}
