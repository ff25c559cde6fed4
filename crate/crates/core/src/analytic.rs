//! Exact Gausson solutions and the two-dimensional dynamics initial data.
//!
//! The Gausson
//!
//! ```text
//! u(x, t) = exp(−2iλωt + ω + d/2 + (λ/2)|x|²),   λ < 0,
//! ```
//!
//! solves the equation for every real `ω` in dimension `d`. Its modulus does
//! not depend on `t`, so `ω = 0` gives a stationary solution.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::stepping::Scheme;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussonParams {
    pub omega: f64,
    pub lambda: f64,
    pub dim: usize,
}

impl GaussonParams {
    pub fn new(omega: f64, lambda: f64, dim: usize) -> Result<Self> {
        if !(lambda < 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("Gausson needs lambda < 0, got {lambda}")));
        }
        if !omega.is_finite() {
            return Err(invalid(format!("omega must be finite, got {omega}")));
        }
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        Ok(GaussonParams { omega, lambda, dim })
    }

    /// `‖u‖²_{L²(ℝ^d)} = e^{2ω+d} (π/|λ|)^{d/2}`.
    pub fn mass(&self) -> f64 {
        let d = self.dim as f64;
        (2.0 * self.omega + d).exp() * (PI / self.lambda.abs()).powf(d / 2.0)
    }

    /// `∫|∇u|² = |λ| (d/2) M`.
    pub fn gradient_energy(&self) -> f64 {
        self.lambda.abs() * self.dim as f64 / 2.0 * self.mass()
    }

    /// `E = ∫|∇u|² + ∫F(|u|²) = M (|λ|d/2 + λ(2ω + d/2 − 1))`.
    pub fn energy(&self) -> f64 {
        let d = self.dim as f64;
        self.gradient_energy() + self.lambda * self.mass() * (2.0 * self.omega + d / 2.0 - 1.0)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(invalid(format!("point has {} coordinates, expected {}", x.len(), self.dim)));
        }
        Ok(())
    }

    fn profile(&self, x: &[f64], phase: f64) -> Complex64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let re = self.omega + self.dim as f64 / 2.0 + self.lambda / 2.0 * r2;
        Complex64::from_polar(re.exp(), phase)
    }
}

pub fn gausson(x: &[f64], t: f64, p: &GaussonParams) -> Result<Complex64> {
    p.check_point(x)?;
    Ok(p.profile(x, -2.0 * p.lambda * p.omega * t))
}

/// The closed form with phase `+2iλωt`. It solves the equation only when
/// `ω = 0`; kept so the residual oracle can tell the two apart.
pub fn gausson_printed_phase(x: &[f64], t: f64, p: &GaussonParams) -> Result<Complex64> {
    p.check_point(x)?;
    Ok(p.profile(x, 2.0 * p.lambda * p.omega * t))
}

/// The Gausson at time `t` on the nodes of `spec`, boundary set to zero.
pub fn exact_on_grid(p: &GaussonParams, spec: &GridSpec, t: f64) -> Result<GridFunction> {
    if spec.dim() != p.dim {
        return Err(invalid(format!("grid is {}-D, Gausson is {}-D", spec.dim(), p.dim)));
    }
    let phase = -2.0 * p.lambda * p.omega * t;
    Ok(GridFunction::from_fn(spec, |x| p.profile(x, phase)))
}

/// `|i u_t + Δu − λ u ln|u|²|` at `(x, t)`, with fourth-order central
/// differences of step `delta` in every variable.
pub fn pde_residual<F>(u: F, x: &[f64], t: f64, lambda: f64, delta: f64) -> Result<f64>
where
    F: Fn(&[f64], f64) -> Result<Complex64>,
{
    if !(delta > 0.0) {
        return Err(invalid(format!("difference step must be positive, got {delta}")));
    }
    let u0 = u(x, t)?;
    let ut = (-u(x, t + 2.0 * delta)? + u(x, t + delta)? * 8.0 - u(x, t - delta)? * 8.0
        + u(x, t - 2.0 * delta)?)
        / (12.0 * delta);
    let mut lap = Complex64::new(0.0, 0.0);
    let mut y = x.to_vec();
    for axis in 0..x.len() {
        let mut at = |s: f64| -> Result<Complex64> {
            y[axis] = x[axis] + s * delta;
            let v = u(&y, t);
            y[axis] = x[axis];
            v
        };
        lap += (-at(2.0)? + at(1.0)? * 16.0 - u0 * 30.0 + at(-1.0)? * 16.0 - at(-2.0)?)
            / (12.0 * delta * delta);
    }
    let nonlin = if u0.norm() > 0.0 {
        u0 * (lambda * u0.norm_sqr().ln())
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok((Complex64::i() * ut + lap - nonlin).norm())
}

/// Two Gaussian bumps `Σ b_j exp(i x·v_j + (λ/2)|x − x_j⁰|²)` in 2D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoGaussonParams {
    pub b1: f64,
    pub b2: f64,
    pub v1: [f64; 2],
    pub v2: [f64; 2],
    pub x1: [f64; 2],
    pub x2: [f64; 2],
    pub lambda: f64,
}

impl TwoGaussonParams {
    /// Parameter sets of Cases IV, V and VI (`λ = −1`).
    pub fn case(case: DynamicsCase) -> Result<Self> {
        let b = PI.powf(-0.25);
        let base = TwoGaussonParams {
            b1: b,
            b2: b,
            v1: [0.0, 0.0],
            v2: [0.0, 0.0],
            x1: [-2.0, 0.0],
            x2: [2.0, 0.0],
            lambda: -1.0,
        };
        match case {
            DynamicsCase::IV => Ok(base),
            DynamicsCase::V => Ok(TwoGaussonParams {
                b2: b / 1.5,
                v1: [-0.15, 0.0],
                x1: [0.0, 0.0],
                x2: [5.0, 0.0],
                ..base
            }),
            DynamicsCase::VI => Ok(TwoGaussonParams {
                v2: [0.0, 0.85],
                ..base
            }),
            other => Err(invalid(format!("case {other} is not a two-Gausson case"))),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let bump = |b: f64, v: &[f64; 2], c: &[f64; 2]| {
            let r2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
            Complex64::from_polar(b * (self.lambda / 2.0 * r2).exp(), x[0] * v[0] + x[1] * v[1])
        };
        bump(self.b1, &self.v1, &self.x1) + bump(self.b2, &self.v2, &self.x2)
    }
}

/// The six 2D dynamics scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DynamicsCase {
    /// Single Gausson `e^{−|x|²}`.
    I,
    /// Vortex pair `(x − 0.5 + iy)(x + 0.5 + iy) e^{−|x|²}`.
    II,
    /// Vortex dipole `(x − 0.5 + iy)(x + 0.5 − iy) e^{−|x|²}`.
    III,
    /// Two static Gaussons at `(∓2, 0)`.
    IV,
    /// A moving Gausson at the origin and a static one at `(5, 0)`.
    V,
    /// Gaussons at `(∓2, 0)`, the right one moving in `y`.
    VI,
}

/// Default run settings for a dynamics case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsPreset {
    pub scheme: Scheme,
    pub lambda: f64,
    pub tau: f64,
    pub spec: GridSpec,
    pub t_final: f64,
}

impl DynamicsCase {
    pub const ALL: [DynamicsCase; 6] = [
        DynamicsCase::I,
        DynamicsCase::II,
        DynamicsCase::III,
        DynamicsCase::IV,
        DynamicsCase::V,
        DynamicsCase::VI,
    ];

    pub fn preset(&self) -> DynamicsPreset {
        use DynamicsCase::*;
        let (scheme, lambda, tau, half_width, h) = match self {
            I => (Scheme::Bdf1, -10.0, 0.01, 8.0, 1.0 / 32.0),
            II | III => (Scheme::Bdf1, 1.0, 0.01, 8.0, 1.0 / 32.0),
            IV | V => (Scheme::Bdf2, -1.0, 0.001, 16.0, 1.0 / 16.0),
            VI => (Scheme::Bdf2, -1.0, 0.001, 48.0, 1.0 / 16.0),
        };
        let spec = GridSpec::cube_with_spacing(2, -half_width, half_width, h)
            .expect("preset grids are valid");
        DynamicsPreset {
            scheme,
            lambda,
            tau,
            spec,
            t_final: 1.0,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let (px, py) = (x[0], x[1]);
        let g = (-(px * px + py * py)).exp();
        match self {
            DynamicsCase::I => Complex64::new(g, 0.0),
            DynamicsCase::II => Complex64::new(px - 0.5, py) * Complex64::new(px + 0.5, py) * g,
            DynamicsCase::III => Complex64::new(px - 0.5, py) * Complex64::new(px + 0.5, -py) * g,
            two => TwoGaussonParams::case(*two)
                .expect("cases IV-VI have parameter sets")
                .eval(x),
        }
    }

    /// Samples the initial datum on `spec`, boundary set to zero.
    pub fn initial_condition(&self, spec: &GridSpec) -> Result<GridFunction> {
        if spec.dim() != 2 {
            return Err(invalid(format!("dynamics cases are 2D, grid is {}-D", spec.dim())));
        }
        Ok(GridFunction::from_fn(spec, |x| self.eval(x)))
    }
}

impl fmt::Display for DynamicsCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DynamicsCase::I => "I",
            DynamicsCase::II => "II",
            DynamicsCase::III => "III",
            DynamicsCase::IV => "IV",
            DynamicsCase::V => "V",
            DynamicsCase::VI => "VI",
        };
        f.write_str(s)
    }
}

impl FromStr for DynamicsCase {
    type Err = Error;

    /// Accepts `I`..`VI`, optionally prefixed by `case-`, any letter case.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        let t = t.strip_prefix("CASE-").unwrap_or(&t);
        DynamicsCase::ALL
            .into_iter()
            .find(|c| c.to_string() == t)
            .ok_or_else(|| invalid(format!("unknown dynamics case `{s}`")))
    }
}
