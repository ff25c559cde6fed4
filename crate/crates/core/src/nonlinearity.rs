//! The logarithmic nonlinearity `f(z) = z ln|z|`.
//!
//! `f` is continuous but not differentiable at the origin; we use the
//! convention `f(0) = 0`. The schemes never regularize it. The regularized
//! form `f_ε(z) = z ln(ε + |z|)` is kept only for diagnostics and the
//! inequality checks in [`crate::properties`].

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::grid::GridFunction;

/// `z ln|z|`, with `f(z) = 0` whenever `|z|` is below the smallest positive
/// normal double (this includes `z = 0`).
pub fn f_log(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r < f64::MIN_POSITIVE {
        Complex64::new(0.0, 0.0)
    } else {
        z * r.ln()
    }
}

/// `z ln(ε + |z|)`.
pub fn f_log_eps(z: Complex64, eps: f64) -> Result<Complex64> {
    if !(eps > 0.0) {
        return Err(invalid(format!("regularization must be positive, got {eps}")));
    }
    Ok(z * (eps + z.norm()).ln())
}

/// Energy density `F(ρ) = λ(ρ ln ρ − ρ)`, with `F(0) = 0`.
pub fn density_primitive(rho: f64, lambda: f64) -> Result<f64> {
    if rho < 0.0 || rho.is_nan() {
        return Err(invalid(format!("density must be non-negative, got {rho}")));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    Ok(lambda * (rho * rho.ln() - rho))
}

/// `f` applied at every node.
pub fn apply_f(u: &GridFunction) -> GridFunction {
    u.map(f_log)
}

/// Interaction strength and optional regularization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNonlinearity {
    lambda: f64,
    eps: f64,
}

impl LogNonlinearity {
    pub fn new(lambda: f64, eps: f64) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(invalid(format!("lambda must be finite and nonzero, got {lambda}")));
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(invalid(format!("eps must be finite and >= 0, got {eps}")));
        }
        Ok(LogNonlinearity { lambda, eps })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `f(z)` when `eps == 0`, otherwise `f_ε(z)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        if self.eps == 0.0 {
            f_log(z)
        } else {
            z * (self.eps + z.norm()).ln()
        }
    }

    /// `λ u ln|u|²`, the right-hand side of the continuous equation.
    pub fn rhs(&self, z: Complex64) -> Complex64 {
        self.eval(z) * (2.0 * self.lambda)
    }

    pub fn density(&self, rho: f64) -> Result<f64> {
        density_primitive(rho, self.lambda)
    }
}
